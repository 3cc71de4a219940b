#include "covis/tensor.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace covis {

int64_t dim_product(const std::vector<int>& dims) {
    std::int64_t n = 1;
    for (int d : dims) n *= d;
    return n;
}

Tensor::Tensor(std::initializer_list<int> d, std::vector<float> values)
    : dims(d), data(std::move(values)) {
    validate();
}

Tensor Tensor::zeros(std::initializer_list<int> d) {
    return zeros(std::vector<int>(d));
}

Tensor Tensor::zeros(const std::vector<int>& d) {
    Tensor t;
    t.dims = d;
    if (t.ndim() < 1 || t.ndim() > 4)
        throw std::invalid_argument("tensor ndim must be 1..4");
    for (int e : d)
        if (e < 1) throw std::invalid_argument("tensor extents must be >= 1");
    t.data.assign(static_cast<std::size_t>(dim_product(d)), 0.0f);
    return t;
}

std::int64_t Tensor::size() const { return dim_product(dims); }

float& Tensor::at(int c, int y, int x) {
    return data[(static_cast<std::size_t>(c) * dims[1] + y) * dims[2] + x];
}

float Tensor::at(int c, int y, int x) const {
    return data[(static_cast<std::size_t>(c) * dims[1] + y) * dims[2] + x];
}

float& Tensor::at4(int o, int c, int y, int x) {
    return data[((static_cast<std::size_t>(o) * dims[1] + c) * dims[2] + y) * dims[3] + x];
}

float Tensor::at4(int o, int c, int y, int x) const {
    return data[((static_cast<std::size_t>(o) * dims[1] + c) * dims[2] + y) * dims[3] + x];
}

MapMat2f Tensor::channel(int c) {
    return MapMat2f(data.data() + static_cast<std::size_t>(c) * dims[1] * dims[2],
                    dims[1], dims[2]);
}

ConstMapMat2f Tensor::channel(int c) const {
    return ConstMapMat2f(data.data() + static_cast<std::size_t>(c) * dims[1] * dims[2],
                         dims[1], dims[2]);
}

void Tensor::validate() const {
    if (ndim() < 1 || ndim() > 4)
        throw std::invalid_argument("tensor ndim must be 1..4");
    for (int e : dims)
        if (e < 1) throw std::invalid_argument("tensor extents must be >= 1");
    if (static_cast<std::int64_t>(data.size()) != size())
        throw std::invalid_argument("tensor data length does not match dims");
    for (float v : data)
        if (!std::isfinite(v)) throw std::invalid_argument("tensor holds non-finite value");
}

Tensor conv2d(const Tensor& input, const Tensor& kernel,
              const std::vector<float>& bias, int stride, int pad) {
    if (input.ndim() != 3) throw std::invalid_argument("conv2d input must be [C,H,W]");
    if (kernel.ndim() != 4) throw std::invalid_argument("conv2d kernel must be [O,C,kH,kW]");
    if (kernel.dims[1] != input.dims[0])
        throw std::invalid_argument("conv2d channel mismatch: kernel inC=" +
                                    std::to_string(kernel.dims[1]) + " input C=" +
                                    std::to_string(input.dims[0]));
    if (stride < 1) throw std::invalid_argument("conv2d stride must be >= 1");
    if (pad < 0) throw std::invalid_argument("conv2d pad must be >= 0");
    if (static_cast<int>(bias.size()) != kernel.dims[0])
        throw std::invalid_argument("conv2d bias length must equal kernel outC");

    const int in_c = input.dims[0], in_h = input.dims[1], in_w = input.dims[2];
    const int out_c = kernel.dims[0], k_h = kernel.dims[2], k_w = kernel.dims[3];
    const int out_h = (in_h + 2 * pad - k_h) / stride + 1;
    const int out_w = (in_w + 2 * pad - k_w) / stride + 1;
    if (in_h + 2 * pad < k_h || in_w + 2 * pad < k_w || out_h < 1 || out_w < 1)
        throw std::invalid_argument("conv2d produces non-positive output extent");

    Tensor out = Tensor::zeros({out_c, out_h, out_w});
    // Per-row accumulators: every output cell sums its terms in (c, ky, kx)
    // order, which the naive oracle shares, so results match bit-exactly.
    std::vector<double> acc(static_cast<std::size_t>(out_w));
    for (int o = 0; o < out_c; ++o) {
        for (int oy = 0; oy < out_h; ++oy) {
            acc.assign(out_w, static_cast<double>(bias[o]));
            for (int c = 0; c < in_c; ++c) {
                for (int ky = 0; ky < k_h; ++ky) {
                    const int iy = oy * stride - pad + ky;
                    if (iy < 0 || iy >= in_h) continue;
                    const float* in_row = input.data.data() +
                        (static_cast<std::size_t>(c) * in_h + iy) * in_w;
                    for (int kx = 0; kx < k_w; ++kx) {
                        const double w = kernel.at4(o, c, ky, kx);
                        for (int ox = 0; ox < out_w; ++ox) {
                            const int ix = ox * stride - pad + kx;
                            if (ix < 0 || ix >= in_w) continue;
                            acc[ox] += static_cast<double>(in_row[ix]) * w;
                        }
                    }
                }
            }
            float* out_row = out.data.data() +
                (static_cast<std::size_t>(o) * out_h + oy) * out_w;
            for (int ox = 0; ox < out_w; ++ox)
                out_row[ox] = static_cast<float>(acc[ox]);
        }
    }
    return out;
}

Tensor max_pool2d(const Tensor& input, int k, int stride) {
    if (input.ndim() != 3) throw std::invalid_argument("max_pool2d input must be [C,H,W]");
    if (k < 1 || stride < 1) throw std::invalid_argument("max_pool2d k and stride must be >= 1");
    const int c_n = input.dims[0], in_h = input.dims[1], in_w = input.dims[2];
    if (in_h < k || in_w < k)
        throw std::invalid_argument("max_pool2d window larger than input");
    const int out_h = (in_h - k) / stride + 1;
    const int out_w = (in_w - k) / stride + 1;

    Tensor out = Tensor::zeros({c_n, out_h, out_w});
    for (int c = 0; c < c_n; ++c) {
        for (int oy = 0; oy < out_h; ++oy) {
            for (int ox = 0; ox < out_w; ++ox) {
                float m = input.at(c, oy * stride, ox * stride);
                for (int ky = 0; ky < k; ++ky)
                    for (int kx = 0; kx < k; ++kx)
                        m = std::max(m, input.at(c, oy * stride + ky, ox * stride + kx));
                out.at(c, oy, ox) = m;
            }
        }
    }
    return out;
}

Tensor relu(const Tensor& input) {
    Tensor out = input;
    relu_inplace(out);
    return out;
}

void relu_inplace(Tensor& t) {
    for (float& v : t.data)
        if (v < 0.0f) v = 0.0f;
}

}  // namespace covis
