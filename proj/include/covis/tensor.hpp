#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <initializer_list>
#include <vector>

namespace covis {

using Mat2f = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat2f = Eigen::Map<Mat2f>;
using ConstMapMat2f = Eigen::Map<const Mat2f>;

// Dense row-major f32 tensor, 1 to 4 dims. The unit of feature-map storage
// and of the fixture file format.
struct Tensor {
    std::vector<int> dims;
    std::vector<float> data;

    Tensor() = default;
    Tensor(std::initializer_list<int> d, std::vector<float> values);

    static Tensor zeros(std::initializer_list<int> d);
    static Tensor zeros(const std::vector<int>& d);

    int ndim() const { return static_cast<int>(dims.size()); }
    std::int64_t size() const;

    // [C,H,W] accessors; tensor must be 3-d.
    int channels() const { return dims[0]; }
    int height() const { return dims[1]; }
    int width() const { return dims[2]; }

    float& at(int c, int y, int x);
    float at(int c, int y, int x) const;
    float& at4(int o, int c, int y, int x);
    float at4(int o, int c, int y, int x) const;

    // Channel c of a [C,H,W] tensor as an Eigen view (rows = y, cols = x).
    MapMat2f channel(int c);
    ConstMapMat2f channel(int c) const;

    bool same_shape(const Tensor& other) const { return dims == other.dims; }

    // Throws std::invalid_argument on dim/data mismatch or non-finite values.
    void validate() const;
};

int64_t dim_product(const std::vector<int>& dims);

// Zero-padded 2-d convolution of a [C,H,W] input with an [O,C,kH,kW] kernel.
// Accumulates each output in double, in fixed (c, ky, kx) term order, then
// rounds to float once.
Tensor conv2d(const Tensor& input, const Tensor& kernel,
              const std::vector<float>& bias, int stride, int pad);

Tensor max_pool2d(const Tensor& input, int k, int stride);

Tensor relu(const Tensor& input);
void relu_inplace(Tensor& t);

}  // namespace covis
