#include "covis/toynet.hpp"

#include "covis/rng.hpp"

#include <stdexcept>
#include <string>

namespace covis {

namespace {

constexpr int kChannels = 12;
constexpr int kIndexedLayers = 10;

// Center-surround 3x3 kernel wired into out-channel 0 of every conv layer.
// Positive response to a blob plateau (2.0 - 8*0.1 = 1.2 per unit level),
// zero response to flat zero background, so Gaussian person stimuli stay
// elevated through the whole stack.
void set_center_surround(Tensor& kernel, int in_channels_used) {
    const float center = 2.0f, surround = -0.1f;
    for (int c = 0; c < in_channels_used; ++c) {
        const float scale = 1.0f / static_cast<float>(in_channels_used);
        for (int ky = 0; ky < 3; ++ky)
            for (int kx = 0; kx < 3; ++kx)
                kernel.at4(0, c, ky, kx) =
                    ((ky == 1 && kx == 1) ? center : surround) * scale;
    }
}

LayerSpec make_conv(std::mt19937& rng, int in_c, int out_c) {
    LayerSpec s;
    s.kind = LayerSpec::Kind::conv;
    s.kernel = Tensor::zeros({out_c, in_c, 3, 3});
    s.bias.assign(out_c, 0.0f);
    s.stride = 1;
    s.pad = 1;
    const float a = 1.0f / static_cast<float>(in_c * 9);
    for (int o = 0; o < out_c; ++o)
        for (int c = 0; c < in_c; ++c)
            for (int ky = 0; ky < 3; ++ky)
                for (int kx = 0; kx < 3; ++kx)
                    s.kernel.at4(o, c, ky, kx) = rand_range(rng, -a, a);
    for (int o = 1; o < out_c; ++o) s.bias[o] = rand_range(rng, 0.0f, 0.01f);
    // Out-channel 0 reads only in-channel 0 (all inputs at layer 1).
    for (int c = 0; c < in_c; ++c)
        for (int ky = 0; ky < 3; ++ky)
            for (int kx = 0; kx < 3; ++kx)
                s.kernel.at4(0, c, ky, kx) = 0.0f;
    set_center_surround(s.kernel, in_c == 3 ? 3 : 1);
    s.bias[0] = 0.0f;
    return s;
}

LayerSpec make_pool() {
    LayerSpec s;
    s.kind = LayerSpec::Kind::maxpool;
    s.pool_k = 2;
    s.pool_stride = 2;
    return s;
}

LayerSpec make_relu() {
    LayerSpec s;
    s.kind = LayerSpec::Kind::relu;
    return s;
}

}  // namespace

int ToyNet::channels_at(int layer_index) const {
    if (layer_index < 1 || layer_index > num_indexed_layers())
        throw std::invalid_argument("invalid layer index " + std::to_string(layer_index));
    return layers[conv_positions[layer_index - 1]].kernel.dims[0];
}

int ToyNet::stride_at(int layer_index) const {
    if (layer_index < 1 || layer_index > num_indexed_layers())
        throw std::invalid_argument("invalid layer index " + std::to_string(layer_index));
    return layer_strides[layer_index - 1];
}

ToyNet build_toy_net(std::uint32_t seed) {
    ToyNet net;
    net.seed = seed;
    std::mt19937 rng(seed);

    int stride = 1;
    int in_c = 3;
    for (int k = 1; k <= kIndexedLayers; ++k) {
        net.conv_positions.push_back(static_cast<int>(net.layers.size()));
        net.layers.push_back(make_conv(rng, in_c, kChannels));
        net.layers.push_back(make_relu());
        net.layer_strides.push_back(stride);
        in_c = kChannels;
        if (k == 2 || k == 4) {
            net.layers.push_back(make_pool());
            stride *= 2;
        }
    }
    return net;
}

namespace {

LayerOutputs run_ops(const ToyNet& net, Tensor current, std::size_t first_op,
                     const std::set<int>& taps) {
    for (int t : taps)
        if (t < 1 || t > net.num_indexed_layers())
            throw std::invalid_argument("invalid tap index " + std::to_string(t));

    LayerOutputs out;
    int indexed = 0;
    // Count indexed layers already executed before first_op.
    for (std::size_t p = 0; p < first_op; ++p)
        if (net.layers[p].kind == LayerSpec::Kind::conv) ++indexed;

    for (std::size_t p = first_op; p < net.layers.size(); ++p) {
        const LayerSpec& s = net.layers[p];
        switch (s.kind) {
            case LayerSpec::Kind::conv:
                current = conv2d(current, s.kernel, s.bias, s.stride, s.pad);
                ++indexed;
                break;
            case LayerSpec::Kind::relu:
                relu_inplace(current);
                // Indexed layer `indexed` is complete once its relu ran.
                if (taps.count(indexed)) out.tapped.emplace(indexed, current);
                break;
            case LayerSpec::Kind::maxpool:
                current = max_pool2d(current, s.pool_k, s.pool_stride);
                break;
        }
    }
    out.final_output = std::move(current);
    return out;
}

}  // namespace

LayerOutputs forward_with_taps(const ToyNet& net, const Tensor& image,
                               const std::set<int>& taps) {
    if (image.ndim() != 3 || image.dims[0] != 3)
        throw std::invalid_argument("toy net expects a [3,H,W] image");
    return run_ops(net, image, 0, taps);
}

LayerOutputs resume_from(const ToyNet& net, const Tensor& fmap_at_j, int j,
                         const std::set<int>& taps) {
    if (j < 1 || j > net.num_indexed_layers())
        throw std::invalid_argument("invalid resume layer " + std::to_string(j));
    if (fmap_at_j.ndim() != 3 || fmap_at_j.dims[0] != net.channels_at(j))
        throw std::invalid_argument("resumed tensor shape mismatch at layer " +
                                    std::to_string(j));
    // Skip past layer j's conv and relu; any following pool still runs.
    const std::size_t first_op = static_cast<std::size_t>(net.conv_positions[j - 1]) + 2;
    return run_ops(net, fmap_at_j, first_op, taps);
}

}  // namespace covis
