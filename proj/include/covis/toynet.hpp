#pragma once

#include "covis/tensor.hpp"

#include <map>
#include <set>
#include <vector>

namespace covis {

struct LayerSpec {
    enum class Kind { conv, relu, maxpool };
    Kind kind = Kind::conv;
    // conv
    Tensor kernel;            // [O,C,kH,kW]
    std::vector<float> bias;  // length O
    int stride = 1;
    int pad = 0;
    // maxpool
    int pool_k = 2;
    int pool_stride = 2;
};

// Deterministic stand-in for a detector's conv stack. Indexed layers are the
// conv(+relu) pairs, 1-based; the two maxpools between them are un-indexed.
struct ToyNet {
    std::vector<LayerSpec> layers;   // flat op list
    std::uint32_t seed = 0;
    std::vector<int> conv_positions; // op index of conv k+1 for indexed layer k+1
    std::vector<int> layer_strides;  // cumulative downsample at each indexed layer's output

    int num_indexed_layers() const { return static_cast<int>(conv_positions.size()); }
    int channels_at(int layer_index) const;       // output channels of indexed layer
    int stride_at(int layer_index) const;         // cumulative downsample factor
};

struct LayerOutputs {
    std::map<int, Tensor> tapped;  // layer_index -> post-relu fmap
    Tensor final_output;           // last indexed layer's post-relu fmap
};

// Fixed 10-layer architecture; identical seed gives bit-identical weights.
ToyNet build_toy_net(std::uint32_t seed);

// Full forward pass capturing the post-relu output at each tapped index.
LayerOutputs forward_with_taps(const ToyNet& net, const Tensor& image,
                               const std::set<int>& taps);

// Resume execution from a (possibly modified) layer-j output. Applies any
// pool that follows layer j, then continues through the remaining layers.
LayerOutputs resume_from(const ToyNet& net, const Tensor& fmap_at_j, int j,
                         const std::set<int>& taps);

}  // namespace covis
