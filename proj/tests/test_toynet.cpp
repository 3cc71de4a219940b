#include "covis/toynet.hpp"
#include "covis/rng.hpp"

#include <doctest.h>

using namespace covis;

namespace {

Tensor random_image(std::mt19937& rng, int h, int w) {
    Tensor t = Tensor::zeros({3, h, w});
    for (float& v : t.data) v = rand_unit(rng);
    return t;
}

}  // namespace

TEST_CASE("build_toy_net is deterministic and 10 layers deep") {
    ToyNet a = build_toy_net(7);
    ToyNet b = build_toy_net(7);
    CHECK(a.num_indexed_layers() == 10);
    REQUIRE(a.layers.size() == b.layers.size());
    for (std::size_t i = 0; i < a.layers.size(); ++i) {
        CHECK(a.layers[i].kernel.data == b.layers[i].kernel.data);
        CHECK(a.layers[i].bias == b.layers[i].bias);
    }
    ToyNet c = build_toy_net(8);
    CHECK(a.layers[0].kernel.data != c.layers[0].kernel.data);

    CHECK(a.channels_at(1) >= 10);
    CHECK(a.channels_at(9) >= 10);
    CHECK(a.stride_at(1) == 1);
    CHECK(a.stride_at(3) == 2);
    CHECK(a.stride_at(9) == 4);
}

TEST_CASE("forward of an all-zero image leaves only bias responses") {
    ToyNet net = build_toy_net(7);
    Tensor zero = Tensor::zeros({3, 16, 16});
    LayerOutputs out = forward_with_taps(net, zero, {1});
    const Tensor& fmap = out.tapped.at(1);
    // Layer 1 on zero input: every cell is relu(bias[o]).
    for (int o = 0; o < fmap.channels(); ++o) {
        const float expect = std::max(0.0f, net.layers[0].bias[o]);
        for (int y = 0; y < fmap.height(); ++y)
            for (int x = 0; x < fmap.width(); ++x) CHECK(fmap.at(o, y, x) == expect);
    }
    for (float v : out.final_output.data) CHECK(v >= 0.0f);
}

TEST_CASE("interception identity at every layer") {
    ToyNet net = build_toy_net(7);
    std::mt19937 rng(11);
    Tensor img = random_image(rng, 16, 16);
    std::set<int> all_taps;
    for (int j = 1; j <= net.num_indexed_layers(); ++j) all_taps.insert(j);
    LayerOutputs full = forward_with_taps(net, img, all_taps);

    for (int j = 1; j <= net.num_indexed_layers(); ++j) {
        LayerOutputs resumed = resume_from(net, full.tapped.at(j), j, all_taps);
        CHECK(resumed.final_output.dims == full.final_output.dims);
        CHECK(resumed.final_output.data == full.final_output.data);
        for (int later = j + 1; later <= net.num_indexed_layers(); ++later)
            CHECK(resumed.tapped.at(later).data == full.tapped.at(later).data);
    }
}

TEST_CASE("empty taps produce only the final output") {
    ToyNet net = build_toy_net(7);
    std::mt19937 rng(12);
    Tensor img = random_image(rng, 16, 16);
    LayerOutputs out = forward_with_taps(net, img, {});
    CHECK(out.tapped.empty());
    CHECK(out.final_output.channels() == net.channels_at(10));
}

TEST_CASE("zeroing the layer-9 map changes the final output") {
    ToyNet net = build_toy_net(7);
    std::mt19937 rng(13);
    Tensor img = random_image(rng, 16, 16);
    LayerOutputs full = forward_with_taps(net, img, {9});

    Tensor zeroed = full.tapped.at(9);
    for (float& v : zeroed.data) v = 0.0f;
    LayerOutputs resumed = resume_from(net, zeroed, 9, {});
    CHECK(resumed.final_output.data != full.final_output.data);
}

TEST_CASE("same seed and input give bit-identical outputs") {
    std::mt19937 rng(14);
    Tensor img = random_image(rng, 16, 16);
    LayerOutputs a = forward_with_taps(build_toy_net(21), img, {1, 5, 9});
    LayerOutputs b = forward_with_taps(build_toy_net(21), img, {1, 5, 9});
    for (const auto& [layer, fmap] : a.tapped) CHECK(fmap.data == b.tapped.at(layer).data);
    CHECK(a.final_output.data == b.final_output.data);
}

TEST_CASE("invalid taps and resume shapes are rejected") {
    ToyNet net = build_toy_net(7);
    std::mt19937 rng(15);
    Tensor img = random_image(rng, 16, 16);
    CHECK_THROWS_AS(forward_with_taps(net, img, {0}), std::invalid_argument);
    CHECK_THROWS_AS(forward_with_taps(net, img, {11}), std::invalid_argument);

    Tensor wrong_channels = Tensor::zeros({3, 4, 4});
    CHECK_THROWS_AS(resume_from(net, wrong_channels, 9, {}), std::invalid_argument);
    CHECK_THROWS_AS(resume_from(net, img, 0, {}), std::invalid_argument);
}

TEST_CASE("center-surround channel keeps a blob stimulus visible at depth") {
    ToyNet net = build_toy_net(7);
    Tensor img = Tensor::zeros({3, 32, 32});
    // Crude Gaussian-ish blob at the center on all channels.
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < 32; ++y)
            for (int x = 0; x < 32; ++x) {
                const double d2 = (y - 16.0) * (y - 16.0) + (x - 16.0) * (x - 16.0);
                img.at(c, y, x) = static_cast<float>(std::exp(-d2 / (2.0 * 16.0)));
            }
    LayerOutputs out = forward_with_taps(net, img, {9});
    const Tensor& l9 = out.tapped.at(9);
    // Channel 0 at the blob's location must dominate its background.
    const auto ch = l9.channel(0);
    float center = ch(4, 4), corner = ch(0, 0);
    CHECK(center > 10.0f * std::max(corner, 1e-6f));
}
