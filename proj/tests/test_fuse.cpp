#include "covis/fuse.hpp"
#include "covis/rng.hpp"

#include <doctest.h>

#include <algorithm>

using namespace covis;

namespace {

Tensor random_fmap(std::mt19937& rng, int c, int h, int w, float scale = 1.0f) {
    Tensor t = Tensor::zeros({c, h, w});
    for (float& v : t.data) v = scale * rand_unit(rng);
    return t;
}

FusionPlan plan_with(double alpha, double beta, double gamma,
                     std::vector<int> channels) {
    FusionPlan plan;
    plan.extract_layer = 1;
    plan.ingest_layer = 9;
    plan.target_channels = std::move(channels);
    plan.params.alpha = alpha;
    plan.params.beta = beta;
    plan.params.gamma = gamma;
    return plan;
}

}  // namespace

TEST_CASE("inject with alpha 0 is a bit-exact no-op") {
    std::mt19937 rng(21);
    Tensor fmap = random_fmap(rng, 3, 6, 6);
    Mat2f warped = Mat2f::Ones(6, 6);
    FusionParams params;
    params.alpha = 0.0;
    Tensor out = inject(fmap, {0, 2}, warped, DigestKind::C_a, params);
    CHECK(out.data == fmap.data);
}

TEST_CASE("inject C_a adds alpha times the warped payload to selected channels") {
    std::mt19937 rng(22);
    Tensor fmap = random_fmap(rng, 3, 5, 5);
    Mat2f ones = Mat2f::Ones(5, 5);
    FusionParams params;
    params.alpha = 1.0;
    Tensor out = inject(fmap, {1}, ones, DigestKind::C_a, params);
    for (int y = 0; y < 5; ++y)
        for (int x = 0; x < 5; ++x) {
            CHECK(out.at(1, y, x) == fmap.at(1, y, x) + 1.0f);
            CHECK(out.at(0, y, x) == fmap.at(0, y, x));
            CHECK(out.at(2, y, x) == fmap.at(2, y, x));
        }
}

TEST_CASE("inject C_l boosts masked cells by beta times the channel p95") {
    // 21 ascending values; the 95th percentile lands exactly on index 19.
    Tensor fmap = Tensor::zeros({1, 3, 7});
    for (int i = 0; i < 21; ++i) fmap.data[i] = 0.2f * static_cast<float>(i);
    REQUIRE(percentile95(fmap, 0) == doctest::Approx(3.8f));

    Tensor scaled = fmap;
    for (float& v : scaled.data) v = v / 3.8f * 4.0f;  // p95 becomes 4
    REQUIRE(percentile95(scaled, 0) == doctest::Approx(4.0f));

    Mat2f mask = Mat2f::Zero(3, 7);
    mask(1, 3) = 1.0f;
    FusionParams params;
    params.beta = 1.0;
    Tensor out = inject(scaled, {0}, mask, DigestKind::C_l, params);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 7; ++x) {
            const float base = scaled.at(0, y, x);
            if (y == 1 && x == 3)
                CHECK(out.at(0, y, x) == doctest::Approx(base + 4.0f).epsilon(1e-6));
            else
                CHECK(out.at(0, y, x) == base);
        }
}

TEST_CASE("injection leaves cells with zero warped contribution unchanged") {
    std::mt19937 rng(23);
    Tensor fmap = random_fmap(rng, 2, 6, 6);
    Mat2f warped = Mat2f::Zero(6, 6);
    warped(2, 2) = 0.8f;
    FusionParams params;
    params.alpha = 1.5;
    Tensor out = inject(fmap, {0}, warped, DigestKind::C_a, params);
    for (int y = 0; y < 6; ++y)
        for (int x = 0; x < 6; ++x)
            if (y != 2 || x != 2) CHECK(out.at(0, y, x) == fmap.at(0, y, x));
}

TEST_CASE("renormalize_gamma identity when nothing changed and gamma is 1") {
    std::mt19937 rng(24);
    Tensor fmap = random_fmap(rng, 2, 5, 5);
    std::vector<float> pre_max = {fmap.channel(0).maxCoeff(), fmap.channel(1).maxCoeff()};
    Tensor out = renormalize_gamma(fmap, {0, 1}, pre_max, 1.0);
    CHECK(out.data == fmap.data);
}

TEST_CASE("renormalize_gamma closed form") {
    Tensor fmap = Tensor::zeros({1, 1, 3});
    fmap.data = {0.0f, 2.0f, 4.0f};
    Tensor out = renormalize_gamma(fmap, {0}, {4.0f}, 0.5);
    CHECK(out.data[0] == 0.0f);
    CHECK(out.data[1] == doctest::Approx(4.0 * std::sqrt(0.5)).epsilon(1e-6));
    CHECK(out.data[2] == doctest::Approx(4.0f).epsilon(1e-6));
}

TEST_CASE("gamma below 1 never decreases values and keeps rank order") {
    std::mt19937 rng(25);
    for (int trial = 0; trial < 25; ++trial) {
        Tensor fmap = random_fmap(rng, 1, 8, 8, 5.0f);
        const float cur_max = fmap.channel(0).maxCoeff();
        const double gamma = 0.1 + 0.8 * rand_unit(rng);
        Tensor out = renormalize_gamma(fmap, {0}, {cur_max}, gamma);
        std::vector<std::size_t> order_in(fmap.data.size()), order_out(fmap.data.size());
        for (std::size_t i = 0; i < fmap.data.size(); ++i) {
            CHECK(out.data[i] >= fmap.data[i]);
            order_in[i] = order_out[i] = i;
        }
        std::stable_sort(order_in.begin(), order_in.end(),
                         [&](std::size_t a, std::size_t b) { return fmap.data[a] < fmap.data[b]; });
        std::stable_sort(order_out.begin(), order_out.end(),
                         [&](std::size_t a, std::size_t b) { return out.data[a] < out.data[b]; });
        CHECK(order_in == order_out);
    }
}

TEST_CASE("renormalize_gamma rejects bad inputs") {
    Tensor fmap = Tensor::zeros({1, 2, 2});
    fmap.data = {1.0f, -0.5f, 0.0f, 0.0f};
    CHECK_THROWS_AS(renormalize_gamma(fmap, {0}, {1.0f}, 0.5), std::invalid_argument);
    Tensor ok = Tensor::zeros({1, 2, 2});
    CHECK_THROWS_AS(renormalize_gamma(ok, {0}, {1.0f}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(renormalize_gamma(ok, {0}, {1.0f}, 1.5), std::invalid_argument);
}

TEST_CASE("fuse_digest with zero weights and gamma 1 is a bit-exact identity") {
    std::mt19937 rng(26);
    for (int trial = 0; trial < 20; ++trial) {
        Tensor fmap = random_fmap(rng, 4, 8, 8, 3.0f);
        Digest d;
        d.kind = trial % 2 ? DigestKind::C_a : DigestKind::C_l;
        d.layer_index = 1;
        d.source_node = 1;
        d.frame_id = trial;
        d.payload = Mat2f::Zero(32, 32);
        for (int y = 0; y < 32; ++y)
            for (int x = 0; x < 32; ++x)
                d.payload(y, x) = d.kind == DigestKind::C_a ? rand_unit(rng)
                                                            : (rand_unit(rng) > 0.5f ? 1.0f : 0.0f);
        Homography h;
        h.m << 1.0, 0.02, 3.0, -0.01, 0.98, -2.0, 0.0001, 0.0, 1.0;
        FusionPlan plan = plan_with(0.0, 0.0, 1.0, {0, 2});
        Tensor out = fuse_digest(fmap, d, h, GridSpec{32, 32, 1.0}, GridSpec{8, 8, 4.0}, plan);
        CHECK(out.data == fmap.data);
    }
}

TEST_CASE("fuse_digest whose warp lands out of bounds is an identity at gamma 1") {
    std::mt19937 rng(27);
    Tensor fmap = random_fmap(rng, 3, 8, 8);
    Digest d;
    d.kind = DigestKind::C_a;
    d.layer_index = 1;
    d.payload = Mat2f::Ones(32, 32);
    Homography far;
    far.m(0, 2) = 1e5;
    far.m(1, 2) = 1e5;
    FusionPlan plan = plan_with(1.0, 1.0, 1.0, {0, 1});
    Tensor out = fuse_digest(fmap, d, far, GridSpec{32, 32, 1.0}, GridSpec{8, 8, 4.0}, plan);
    CHECK(out.data == fmap.data);
}

TEST_CASE("fuse_digest validates layer and grid consistency") {
    std::mt19937 rng(28);
    Tensor fmap = random_fmap(rng, 3, 8, 8);
    Digest d;
    d.kind = DigestKind::C_a;
    d.layer_index = 2;  // plan expects 1
    d.payload = Mat2f::Ones(32, 32);
    FusionPlan plan = plan_with(1.0, 1.0, 1.0, {0});
    CHECK_THROWS_AS(fuse_digest(fmap, d, Homography::identity(), GridSpec{32, 32, 1.0},
                                GridSpec{8, 8, 4.0}, plan),
                    std::invalid_argument);
    d.layer_index = 1;
    CHECK_THROWS_AS(fuse_digest(fmap, d, Homography::identity(), GridSpec{16, 16, 1.0},
                                GridSpec{8, 8, 4.0}, plan),
                    std::invalid_argument);
}

TEST_CASE("fuse_digests applies collaborators in ascending node order") {
    // Construct two C_a digests whose order matters through renormalization.
    Tensor fmap = Tensor::zeros({1, 2, 2});
    fmap.data = {1.0f, 0.5f, 0.25f, 2.0f};
    auto make_input = [&](int node, float level) {
        CollaboratorInput in;
        in.digest.kind = DigestKind::C_a;
        in.digest.layer_index = 1;
        in.digest.source_node = static_cast<std::uint16_t>(node);
        in.digest.payload = Mat2f::Constant(2, 2, level);
        in.h_img = Homography::identity();
        in.src_grid = GridSpec{2, 2, 1.0};
        return in;
    };
    FusionPlan plan = plan_with(1.0, 0.0, 0.5, {0});
    const GridSpec dst{2, 2, 1.0};
    Tensor ab = fuse_digests(fmap, {make_input(1, 0.3f), make_input(2, 0.9f)}, dst, plan);
    Tensor ba = fuse_digests(fmap, {make_input(2, 0.9f), make_input(1, 0.3f)}, dst, plan);
    CHECK(ab.data == ba.data);

    Tensor manual = fuse_digest(fmap, make_input(1, 0.3f).digest, Homography::identity(),
                                GridSpec{2, 2, 1.0}, dst, plan);
    manual = fuse_digest(manual, make_input(2, 0.9f).digest, Homography::identity(),
                         GridSpec{2, 2, 1.0}, dst, plan);
    CHECK(ab.data == manual.data);
}

TEST_CASE("constructed occlusion case: fusion lifts a weak cell over the threshold") {
    // Reference channel: strong evidence at (1,1), faint trace at (6,6).
    Tensor fmap = Tensor::zeros({1, 8, 8});
    fmap.at(0, 1, 1) = 1.0f;
    fmap.at(0, 6, 6) = 0.1f;

    Digest d;
    d.kind = DigestKind::C_a;
    d.layer_index = 1;
    d.payload = Mat2f::Zero(8, 8);
    d.payload(6, 6) = 0.95f;  // collaborator sees the occluded spot clearly

    FusionPlan plan = plan_with(1.0, 0.0, 1.0, {0});
    Tensor fused = fuse_digest(fmap, d, Homography::identity(), GridSpec{8, 8, 1.0},
                               GridSpec{8, 8, 1.0}, plan);

    const float threshold = 0.5f;
    CHECK(fmap.at(0, 6, 6) < threshold);           // baseline misses it
    CHECK(fused.at(0, 6, 6) > threshold);          // fused recovers it
    CHECK(fused.channel(0).maxCoeff() == doctest::Approx(1.0f));  // renormalized
}
