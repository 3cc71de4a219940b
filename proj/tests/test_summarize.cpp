#include "covis/summarize.hpp"
#include "covis/rng.hpp"

#include <doctest.h>

using namespace covis;

namespace {

Tensor patch2(float a, float b) { return Tensor({2}, {a, b}); }

double kmeans_objective(const std::vector<Tensor>& patches,
                        const std::vector<Template>& result) {
    double total = 0.0;
    for (const Tensor& p : patches) {
        double best = 1e300;
        for (const Template& t : result) {
            double d = 0.0;
            for (std::size_t i = 0; i < p.data.size(); ++i) {
                const double dd = static_cast<double>(p.data[i]) - t.centroid.data[i];
                d += dd * dd;
            }
            best = std::min(best, d);
        }
        total += best;
    }
    return total;
}

}  // namespace

TEST_CASE("kmeans with k=1 returns the mean patch") {
    std::mt19937 rng(3);
    std::vector<Tensor> patches;
    for (int i = 0; i < 10; ++i)
        patches.push_back(patch2(rand_unit(rng), rand_unit(rng)));
    auto result = kmeans_templates(patches, 1, 42, 50);
    REQUIRE(result.size() == 1);
    CHECK(result[0].member_count == 10);
    double mx = 0, my = 0;
    for (const Tensor& p : patches) {
        mx += p.data[0];
        my += p.data[1];
    }
    CHECK(result[0].centroid.data[0] == doctest::Approx(mx / 10).epsilon(1e-6));
    CHECK(result[0].centroid.data[1] == doctest::Approx(my / 10).epsilon(1e-6));
}

TEST_CASE("kmeans separates two well-separated clouds") {
    std::mt19937 rng(4);
    std::vector<Tensor> patches;
    double ax = 0, ay = 0, bx = 0, by = 0;
    for (int i = 0; i < 20; ++i) {
        const float x = rand_unit(rng) * 0.1f, y = rand_unit(rng) * 0.1f;
        patches.push_back(patch2(x, y));
        ax += x;
        ay += y;
    }
    for (int i = 0; i < 15; ++i) {
        const float x = 10.0f + rand_unit(rng) * 0.1f, y = 10.0f + rand_unit(rng) * 0.1f;
        patches.push_back(patch2(x, y));
        bx += x;
        by += y;
    }
    auto result = kmeans_templates(patches, 2, 9, 100);
    REQUIRE(result.size() == 2);
    // Identify which centroid is which by its first coordinate.
    const int lo = result[0].centroid.data[0] < result[1].centroid.data[0] ? 0 : 1;
    const int hi = 1 - lo;
    CHECK(result[lo].member_count == 20);
    CHECK(result[hi].member_count == 15);
    CHECK(result[lo].centroid.data[0] == doctest::Approx(ax / 20).epsilon(1e-6));
    CHECK(result[lo].centroid.data[1] == doctest::Approx(ay / 20).epsilon(1e-6));
    CHECK(result[hi].centroid.data[0] == doctest::Approx(bx / 15).epsilon(1e-6));
    CHECK(result[hi].centroid.data[1] == doctest::Approx(by / 15).epsilon(1e-6));
}

TEST_CASE("kmeans with k equal to the patch count pins each patch") {
    std::vector<Tensor> patches = {patch2(0, 0), patch2(5, 0), patch2(0, 5), patch2(5, 5)};
    auto result = kmeans_templates(patches, 4, 1, 50);
    REQUIRE(result.size() == 4);
    for (const Template& t : result) CHECK(t.member_count == 1);
    // Every patch appears among the centroids.
    for (const Tensor& p : patches) {
        bool found = false;
        for (const Template& t : result)
            if (t.centroid.data == p.data) found = true;
        CHECK(found);
    }
}

TEST_CASE("kmeans objective is non-increasing in the iteration budget") {
    std::mt19937 rng(6);
    std::vector<Tensor> patches;
    for (int i = 0; i < 40; ++i)
        patches.push_back(patch2(rand_range(rng, 0, 10), rand_range(rng, 0, 10)));
    double prev = 1e300;
    for (int iters = 1; iters <= 8; ++iters) {
        auto result = kmeans_templates(patches, 4, 7, iters);
        const double obj = kmeans_objective(patches, result);
        CHECK(obj <= prev + 1e-9);
        prev = obj;
    }
    // Deterministic across repeated calls.
    auto a = kmeans_templates(patches, 4, 7, 50);
    auto b = kmeans_templates(patches, 4, 7, 50);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].centroid.data == b[i].centroid.data);
        CHECK(a[i].member_count == b[i].member_count);
    }
}

TEST_CASE("kmeans rejects fewer patches than k") {
    std::vector<Tensor> patches = {patch2(0, 0)};
    CHECK_THROWS_AS(kmeans_templates(patches, 2, 0, 10), std::invalid_argument);
}

TEST_CASE("discriminant scores: perfect, flat, and noisy channels") {
    const int h = 16, w = 16;
    Mat2f mask = Mat2f::Zero(h, w);
    mask.block(4, 4, 5, 5).setOnes();

    Tensor fmap = Tensor::zeros({3, h, w});
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            fmap.at(0, y, x) = mask(y, x);  // channel equals the mask
            fmap.at(1, y, x) = 0.7f;        // constant channel
        }
    std::mt19937 rng(8);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            fmap.at(2, y, x) = mask(y, x) + 0.1f * rand_unit(rng);

    auto scores = discriminant_scores({fmap}, {mask}, 3);
    REQUIRE(scores.size() == 3);
    CHECK(scores[0].layer_index == 3);
    CHECK(scores[0].score == doctest::Approx(1.0));
    CHECK(scores[1].score == doctest::Approx(0.0));
    // Contrast of mask + U(0, 0.1) noise concentrates around 1.
    CHECK(scores[2].score > 0.90);
    CHECK(scores[2].score < 1.05);

    // Adding a constant to a channel leaves its contrast unchanged.
    Tensor shifted = fmap;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) shifted.at(2, y, x) += 5.0f;
    auto scores2 = discriminant_scores({shifted}, {mask}, 3);
    CHECK(scores2[2].score == doctest::Approx(scores[2].score).epsilon(1e-5));
}

TEST_CASE("discriminant scores are zero when a mask region is empty everywhere") {
    Tensor fmap = Tensor::zeros({1, 4, 4});
    for (float& v : fmap.data) v = 1.0f;
    Mat2f empty_mask = Mat2f::Zero(4, 4);
    auto scores = discriminant_scores({fmap}, {empty_mask}, 1);
    CHECK(scores[0].score == 0.0);

    Mat2f full_mask = Mat2f::Ones(4, 4);
    auto scores2 = discriminant_scores({fmap}, {full_mask}, 1);
    CHECK(scores2[0].score == 0.0);
}

TEST_CASE("discriminant scores reject spatial mismatch") {
    Tensor fmap = Tensor::zeros({1, 4, 4});
    Mat2f mask = Mat2f::Zero(3, 4);
    CHECK_THROWS_AS(discriminant_scores({fmap}, {mask}, 1), std::invalid_argument);
}

TEST_CASE("select_top_filters ranking, ties, and clamping") {
    std::vector<FilterScore> scores = {{1, 0, 0.9}, {1, 1, 0.1}, {1, 2, 0.5}};
    CHECK(select_top_filters(scores, 2) == std::set<int>{0, 2});

    std::vector<FilterScore> equal = {{1, 0, 0.5}, {1, 1, 0.5}, {1, 2, 0.5}};
    CHECK(select_top_filters(equal, 2) == std::set<int>{0, 1});

    std::vector<FilterScore> eight;
    for (int c = 0; c < 8; ++c) eight.push_back({1, c, static_cast<double>(c)});
    CHECK(select_top_filters(eight, 100).size() == 8);

    CHECK_THROWS_AS(select_top_filters({}, 1), std::invalid_argument);
}
