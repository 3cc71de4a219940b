#include "covis/summarize.hpp"

#include "covis/rng.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace covis {

namespace {

double sq_dist(const Tensor& a, const Tensor& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = static_cast<double>(a.data[i]) - b.data[i];
        s += d * d;
    }
    return s;
}

}  // namespace

std::vector<Template> kmeans_templates(const std::vector<Tensor>& patches, int k,
                                       std::uint32_t seed, int max_iters) {
    if (k < 1) throw std::invalid_argument("kmeans_templates: k must be >= 1");
    if (static_cast<int>(patches.size()) < k)
        throw std::invalid_argument("kmeans_templates: fewer patches than k");
    const std::size_t n = patches.size();
    for (const Tensor& p : patches)
        if (!p.same_shape(patches[0]))
            throw std::invalid_argument("kmeans_templates: patches differ in shape");

    // Farthest-point initialization from a seeded start.
    std::mt19937 rng(seed);
    std::vector<std::size_t> centers;
    centers.push_back(rand_index(rng, static_cast<std::uint32_t>(n)));
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    while (centers.size() < static_cast<std::size_t>(k)) {
        for (std::size_t i = 0; i < n; ++i)
            nearest[i] = std::min(nearest[i], sq_dist(patches[i], patches[centers.back()]));
        std::size_t best = 0;
        double best_d = -1.0;
        for (std::size_t i = 0; i < n; ++i)
            if (nearest[i] > best_d) {
                best_d = nearest[i];
                best = i;
            }
        centers.push_back(best);
    }

    std::vector<Tensor> centroids;
    centroids.reserve(k);
    for (std::size_t c : centers) centroids.push_back(patches[c]);

    std::vector<int> assign(n, -1);
    for (int iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = sq_dist(patches[i], centroids[0]);
            for (int c = 1; c < k; ++c) {
                const double d = sq_dist(patches[i], centroids[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
        }
        if (!changed && iter > 0) break;

        // Recompute means; re-seed an emptied cluster with the point farthest
        // from its current centroid so every cluster keeps members.
        std::vector<int> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) counts[assign[i]]++;
        for (int c = 0; c < k; ++c) {
            if (counts[c] > 0) continue;
            std::size_t far_i = 0;
            double far_d = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[assign[i]] <= 1) continue;
                const double d = sq_dist(patches[i], centroids[assign[i]]);
                if (d > far_d) {
                    far_d = d;
                    far_i = i;
                }
            }
            counts[assign[far_i]]--;
            assign[far_i] = c;
            counts[c] = 1;
        }

        for (int c = 0; c < k; ++c) {
            Tensor mean = Tensor::zeros(patches[0].dims);
            std::vector<double> acc(mean.data.size(), 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                if (assign[i] != c) continue;
                for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += patches[i].data[j];
            }
            for (std::size_t j = 0; j < acc.size(); ++j)
                mean.data[j] = static_cast<float>(acc[j] / counts[c]);
            centroids[c] = std::move(mean);
        }
    }

    // Final assignment against the final centroids.
    std::vector<int> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
        int best = 0;
        double best_d = sq_dist(patches[i], centroids[0]);
        for (int c = 1; c < k; ++c) {
            const double d = sq_dist(patches[i], centroids[c]);
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        counts[best]++;
    }

    std::vector<Template> out;
    out.reserve(k);
    for (int c = 0; c < k; ++c) out.push_back({centroids[c], counts[c]});
    return out;
}

std::vector<FilterScore> discriminant_scores(const std::vector<Tensor>& fmaps,
                                             const std::vector<Mat2f>& gt_masks,
                                             int layer_index) {
    if (fmaps.empty()) throw std::invalid_argument("discriminant_scores: no frames");
    if (fmaps.size() != gt_masks.size())
        throw std::invalid_argument("discriminant_scores: fmaps/masks count mismatch");
    const int channels = fmaps[0].channels();
    for (std::size_t f = 0; f < fmaps.size(); ++f) {
        if (fmaps[f].channels() != channels)
            throw std::invalid_argument("discriminant_scores: channel count varies");
        if (gt_masks[f].rows() != fmaps[f].height() || gt_masks[f].cols() != fmaps[f].width())
            throw std::invalid_argument("discriminant_scores: mask/fmap spatial mismatch");
    }

    std::vector<FilterScore> out(channels);
    for (int c = 0; c < channels; ++c) {
        double total = 0.0;
        int used_frames = 0;
        for (std::size_t f = 0; f < fmaps.size(); ++f) {
            const auto ch = fmaps[f].channel(c);
            const Mat2f& m = gt_masks[f];
            double in_sum = 0.0, out_sum = 0.0;
            std::int64_t in_n = 0, out_n = 0;
            for (int y = 0; y < ch.rows(); ++y)
                for (int x = 0; x < ch.cols(); ++x) {
                    if (m(y, x) != 0.0f) {
                        in_sum += ch(y, x);
                        ++in_n;
                    } else {
                        out_sum += ch(y, x);
                        ++out_n;
                    }
                }
            if (in_n == 0 || out_n == 0) continue;
            total += in_sum / in_n - out_sum / out_n;
            ++used_frames;
        }
        out[c] = {layer_index, c, used_frames > 0 ? total / used_frames : 0.0};
    }
    return out;
}

std::set<int> select_top_filters(const std::vector<FilterScore>& scores, int k_n) {
    if (scores.empty()) throw std::invalid_argument("select_top_filters: empty score list");
    if (k_n < 1) throw std::invalid_argument("select_top_filters: k_n must be >= 1");
    std::vector<FilterScore> ranked = scores;
    std::stable_sort(ranked.begin(), ranked.end(), [](const FilterScore& a, const FilterScore& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.channel < b.channel;
    });
    std::set<int> out;
    for (const FilterScore& s : ranked) {
        if (static_cast<int>(out.size()) >= k_n) break;
        out.insert(s.channel);
    }
    return out;
}

}  // namespace covis
