#pragma once

#include "covis/tensor.hpp"

#include <cstdint>
#include <set>
#include <vector>

namespace covis {

// Activation template from clustering calibration patches.
struct Template {
    Tensor centroid;
    int member_count = 0;
};

struct FilterScore {
    int layer_index = 0;
    int channel = 0;
    double score = 0.0;
};

// Lloyd's k-means with deterministic farthest-point initialization: the
// first centroid is a seeded pick, each further one is the patch farthest
// from the chosen set (ties to the lower index). Runs until the assignment
// reaches a fixpoint or max_iters.
std::vector<Template> kmeans_templates(const std::vector<Tensor>& patches, int k,
                                       std::uint32_t seed, int max_iters);

// Inside-vs-outside mean contrast against ground-truth masks, averaged over
// the frames where both regions are nonempty. Masks are 0/1 maps on the same
// grid as the fmaps.
std::vector<FilterScore> discriminant_scores(const std::vector<Tensor>& fmaps,
                                             const std::vector<Mat2f>& gt_masks,
                                             int layer_index);

// The k_n highest-scoring channels; ties break to the lower channel index;
// k_n beyond the channel count returns all channels.
std::set<int> select_top_filters(const std::vector<FilterScore>& scores, int k_n);

}  // namespace covis
