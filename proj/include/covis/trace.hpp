#pragma once

#include "covis/fusion_plan.hpp"
#include "covis/homography.hpp"
#include "covis/tensor.hpp"
#include "covis/toynet.hpp"

#include <vector>

namespace covis {

// Coefficient of determination of the first-order least-squares fit
// y ~ a*x + b, with x bilinearly resampled to y's grid and samples
// concatenated across frames. Returns 0 when either side has zero variance.
double correlation_score(const std::vector<Mat2f>& x_frames, const GridSpec& x_grid,
                         const std::vector<Mat2f>& y_frames, const GridSpec& y_grid);

// Offline calibration: picks the top-k_n discriminant predictor-side
// channels against the ground-truth masks (masks live on the predictor
// grid), scores every ingest-layer channel by its best R^2 against any of
// them, and keeps the k' strongest as the plan's target channels.
FusionPlan build_fusion_plan(const ToyNet& net, const std::vector<Tensor>& calib_frames,
                             const std::vector<Mat2f>& gt_masks, int extract_layer,
                             int ingest_layer, int predictor_layer, int k_n, int k_prime,
                             const FusionParams& params);

}  // namespace covis
