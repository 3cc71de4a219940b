#pragma once

#include "covis/digest.hpp"
#include "covis/fusion_plan.hpp"
#include "covis/homography.hpp"
#include "covis/tensor.hpp"

#include <vector>

namespace covis {

// Additive injection of a warped digest into the selected channels.
// C_a: F'_c = F_c + alpha * warped.
// C_l: the warped mask is re-binarized at mask_rebinarize_tau and each
// selected channel gains beta * mask * p95(F_c), with p95 the channel's 95th
// percentile before injection (0 for an all-zero channel). Other channels
// are untouched.
Tensor inject(const Tensor& fmap, const std::vector<int>& channels, const Mat2f& warped,
              DigestKind kind, const FusionParams& params);

// Restores each selected channel's pre-injection maximum, then applies the
// power-law lift v -> M * (v / M)^gamma. Written so that an unchanged
// maximum with gamma = 1 leaves the channel bit-identical.
Tensor renormalize_gamma(const Tensor& fmap, const std::vector<int>& channels,
                         const std::vector<float>& pre_max, double gamma);

// 95th-percentile activation (linear interpolation between order statistics).
float percentile95(const Tensor& fmap, int channel);

// scale_homography_to_grid -> warp_bilinear -> inject -> renormalize_gamma
// over the plan's target channels. h_img maps the digest source's image
// pixels to the reference image pixels.
Tensor fuse_digest(const Tensor& fmap_at_ingest, const Digest& digest,
                   const Homography& h_img, const GridSpec& src_grid,
                   const GridSpec& dst_grid, const FusionPlan& plan);

struct CollaboratorInput {
    Digest digest;
    Homography h_img;
    GridSpec src_grid;
};

// Applies several collaborators sequentially in ascending source_node order.
Tensor fuse_digests(const Tensor& fmap_at_ingest, std::vector<CollaboratorInput> inputs,
                    const GridSpec& dst_grid, const FusionPlan& plan);

}  // namespace covis
