#pragma once

#include "covis/homography.hpp"
#include "covis/tensor.hpp"

namespace covis {

// Inverse-maps each destination cell through h_grid and bilinearly samples
// the source payload; samples outside the source extent contribute 0.
Mat2f warp_bilinear(const Mat2f& payload, const Homography& h_grid, const GridSpec& out);

// Pure grid-to-grid rescale (no cross-view transform): destination cell
// (x, y) samples the source at (x * dst.stride / src.stride, ...).
Mat2f resample_bilinear(const Mat2f& payload, const GridSpec& src, const GridSpec& dst);

}  // namespace covis
