#include "covis/warp.hpp"

#include <cmath>
#include <stdexcept>

namespace covis {

namespace {

inline float sample_bilinear(const Mat2f& src, double u, double v) {
    const int w = static_cast<int>(src.cols()), h = static_cast<int>(src.rows());
    const double fx0 = std::floor(u), fy0 = std::floor(v);
    const int x0 = static_cast<int>(fx0), y0 = static_cast<int>(fy0);
    const double ax = u - fx0, ay = v - fy0;
    auto at = [&](int y, int x) -> double {
        if (x < 0 || x >= w || y < 0 || y >= h) return 0.0;
        return static_cast<double>(src(y, x));
    };
    const double top = at(y0, x0) * (1.0 - ax) + at(y0, x0 + 1) * ax;
    const double bot = at(y0 + 1, x0) * (1.0 - ax) + at(y0 + 1, x0 + 1) * ax;
    return static_cast<float>(top * (1.0 - ay) + bot * ay);
}

}  // namespace

Mat2f warp_bilinear(const Mat2f& payload, const Homography& h_grid, const GridSpec& out) {
    if (!h_grid.invertible()) throw std::invalid_argument("warp_bilinear: singular homography");
    if (out.height < 1 || out.width < 1)
        throw std::invalid_argument("warp_bilinear: bad output extents");
    const Eigen::Matrix3d inv = h_grid.inverse().m;

    Mat2f result = Mat2f::Zero(out.height, out.width);
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
            const Eigen::Vector3d q = inv * Eigen::Vector3d(x, y, 1.0);
            if (q.z() == 0.0) continue;
            result(y, x) = sample_bilinear(payload, q.x() / q.z(), q.y() / q.z());
        }
    }
    return result;
}

Mat2f resample_bilinear(const Mat2f& payload, const GridSpec& src, const GridSpec& dst) {
    if (src.height != static_cast<int>(payload.rows()) ||
        src.width != static_cast<int>(payload.cols()))
        throw std::invalid_argument("resample_bilinear: payload does not match src grid");
    // Exact identity when the grids coincide.
    if (src.height == dst.height && src.width == dst.width && src.stride == dst.stride)
        return payload;
    Mat2f result = Mat2f::Zero(dst.height, dst.width);
    for (int y = 0; y < dst.height; ++y)
        for (int x = 0; x < dst.width; ++x)
            result(y, x) = sample_bilinear(payload,
                                           x * dst.stride / src.stride,
                                           y * dst.stride / src.stride);
    return result;
}

}  // namespace covis
