#pragma once

#include <Eigen/Dense>

#include <string>

namespace covis {

// 3x3 projective transform between two image planes. Normalized so
// m(2,2) = 1 whenever that entry is nonzero.
struct Homography {
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();

    static Homography identity() { return {}; }
    static Homography from_matrix(const Eigen::Matrix3d& m);

    Homography inverse() const;
    Homography compose(const Homography& inner) const;  // this * inner

    // Applies to a 2-d point; throws if the point maps to infinity.
    Eigen::Vector2d apply(const Eigen::Vector2d& p) const;

    bool invertible() const { return std::abs(m.determinant()) > 1e-9; }
};

// Feature-grid geometry: extents plus image pixels per feature cell.
struct GridSpec {
    int height = 0;
    int width = 0;
    double stride = 1.0;
};

// Rescales an image-to-image homography to map source feature cells to
// destination feature cells (cell (x, y) sits at image pixel (x*s, y*s)).
Homography scale_homography_to_grid(const Homography& h_img, const GridSpec& src,
                                    const GridSpec& dst);

// Homography files are JSON arrays of 9 reals, row-major.
void save_homography(const std::string& path, const Homography& h);
Homography load_homography(const std::string& path);

// Exact homography from 4 point correspondences (DLT, 8x8 solve).
Homography homography_from_points(const Eigen::Vector2d src[4], const Eigen::Vector2d dst[4]);

}  // namespace covis
