#pragma once

#include "covis/detect.hpp"
#include "covis/homography.hpp"
#include "covis/tensor.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace covis {

struct Person {
    double ground_x = 0;
    double ground_y = 0;
    double radius = 1;     // ground units; the rendered blob's sigma
    double intensity = 1;  // peak value, in (0, 1]
};

struct Rect {
    double x = 0, y = 0, w = 0, h = 0;
    bool contains(double px, double py) const {
        return px >= x && px < x + w && py >= y && py < y + h;
    }
};

struct World {
    std::vector<Person> persons;
    std::map<int, std::vector<Rect>> occluders;  // camera id -> image-space rects
    std::uint32_t seed = 0;
    double plane_size = 128.0;
};

struct CameraSpec {
    int camera_id = 0;
    Homography h_ground_to_image;
    int image_h = 128;
    int image_w = 128;
};

struct CameraView {
    int camera_id = 0;
    Homography h_ground_to_image;
    Tensor stimulus;                  // [3,H,W], values in [0,1]
    std::vector<DetectionBox> gt_boxes;
};

struct WorldSpec {
    int n_persons = 8;
    int n_cameras = 2;
    double plane_size = 128.0;
    int image_h = 128;
    int image_w = 128;
    double radius_min = 4.0;
    double radius_max = 6.0;
    double intensity_min = 0.7;
    double intensity_max = 1.0;
    std::map<int, std::vector<Rect>> occluders;
};

// Deterministic perspective rigs: camera k looks at the plane center from
// bearing 2*pi*k/n, mapping the ground square to a foreshortened trapezoid.
// Purely a function of (k, n, extents) so every frame shares the geometry.
CameraSpec make_camera(int camera_id, int n_cameras, double plane_size, int image_h,
                       int image_w);

// Seeded person placement plus the fixed camera rigs.
std::pair<World, std::vector<CameraSpec>> generate_world(const WorldSpec& spec,
                                                         std::uint32_t seed);

// Projects each person into the view as an isotropic Gaussian blob on all 3
// channels, zeroes occluded pixels, and keeps a ground-truth box (the blob's
// 2-sigma rectangle clipped to the image) for every person with at least 5%
// of its blob mass visible.
CameraView render_view(const World& world, const CameraSpec& cam);

// Maps camera-a image pixels to camera-b image pixels: H_b * H_a^-1, exact
// for ground-plane points.
Homography cross_view_homography(const CameraSpec& cam_a, const CameraSpec& cam_b);

}  // namespace covis
