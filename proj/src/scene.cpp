#include "covis/scene.hpp"

#include "covis/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace covis {

namespace {

// Local scale of the projective map at a ground point: sqrt(|det J|) of the
// 2x2 Jacobian.
double local_scale(const Homography& h, double x, double y) {
    const Eigen::Matrix3d& m = h.m;
    const double w = m(2, 0) * x + m(2, 1) * y + m(2, 2);
    if (std::abs(w) < 1e-12) return 0.0;
    const double u = m(0, 0) * x + m(0, 1) * y + m(0, 2);
    const double v = m(1, 0) * x + m(1, 1) * y + m(1, 2);
    const double du_dx = (m(0, 0) * w - u * m(2, 0)) / (w * w);
    const double du_dy = (m(0, 1) * w - u * m(2, 1)) / (w * w);
    const double dv_dx = (m(1, 0) * w - v * m(2, 0)) / (w * w);
    const double dv_dy = (m(1, 1) * w - v * m(2, 1)) / (w * w);
    return std::sqrt(std::abs(du_dx * dv_dy - du_dy * dv_dx));
}

bool occluded_at(const std::vector<Rect>* rects, double px, double py) {
    if (!rects) return false;
    for (const Rect& r : *rects)
        if (r.contains(px, py)) return true;
    return false;
}

}  // namespace

CameraSpec make_camera(int camera_id, int n_cameras, double plane_size, int image_h,
                       int image_w) {
    if (n_cameras < 1) throw std::invalid_argument("make_camera: need n_cameras >= 1");
    const double p = plane_size;
    const double c = p / 2.0;
    const double theta = 2.0 * M_PI * camera_id / n_cameras;

    Eigen::Matrix3d rot = Eigen::Matrix3d::Identity();
    rot(0, 0) = std::cos(theta);
    rot(0, 1) = -std::sin(theta);
    rot(1, 0) = std::sin(theta);
    rot(1, 1) = std::cos(theta);
    Eigen::Matrix3d to_center = Eigen::Matrix3d::Identity();
    to_center(0, 2) = -c;
    to_center(1, 2) = -c;
    Eigen::Matrix3d from_center = Eigen::Matrix3d::Identity();
    from_center(0, 2) = c;
    from_center(1, 2) = c;
    Eigen::Matrix3d norm = Eigen::Matrix3d::Identity();
    norm(0, 0) = 1.0 / p;
    norm(1, 1) = 1.0 / p;

    // Normalized rotated plane -> foreshortened trapezoid (y = 0 near the
    // camera, y = 1 far).
    const double w = image_w, h = image_h;
    const Eigen::Vector2d src[4] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    const Eigen::Vector2d dst[4] = {{0.06 * w, 0.94 * h},
                                    {0.94 * w, 0.94 * h},
                                    {0.68 * w, 0.10 * h},
                                    {0.32 * w, 0.10 * h}};
    const Homography trap = homography_from_points(src, dst);

    CameraSpec cam;
    cam.camera_id = camera_id;
    cam.image_h = image_h;
    cam.image_w = image_w;
    cam.h_ground_to_image =
        Homography::from_matrix(trap.m * norm * from_center * rot * to_center);
    return cam;
}

std::pair<World, std::vector<CameraSpec>> generate_world(const WorldSpec& spec,
                                                         std::uint32_t seed) {
    if (spec.n_persons < 1) throw std::invalid_argument("generate_world: need persons");
    if (spec.n_cameras < 2) throw std::invalid_argument("generate_world: need >= 2 cameras");

    World world;
    world.seed = seed;
    world.plane_size = spec.plane_size;
    world.occluders = spec.occluders;

    std::mt19937 rng(derive_seed(seed, 0x5ce11eu));
    const float lo = static_cast<float>(0.08 * spec.plane_size);
    const float hi = static_cast<float>(0.92 * spec.plane_size);
    for (int i = 0; i < spec.n_persons; ++i) {
        Person p;
        p.ground_x = rand_range(rng, lo, hi);
        p.ground_y = rand_range(rng, lo, hi);
        p.radius = rand_range(rng, static_cast<float>(spec.radius_min),
                              static_cast<float>(spec.radius_max));
        p.intensity = rand_range(rng, static_cast<float>(spec.intensity_min),
                                 static_cast<float>(spec.intensity_max));
        world.persons.push_back(p);
    }

    std::vector<CameraSpec> cams;
    cams.reserve(spec.n_cameras);
    for (int k = 0; k < spec.n_cameras; ++k)
        cams.push_back(make_camera(k, spec.n_cameras, spec.plane_size, spec.image_h,
                                   spec.image_w));
    return {std::move(world), std::move(cams)};
}

CameraView render_view(const World& world, const CameraSpec& cam) {
    const int h = cam.image_h, w = cam.image_w;
    CameraView view;
    view.camera_id = cam.camera_id;
    view.h_ground_to_image = cam.h_ground_to_image;
    view.stimulus = Tensor::zeros({3, h, w});

    const std::vector<Rect>* rects = nullptr;
    if (auto it = world.occluders.find(cam.camera_id); it != world.occluders.end())
        rects = &it->second;

    Mat2f accum = Mat2f::Zero(h, w);
    for (const Person& person : world.persons) {
        const Eigen::Vector3d q = cam.h_ground_to_image.m *
            Eigen::Vector3d(person.ground_x, person.ground_y, 1.0);
        if (q.z() <= 1e-9) continue;  // behind the camera plane
        const double u = q.x() / q.z(), v = q.y() / q.z();
        const double sigma = person.radius * local_scale(cam.h_ground_to_image,
                                                         person.ground_x, person.ground_y);
        if (sigma <= 1e-6) continue;

        const double reach = 3.5 * sigma;
        const int x0 = std::max(0, static_cast<int>(std::floor(u - reach)));
        const int x1 = std::min(w - 1, static_cast<int>(std::ceil(u + reach)));
        const int y0 = std::max(0, static_cast<int>(std::floor(v - reach)));
        const int y1 = std::min(h - 1, static_cast<int>(std::ceil(v + reach)));
        if (x0 > x1 || y0 > y1) continue;  // projects outside this view

        double mass_total = 0.0, mass_visible = 0.0;
        for (int py = y0; py <= y1; ++py) {
            for (int px = x0; px <= x1; ++px) {
                const double d2 = (px - u) * (px - u) + (py - v) * (py - v);
                const double g = person.intensity * std::exp(-d2 / (2.0 * sigma * sigma));
                mass_total += g;
                if (!occluded_at(rects, px, py)) {
                    mass_visible += g;
                    accum(py, px) += static_cast<float>(g);
                }
            }
        }
        if (mass_total <= 0.0 || mass_visible / mass_total < 0.05) continue;

        const double bx0 = std::max(0.0, u - 2.0 * sigma);
        const double by0 = std::max(0.0, v - 2.0 * sigma);
        const double bx1 = std::min(static_cast<double>(w), u + 2.0 * sigma);
        const double by1 = std::min(static_cast<double>(h), v + 2.0 * sigma);
        if (bx1 - bx0 <= 0.0 || by1 - by0 <= 0.0) continue;
        DetectionBox box;
        box.x = static_cast<float>(bx0);
        box.y = static_cast<float>(by0);
        box.w = static_cast<float>(bx1 - bx0);
        box.h = static_cast<float>(by1 - by0);
        box.confidence = 1.0f;
        box.class_id = 0;
        view.gt_boxes.push_back(box);
    }

    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const float v = std::min(1.0f, accum(y, x));
            view.stimulus.at(0, y, x) = v;
            view.stimulus.at(1, y, x) = v;
            view.stimulus.at(2, y, x) = v;
        }
    return view;
}

Homography cross_view_homography(const CameraSpec& cam_a, const CameraSpec& cam_b) {
    return cam_b.h_ground_to_image.compose(cam_a.h_ground_to_image.inverse());
}

}  // namespace covis
