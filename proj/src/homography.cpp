#include "covis/homography.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <stdexcept>

namespace covis {

Homography Homography::from_matrix(const Eigen::Matrix3d& m_in) {
    Homography h;
    h.m = m_in;
    if (!h.invertible()) throw std::invalid_argument("homography is singular");
    if (h.m(2, 2) != 0.0) h.m /= h.m(2, 2);
    return h;
}

Homography Homography::inverse() const {
    if (!invertible()) throw std::invalid_argument("homography is singular");
    return from_matrix(m.inverse());
}

Homography Homography::compose(const Homography& inner) const {
    return from_matrix(m * inner.m);
}

Eigen::Vector2d Homography::apply(const Eigen::Vector2d& p) const {
    const Eigen::Vector3d q = m * Eigen::Vector3d(p.x(), p.y(), 1.0);
    if (q.z() == 0.0) throw std::runtime_error("homography maps point to infinity");
    return {q.x() / q.z(), q.y() / q.z()};
}

Homography scale_homography_to_grid(const Homography& h_img, const GridSpec& src,
                                    const GridSpec& dst) {
    if (!h_img.invertible()) throw std::invalid_argument("homography is singular");
    if (src.stride < 1.0 || dst.stride < 1.0)
        throw std::invalid_argument("grid stride must be >= 1");
    // diag(1/d, 1/d, 1) * h_img * diag(s, s, 1), written entrywise as
    // multiply-then-divide so equal strides cancel exactly.
    const double col_mul[3] = {src.stride, src.stride, 1.0};
    const double row_div[3] = {dst.stride, dst.stride, 1.0};
    Eigen::Matrix3d g;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) g(r, c) = h_img.m(r, c) * col_mul[c] / row_div[r];
    return Homography::from_matrix(g);
}

void save_homography(const std::string& path, const Homography& h) {
    nlohmann::json j = nlohmann::json::array();
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) j.push_back(h.m(r, c));
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open for write: " + path);
    f << j.dump() << '\n';
}

Homography load_homography(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open for read: " + path);
    nlohmann::json j;
    f >> j;
    if (!j.is_array() || j.size() != 9)
        throw std::runtime_error("homography file must hold 9 reals: " + path);
    Eigen::Matrix3d m;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m(r, c) = j[3 * r + c].get<double>();
    return Homography::from_matrix(m);
}

Homography homography_from_points(const Eigen::Vector2d src[4], const Eigen::Vector2d dst[4]) {
    Eigen::Matrix<double, 8, 8> a = Eigen::Matrix<double, 8, 8>::Zero();
    Eigen::Matrix<double, 8, 1> b;
    for (int i = 0; i < 4; ++i) {
        const double x = src[i].x(), y = src[i].y();
        const double u = dst[i].x(), v = dst[i].y();
        a.row(2 * i) << x, y, 1, 0, 0, 0, -u * x, -u * y;
        a.row(2 * i + 1) << 0, 0, 0, x, y, 1, -v * x, -v * y;
        b(2 * i) = u;
        b(2 * i + 1) = v;
    }
    const Eigen::Matrix<double, 8, 1> h = a.colPivHouseholderQr().solve(b);
    Eigen::Matrix3d m;
    m << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), 1.0;
    return Homography::from_matrix(m);
}

}  // namespace covis
