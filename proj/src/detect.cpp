#include "covis/detect.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace covis {

std::string format_float(float v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::vector<DetectionBox> detect_blobs(const Tensor& fmap,
                                       const std::set<int>& channels,
                                       float threshold, float stride_to_image) {
    if (fmap.ndim() != 3) throw std::invalid_argument("detect_blobs expects [C,H,W]");
    if (channels.empty()) throw std::invalid_argument("detect_blobs: empty channel set");
    if (!(threshold > 0.0f)) throw std::invalid_argument("detect_blobs: threshold must be > 0");
    for (int c : channels)
        if (c < 0 || c >= fmap.channels())
            throw std::invalid_argument("detect_blobs: channel out of range");

    const int h = fmap.height(), w = fmap.width();
    Mat2f avg = Mat2f::Zero(h, w);
    for (int c : channels) avg += fmap.channel(c);
    avg /= static_cast<float>(channels.size());

    const float global_max = avg.maxCoeff();

    // 4-connected component labelling over thresholded cells.
    std::vector<int> label(static_cast<std::size_t>(h) * w, -1);
    auto idx = [w](int y, int x) { return static_cast<std::size_t>(y) * w + x; };

    struct Component {
        int min_x, min_y, max_x, max_y;
        double sum;
        int count;
    };
    std::vector<Component> comps;
    std::vector<std::pair<int, int>> stack;

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (avg(y, x) < threshold || label[idx(y, x)] >= 0) continue;
            const int id = static_cast<int>(comps.size());
            comps.push_back({x, y, x, y, 0.0, 0});
            stack.clear();
            stack.emplace_back(y, x);
            label[idx(y, x)] = id;
            while (!stack.empty()) {
                auto [cy, cx] = stack.back();
                stack.pop_back();
                Component& c = comps[id];
                c.min_x = std::min(c.min_x, cx);
                c.max_x = std::max(c.max_x, cx);
                c.min_y = std::min(c.min_y, cy);
                c.max_y = std::max(c.max_y, cy);
                c.sum += avg(cy, cx);
                c.count += 1;
                const int ny[4] = {cy - 1, cy + 1, cy, cy};
                const int nx[4] = {cx, cx, cx - 1, cx + 1};
                for (int k = 0; k < 4; ++k) {
                    if (ny[k] < 0 || ny[k] >= h || nx[k] < 0 || nx[k] >= w) continue;
                    if (avg(ny[k], nx[k]) < threshold || label[idx(ny[k], nx[k])] >= 0) continue;
                    label[idx(ny[k], nx[k])] = id;
                    stack.emplace_back(ny[k], nx[k]);
                }
            }
        }
    }

    std::vector<DetectionBox> boxes;
    boxes.reserve(comps.size());
    for (const Component& c : comps) {
        DetectionBox b;
        b.x = static_cast<float>(c.min_x) * stride_to_image;
        b.y = static_cast<float>(c.min_y) * stride_to_image;
        b.w = static_cast<float>(c.max_x - c.min_x + 1) * stride_to_image;
        b.h = static_cast<float>(c.max_y - c.min_y + 1) * stride_to_image;
        const double mean = c.sum / c.count;
        b.confidence = global_max > 0.0f
            ? std::clamp(static_cast<float>(mean / global_max), 0.0f, 1.0f)
            : 0.0f;
        b.class_id = 0;
        boxes.push_back(b);
    }
    std::sort(boxes.begin(), boxes.end(), [](const DetectionBox& a, const DetectionBox& b) {
        if (a.confidence != b.confidence) return a.confidence > b.confidence;
        if (a.y != b.y) return a.y < b.y;
        return a.x < b.x;
    });
    return boxes;
}

void write_detections_csv(const std::string& path,
                          const std::map<int, std::vector<DetectionBox>>& per_frame) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open for write: " + path);
    f << "frame_id,class_id,x,y,w,h,confidence\n";
    for (const auto& [frame, boxes] : per_frame) {
        for (const DetectionBox& b : boxes) {
            f << frame << ',' << b.class_id << ',' << format_float(b.x) << ','
              << format_float(b.y) << ',' << format_float(b.w) << ','
              << format_float(b.h) << ',' << format_float(b.confidence) << '\n';
        }
    }
    if (!f) throw std::runtime_error("short write: " + path);
}

std::map<int, std::vector<DetectionBox>> read_detections_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open for read: " + path);
    std::string line;
    if (!std::getline(f, line)) throw std::runtime_error("empty detections file: " + path);
    if (line != "frame_id,class_id,x,y,w,h,confidence")
        throw std::runtime_error("bad detections header in " + path);

    std::map<int, std::vector<DetectionBox>> out;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string tok;
        std::vector<std::string> cols;
        while (std::getline(ss, tok, ',')) cols.push_back(tok);
        if (cols.size() != 7) throw std::runtime_error("bad detections row in " + path);
        DetectionBox b;
        const int frame = std::stoi(cols[0]);
        b.class_id = std::stoi(cols[1]);
        b.x = std::strtof(cols[2].c_str(), nullptr);
        b.y = std::strtof(cols[3].c_str(), nullptr);
        b.w = std::strtof(cols[4].c_str(), nullptr);
        b.h = std::strtof(cols[5].c_str(), nullptr);
        b.confidence = std::strtof(cols[6].c_str(), nullptr);
        out[frame].push_back(b);
    }
    return out;
}

}  // namespace covis
