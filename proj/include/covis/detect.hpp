#pragma once

#include "covis/tensor.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace covis {

struct DetectionBox {
    float x = 0, y = 0, w = 0, h = 0;  // image-pixel units
    float confidence = 0;              // in [0,1]
    int class_id = 0;                  // 0 = person
};

// Threshold/connected-components detection head. Averages the selected
// channels, keeps cells >= threshold, extracts 4-connected components and
// reports each component's bounding box in image pixels. Confidence is the
// component's mean activation over the global max, clamped to [0,1]. Output
// is ordered by descending confidence, ties by (y, x).
std::vector<DetectionBox> detect_blobs(const Tensor& fmap,
                                       const std::set<int>& channels,
                                       float threshold, float stride_to_image);

// Detections CSV: header `frame_id,class_id,x,y,w,h,confidence`. Floats are
// written shortest-round-trip so files are byte-stable and re-readable
// exactly.
void write_detections_csv(const std::string& path,
                          const std::map<int, std::vector<DetectionBox>>& per_frame);
std::map<int, std::vector<DetectionBox>> read_detections_csv(const std::string& path);

std::string format_float(float v);
std::string format_double(double v);

}  // namespace covis
