#pragma once

#include "covis/scenario.hpp"

#include <map>
#include <set>
#include <string>

namespace covis {

// Calibration artifacts beyond the fusion plan itself: which channels feed
// the digest, which channels the detection head reads, and its threshold.
struct CalibrationBundle {
    std::set<int> digest_channels;
    std::set<int> detector_channels;
    float detect_threshold = 1.0f;
};

void save_calibration_bundle(const std::string& path, const CalibrationBundle& b);
CalibrationBundle load_calibration_bundle(const std::string& path);

// Per-frame views for one node, regenerated deterministically from the
// scenario seed. Calibration frames use a disjoint seed stream from the
// evaluation frames.
std::vector<Tensor> scene_frames(const ScenarioConfig& cfg, int node, bool calib);
std::vector<std::vector<DetectionBox>> scene_gt(const ScenarioConfig& cfg, int node,
                                                bool calib);

// Rasterizes ground-truth boxes onto a feature grid: cell (x, y) is marked
// when its image point (x * stride, y * stride) falls inside a box.
Mat2f boxes_to_grid_mask(const std::vector<DetectionBox>& boxes, int grid_h, int grid_w,
                         double stride);

// Pipeline stages; each writes its artifacts under cfg.out_dir.
void stage_gen_scene(const ScenarioConfig& cfg);
void stage_calibrate(const ScenarioConfig& cfg);
void stage_run(const ScenarioConfig& cfg);
void stage_feasibility(const ScenarioConfig& cfg, const std::vector<double>& deltas,
                       FeasibilityMode mode);
std::string stage_eval(const ScenarioConfig& cfg);  // returns the table CSV

// Paths of the artifacts each stage produces.
std::string scene_dir(const ScenarioConfig& cfg);
std::string stimulus_path(const ScenarioConfig& cfg, int node, int frame);
std::string gt_path(const ScenarioConfig& cfg, int node);
std::string ground_homography_path(const ScenarioConfig& cfg, int node);
std::string cross_homography_path(const ScenarioConfig& cfg, int from, int to);
std::string fusion_plan_path(const ScenarioConfig& cfg);
std::string calibration_path(const ScenarioConfig& cfg);
std::string run_dir(const ScenarioConfig& cfg, const std::string& run_name);
std::string detections_path(const ScenarioConfig& cfg, const std::string& run_name,
                            int node);
std::string trace_path(const ScenarioConfig& cfg, const std::string& run_name);
std::string feasibility_path(const ScenarioConfig& cfg);
std::string eval_table_path(const ScenarioConfig& cfg);

}  // namespace covis
