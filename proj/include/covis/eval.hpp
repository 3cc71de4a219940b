#pragma once

#include "covis/detect.hpp"

#include <string>
#include <vector>

namespace covis {

struct MatchResult {
    int true_positives = 0;
    int false_positives = 0;
    int false_negatives = 0;
    struct Pair {
        int detection = 0;
        int gt = 0;
        double iou = 0.0;
    };
    std::vector<Pair> pairs;
};

// Precision/recall/F-score as percentages in [0, 100].
struct PRF {
    double precision = 0.0;
    double recall = 0.0;
    double f_score = 0.0;
};

double iou(const DetectionBox& a, const DetectionBox& b);

// Greedy matching: detections in descending confidence (ties by (y, x), then
// input order); each takes the unmatched ground-truth box of highest IoU
// >= iou_tau, ties to the lower gt index.
MatchResult match_detections(const std::vector<DetectionBox>& dets,
                             const std::vector<DetectionBox>& gts, double iou_tau);

// Micro-average across frames: P = sum(tp)/(sum(tp)+sum(fp)), etc.
PRF prf_metrics(const std::vector<MatchResult>& per_frame);

// 100 * (collab - baseline) / baseline.
double relative_gain(double collab, double baseline);

struct TableRow {
    std::string name;
    PRF prf;
};

// CSV mirroring the benchmark-table layout: metric rows, then per-metric
// gain rows against the baseline column. Values printed to 2 decimals.
std::string emit_table(const PRF& baseline, const std::vector<TableRow>& configs);

}  // namespace covis
