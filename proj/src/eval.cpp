#include "covis/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace covis {

double iou(const DetectionBox& a, const DetectionBox& b) {
    const double ix0 = std::max(a.x, b.x);
    const double iy0 = std::max(a.y, b.y);
    const double ix1 = std::min(a.x + a.w, b.x + b.w);
    const double iy1 = std::min(a.y + a.h, b.y + b.h);
    const double iw = std::max(0.0, ix1 - ix0);
    const double ih = std::max(0.0, iy1 - iy0);
    const double inter = iw * ih;
    const double uni = static_cast<double>(a.w) * a.h + static_cast<double>(b.w) * b.h - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

MatchResult match_detections(const std::vector<DetectionBox>& dets,
                             const std::vector<DetectionBox>& gts, double iou_tau) {
    if (!(iou_tau > 0.0 && iou_tau <= 1.0))
        throw std::invalid_argument("match_detections: iou_tau must be in (0, 1]");

    std::vector<int> order(dets.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (dets[a].confidence != dets[b].confidence)
            return dets[a].confidence > dets[b].confidence;
        if (dets[a].y != dets[b].y) return dets[a].y < dets[b].y;
        return dets[a].x < dets[b].x;
    });

    MatchResult res;
    std::vector<bool> gt_taken(gts.size(), false);
    for (int di : order) {
        int best_gt = -1;
        double best_iou = 0.0;
        for (std::size_t gi = 0; gi < gts.size(); ++gi) {
            if (gt_taken[gi]) continue;
            const double v = iou(dets[di], gts[gi]);
            if (v < iou_tau) continue;
            if (v > best_iou) {
                best_iou = v;
                best_gt = static_cast<int>(gi);
            }
        }
        if (best_gt >= 0) {
            gt_taken[best_gt] = true;
            res.pairs.push_back({di, best_gt, best_iou});
        }
    }
    res.true_positives = static_cast<int>(res.pairs.size());
    res.false_positives = static_cast<int>(dets.size()) - res.true_positives;
    res.false_negatives = static_cast<int>(gts.size()) - res.true_positives;
    return res;
}

PRF prf_metrics(const std::vector<MatchResult>& per_frame) {
    if (per_frame.empty()) throw std::invalid_argument("prf_metrics: no frames");
    long tp = 0, fp = 0, fn = 0;
    for (const MatchResult& m : per_frame) {
        tp += m.true_positives;
        fp += m.false_positives;
        fn += m.false_negatives;
    }
    PRF out;
    out.precision = tp + fp > 0 ? 100.0 * tp / static_cast<double>(tp + fp) : 0.0;
    out.recall = tp + fn > 0 ? 100.0 * tp / static_cast<double>(tp + fn) : 0.0;
    out.f_score = out.precision + out.recall > 0.0
        ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
        : 0.0;
    return out;
}

double relative_gain(double collab, double baseline) {
    if (baseline <= 0.0) throw std::invalid_argument("relative_gain: baseline must be > 0");
    return 100.0 * (collab - baseline) / baseline;
}

namespace {

std::string two_decimals(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace

std::string emit_table(const PRF& baseline, const std::vector<TableRow>& configs) {
    std::ostringstream out;
    out << "metric,baseline";
    for (const TableRow& c : configs) out << ',' << c.name;
    out << '\n';

    auto metric_row = [&](const char* name, double base, auto getter) {
        out << name << ',' << two_decimals(base);
        for (const TableRow& c : configs) out << ',' << two_decimals(getter(c.prf));
        out << '\n';
    };
    metric_row("precision", baseline.precision, [](const PRF& p) { return p.precision; });
    metric_row("recall", baseline.recall, [](const PRF& p) { return p.recall; });
    metric_row("f_score", baseline.f_score, [](const PRF& p) { return p.f_score; });

    auto gain_row = [&](const char* name, double base, auto getter) {
        out << name << ',';
        for (const TableRow& c : configs) {
            out << ',';
            if (base > 0.0) out << two_decimals(relative_gain(getter(c.prf), base));
        }
        out << '\n';
    };
    if (!configs.empty()) {
        gain_row("precision_gain", baseline.precision,
                 [](const PRF& p) { return p.precision; });
        gain_row("recall_gain", baseline.recall, [](const PRF& p) { return p.recall; });
        gain_row("f_score_gain", baseline.f_score, [](const PRF& p) { return p.f_score; });
    }
    return out.str();
}

}  // namespace covis
