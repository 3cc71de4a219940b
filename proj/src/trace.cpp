#include "covis/trace.hpp"

#include "covis/summarize.hpp"
#include "covis/warp.hpp"

#include <algorithm>
#include <stdexcept>

namespace covis {

double correlation_score(const std::vector<Mat2f>& x_frames, const GridSpec& x_grid,
                         const std::vector<Mat2f>& y_frames, const GridSpec& y_grid) {
    if (x_frames.size() < 2 || x_frames.size() != y_frames.size())
        throw std::invalid_argument("correlation_score: needs >= 2 aligned frames");

    std::vector<double> xs, ys;
    for (std::size_t f = 0; f < x_frames.size(); ++f) {
        const Mat2f rx = resample_bilinear(x_frames[f], x_grid, y_grid);
        const Mat2f& ry = y_frames[f];
        if (ry.rows() != y_grid.height || ry.cols() != y_grid.width ||
            rx.size() != ry.size())
            throw std::invalid_argument("correlation_score: length mismatch after resampling");
        for (int i = 0; i < rx.size(); ++i) {
            xs.push_back(rx.data()[i]);
            ys.push_back(ry.data()[i]);
        }
    }

    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) return 0.0;
    const double r2 = (sxy * sxy) / (sxx * syy);
    return std::clamp(r2, 0.0, 1.0);
}

FusionPlan build_fusion_plan(const ToyNet& net, const std::vector<Tensor>& calib_frames,
                             const std::vector<Mat2f>& gt_masks, int extract_layer,
                             int ingest_layer, int predictor_layer, int k_n, int k_prime,
                             const FusionParams& params) {
    if (calib_frames.size() < 2)
        throw std::invalid_argument(
            "build_fusion_plan: calibration set must hold >= 2 frames");
    if (!(extract_layer < ingest_layer && ingest_layer <= predictor_layer))
        throw std::invalid_argument("build_fusion_plan: need extract < ingest <= predictor");
    if (predictor_layer > net.num_indexed_layers())
        throw std::invalid_argument("build_fusion_plan: predictor layer out of range");
    if (calib_frames.size() != gt_masks.size())
        throw std::invalid_argument("build_fusion_plan: frames/masks count mismatch");
    params.validate();

    std::vector<Tensor> ingest_maps, predictor_maps;
    ingest_maps.reserve(calib_frames.size());
    predictor_maps.reserve(calib_frames.size());
    for (const Tensor& img : calib_frames) {
        LayerOutputs out = forward_with_taps(net, img, {ingest_layer, predictor_layer});
        ingest_maps.push_back(std::move(out.tapped.at(ingest_layer)));
        predictor_maps.push_back(std::move(out.tapped.at(predictor_layer)));
    }

    const auto scores = discriminant_scores(predictor_maps, gt_masks, predictor_layer);
    const std::set<int> predictor_channels = select_top_filters(scores, k_n);

    const GridSpec ingest_grid{ingest_maps[0].height(), ingest_maps[0].width(),
                               static_cast<double>(net.stride_at(ingest_layer))};
    const GridSpec predictor_grid{predictor_maps[0].height(), predictor_maps[0].width(),
                                  static_cast<double>(net.stride_at(predictor_layer))};

    std::vector<std::vector<Mat2f>> y_per_channel;
    for (int p : predictor_channels) {
        std::vector<Mat2f> ys;
        ys.reserve(predictor_maps.size());
        for (const Tensor& t : predictor_maps) ys.emplace_back(t.channel(p));
        y_per_channel.push_back(std::move(ys));
    }

    const int ingest_channels = ingest_maps[0].channels();
    std::vector<std::pair<double, int>> ranking;  // (-score, channel) keeps ties low-first
    for (int c = 0; c < ingest_channels; ++c) {
        std::vector<Mat2f> xs;
        xs.reserve(ingest_maps.size());
        for (const Tensor& t : ingest_maps) xs.emplace_back(t.channel(c));
        double best = 0.0;
        for (const auto& ys : y_per_channel)
            best = std::max(best, correlation_score(xs, ingest_grid, ys, predictor_grid));
        ranking.emplace_back(-best, c);
    }
    std::sort(ranking.begin(), ranking.end());

    FusionPlan plan;
    plan.extract_layer = extract_layer;
    plan.ingest_layer = ingest_layer;
    plan.params = params;
    const int take = std::min<int>(k_prime, ingest_channels);
    for (int i = 0; i < take; ++i) plan.target_channels.push_back(ranking[i].second);
    plan.validate();
    return plan;
}

}  // namespace covis
