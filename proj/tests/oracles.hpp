#pragma once

// Independent reference implementations used only by tests. These stay
// deliberately naive so they can be checked by eye, and they never call the
// code paths they verify.

#include "covis/eval.hpp"
#include "covis/tensor.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace oracles {

// Quadruple-loop convolution; accumulates each output in double in the same
// (c, ky, kx) term order the contract pins down.
inline covis::Tensor conv2d_naive(const covis::Tensor& input, const covis::Tensor& kernel,
                                  const std::vector<float>& bias, int stride, int pad) {
    const int in_c = input.dims[0], in_h = input.dims[1], in_w = input.dims[2];
    const int out_c = kernel.dims[0], k_h = kernel.dims[2], k_w = kernel.dims[3];
    const int out_h = (in_h + 2 * pad - k_h) / stride + 1;
    const int out_w = (in_w + 2 * pad - k_w) / stride + 1;
    covis::Tensor out = covis::Tensor::zeros({out_c, out_h, out_w});
    for (int o = 0; o < out_c; ++o)
        for (int oy = 0; oy < out_h; ++oy)
            for (int ox = 0; ox < out_w; ++ox) {
                double acc = bias[o];
                for (int c = 0; c < in_c; ++c)
                    for (int ky = 0; ky < k_h; ++ky)
                        for (int kx = 0; kx < k_w; ++kx) {
                            const int iy = oy * stride - pad + ky;
                            const int ix = ox * stride - pad + kx;
                            if (iy < 0 || iy >= in_h || ix < 0 || ix >= in_w) continue;
                            acc += static_cast<double>(input.at(c, iy, ix)) *
                                   static_cast<double>(kernel.at4(o, c, ky, kx));
                        }
                out.at(o, oy, ox) = static_cast<float>(acc);
            }
    return out;
}

inline covis::Tensor max_pool2d_naive(const covis::Tensor& input, int k, int stride) {
    const int c_n = input.dims[0], in_h = input.dims[1], in_w = input.dims[2];
    const int out_h = (in_h - k) / stride + 1;
    const int out_w = (in_w - k) / stride + 1;
    covis::Tensor out = covis::Tensor::zeros({c_n, out_h, out_w});
    for (int c = 0; c < c_n; ++c)
        for (int oy = 0; oy < out_h; ++oy)
            for (int ox = 0; ox < out_w; ++ox) {
                float m = -1e30f;
                for (int ky = 0; ky < k; ++ky)
                    for (int kx = 0; kx < k; ++kx)
                        m = std::max(m, input.at(c, oy * stride + ky, ox * stride + kx));
                out.at(c, oy, ox) = m;
            }
    return out;
}

// Literal replay of the greedy matching rule, step by step.
struct GreedyReplay {
    int tp = 0, fp = 0, fn = 0;
};

inline GreedyReplay match_replay(const std::vector<covis::DetectionBox>& dets,
                                 const std::vector<covis::DetectionBox>& gts,
                                 double iou_tau) {
    std::vector<int> order(dets.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (dets[a].confidence != dets[b].confidence)
            return dets[a].confidence > dets[b].confidence;
        if (dets[a].y != dets[b].y) return dets[a].y < dets[b].y;
        return dets[a].x < dets[b].x;
    });
    std::vector<bool> used(gts.size(), false);
    GreedyReplay r;
    for (int di : order) {
        double best = 0.0;
        int pick = -1;
        for (std::size_t gi = 0; gi < gts.size(); ++gi) {
            if (used[gi]) continue;
            // Inline IoU, written independently of the library's.
            const covis::DetectionBox& a = dets[di];
            const covis::DetectionBox& b = gts[gi];
            const double w = std::min<double>(a.x + a.w, b.x + b.w) - std::max<double>(a.x, b.x);
            const double h = std::min<double>(a.y + a.h, b.y + b.h) - std::max<double>(a.y, b.y);
            const double inter = (w > 0 && h > 0) ? w * h : 0.0;
            const double v = inter / (double(a.w) * a.h + double(b.w) * b.h - inter);
            if (v >= iou_tau && v > best) {
                best = v;
                pick = static_cast<int>(gi);
            }
        }
        if (pick >= 0) {
            used[pick] = true;
            r.tp++;
        } else {
            r.fp++;
        }
    }
    r.fn = static_cast<int>(gts.size()) - r.tp;
    return r;
}

// R^2 via the explicit least-squares fit y ~ a*x + b and 1 - SS_res/SS_tot,
// a different route than the library's correlation form.
inline double r_squared_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) return 0.0;
    const double a = (n * sxy - sx * sy) / denom;
    const double b = (sy - a * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double my = sy / n;
    for (std::size_t i = 0; i < x.size(); ++i) {
        ss_res += (y[i] - (a * x[i] + b)) * (y[i] - (a * x[i] + b));
        ss_tot += (y[i] - my) * (y[i] - my);
    }
    if (ss_tot == 0.0) return 0.0;
    return 1.0 - ss_res / ss_tot;
}

}  // namespace oracles
