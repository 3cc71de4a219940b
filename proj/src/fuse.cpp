#include "covis/fuse.hpp"

#include "covis/warp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace covis {

float percentile95(const Tensor& fmap, int channel) {
    const auto ch = fmap.channel(channel);
    std::vector<float> v(ch.data(), ch.data() + ch.size());
    std::sort(v.begin(), v.end());
    if (v.back() == 0.0f && v.front() == 0.0f) return 0.0f;
    const double rank = 0.95 * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(rank);
    const double frac = rank - static_cast<double>(lo);
    if (lo + 1 >= v.size()) return v.back();
    return static_cast<float>(v[lo] + frac * (static_cast<double>(v[lo + 1]) - v[lo]));
}

Tensor inject(const Tensor& fmap, const std::vector<int>& channels, const Mat2f& warped,
              DigestKind kind, const FusionParams& params) {
    if (fmap.ndim() != 3) throw std::invalid_argument("inject expects [C,H,W]");
    if (warped.rows() != fmap.height() || warped.cols() != fmap.width())
        throw std::invalid_argument("inject: warped extents do not match fmap");
    for (int c : channels)
        if (c < 0 || c >= fmap.channels())
            throw std::invalid_argument("inject: channel out of range");
    params.validate();

    Tensor out = fmap;
    if (kind == DigestKind::C_a) {
        if (params.alpha == 0.0) return out;
        const float alpha = static_cast<float>(params.alpha);
        for (int c : channels) out.channel(c) += alpha * warped;
    } else {
        if (params.beta == 0.0) return out;
        const float tau = static_cast<float>(params.mask_rebinarize_tau);
        const Mat2f mask = (warped.array() >= tau).cast<float>().matrix();
        for (int c : channels) {
            const float boost = static_cast<float>(params.beta) * percentile95(fmap, c);
            if (boost == 0.0f) continue;
            out.channel(c) += boost * mask;
        }
    }
    return out;
}

Tensor renormalize_gamma(const Tensor& fmap, const std::vector<int>& channels,
                         const std::vector<float>& pre_max, double gamma) {
    if (fmap.ndim() != 3) throw std::invalid_argument("renormalize_gamma expects [C,H,W]");
    if (!(gamma > 0.0 && gamma <= 1.0))
        throw std::invalid_argument("renormalize_gamma: gamma must be in (0, 1]");
    if (pre_max.size() != channels.size())
        throw std::invalid_argument("renormalize_gamma: pre_max length mismatch");

    Tensor out = fmap;
    for (std::size_t i = 0; i < channels.size(); ++i) {
        const int c = channels[i];
        if (c < 0 || c >= fmap.channels())
            throw std::invalid_argument("renormalize_gamma: channel out of range");
        auto ch = out.channel(c);
        if (ch.minCoeff() < 0.0f)
            throw std::invalid_argument("renormalize_gamma: negative activations");
        const float m = pre_max[i];
        if (m <= 0.0f) continue;
        const float cur = ch.maxCoeff();
        if (cur <= 0.0f) continue;
        if (cur != m) {
            const double scale = static_cast<double>(m) / cur;
            for (int y = 0; y < ch.rows(); ++y)
                for (int x = 0; x < ch.cols(); ++x)
                    ch(y, x) = static_cast<float>(ch(y, x) * scale);
        }
        if (gamma != 1.0) {
            const double md = m;
            for (int y = 0; y < ch.rows(); ++y)
                for (int x = 0; x < ch.cols(); ++x) {
                    const double v = ch(y, x);
                    ch(y, x) = v <= 0.0 ? 0.0f
                                        : static_cast<float>(md * std::pow(v / md, gamma));
                }
        }
    }
    return out;
}

Tensor fuse_digest(const Tensor& fmap_at_ingest, const Digest& digest,
                   const Homography& h_img, const GridSpec& src_grid,
                   const GridSpec& dst_grid, const FusionPlan& plan) {
    plan.validate();
    if (digest.layer_index != plan.extract_layer)
        throw std::invalid_argument("fuse_digest: digest layer does not match plan");
    if (digest.height() != src_grid.height || digest.width() != src_grid.width)
        throw std::invalid_argument("fuse_digest: digest does not match source grid");
    if (fmap_at_ingest.ndim() != 3 || fmap_at_ingest.height() != dst_grid.height ||
        fmap_at_ingest.width() != dst_grid.width)
        throw std::invalid_argument("fuse_digest: fmap does not match destination grid");

    const Homography h_grid = scale_homography_to_grid(h_img, src_grid, dst_grid);
    const Mat2f warped = warp_bilinear(digest.payload, h_grid, dst_grid);

    std::vector<float> pre_max;
    pre_max.reserve(plan.target_channels.size());
    for (int c : plan.target_channels)
        pre_max.push_back(fmap_at_ingest.channel(c).maxCoeff());

    const Tensor injected =
        inject(fmap_at_ingest, plan.target_channels, warped, digest.kind, plan.params);
    return renormalize_gamma(injected, plan.target_channels, pre_max, plan.params.gamma);
}

Tensor fuse_digests(const Tensor& fmap_at_ingest, std::vector<CollaboratorInput> inputs,
                    const GridSpec& dst_grid, const FusionPlan& plan) {
    std::stable_sort(inputs.begin(), inputs.end(),
                     [](const CollaboratorInput& a, const CollaboratorInput& b) {
                         return a.digest.source_node < b.digest.source_node;
                     });
    Tensor current = fmap_at_ingest;
    for (const CollaboratorInput& in : inputs)
        current = fuse_digest(current, in.digest, in.h_img, in.src_grid, dst_grid, plan);
    return current;
}

}  // namespace covis
