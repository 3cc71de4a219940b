#include "covis/pipeline.hpp"

#include "covis/eval.hpp"
#include "covis/rng.hpp"
#include "covis/summarize.hpp"
#include "covis/tensor_io.hpp"
#include "covis/trace.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace covis {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint32_t kCalibFrameSalt = 1000;

std::string frame_name(int node, int frame) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "cam%d_frame%03d.cvt", node, frame);
    return buf;
}

std::vector<CameraView> render_frames(const ScenarioConfig& cfg, int node, bool calib) {
    const int n = calib ? cfg.n_calib_frames : cfg.n_frames;
    std::vector<CameraView> views;
    views.reserve(n);
    for (int f = 0; f < n; ++f) {
        const std::uint32_t salt = calib ? kCalibFrameSalt + f : static_cast<std::uint32_t>(f);
        auto [world, cams] = generate_world(cfg.world, derive_seed(cfg.world_seed, salt));
        views.push_back(render_view(world, cams.at(node)));
    }
    return views;
}

// Spatial dims of each indexed layer's output for an H x W input.
std::vector<std::pair<int, int>> layer_dims(const ToyNet& net, int h, int w) {
    std::vector<std::pair<int, int>> dims;
    for (const LayerSpec& s : net.layers) {
        switch (s.kind) {
            case LayerSpec::Kind::conv:
                h = (h + 2 * s.pad - s.kernel.dims[2]) / s.stride + 1;
                w = (w + 2 * s.pad - s.kernel.dims[3]) / s.stride + 1;
                dims.emplace_back(h, w);
                break;
            case LayerSpec::Kind::maxpool:
                h = (h - s.pool_k) / s.pool_stride + 1;
                w = (w - s.pool_k) / s.pool_stride + 1;
                break;
            case LayerSpec::Kind::relu:
                break;
        }
    }
    return dims;
}

std::vector<std::int64_t> digest_bytes_per_layer(const ToyNet& net, const ScenarioConfig& cfg,
                                                 DigestKind kind) {
    std::vector<std::int64_t> bytes;
    for (const auto& [h, w] : layer_dims(net, cfg.world.image_h, cfg.world.image_w))
        bytes.push_back(static_cast<std::int64_t>(encoded_digest_size(kind, h, w)));
    return bytes;
}

TimingProfile profile_for_kind(const ToyNet& net, const ScenarioConfig& cfg,
                               DigestKind kind) {
    TimingProfile p = cfg.timing;
    if (p.digest_bytes.empty()) p.digest_bytes = digest_bytes_per_layer(net, cfg, kind);
    p.validate(net.num_indexed_layers());
    return p;
}

SimScenario build_sim_scenario(const ScenarioConfig& cfg, const ToyNet& net,
                               const RunConfig& run, const CalibrationBundle& bundle) {
    SimScenario sc;
    for (int k = 0; k < cfg.world.n_cameras; ++k) {
        NodeConfig n;
        n.node_id = k;
        n.fps = cfg.node_fps[k];
        for (int peer = 0; peer < cfg.world.n_cameras; ++peer) {
            if (peer == k) continue;
            n.homography_to.emplace(peer, load_homography(cross_homography_path(cfg, k, peer)));
        }
        sc.nodes.push_back(std::move(n));
    }
    sc.pairs = run.pairs;
    sc.profile = profile_for_kind(net, cfg, run.kind);
    sc.n_frames = cfg.n_frames;
    sc.extract_layer = cfg.extract_layer;
    sc.ingest_layer = cfg.ingest_layer;
    sc.predictor_layer = cfg.predictor_layer;
    sc.digest_kind = run.kind;
    sc.digest_tau = static_cast<float>(cfg.digest_tau);
    sc.digest_channels = bundle.digest_channels;
    sc.detector_channels = bundle.detector_channels;
    sc.detect_threshold = bundle.detect_threshold;
    return sc;
}

}  // namespace

std::string scene_dir(const ScenarioConfig& cfg) { return cfg.out_dir + "/scene"; }

std::string stimulus_path(const ScenarioConfig& cfg, int node, int frame) {
    return scene_dir(cfg) + "/" + frame_name(node, frame);
}

std::string gt_path(const ScenarioConfig& cfg, int node) {
    return scene_dir(cfg) + "/gt_cam" + std::to_string(node) + ".csv";
}

std::string ground_homography_path(const ScenarioConfig& cfg, int node) {
    return scene_dir(cfg) + "/h_ground_cam" + std::to_string(node) + ".json";
}

std::string cross_homography_path(const ScenarioConfig& cfg, int from, int to) {
    return scene_dir(cfg) + "/h_cam" + std::to_string(from) + "_to_cam" +
           std::to_string(to) + ".json";
}

std::string fusion_plan_path(const ScenarioConfig& cfg) {
    return cfg.out_dir + "/calib/fusion_plan.json";
}

std::string calibration_path(const ScenarioConfig& cfg) {
    return cfg.out_dir + "/calib/calibration.json";
}

std::string run_dir(const ScenarioConfig& cfg, const std::string& run_name) {
    return cfg.out_dir + "/runs/" + run_name;
}

std::string detections_path(const ScenarioConfig& cfg, const std::string& run_name,
                            int node) {
    return run_dir(cfg, run_name) + "/det_cam" + std::to_string(node) + ".csv";
}

std::string trace_path(const ScenarioConfig& cfg, const std::string& run_name) {
    return run_dir(cfg, run_name) + "/trace.csv";
}

std::string feasibility_path(const ScenarioConfig& cfg) {
    return cfg.out_dir + "/feasibility.csv";
}

std::string eval_table_path(const ScenarioConfig& cfg) {
    return cfg.out_dir + "/eval_table.csv";
}

void save_calibration_bundle(const std::string& path, const CalibrationBundle& b) {
    json j;
    j["digest_channels"] = std::vector<int>(b.digest_channels.begin(), b.digest_channels.end());
    j["detector_channels"] =
        std::vector<int>(b.detector_channels.begin(), b.detector_channels.end());
    j["detect_threshold"] = b.detect_threshold;
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open for write: " + path);
    f << j.dump(2) << '\n';
}

CalibrationBundle load_calibration_bundle(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open for read: " + path);
    json j;
    f >> j;
    CalibrationBundle b;
    for (int c : j.at("digest_channels").get<std::vector<int>>()) b.digest_channels.insert(c);
    for (int c : j.at("detector_channels").get<std::vector<int>>())
        b.detector_channels.insert(c);
    b.detect_threshold = j.at("detect_threshold").get<float>();
    return b;
}

std::vector<Tensor> scene_frames(const ScenarioConfig& cfg, int node, bool calib) {
    std::vector<Tensor> out;
    for (CameraView& v : render_frames(cfg, node, calib))
        out.push_back(std::move(v.stimulus));
    return out;
}

std::vector<std::vector<DetectionBox>> scene_gt(const ScenarioConfig& cfg, int node,
                                                bool calib) {
    std::vector<std::vector<DetectionBox>> out;
    for (CameraView& v : render_frames(cfg, node, calib))
        out.push_back(std::move(v.gt_boxes));
    return out;
}

Mat2f boxes_to_grid_mask(const std::vector<DetectionBox>& boxes, int grid_h, int grid_w,
                         double stride) {
    Mat2f mask = Mat2f::Zero(grid_h, grid_w);
    for (const DetectionBox& b : boxes) {
        for (int y = 0; y < grid_h; ++y) {
            const double py = y * stride;
            if (py < b.y || py >= b.y + b.h) continue;
            for (int x = 0; x < grid_w; ++x) {
                const double px = x * stride;
                if (px >= b.x && px < b.x + b.w) mask(y, x) = 1.0f;
            }
        }
    }
    return mask;
}

void stage_gen_scene(const ScenarioConfig& cfg) {
    cfg.validate();
    fs::create_directories(scene_dir(cfg));
    const auto cams = generate_world(cfg.world, cfg.world_seed).second;
    for (int k = 0; k < cfg.world.n_cameras; ++k) {
        const auto views = render_frames(cfg, k, false);
        std::map<int, std::vector<DetectionBox>> gt;
        for (int f = 0; f < cfg.n_frames; ++f) {
            write_tensor(stimulus_path(cfg, k, f), views[f].stimulus);
            gt[f] = views[f].gt_boxes;
        }
        write_detections_csv(gt_path(cfg, k), gt);
        save_homography(ground_homography_path(cfg, k), cams[k].h_ground_to_image);
        for (int peer = 0; peer < cfg.world.n_cameras; ++peer) {
            if (peer == k) continue;
            save_homography(cross_homography_path(cfg, k, peer),
                            cross_view_homography(cams[k], cams[peer]));
        }
    }
}

void stage_calibrate(const ScenarioConfig& cfg) {
    cfg.validate();
    fs::create_directories(cfg.out_dir + "/calib");
    const ToyNet net = build_toy_net(cfg.net_seed);
    if (cfg.predictor_layer > net.num_indexed_layers())
        throw std::invalid_argument("predictor layer beyond network depth");

    const std::vector<Tensor> images = scene_frames(cfg, cfg.eval_node, true);
    const auto gt = scene_gt(cfg, cfg.eval_node, true);

    std::vector<Tensor> extract_maps, predictor_maps;
    for (const Tensor& img : images) {
        LayerOutputs out =
            forward_with_taps(net, img, {cfg.extract_layer, cfg.predictor_layer});
        extract_maps.push_back(std::move(out.tapped.at(cfg.extract_layer)));
        predictor_maps.push_back(std::move(out.tapped.at(cfg.predictor_layer)));
    }

    const double extract_stride = net.stride_at(cfg.extract_layer);
    const double predictor_stride = net.stride_at(cfg.predictor_layer);
    std::vector<Mat2f> extract_masks, predictor_masks;
    for (std::size_t f = 0; f < images.size(); ++f) {
        extract_masks.push_back(boxes_to_grid_mask(gt[f], extract_maps[f].height(),
                                                   extract_maps[f].width(), extract_stride));
        predictor_masks.push_back(boxes_to_grid_mask(gt[f], predictor_maps[f].height(),
                                                     predictor_maps[f].width(),
                                                     predictor_stride));
    }

    CalibrationBundle bundle;
    bundle.digest_channels = select_top_filters(
        discriminant_scores(extract_maps, extract_masks, cfg.extract_layer), cfg.k_n);
    bundle.detector_channels = select_top_filters(
        discriminant_scores(predictor_maps, predictor_masks, cfg.predictor_layer), cfg.k_n);

    // Threshold pinned against the unfused calibration activations.
    double mean_max = 0.0;
    for (const Tensor& t : predictor_maps) {
        Mat2f avg = Mat2f::Zero(t.height(), t.width());
        for (int c : bundle.detector_channels) avg += t.channel(c);
        avg /= static_cast<float>(bundle.detector_channels.size());
        mean_max += avg.maxCoeff();
    }
    mean_max /= static_cast<double>(predictor_maps.size());
    bundle.detect_threshold = static_cast<float>(cfg.detect_tau * mean_max);
    if (!(bundle.detect_threshold > 0.0f))
        throw std::runtime_error("calibration produced a non-positive detect threshold");

    const FusionPlan plan =
        build_fusion_plan(net, images, predictor_masks, cfg.extract_layer, cfg.ingest_layer,
                          cfg.predictor_layer, cfg.k_n, cfg.k_prime, cfg.fusion);

    save_fusion_plan(fusion_plan_path(cfg), plan);
    save_calibration_bundle(calibration_path(cfg), bundle);
}

void stage_run(const ScenarioConfig& cfg) {
    cfg.validate();
    const ToyNet net = build_toy_net(cfg.net_seed);
    const FusionPlan plan = load_fusion_plan(fusion_plan_path(cfg));
    const CalibrationBundle bundle = load_calibration_bundle(calibration_path(cfg));

    std::map<int, std::vector<Tensor>> inputs;
    for (int k = 0; k < cfg.world.n_cameras; ++k) {
        std::vector<Tensor> frames;
        frames.reserve(cfg.n_frames);
        for (int f = 0; f < cfg.n_frames; ++f)
            frames.push_back(read_tensor(stimulus_path(cfg, k, f)));
        inputs.emplace(k, std::move(frames));
    }

    std::map<int, FusionPlan> plans;
    for (int k = 0; k < cfg.world.n_cameras; ++k) plans.emplace(k, plan);

    std::vector<RunConfig> all_runs;
    all_runs.push_back({"baseline", DigestKind::C_a, {}});
    all_runs.insert(all_runs.end(), cfg.runs.begin(), cfg.runs.end());

    for (const RunConfig& run : all_runs) {
        fs::create_directories(run_dir(cfg, run.name));
        const SimScenario sc = build_sim_scenario(cfg, net, run, bundle);
        const SimResult result = run_simulation(sc, net, plans, inputs);
        for (int k = 0; k < cfg.world.n_cameras; ++k) {
            std::map<int, std::vector<DetectionBox>> per_frame;
            if (auto it = result.detections.find(k); it != result.detections.end())
                per_frame = it->second;
            write_detections_csv(detections_path(cfg, run.name, k), per_frame);
        }
        write_trace_csv(trace_path(cfg, run.name), result.trace);
    }
}

void stage_feasibility(const ScenarioConfig& cfg, const std::vector<double>& deltas,
                       FeasibilityMode mode) {
    cfg.validate();
    const std::vector<double>& ds = deltas.empty() ? cfg.feasibility_deltas : deltas;
    if (ds.empty())
        throw std::invalid_argument("feasibility needs a delta list (config or --delta-ms)");
    const ToyNet net = build_toy_net(cfg.net_seed);
    const TimingProfile profile = profile_for_kind(net, cfg, DigestKind::C_a);
    const auto rows = feasibility_sweep(profile, ds, mode);
    fs::create_directories(cfg.out_dir);
    std::ofstream f(feasibility_path(cfg), std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open for write: " + feasibility_path(cfg));
    f << feasibility_csv(rows);
}

std::string stage_eval(const ScenarioConfig& cfg) {
    cfg.validate();
    const auto gt = read_detections_csv(gt_path(cfg, cfg.eval_node));

    auto prf_for_run = [&](const std::string& name) {
        const auto dets = read_detections_csv(detections_path(cfg, name, cfg.eval_node));
        std::vector<MatchResult> frames;
        frames.reserve(cfg.n_frames);
        for (int f = 0; f < cfg.n_frames; ++f) {
            static const std::vector<DetectionBox> empty;
            const auto* d = dets.count(f) ? &dets.at(f) : &empty;
            const auto* g = gt.count(f) ? &gt.at(f) : &empty;
            frames.push_back(match_detections(*d, *g, cfg.iou_tau));
        }
        return prf_metrics(frames);
    };

    const PRF baseline = prf_for_run("baseline");
    std::vector<TableRow> rows;
    for (const RunConfig& run : cfg.runs) rows.push_back({run.name, prf_for_run(run.name)});

    const std::string table = emit_table(baseline, rows);
    fs::create_directories(cfg.out_dir);
    std::ofstream f(eval_table_path(cfg), std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open for write: " + eval_table_path(cfg));
    f << table;
    return table;
}

}  // namespace covis
