#include "covis/pipeline.hpp"
#include "covis/tensor_io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace covis;
namespace fs = std::filesystem;

namespace {

ScenarioConfig mini_config(const std::string& out_dir) {
    ScenarioConfig cfg;
    cfg.out_dir = out_dir;
    cfg.world_seed = 5;
    cfg.net_seed = 7;
    cfg.n_frames = 3;
    cfg.n_calib_frames = 4;
    cfg.world.n_persons = 4;
    cfg.world.n_cameras = 2;
    cfg.world.plane_size = 100.0;
    cfg.world.image_h = 64;
    cfg.world.image_w = 64;
    cfg.world.radius_min = 4.0;
    cfg.world.radius_max = 6.0;
    cfg.world.intensity_min = 0.8;
    cfg.world.intensity_max = 1.0;
    cfg.world.occluders[0] = {{20.0, 0.0, 18.0, 64.0}};
    cfg.node_fps = {10.0, 10.0};
    cfg.k_n = 2;
    cfg.k_prime = 3;
    cfg.detect_tau = 0.45;
    cfg.iou_tau = 0.3;
    cfg.fusion.alpha = 1.0;
    cfg.fusion.beta = 1.0;
    cfg.fusion.gamma = 0.5;
    cfg.timing.compute_ms = {12, 18, 6, 9, 5, 7, 4, 6, 5, 4};
    cfg.timing.bandwidth_mbps = 200.0;
    cfg.timing.base_latency_ms = 0.5;
    cfg.runs.push_back({"Ca_1", DigestKind::C_a, {{1, 0}}});
    cfg.runs.push_back({"Cl_1", DigestKind::C_l, {{1, 0}}});
    cfg.feasibility_deltas = {0, 2, 4, 8};
    return cfg;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    REQUIRE(f.good());
    return std::string((std::istreambuf_iterator<char>(f)),
                       std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("scenario config JSON round-trip") {
    const std::string dir = (fs::temp_directory_path() / "covis_cfg_test").string();
    fs::create_directories(dir);
    ScenarioConfig cfg = mini_config(dir);
    const std::string path = dir + "/config.json";
    save_scenario_config(path, cfg);
    ScenarioConfig back = load_scenario_config(path);
    CHECK(back.world_seed == cfg.world_seed);
    CHECK(back.world.n_persons == cfg.world.n_persons);
    CHECK(back.world.occluders.at(0).size() == 1);
    CHECK(back.runs.size() == 2);
    CHECK(back.runs[1].kind == DigestKind::C_l);
    CHECK(back.timing.compute_ms == cfg.timing.compute_ms);
    CHECK(back.fusion.gamma == cfg.fusion.gamma);
    fs::remove_all(dir);
}

TEST_CASE("boxes_to_grid_mask marks cells whose image point lies in a box") {
    std::vector<DetectionBox> boxes = {{8.0f, 4.0f, 8.0f, 8.0f, 1.0f, 0}};
    Mat2f mask = boxes_to_grid_mask(boxes, 4, 4, 4.0);
    // Cells sample image points (0,0), (4,0), (8,0), (12,0), ...
    CHECK(mask(0, 0) == 0.0f);
    CHECK(mask(1, 2) == 1.0f);  // (8, 4) in box
    CHECK(mask(1, 3) == 1.0f);  // (12, 4)
    CHECK(mask(2, 2) == 1.0f);  // (8, 8)
    CHECK(mask(3, 2) == 0.0f);  // (8, 12) is past y extent 4+8
    CHECK(mask.sum() == 4.0f);  // cells (1..2, 2..3)
}

TEST_CASE("full pipeline stages produce coherent artifacts") {
    const std::string dir = (fs::temp_directory_path() / "covis_pipe_test").string();
    fs::remove_all(dir);
    ScenarioConfig cfg = mini_config(dir);

    stage_gen_scene(cfg);
    CHECK(fs::exists(stimulus_path(cfg, 0, 0)));
    CHECK(fs::exists(stimulus_path(cfg, 1, cfg.n_frames - 1)));
    CHECK(fs::exists(gt_path(cfg, 0)));
    CHECK(fs::exists(cross_homography_path(cfg, 0, 1)));
    const Tensor stim = read_tensor(stimulus_path(cfg, 0, 0));
    CHECK(stim.dims == std::vector<int>{3, 64, 64});

    stage_calibrate(cfg);
    const FusionPlan plan = load_fusion_plan(fusion_plan_path(cfg));
    CHECK(plan.extract_layer == cfg.extract_layer);
    CHECK(plan.ingest_layer == cfg.ingest_layer);
    CHECK(plan.target_channels.size() == 3);
    const CalibrationBundle bundle = load_calibration_bundle(calibration_path(cfg));
    CHECK(bundle.digest_channels.size() == 2);
    CHECK(bundle.detect_threshold > 0.0f);

    stage_run(cfg);
    CHECK(fs::exists(detections_path(cfg, "baseline", 0)));
    CHECK(fs::exists(detections_path(cfg, "Ca_1", 0)));
    CHECK(fs::exists(trace_path(cfg, "Cl_1")));

    stage_feasibility(cfg, {}, FeasibilityMode::paper_literal);
    CHECK(fs::exists(feasibility_path(cfg)));
    const std::string feas = slurp(feasibility_path(cfg));
    CHECK(feas.find("delta_ms") == 0);

    const std::string table = stage_eval(cfg);
    CHECK(fs::exists(eval_table_path(cfg)));
    CHECK(table.find("metric,baseline,Ca_1,Cl_1") == 0);

    // Idempotence: rerunning eval rewrites the identical table.
    const std::string again = stage_eval(cfg);
    CHECK(again == table);

    fs::remove_all(dir);
}

TEST_CASE("eval without run artifacts reports a missing-input error") {
    const std::string dir = (fs::temp_directory_path() / "covis_missing_test").string();
    fs::remove_all(dir);
    ScenarioConfig cfg = mini_config(dir);
    CHECK_THROWS(stage_eval(cfg));
    fs::remove_all(dir);
}
