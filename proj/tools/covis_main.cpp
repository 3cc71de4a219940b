#include "covis/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_override;
    std::int64_t seed_override = -1;
};

covis::ScenarioConfig load_config(const CommonArgs& args) {
    covis::ScenarioConfig cfg = covis::load_scenario_config(args.config_path);
    if (!args.out_override.empty()) cfg.out_dir = args.out_override;
    if (args.seed_override >= 0)
        cfg.world_seed = static_cast<std::uint32_t>(args.seed_override);
    cfg.validate();
    return cfg;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "scenario config JSON")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", args.out_override, "output directory (overrides config)");
    cmd->add_option("--seed", args.seed_override, "world seed (overrides config)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"covis: collaborative multi-camera sensing simulator"};
    app.require_subcommand(1);

    CommonArgs args;
    std::vector<double> deltas;
    std::string mode = "paper";

    CLI::App* gen = app.add_subcommand("gen-scene", "render stimuli, ground truth and homographies");
    add_common(gen, args);
    CLI::App* calibrate = app.add_subcommand("calibrate", "build the fusion plan and detector calibration");
    add_common(calibrate, args);
    CLI::App* run = app.add_subcommand("run", "simulate baseline and every collaborator configuration");
    add_common(run, args);
    CLI::App* feas = app.add_subcommand("feasibility", "sweep the sharing-feasibility predicate over deltas");
    add_common(feas, args);
    feas->add_option("--delta-ms", deltas, "slack values in ms (overrides config)");
    feas->add_option("--mode", mode, "paper|lockstep")
        ->check(CLI::IsMember({"paper", "lockstep"}));
    CLI::App* eval = app.add_subcommand("eval", "score detections against ground truth");
    add_common(eval, args);

    CLI11_PARSE(app, argc, argv);

    try {
        const covis::ScenarioConfig cfg = load_config(args);
        if (gen->parsed()) {
            covis::stage_gen_scene(cfg);
            std::printf("scene written to %s\n", covis::scene_dir(cfg).c_str());
        } else if (calibrate->parsed()) {
            covis::stage_calibrate(cfg);
            std::printf("fusion plan written to %s\n", covis::fusion_plan_path(cfg).c_str());
        } else if (run->parsed()) {
            covis::stage_run(cfg);
            std::printf("runs written under %s/runs\n", cfg.out_dir.c_str());
        } else if (feas->parsed()) {
            covis::stage_feasibility(cfg, deltas, covis::feasibility_mode_from_string(mode));
            std::printf("sweep written to %s\n", covis::feasibility_path(cfg).c_str());
        } else if (eval->parsed()) {
            const std::string table = covis::stage_eval(cfg);
            std::fputs(table.c_str(), stdout);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
