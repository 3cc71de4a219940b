#pragma once

#include "covis/digest.hpp"
#include "covis/fusion_plan.hpp"
#include "covis/netsim.hpp"
#include "covis/scene.hpp"

#include <string>
#include <vector>

namespace covis {

// One collaborator-set configuration of the benchmark sweep (a column of the
// results table).
struct RunConfig {
    std::string name;
    DigestKind kind = DigestKind::C_a;
    std::vector<CollabPair> pairs;
};

// Everything a full experiment needs: scene generation, calibration,
// simulation and evaluation parameters. Loaded from a single JSON file.
struct ScenarioConfig {
    std::string out_dir = "out";
    std::uint32_t world_seed = 11;
    std::uint32_t net_seed = 7;
    int n_frames = 24;
    int n_calib_frames = 12;
    WorldSpec world;
    std::vector<double> node_fps;  // one entry per camera/node

    int extract_layer = 1;
    int ingest_layer = 9;
    int predictor_layer = 10;
    int k_n = 3;
    int k_prime = 4;
    double digest_tau = 0.5;
    double detect_tau = 0.5;
    double iou_tau = 0.5;
    int eval_node = 0;
    FusionParams fusion;

    TimingProfile timing;  // digest_bytes may be empty: filled per run kind
    std::vector<RunConfig> runs;
    std::vector<double> feasibility_deltas;

    void validate() const;
};

ScenarioConfig load_scenario_config(const std::string& path);
void save_scenario_config(const std::string& path, const ScenarioConfig& cfg);

}  // namespace covis
