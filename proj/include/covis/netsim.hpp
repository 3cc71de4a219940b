#pragma once

#include "covis/digest.hpp"
#include "covis/detect.hpp"
#include "covis/fusion_plan.hpp"
#include "covis/homography.hpp"
#include "covis/toynet.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace covis {

struct TimingProfile {
    std::vector<double> compute_ms;          // per indexed layer (1-based outside)
    std::vector<std::int64_t> digest_bytes;  // encoded digest size per layer
    double bandwidth_mbps = 100.0;
    double base_latency_ms = 0.0;
    double jitter_ms = 0.0;       // uniform arrival jitter amplitude; 0 = off
    std::uint32_t jitter_seed = 0;

    void validate(int layer_count) const;
};

// base_latency + size / bandwidth, in ms.
double transmit_time(const TimingProfile& profile, int layer);

// The inequality reading the publication figure literally
// (compute(i+1) + transmit(i+1) < delta + compute(i)) versus the timeline of
// two nodes running in lockstep (transmit(i) < delta + compute(i+1)).
enum class FeasibilityMode { paper_literal, lockstep };

FeasibilityMode feasibility_mode_from_string(const std::string& s);

// Whether a digest extracted at layer i can be ingested at layer i+1 within
// slack delta_ms. Strict inequality: the boundary case is infeasible.
bool feasible_pair(const TimingProfile& profile, int i, double delta_ms,
                   FeasibilityMode mode);

struct FeasibilityRow {
    double delta_ms = 0.0;
    std::vector<int> feasible_i;  // i such that (i, i+1) is feasible
};

std::vector<FeasibilityRow> feasibility_sweep(const TimingProfile& profile,
                                              const std::vector<double>& deltas,
                                              FeasibilityMode mode);
std::string feasibility_csv(const std::vector<FeasibilityRow>& rows);

struct NodeConfig {
    int node_id = 0;
    double fps = 10.0;
    std::map<int, Homography> homography_to;  // this node's image px -> peer's image px
    bool acts_as_reference = true;
    bool acts_as_collaborator = true;
};

struct CollabPair {
    int collaborator = 0;
    int reference = 0;
};

struct SimEvent {
    double time_ms = 0.0;
    int seq = 0;
    std::string kind;  // frame-start | layer-done | digest-sent | digest-arrived
                       // | digest-dropped | frame-done
    int node = 0;
    int frame = 0;
    std::string detail;
};

struct SimScenario {
    std::vector<NodeConfig> nodes;
    std::vector<CollabPair> pairs;  // controller-assigned sharing assignments
    TimingProfile profile;
    int n_frames = 1;
    int extract_layer = 1;
    int ingest_layer = 9;
    int predictor_layer = 10;
    DigestKind digest_kind = DigestKind::C_a;
    float digest_tau = 0.5f;
    std::set<int> digest_channels;    // channels summarized at extract_layer
    std::set<int> detector_channels;  // channels read by the detection head
    float detect_threshold = 1.0f;

    void validate() const;
};

struct SimResult {
    std::vector<SimEvent> trace;  // totally ordered by (time_ms, seq)
    std::map<int, std::map<int, std::vector<DetectionBox>>> detections;
};

// Event-driven execution of the sharing workflow in virtual time. Nodes
// never wait: a digest arriving after its receiver finished the ingest layer
// is dropped with a trace event and that frame falls back to standalone
// output. Identical scenarios produce bit-identical traces and detections.
SimResult run_simulation(const SimScenario& scenario, const ToyNet& net,
                         const std::map<int, FusionPlan>& plans,
                         const std::map<int, std::vector<Tensor>>& inputs);

// The zero-delay reference pipeline: every digest fuses, no timing model.
// run_simulation with unlimited bandwidth must reproduce this bit-exactly.
std::map<int, std::map<int, std::vector<DetectionBox>>> offline_fusion_pipeline(
    const SimScenario& scenario, const ToyNet& net,
    const std::map<int, FusionPlan>& plans,
    const std::map<int, std::vector<Tensor>>& inputs);

void write_trace_csv(const std::string& path, const std::vector<SimEvent>& trace);

}  // namespace covis
