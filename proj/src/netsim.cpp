#include "covis/netsim.hpp"

#include "covis/fuse.hpp"
#include "covis/rng.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace covis {

void TimingProfile::validate(int layer_count) const {
    if (static_cast<int>(compute_ms.size()) != layer_count)
        throw std::invalid_argument("timing profile compute_ms length != layer count");
    if (static_cast<int>(digest_bytes.size()) != layer_count)
        throw std::invalid_argument("timing profile digest_bytes length != layer count");
    for (double c : compute_ms)
        if (c < 0.0) throw std::invalid_argument("compute_ms must be nonnegative");
    for (std::int64_t b : digest_bytes)
        if (b < 0) throw std::invalid_argument("digest_bytes must be nonnegative");
    if (bandwidth_mbps < 0.0 || base_latency_ms < 0.0 || jitter_ms < 0.0)
        throw std::invalid_argument("link parameters must be nonnegative");
}

double transmit_time(const TimingProfile& profile, int layer) {
    if (layer < 1 || layer > static_cast<int>(profile.digest_bytes.size()))
        throw std::invalid_argument("transmit_time: invalid layer");
    if (profile.bandwidth_mbps <= 0.0)
        throw std::invalid_argument("transmit_time: bandwidth must be > 0");
    return profile.base_latency_ms +
           static_cast<double>(profile.digest_bytes[layer - 1]) * 8.0 /
               (profile.bandwidth_mbps * 1000.0);
}

FeasibilityMode feasibility_mode_from_string(const std::string& s) {
    if (s == "paper" || s == "paper-literal") return FeasibilityMode::paper_literal;
    if (s == "lockstep") return FeasibilityMode::lockstep;
    throw std::invalid_argument("unknown feasibility mode: " + s);
}

bool feasible_pair(const TimingProfile& profile, int i, double delta_ms,
                   FeasibilityMode mode) {
    const int layers = static_cast<int>(profile.compute_ms.size());
    if (i < 1 || i + 1 > layers) throw std::invalid_argument("feasible_pair: invalid layer");
    if (delta_ms < 0.0) throw std::invalid_argument("feasible_pair: delta must be >= 0");
    if (mode == FeasibilityMode::paper_literal)
        return profile.compute_ms[i] + transmit_time(profile, i + 1) <
               delta_ms + profile.compute_ms[i - 1];
    // Lockstep peers: the digest of layer i must land before the receiver
    // finishes layer i+1.
    return transmit_time(profile, i) < delta_ms + profile.compute_ms[i];
}

std::vector<FeasibilityRow> feasibility_sweep(const TimingProfile& profile,
                                              const std::vector<double>& deltas,
                                              FeasibilityMode mode) {
    if (!std::is_sorted(deltas.begin(), deltas.end()))
        throw std::invalid_argument("feasibility_sweep: deltas must be ascending");
    const int layers = static_cast<int>(profile.compute_ms.size());
    std::vector<FeasibilityRow> rows;
    rows.reserve(deltas.size());
    for (double d : deltas) {
        FeasibilityRow row;
        row.delta_ms = d;
        for (int i = 1; i + 1 <= layers; ++i)
            if (feasible_pair(profile, i, d, mode)) row.feasible_i.push_back(i);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string feasibility_csv(const std::vector<FeasibilityRow>& rows) {
    std::ostringstream out;
    out << "delta_ms,feasible_pairs\n";
    for (const FeasibilityRow& r : rows) {
        out << format_double(r.delta_ms) << ',';
        for (std::size_t k = 0; k < r.feasible_i.size(); ++k) {
            if (k) out << ';';
            out << r.feasible_i[k] << '-' << r.feasible_i[k] + 1;
        }
        out << '\n';
    }
    return out.str();
}

void SimScenario::validate() const {
    std::set<int> ids;
    for (const NodeConfig& n : nodes) {
        if (!(n.fps > 0.0)) throw std::invalid_argument("node fps must be > 0");
        if (!ids.insert(n.node_id).second)
            throw std::invalid_argument("duplicate node id in scenario");
        if (n.homography_to.count(n.node_id))
            throw std::invalid_argument("node registry holds a self homography");
    }
    for (const CollabPair& p : pairs) {
        if (p.collaborator == p.reference)
            throw std::invalid_argument("pair with collaborator == reference");
        if (!ids.count(p.collaborator) || !ids.count(p.reference))
            throw std::invalid_argument("pair references unknown node");
    }
    if (n_frames < 1) throw std::invalid_argument("n_frames must be >= 1");
    if (!(extract_layer >= 1 && extract_layer < ingest_layer &&
          ingest_layer <= predictor_layer))
        throw std::invalid_argument("need 1 <= extract < ingest <= predictor");
    if (digest_channels.empty()) throw std::invalid_argument("digest_channels empty");
    if (detector_channels.empty()) throw std::invalid_argument("detector_channels empty");
    if (!(detect_threshold > 0.0f))
        throw std::invalid_argument("detect_threshold must be > 0");
}

namespace {

struct NodeFrame {
    Tensor ingest_map;
    Tensor predictor_map;
    Digest digest;
};

double jitter_for(const TimingProfile& profile, int sender, int receiver, int frame) {
    if (profile.jitter_ms <= 0.0) return 0.0;
    std::mt19937 rng(derive_seed(profile.jitter_seed,
                                 derive_seed(static_cast<std::uint32_t>(sender) * 65536u +
                                                 static_cast<std::uint32_t>(receiver),
                                             static_cast<std::uint32_t>(frame))));
    return profile.jitter_ms * static_cast<double>(rand_unit(rng));
}

const NodeConfig& node_by_id(const std::vector<NodeConfig>& nodes, int id) {
    for (const NodeConfig& n : nodes)
        if (n.node_id == id) return n;
    throw std::invalid_argument("unknown node id");
}

const Homography& homography_between(const std::vector<NodeConfig>& nodes, int from,
                                     int to) {
    const NodeConfig& n = node_by_id(nodes, from);
    auto it = n.homography_to.find(to);
    if (it == n.homography_to.end())
        throw std::invalid_argument("no homography registered from node " +
                                    std::to_string(from) + " to node " + std::to_string(to));
    return it->second;
}

// Detections for every (node, frame) given which collaborator digests each
// reference fuses. Shared by the simulator and the offline pipeline so the
// two paths are bit-identical when the fused sets agree.
std::map<int, std::map<int, std::vector<DetectionBox>>> compute_detections(
    const SimScenario& sc, const ToyNet& net, const std::map<int, FusionPlan>& plans,
    const std::map<int, std::vector<Tensor>>& inputs,
    const std::map<std::pair<int, int>, std::vector<int>>& fused_senders) {
    std::map<int, std::map<int, NodeFrame>> cache;  // node -> frame -> taps
    const std::set<int> taps{sc.extract_layer, sc.ingest_layer, sc.predictor_layer};

    for (const NodeConfig& n : sc.nodes) {
        auto it = inputs.find(n.node_id);
        if (it == inputs.end() || static_cast<int>(it->second.size()) < sc.n_frames)
            throw std::invalid_argument("missing input frames for node " +
                                        std::to_string(n.node_id));
        for (int f = 0; f < sc.n_frames; ++f) {
            LayerOutputs out = forward_with_taps(net, it->second[f], taps);
            NodeFrame nf;
            nf.digest = build_digest(out.tapped.at(sc.extract_layer), sc.digest_channels,
                                     sc.digest_kind, sc.digest_tau,
                                     static_cast<std::uint16_t>(n.node_id),
                                     static_cast<std::uint32_t>(f),
                                     static_cast<std::uint8_t>(sc.extract_layer));
            nf.ingest_map = std::move(out.tapped.at(sc.ingest_layer));
            nf.predictor_map = std::move(out.tapped.at(sc.predictor_layer));
            cache[n.node_id].emplace(f, std::move(nf));
        }
    }

    const double extract_stride = net.stride_at(sc.extract_layer);
    const double ingest_stride = net.stride_at(sc.ingest_layer);
    const float predictor_stride = static_cast<float>(net.stride_at(sc.predictor_layer));

    std::map<int, std::map<int, std::vector<DetectionBox>>> detections;
    for (const NodeConfig& n : sc.nodes) {
        for (int f = 0; f < sc.n_frames; ++f) {
            NodeFrame& nf = cache[n.node_id][f];
            const Tensor* predictor_map = &nf.predictor_map;
            Tensor fused_predictor;

            auto fit = fused_senders.find({n.node_id, f});
            if (fit != fused_senders.end() && !fit->second.empty()) {
                auto pit = plans.find(n.node_id);
                if (pit == plans.end())
                    throw std::invalid_argument("no fusion plan for reference node " +
                                                std::to_string(n.node_id));
                const GridSpec dst{nf.ingest_map.height(), nf.ingest_map.width(),
                                   ingest_stride};
                std::vector<CollaboratorInput> collabs;
                for (int s : fit->second) {
                    const Digest& d = cache[s][f].digest;
                    collabs.push_back({d,
                                       homography_between(sc.nodes, s, n.node_id),
                                       GridSpec{d.height(), d.width(), extract_stride}});
                }
                const Tensor fused =
                    fuse_digests(nf.ingest_map, std::move(collabs), dst, pit->second);
                LayerOutputs resumed =
                    resume_from(net, fused, sc.ingest_layer, {sc.predictor_layer});
                fused_predictor = std::move(resumed.tapped.at(sc.predictor_layer));
                predictor_map = &fused_predictor;
            }

            detections[n.node_id][f] = detect_blobs(*predictor_map, sc.detector_channels,
                                                    sc.detect_threshold, predictor_stride);
        }
    }
    return detections;
}

}  // namespace

SimResult run_simulation(const SimScenario& scenario, const ToyNet& net,
                         const std::map<int, FusionPlan>& plans,
                         const std::map<int, std::vector<Tensor>>& inputs) {
    scenario.validate();
    const int layers = net.num_indexed_layers();
    scenario.profile.validate(layers);
    if (scenario.predictor_layer > layers)
        throw std::invalid_argument("predictor layer beyond network depth");
    for (const auto& [node, plan] : plans) plan.validate();

    // Cumulative compute time through each indexed layer.
    std::vector<double> cum(layers + 1, 0.0);
    for (int l = 1; l <= layers; ++l) cum[l] = cum[l - 1] + scenario.profile.compute_ms[l - 1];

    std::vector<NodeConfig> nodes_sorted = scenario.nodes;
    std::sort(nodes_sorted.begin(), nodes_sorted.end(),
              [](const NodeConfig& a, const NodeConfig& b) { return a.node_id < b.node_id; });

    auto frame_start = [&](int node_id, int f) {
        return static_cast<double>(f) / node_by_id(scenario.nodes, node_id).fps * 1000.0;
    };

    std::vector<SimEvent> ev;
    auto add = [&](double t, const char* kind, int node, int frame, std::string detail) {
        ev.push_back({t, 0, kind, node, frame, std::move(detail)});
    };

    std::map<std::pair<int, int>, std::vector<int>> fused_senders;
    for (int f = 0; f < scenario.n_frames; ++f) {
        for (const NodeConfig& n : nodes_sorted) {
            const double t0 = frame_start(n.node_id, f);
            add(t0, "frame-start", n.node_id, f, "");
            for (int l = 1; l <= layers; ++l) {
                add(t0 + cum[l], "layer-done", n.node_id, f, "layer=" + std::to_string(l));
                if (l != scenario.extract_layer) continue;
                for (const CollabPair& p : scenario.pairs) {
                    if (p.collaborator != n.node_id) continue;
                    if (!n.acts_as_collaborator)
                        throw std::invalid_argument("pair uses node " +
                                                    std::to_string(n.node_id) +
                                                    " which is not a collaborator");
                    add(t0 + cum[l], "digest-sent", n.node_id, f,
                        "to=" + std::to_string(p.reference) + ";layer=" + std::to_string(l) +
                            ";bytes=" +
                            std::to_string(scenario.profile.digest_bytes[l - 1]));
                }
            }
            add(t0 + cum[layers], "frame-done", n.node_id, f, "");
        }
        // Arrival classification; receivers never wait.
        for (const CollabPair& p : scenario.pairs) {
            homography_between(scenario.nodes, p.collaborator, p.reference);
            if (!node_by_id(scenario.nodes, p.reference).acts_as_reference)
                throw std::invalid_argument("pair targets node " +
                                            std::to_string(p.reference) +
                                            " which is not a reference");
            const double sent = frame_start(p.collaborator, f) + cum[scenario.extract_layer];
            const double transit = transmit_time(scenario.profile, scenario.extract_layer) +
                                   jitter_for(scenario.profile, p.collaborator, p.reference, f);
            const double arrival = sent + transit;
            const double ingest_done = frame_start(p.reference, f) + cum[scenario.ingest_layer];
            const bool on_time = arrival < ingest_done;
            add(arrival, on_time ? "digest-arrived" : "digest-dropped", p.reference, f,
                "from=" + std::to_string(p.collaborator) +
                    ";transit=" + format_double(transit));
            if (on_time) fused_senders[{p.reference, f}].push_back(p.collaborator);
        }
    }

    std::stable_sort(ev.begin(), ev.end(),
                     [](const SimEvent& a, const SimEvent& b) { return a.time_ms < b.time_ms; });
    for (std::size_t i = 0; i < ev.size(); ++i) ev[i].seq = static_cast<int>(i);

    SimResult result;
    result.trace = std::move(ev);
    result.detections = compute_detections(scenario, net, plans, inputs, fused_senders);
    return result;
}

std::map<int, std::map<int, std::vector<DetectionBox>>> offline_fusion_pipeline(
    const SimScenario& scenario, const ToyNet& net,
    const std::map<int, FusionPlan>& plans,
    const std::map<int, std::vector<Tensor>>& inputs) {
    scenario.validate();
    std::map<std::pair<int, int>, std::vector<int>> fused_senders;
    for (int f = 0; f < scenario.n_frames; ++f)
        for (const CollabPair& p : scenario.pairs)
            fused_senders[{p.reference, f}].push_back(p.collaborator);
    return compute_detections(scenario, net, plans, inputs, fused_senders);
}

void write_trace_csv(const std::string& path, const std::vector<SimEvent>& trace) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open for write: " + path);
    f << "time_ms,seq,kind,node,frame,detail\n";
    for (const SimEvent& e : trace)
        f << format_double(e.time_ms) << ',' << e.seq << ',' << e.kind << ',' << e.node
          << ',' << e.frame << ',' << e.detail << '\n';
    if (!f) throw std::runtime_error("short write: " + path);
}

}  // namespace covis
