#include "covis/scenario.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <stdexcept>

namespace covis {

using nlohmann::json;

void ScenarioConfig::validate() const {
    if (world.n_cameras < 2) throw std::invalid_argument("config: need >= 2 cameras");
    if (static_cast<int>(node_fps.size()) != world.n_cameras)
        throw std::invalid_argument("config: node_fps length must equal n_cameras");
    for (double f : node_fps)
        if (!(f > 0.0)) throw std::invalid_argument("config: fps must be > 0");
    if (n_frames < 1 || n_frames > 1000)
        throw std::invalid_argument("config: n_frames must be in [1, 1000]");
    if (n_calib_frames < 2 || n_calib_frames > 1000)
        throw std::invalid_argument("config: n_calib_frames must be in [2, 1000]");
    if (!(extract_layer >= 1 && extract_layer < ingest_layer &&
          ingest_layer <= predictor_layer))
        throw std::invalid_argument("config: need 1 <= extract < ingest <= predictor");
    if (k_n < 1 || k_prime < 1) throw std::invalid_argument("config: k_n, k_prime >= 1");
    if (!(digest_tau > 0.0 && digest_tau < 1.0))
        throw std::invalid_argument("config: digest_tau in (0, 1)");
    if (!(detect_tau > 0.0)) throw std::invalid_argument("config: detect_tau > 0");
    if (!(iou_tau > 0.0 && iou_tau <= 1.0))
        throw std::invalid_argument("config: iou_tau in (0, 1]");
    if (eval_node < 0 || eval_node >= world.n_cameras)
        throw std::invalid_argument("config: eval_node out of range");
    fusion.validate();
    std::set<std::string> names{"baseline"};
    for (const RunConfig& r : runs) {
        if (r.name.empty()) throw std::invalid_argument("config: run without a name");
        if (!names.insert(r.name).second)
            throw std::invalid_argument("config: duplicate run name " + r.name);
        for (const CollabPair& p : r.pairs) {
            if (p.collaborator == p.reference)
                throw std::invalid_argument("config: self pair in run " + r.name);
            if (p.collaborator < 0 || p.collaborator >= world.n_cameras ||
                p.reference < 0 || p.reference >= world.n_cameras)
                throw std::invalid_argument("config: pair node out of range in " + r.name);
        }
    }
}

namespace {

DigestKind kind_from_string(const std::string& s) {
    if (s == "C_a") return DigestKind::C_a;
    if (s == "C_l") return DigestKind::C_l;
    throw std::invalid_argument("unknown digest kind: " + s);
}

std::string kind_to_string(DigestKind k) {
    return k == DigestKind::C_a ? "C_a" : "C_l";
}

}  // namespace

ScenarioConfig load_scenario_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config: " + path);
    json j;
    f >> j;

    ScenarioConfig cfg;
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
    cfg.world_seed = j.at("world_seed").get<std::uint32_t>();
    cfg.net_seed = j.at("net_seed").get<std::uint32_t>();
    cfg.n_frames = j.at("n_frames").get<int>();
    cfg.n_calib_frames = j.at("n_calib_frames").get<int>();

    const json& w = j.at("world");
    cfg.world.n_persons = w.at("n_persons").get<int>();
    cfg.world.n_cameras = w.at("n_cameras").get<int>();
    cfg.world.plane_size = w.at("plane_size").get<double>();
    cfg.world.image_h = w.at("image_h").get<int>();
    cfg.world.image_w = w.at("image_w").get<int>();
    cfg.world.radius_min = w.at("radius_min").get<double>();
    cfg.world.radius_max = w.at("radius_max").get<double>();
    cfg.world.intensity_min = w.at("intensity_min").get<double>();
    cfg.world.intensity_max = w.at("intensity_max").get<double>();
    if (w.contains("occluders")) {
        for (auto it = w.at("occluders").begin(); it != w.at("occluders").end(); ++it) {
            const int cam = std::stoi(it.key());
            for (const json& r : it.value()) {
                if (!r.is_array() || r.size() != 4)
                    throw std::runtime_error("occluder must be [x, y, w, h]");
                cfg.world.occluders[cam].push_back(
                    {r[0].get<double>(), r[1].get<double>(), r[2].get<double>(),
                     r[3].get<double>()});
            }
        }
    }

    cfg.node_fps = j.at("node_fps").get<std::vector<double>>();
    cfg.extract_layer = j.at("extract_layer").get<int>();
    cfg.ingest_layer = j.at("ingest_layer").get<int>();
    cfg.predictor_layer = j.at("predictor_layer").get<int>();
    cfg.k_n = j.at("k_n").get<int>();
    cfg.k_prime = j.at("k_prime").get<int>();
    cfg.digest_tau = j.at("digest_tau").get<double>();
    cfg.detect_tau = j.at("detect_tau").get<double>();
    cfg.iou_tau = j.at("iou_tau").get<double>();
    cfg.eval_node = j.at("eval_node").get<int>();

    const json& fu = j.at("fusion");
    cfg.fusion.alpha = fu.at("alpha").get<double>();
    cfg.fusion.beta = fu.at("beta").get<double>();
    cfg.fusion.gamma = fu.at("gamma").get<double>();
    cfg.fusion.mask_rebinarize_tau = fu.at("mask_rebinarize_tau").get<double>();

    const json& t = j.at("timing");
    cfg.timing.compute_ms = t.at("compute_ms").get<std::vector<double>>();
    if (t.contains("digest_bytes"))
        cfg.timing.digest_bytes = t.at("digest_bytes").get<std::vector<std::int64_t>>();
    cfg.timing.bandwidth_mbps = t.at("bandwidth_mbps").get<double>();
    cfg.timing.base_latency_ms = t.at("base_latency_ms").get<double>();
    cfg.timing.jitter_ms = t.value("jitter_ms", 0.0);
    cfg.timing.jitter_seed = t.value("jitter_seed", 0u);

    for (const json& r : j.at("runs")) {
        RunConfig rc;
        rc.name = r.at("name").get<std::string>();
        rc.kind = kind_from_string(r.at("kind").get<std::string>());
        for (const json& p : r.at("pairs")) {
            if (!p.is_array() || p.size() != 2)
                throw std::runtime_error("run pair must be [collaborator, reference]");
            rc.pairs.push_back({p[0].get<int>(), p[1].get<int>()});
        }
        cfg.runs.push_back(std::move(rc));
    }

    if (j.contains("feasibility_deltas"))
        cfg.feasibility_deltas = j.at("feasibility_deltas").get<std::vector<double>>();

    cfg.validate();
    return cfg;
}

void save_scenario_config(const std::string& path, const ScenarioConfig& cfg) {
    cfg.validate();
    json j;
    j["out_dir"] = cfg.out_dir;
    j["world_seed"] = cfg.world_seed;
    j["net_seed"] = cfg.net_seed;
    j["n_frames"] = cfg.n_frames;
    j["n_calib_frames"] = cfg.n_calib_frames;
    json w;
    w["n_persons"] = cfg.world.n_persons;
    w["n_cameras"] = cfg.world.n_cameras;
    w["plane_size"] = cfg.world.plane_size;
    w["image_h"] = cfg.world.image_h;
    w["image_w"] = cfg.world.image_w;
    w["radius_min"] = cfg.world.radius_min;
    w["radius_max"] = cfg.world.radius_max;
    w["intensity_min"] = cfg.world.intensity_min;
    w["intensity_max"] = cfg.world.intensity_max;
    if (!cfg.world.occluders.empty()) {
        json occ = json::object();
        for (const auto& [cam, rects] : cfg.world.occluders) {
            json arr = json::array();
            for (const Rect& r : rects) arr.push_back({r.x, r.y, r.w, r.h});
            occ[std::to_string(cam)] = arr;
        }
        w["occluders"] = occ;
    }
    j["world"] = w;
    j["node_fps"] = cfg.node_fps;
    j["extract_layer"] = cfg.extract_layer;
    j["ingest_layer"] = cfg.ingest_layer;
    j["predictor_layer"] = cfg.predictor_layer;
    j["k_n"] = cfg.k_n;
    j["k_prime"] = cfg.k_prime;
    j["digest_tau"] = cfg.digest_tau;
    j["detect_tau"] = cfg.detect_tau;
    j["iou_tau"] = cfg.iou_tau;
    j["eval_node"] = cfg.eval_node;
    j["fusion"] = {{"alpha", cfg.fusion.alpha},
                   {"beta", cfg.fusion.beta},
                   {"gamma", cfg.fusion.gamma},
                   {"mask_rebinarize_tau", cfg.fusion.mask_rebinarize_tau}};
    json t;
    t["compute_ms"] = cfg.timing.compute_ms;
    if (!cfg.timing.digest_bytes.empty()) t["digest_bytes"] = cfg.timing.digest_bytes;
    t["bandwidth_mbps"] = cfg.timing.bandwidth_mbps;
    t["base_latency_ms"] = cfg.timing.base_latency_ms;
    if (cfg.timing.jitter_ms > 0.0) {
        t["jitter_ms"] = cfg.timing.jitter_ms;
        t["jitter_seed"] = cfg.timing.jitter_seed;
    }
    j["timing"] = t;
    json runs = json::array();
    for (const RunConfig& r : cfg.runs) {
        json rr;
        rr["name"] = r.name;
        rr["kind"] = kind_to_string(r.kind);
        json pairs = json::array();
        for (const CollabPair& p : r.pairs) pairs.push_back({p.collaborator, p.reference});
        rr["pairs"] = pairs;
        runs.push_back(rr);
    }
    j["runs"] = runs;
    if (!cfg.feasibility_deltas.empty()) j["feasibility_deltas"] = cfg.feasibility_deltas;

    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open for write: " + path);
    f << j.dump(2) << '\n';
}

}  // namespace covis
