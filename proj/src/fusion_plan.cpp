#include "covis/fusion_plan.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <set>
#include <stdexcept>

namespace covis {

void FusionParams::validate() const {
    if (alpha < 0.0) throw std::invalid_argument("fusion alpha must be >= 0");
    if (beta < 0.0) throw std::invalid_argument("fusion beta must be >= 0");
    if (!(gamma > 0.0 && gamma <= 1.0))
        throw std::invalid_argument("fusion gamma must be in (0, 1]");
    if (!(mask_rebinarize_tau > 0.0 && mask_rebinarize_tau < 1.0))
        throw std::invalid_argument("mask_rebinarize_tau must be in (0, 1)");
}

void FusionPlan::validate() const {
    if (extract_layer >= ingest_layer)
        throw std::invalid_argument("extract_layer must precede ingest_layer");
    if (extract_layer < 1) throw std::invalid_argument("extract_layer must be >= 1");
    std::set<int> seen;
    for (int c : target_channels) {
        if (c < 0) throw std::invalid_argument("target channel must be >= 0");
        if (!seen.insert(c).second)
            throw std::invalid_argument("target channels must be distinct");
    }
    params.validate();
}

void save_fusion_plan(const std::string& path, const FusionPlan& plan) {
    plan.validate();
    nlohmann::json j;
    j["extract_layer"] = plan.extract_layer;
    j["ingest_layer"] = plan.ingest_layer;
    j["target_channels"] = plan.target_channels;
    j["params"] = {{"alpha", plan.params.alpha},
                   {"beta", plan.params.beta},
                   {"gamma", plan.params.gamma},
                   {"mask_rebinarize_tau", plan.params.mask_rebinarize_tau}};
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open for write: " + path);
    f << j.dump(2) << '\n';
}

FusionPlan load_fusion_plan(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open for read: " + path);
    nlohmann::json j;
    f >> j;
    FusionPlan plan;
    plan.extract_layer = j.at("extract_layer").get<int>();
    plan.ingest_layer = j.at("ingest_layer").get<int>();
    plan.target_channels = j.at("target_channels").get<std::vector<int>>();
    const auto& p = j.at("params");
    plan.params.alpha = p.at("alpha").get<double>();
    plan.params.beta = p.at("beta").get<double>();
    plan.params.gamma = p.at("gamma").get<double>();
    plan.params.mask_rebinarize_tau = p.at("mask_rebinarize_tau").get<double>();
    plan.validate();
    return plan;
}

}  // namespace covis
