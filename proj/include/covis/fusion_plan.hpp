#pragma once

#include <string>
#include <vector>

namespace covis {

struct FusionParams {
    double alpha = 1.0;               // C_a additive weight, >= 0
    double beta = 1.0;                // C_l boost weight, >= 0
    double gamma = 0.5;               // correction exponent, in (0, 1]
    double mask_rebinarize_tau = 0.5; // in (0, 1)

    void validate() const;
};

// Calibration output consumed at run time: where to extract, where to ingest,
// which ingestion channels to augment, and with what fusion parameters.
struct FusionPlan {
    int extract_layer = 1;
    int ingest_layer = 9;
    std::vector<int> target_channels;  // ranked, length k'
    FusionParams params;

    void validate() const;
};

void save_fusion_plan(const std::string& path, const FusionPlan& plan);
FusionPlan load_fusion_plan(const std::string& path);

}  // namespace covis
