#pragma once
// Local surrogate for the context detector around one anomalous message:
// a boosted-tree model fit to the detector's verdicts on the recent benign
// windows plus valid random perturbations of them, balanced between classes.

#include <string>
#include <vector>

#include "vigil/detect/context.hpp"
#include "vigil/explain/gbt.hpp"

namespace vigil::explain {

struct DegenerateLabels : std::runtime_error {
    explicit DegenerateLabels(const std::string& w) : std::runtime_error(w) {}
};

struct SurrogateConfig {
    std::size_t n_history = 10;   // N' benign windows
    std::uint64_t seed = 5;
    std::size_t max_attempts = 4000;
    GbtConfig gbt;
};

struct SurrogateModel {
    BoostedTrees trees;
    std::vector<FeatureRow> background;  // last-position features of the N' windows
    double training_fidelity = 0.0;      // agreement with detector labels on its own set
};

// `history` carries the N' most recent benign windows (each of length K,
// oldest first); `msg_window` is the anomalous window (K-1 benign + msg_t).
SurrogateModel build_surrogate(const detect::ContextModel& detector,
                               const std::vector<std::vector<detect::FeatureVector>>& history,
                               const std::vector<detect::FeatureVector>& msg_window,
                               const SurrogateConfig& cfg);

struct RankedFeature {
    std::size_t index;
    const char* name;
    double attribution;
};

// Top-F features of the last window position by |Shapley value|.
std::vector<RankedFeature> top_features(const SurrogateModel& surrogate,
                                        const std::vector<detect::FeatureVector>& msg_window,
                                        std::size_t f);

} // namespace vigil::explain
