#pragma once
// Exact Shapley attributions for the tree surrogate by full coalition
// enumeration over the eight features, interventional against a fixed
// background set. Attributions satisfy efficiency exactly:
//   sum_i phi_i = f(x) - mean_b f(b).

#include <vector>

#include "vigil/explain/gbt.hpp"

namespace vigil::explain {

std::array<double, detect::kNumFeatures> shapley_values(
    const BoostedTrees& model, const FeatureRow& x,
    const std::vector<FeatureRow>& background);

double background_mean(const BoostedTrees& model, const std::vector<FeatureRow>& background);

} // namespace vigil::explain
