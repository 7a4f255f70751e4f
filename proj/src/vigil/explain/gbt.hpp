#pragma once
// Gradient-boosted regression trees over the eight raw message features.
// Exact greedy splits, squared loss on binary labels; small enough for
// exhaustive Shapley enumeration downstream.

#include <array>
#include <cstdint>
#include <vector>

#include "vigil/detect/features.hpp"

namespace vigil::explain {

using FeatureRow = std::array<double, detect::kNumFeatures>;

struct TreeNode {
    int feature = -1;       // -1 marks a leaf
    double threshold = 0.0; // go left when x[feature] <= threshold
    int left = -1;
    int right = -1;
    double value = 0.0;
};

struct Tree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    double predict(const FeatureRow& x) const;
};

struct GbtConfig {
    std::size_t n_trees = 50;
    std::size_t max_depth = 3;
    double learning_rate = 0.1;
    std::size_t min_leaf = 1;
};

class BoostedTrees {
public:
    void fit(const std::vector<FeatureRow>& x, const std::vector<double>& y,
             const GbtConfig& cfg);
    double predict(const FeatureRow& x) const;
    bool predict_label(const FeatureRow& x) const { return predict(x) >= 0.5; }

    double base_score() const { return base_; }
    const std::vector<Tree>& trees() const { return trees_; }
    // features the ensemble actually splits on
    std::vector<bool> used_features() const;

    // direct construction for tests (single-split surrogates)
    static BoostedTrees from_parts(double base, std::vector<Tree> trees, double lr);

private:
    double base_ = 0.0;
    double lr_ = 0.1;
    std::vector<Tree> trees_;
};

} // namespace vigil::explain
