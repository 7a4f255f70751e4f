#include "vigil/explain/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace vigil::explain {

double Tree::predict(const FeatureRow& x) const {
    int n = 0;
    while (nodes[static_cast<std::size_t>(n)].feature >= 0) {
        const TreeNode& nd = nodes[static_cast<std::size_t>(n)];
        n = x[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right;
    }
    return nodes[static_cast<std::size_t>(n)].value;
}

namespace {

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

double mean_of(const std::vector<double>& y, const std::vector<std::size_t>& idx) {
    double s = 0.0;
    for (auto i : idx) s += y[i];
    return idx.empty() ? 0.0 : s / static_cast<double>(idx.size());
}

Split best_split(const std::vector<FeatureRow>& x, const std::vector<double>& r,
                 const std::vector<std::size_t>& idx, std::size_t min_leaf) {
    Split best;
    const double total_sum = [&] {
        double s = 0.0;
        for (auto i : idx) s += r[i];
        return s;
    }();
    const double n = static_cast<double>(idx.size());
    const double parent_score = total_sum * total_sum / n;

    for (std::size_t f = 0; f < detect::kNumFeatures; ++f) {
        std::vector<std::size_t> order(idx);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return x[a][f] < x[b][f]; });
        double left_sum = 0.0;
        for (std::size_t pos = 0; pos + 1 < order.size(); ++pos) {
            left_sum += r[order[pos]];
            const double lo = x[order[pos]][f];
            const double hi = x[order[pos + 1]][f];
            if (hi <= lo) continue;  // no boundary between equal values
            const double nl = static_cast<double>(pos + 1);
            const double nr = n - nl;
            if (nl < static_cast<double>(min_leaf) || nr < static_cast<double>(min_leaf)) continue;
            const double right_sum = total_sum - left_sum;
            const double gain =
                left_sum * left_sum / nl + right_sum * right_sum / nr - parent_score;
            if (gain > best.gain + 1e-12) {
                best.feature = static_cast<int>(f);
                best.threshold = 0.5 * (lo + hi);
                best.gain = gain;
            }
        }
    }
    return best;
}

int grow(Tree& tree, const std::vector<FeatureRow>& x, const std::vector<double>& r,
         const std::vector<std::size_t>& idx, std::size_t depth, const GbtConfig& cfg) {
    const int node_id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(TreeNode{});
    if (depth == 0 || idx.size() <= cfg.min_leaf) {
        tree.nodes[static_cast<std::size_t>(node_id)].value = mean_of(r, idx);
        return node_id;
    }
    const Split s = best_split(x, r, idx, cfg.min_leaf);
    if (s.feature < 0) {
        tree.nodes[static_cast<std::size_t>(node_id)].value = mean_of(r, idx);
        return node_id;
    }
    std::vector<std::size_t> li, ri;
    for (auto i : idx)
        ((x[i][static_cast<std::size_t>(s.feature)] <= s.threshold) ? li : ri).push_back(i);
    tree.nodes[static_cast<std::size_t>(node_id)].feature = s.feature;
    tree.nodes[static_cast<std::size_t>(node_id)].threshold = s.threshold;
    const int l = grow(tree, x, r, li, depth - 1, cfg);
    const int rgt = grow(tree, x, r, ri, depth - 1, cfg);
    tree.nodes[static_cast<std::size_t>(node_id)].left = l;
    tree.nodes[static_cast<std::size_t>(node_id)].right = rgt;
    return node_id;
}

} // namespace

void BoostedTrees::fit(const std::vector<FeatureRow>& x, const std::vector<double>& y,
                       const GbtConfig& cfg) {
    lr_ = cfg.learning_rate;
    base_ = y.empty() ? 0.0
                      : std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    trees_.clear();

    std::vector<double> pred(y.size(), base_);
    std::vector<std::size_t> all(y.size());
    std::iota(all.begin(), all.end(), 0);
    for (std::size_t t = 0; t < cfg.n_trees; ++t) {
        std::vector<double> resid(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) resid[i] = y[i] - pred[i];
        Tree tree;
        grow(tree, x, resid, all, cfg.max_depth, cfg);
        for (std::size_t i = 0; i < y.size(); ++i) pred[i] += lr_ * tree.predict(x[i]);
        trees_.push_back(std::move(tree));
    }
}

double BoostedTrees::predict(const FeatureRow& x) const {
    double s = base_;
    for (const auto& t : trees_) s += lr_ * t.predict(x);
    return s;
}

std::vector<bool> BoostedTrees::used_features() const {
    std::vector<bool> used(detect::kNumFeatures, false);
    for (const auto& t : trees_)
        for (const auto& n : t.nodes)
            if (n.feature >= 0) used[static_cast<std::size_t>(n.feature)] = true;
    return used;
}

BoostedTrees BoostedTrees::from_parts(double base, std::vector<Tree> trees, double lr) {
    BoostedTrees b;
    b.base_ = base;
    b.trees_ = std::move(trees);
    b.lr_ = lr;
    return b;
}

} // namespace vigil::explain
