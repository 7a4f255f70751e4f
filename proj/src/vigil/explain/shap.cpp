#include "vigil/explain/shap.hpp"

#include <bit>

namespace vigil::explain {

namespace {
constexpr std::size_t kN = detect::kNumFeatures;

double factorial(std::size_t n) {
    double f = 1.0;
    for (std::size_t i = 2; i <= n; ++i) f *= static_cast<double>(i);
    return f;
}
} // namespace

double background_mean(const BoostedTrees& model, const std::vector<FeatureRow>& background) {
    double s = 0.0;
    for (const auto& b : background) s += model.predict(b);
    return background.empty() ? 0.0 : s / static_cast<double>(background.size());
}

std::array<double, kN> shapley_values(const BoostedTrees& model, const FeatureRow& x,
                                      const std::vector<FeatureRow>& background) {
    // v(S) = E_b[ f(x_S, b_{~S}) ], enumerated over all 2^8 masks
    std::vector<double> v(1u << kN, 0.0);
    FeatureRow mixed;
    for (std::size_t mask = 0; mask < (1u << kN); ++mask) {
        double acc = 0.0;
        for (const auto& b : background) {
            for (std::size_t i = 0; i < kN; ++i)
                mixed[i] = (mask >> i) & 1u ? x[i] : b[i];
            acc += model.predict(mixed);
        }
        v[mask] = background.empty() ? 0.0 : acc / static_cast<double>(background.size());
    }

    std::array<double, kN> phi{};
    const double n_fact = factorial(kN);
    for (std::size_t i = 0; i < kN; ++i) {
        double sum = 0.0;
        for (std::size_t mask = 0; mask < (1u << kN); ++mask) {
            if ((mask >> i) & 1u) continue;
            const std::size_t s = static_cast<std::size_t>(std::popcount(mask));
            const double w = factorial(s) * factorial(kN - s - 1) / n_fact;
            sum += w * (v[mask | (1u << i)] - v[mask]);
        }
        phi[i] = sum;
    }
    return phi;
}

} // namespace vigil::explain
