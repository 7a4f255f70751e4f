#include "vigil/detect/smote.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "vigil/core/rng.hpp"

namespace vigil::detect {

namespace {
double sq_dist(const nn::Vec& a, const nn::Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}
} // namespace

std::vector<SmoteSample> smote_oversample(const std::vector<nn::Vec>& minority,
                                          const std::vector<nn::Vec>& majority,
                                          std::size_t n_needed, std::size_t k,
                                          std::uint64_t seed) {
    std::vector<SmoteSample> out;
    if (n_needed == 0 || minority.size() < 2) return out;
    const std::size_t kk = std::min(k, minority.size() - 1);

    // k nearest minority neighbors per minority point
    std::vector<std::vector<std::size_t>> neighbors(minority.size());
    for (std::size_t i = 0; i < minority.size(); ++i) {
        std::vector<std::size_t> idx(minority.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(kk + 1), idx.end(),
                          [&](std::size_t a, std::size_t b) {
                              return sq_dist(minority[i], minority[a]) <
                                     sq_dist(minority[i], minority[b]);
                          });
        for (std::size_t j = 0; j < idx.size() && neighbors[i].size() < kk; ++j)
            if (idx[j] != i) neighbors[i].push_back(idx[j]);
    }

    // margin heuristic: weight each base point by 1/(eps + nearest-enemy distance)
    std::vector<double> weight(minority.size(), 1.0);
    if (!majority.empty()) {
        for (std::size_t i = 0; i < minority.size(); ++i) {
            double enemy = std::numeric_limits<double>::infinity();
            for (const auto& m : majority) enemy = std::min(enemy, sq_dist(minority[i], m));
            weight[i] = 1.0 / (1e-6 + std::sqrt(enemy));
        }
    }
    double wsum = std::accumulate(weight.begin(), weight.end(), 0.0);

    Rng rng(seed);
    out.reserve(n_needed);
    for (std::size_t s = 0; s < n_needed; ++s) {
        double pick = rng.uniform() * wsum;
        std::size_t base = 0;
        for (; base + 1 < minority.size(); ++base) {
            pick -= weight[base];
            if (pick <= 0.0) break;
        }
        const auto& nb = neighbors[base];
        const std::size_t nbr = nb[static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(nb.size()) - 1))];
        const double lambda = rng.uniform();
        SmoteSample smp;
        smp.base_index = base;
        smp.neighbor_index = nbr;
        smp.lambda = lambda;
        smp.point.resize(minority[base].size());
        for (std::size_t i = 0; i < smp.point.size(); ++i)
            smp.point[i] = minority[base][i] + lambda * (minority[nbr][i] - minority[base][i]);
        out.push_back(std::move(smp));
    }
    return out;
}

} // namespace vigil::detect
