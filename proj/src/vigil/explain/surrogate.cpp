#include "vigil/explain/surrogate.hpp"

#include <algorithm>

#include "vigil/core/rng.hpp"
#include "vigil/explain/shap.hpp"

namespace vigil::explain {

namespace {

bool detector_flags(const detect::ContextModel& model,
                    const std::vector<detect::FeatureVector>& window) {
    nn::Seq enc;
    enc.reserve(window.size());
    for (const auto& fv : window) enc.push_back(model.encoder.encode(fv));
    return model.window_mse(enc) > model.thresh_beta;
}

// one valid random perturbation of the window's last message
std::vector<detect::FeatureVector> perturb(const std::vector<detect::FeatureVector>& window,
                                           Rng& rng) {
    auto out = window;
    detect::FeatureVector& fv = out.back();
    const std::size_t j = static_cast<std::size_t>(rng.uniform_int(0, 7));
    switch (j) {
        case 0: fv.source_address = static_cast<int>(rng.uniform_int(0, 32)); break;
        case 1: fv.source_subaddress = static_cast<int>(rng.uniform_int(0, 32)); break;
        case 2: fv.destination_address = static_cast<int>(rng.uniform_int(0, 32)); break;
        case 3: fv.destination_subaddress = static_cast<int>(rng.uniform_int(0, 32)); break;
        case 4: fv.channel = static_cast<int>(rng.uniform_int(0, 1)); break;
        case 5: fv.is_mode_command = static_cast<int>(rng.uniform_int(0, 1)); break;
        case 6: fv.data_count = static_cast<int>(rng.uniform_int(0, 32)); break;
        case 7: fv.time_difference_us *= rng.uniform(0.1, 10.0); break;
    }
    return out;
}

} // namespace

SurrogateModel build_surrogate(const detect::ContextModel& detector,
                               const std::vector<std::vector<detect::FeatureVector>>& history,
                               const std::vector<detect::FeatureVector>& msg_window,
                               const SurrogateConfig& cfg) {
    if (history.empty()) throw DegenerateLabels("no benign history windows");

    std::vector<FeatureRow> x;
    std::vector<double> y;
    std::size_t pos = 0, neg = 0;
    auto add = [&](const std::vector<detect::FeatureVector>& w, bool anomalous) {
        x.push_back(detect::to_raw(w.back()));
        y.push_back(anomalous ? 1.0 : 0.0);
        (anomalous ? pos : neg) += 1;
    };

    for (const auto& w : history) add(w, detector_flags(detector, w));
    add(msg_window, true);

    Rng rng(cfg.seed);
    std::size_t attempts = 0;
    while (pos != neg && attempts < cfg.max_attempts) {
        ++attempts;
        const auto& base = history[static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(history.size()) - 1))];
        auto w = perturb(base, rng);
        const bool anomalous = detector_flags(detector, w);
        // keep only samples of the currently deficient class
        if (anomalous && pos < neg) add(w, true);
        else if (!anomalous && neg < pos) add(w, false);
    }
    if (pos == 0 || neg == 0)
        throw DegenerateLabels("detector labels one class only after augmentation");

    SurrogateModel s;
    s.trees.fit(x, y, cfg.gbt);
    std::size_t agree = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (s.trees.predict_label(x[i]) == (y[i] > 0.5)) ++agree;
    s.training_fidelity = static_cast<double>(agree) / static_cast<double>(x.size());
    for (const auto& w : history) s.background.push_back(detect::to_raw(w.back()));
    return s;
}

std::vector<RankedFeature> top_features(const SurrogateModel& surrogate,
                                        const std::vector<detect::FeatureVector>& msg_window,
                                        std::size_t f) {
    const auto phi =
        shapley_values(surrogate.trees, detect::to_raw(msg_window.back()), surrogate.background);
    std::vector<RankedFeature> ranked;
    for (std::size_t i = 0; i < phi.size(); ++i)
        ranked.push_back(RankedFeature{i, detect::feature_name(i), phi[i]});
    std::stable_sort(ranked.begin(), ranked.end(), [](const RankedFeature& a, const RankedFeature& b) {
        return std::abs(a.attribution) > std::abs(b.attribution);
    });
    ranked.resize(std::min(f, ranked.size()));
    return ranked;
}

} // namespace vigil::explain
