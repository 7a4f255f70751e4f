#include "vigil/explain/engine.hpp"

#include <json.hpp>

namespace vigil::explain {

std::string feature_display_name(std::size_t index) {
    if (std::string(detect::feature_name(index)) == "Is Mode Command") return "Mode Command";
    return detect::feature_name(index);
}

IdentifyResult identify_device(const detect::FingerprintModels& models,
                               const signal::VoltageTrace& trace, int claimed_device) {
    if (models.empty()) throw NoModels("no fingerprint models available");
    int best = -1;
    double best_score = -1.0;
    for (const auto& [id, model] : models) {
        const double s = model.score(trace);
        if (s > best_score + 1e-12) {  // ties break toward the lowest id
            best_score = s;
            best = id;
        }
    }
    return IdentifyResult{claimed_device, best};
}

IdentifyResult identify_device(const detect::AsyncAlert& m_async, const sim::Icd& icd,
                               int claimed_device) {
    return IdentifyResult{claimed_device,
                          icd.device_of_address(m_async.real_terminal).value_or(-1)};
}

Explanation ExplainEngine::explain(
    const std::vector<std::vector<detect::FeatureVector>>& history,
    const std::vector<detect::FeatureVector>& msg_window,
    const std::vector<CorpusFeatures>& recent_benign, const CorpusFeatures& msg_t,
    bool context_alert, const signal::VoltageTrace* trace, int claimed_device,
    const detect::AsyncAlert* m_async) const {
    Explanation ex;

    if (context_alert && context_model != nullptr) {
        SurrogateConfig scfg = surrogate_cfg;
        scfg.n_history = n_history;
        std::vector<std::vector<detect::FeatureVector>> h = history;
        if (h.size() > n_history)
            h.erase(h.begin(), h.end() - static_cast<std::ptrdiff_t>(n_history));
        const SurrogateModel surrogate = build_surrogate(*context_model, h, msg_window, scfg);
        ex.surrogate_fidelity = surrogate.training_fidelity;
        for (const auto& rf : top_features(surrogate, msg_window, top_f))
            ex.most_influential_features.push_back(
                AttributedFeature{feature_display_name(rf.index), rf.attribution});
    }

    IdentifyResult id{claimed_device, claimed_device};
    if (m_async != nullptr) {
        id = identify_device(*m_async, *icd, claimed_device);
    } else if (trace != nullptr && fingerprints != nullptr && !fingerprints->empty()) {
        id = identify_device(*fingerprints, *trace, claimed_device);
    }
    ex.claimed_device = id.claimed;
    ex.real_device = id.real;
    if (icd) {
        const sim::DeviceSpec* c = icd->device(id.claimed);
        const sim::DeviceSpec* r = icd->device(id.real);
        ex.claimed_device_name = c ? c->name : "unknown";
        ex.real_device_name = r ? r->name : "unknown";
    }

    if (translator != nullptr) {
        std::vector<CorpusFeatures> msgs;
        const std::size_t take = b_prime > 0 ? b_prime - 1 : 0;
        const std::size_t start = recent_benign.size() > take ? recent_benign.size() - take : 0;
        for (std::size_t i = start; i < recent_benign.size(); ++i)
            msgs.push_back(recent_benign[i]);
        msgs.push_back(msg_t);
        ex.description = translator->translate(msgs);
    }
    return ex;
}

std::string Explanation::to_json() const {
    nlohmann::ordered_json j;
    auto feats = nlohmann::ordered_json::array();
    for (const auto& f : most_influential_features)
        feats.push_back({{"feature", f.name}, {"attribution", f.score}});
    j["most_influential_features"] = feats;
    j["claimed_device"] = claimed_device;
    j["claimed_device_name"] = claimed_device_name;
    j["real_device"] = real_device;
    j["real_device_name"] = real_device_name;
    j["description"] = description;
    return j.dump();
}

} // namespace vigil::explain
