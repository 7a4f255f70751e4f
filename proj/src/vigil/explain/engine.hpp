#pragma once
// Alert explanation: most-influential-feature attribution (context alerts),
// device identification through the fingerprint models or the prevention
// alert, and the translated trigger-and-operation description.

#include <optional>
#include <string>
#include <vector>

#include "vigil/detect/context.hpp"
#include "vigil/detect/fingerprint.hpp"
#include "vigil/explain/nmt.hpp"
#include "vigil/explain/surrogate.hpp"

namespace vigil::explain {

struct NoModels : std::runtime_error {
    explicit NoModels(const std::string& w) : std::runtime_error(w) {}
};

struct AttributedFeature {
    std::string name;  // attack-table styling ("Mode Command", "Data Count", ...)
    double score = 0.0;
};

struct Explanation {
    std::vector<AttributedFeature> most_influential_features;  // empty unless context alert
    int claimed_device = -1;
    int real_device = -1;
    std::string claimed_device_name;
    std::string real_device_name;
    std::string description;  // "<trigger>, and then <operation>"
    double surrogate_fidelity = 0.0;

    std::string to_json() const;
};

// Display name used in explanations; Table-1 naming elsewhere.
std::string feature_display_name(std::size_t index);

struct IdentifyResult {
    int claimed = -1;
    int real = -1;
};

// Detection approach: the real transmitter is the device whose binary
// classifier scores the trace highest; ties break toward the lowest id.
IdentifyResult identify_device(const detect::FingerprintModels& models,
                               const signal::VoltageTrace& trace, int claimed_device);
// Prevention approach: the blocked write's alert names the real terminal.
IdentifyResult identify_device(const detect::AsyncAlert& m_async, const sim::Icd& icd,
                               int claimed_device);

struct ExplainEngine {
    const sim::Icd* icd = nullptr;
    const detect::ContextModel* context_model = nullptr;
    const detect::FingerprintModels* fingerprints = nullptr;
    const Translator* translator = nullptr;

    std::size_t n_history = 10;  // N'
    std::size_t top_f = 1;       // F
    std::size_t b_prime = 2;     // messages fed to the translator
    SurrogateConfig surrogate_cfg;

    // `history` carries the N' benign windows before msg_t (oldest first);
    // `recent_benign` the benign messages preceding msg_t (oldest first).
    Explanation explain(const std::vector<std::vector<detect::FeatureVector>>& history,
                        const std::vector<detect::FeatureVector>& msg_window,
                        const std::vector<CorpusFeatures>& recent_benign,
                        const CorpusFeatures& msg_t, bool context_alert,
                        const signal::VoltageTrace* trace, int claimed_device,
                        const detect::AsyncAlert* m_async) const;
};

} // namespace vigil::explain
