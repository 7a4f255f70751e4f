#pragma once
// End-to-end orchestration: artifact training, the two-phase monitoring loop
// (start-up physical check, then per-message fingerprint + context detection
// with alert explanation), evaluation metrics, and report assembly.

#include <map>
#include <optional>
#include <string>

#include "vigil/attack/scenarios.hpp"
#include "vigil/detect/context.hpp"
#include "vigil/detect/fingerprint.hpp"
#include "vigil/detect/physical.hpp"
#include "vigil/explain/engine.hpp"
#include "vigil/harness/datasets.hpp"

namespace vigil::harness {

struct Artifacts {
    sim::Icd icd;
    signal::Topology topology;  // legitimate testbed topology
    detect::PhysicalIntrusionModel physical;
    detect::FingerprintModels fingerprints;
    detect::ContextModel context;
    explain::Translator translator;
    detect::Whitelist whitelist;
};

struct TrainOptions {
    std::uint64_t testbed_seed = 101;  // device signatures + drift
    std::uint64_t traffic_seed = 7001; // benign training traffic
    std::int64_t frames = 900;         // the 70% train split holds >= 20k windows
    std::size_t traces_per_device = 1200;
    std::size_t physical_traces = 1500;
    detect::ContextFitConfig context_cfg;
    detect::FingerprintFitConfig fingerprint_cfg;
    detect::PhysicalFitConfig physical_cfg;
    explain::NmtConfig nmt_cfg;
    explain::CorpusConfig corpus_cfg;
    bool train_physical = true;
    bool train_fingerprints = true;
    bool train_context = true;
    bool train_translator = true;
    bool verbose = false;
};

Artifacts train_artifacts(const sim::Icd& icd, const TrainOptions& opt);

struct Confusion {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    double precision() const {
        return tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    }
    double recall() const {
        return tp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    }
};

struct MonitorOptions {
    bool explain_alerts = true;
    std::size_t explain_per_scenario = 1;  // explanations kept per scenario
    std::uint64_t trace_seed = 1;
    std::size_t n_history = 10;  // N'
    std::size_t top_f = 1;       // F
    std::size_t b_prime = 2;     // B'
    std::uint64_t surrogate_seed = 5;
};

struct MonitorResult {
    Confusion context;                      // context verdicts vs ground truth
    Confusion fingerprint;                  // spoof alerts vs spoofed ground truth
    std::map<int, std::vector<explain::Explanation>> explanations;  // by scenario
    std::size_t startup_alerts = 0;
};

// Monitoring phase over a labeled traffic log. The start-up physical check
// runs first; monitoring alerts are only produced after it clears.
MonitorResult monitor(const Artifacts& art, const sim::TrafficLog& log,
                      const MonitorOptions& opt);

// Benign traffic + one scenario injection on an evaluation seed.
sim::TrafficLog make_eval_traffic(const sim::Icd& icd, int scenario, std::uint64_t eval_seed,
                                  std::int64_t frames, double malicious_fraction = 0.03);

struct PreventionEval {
    std::size_t spoofed_total = 0, spoofed_blocked = 0;
    std::size_t legit_total = 0, legit_passed = 0;
    bool alerts_consistent = true;  // every m_async names the real terminal
};

PreventionEval eval_prevention(const Artifacts& art, const sim::TrafficLog& log);

// Full run: trains (or loads) artifacts, evaluates every scenario, the
// physical detector, fingerprints, prevention, and timing. Returns the
// report as ordered JSON text.
struct PipelineOptions {
    TrainOptions train;
    std::uint64_t eval_traffic_seed = 9001;  // testbed-2 traffic
    std::uint64_t eval_testbed_seed = 202;   // testbed-2 signatures
    std::int64_t eval_frames = 120;
    double malicious_fraction = 0.03;
    bool with_timing = true;
};

std::string run_pipeline(const sim::Icd& icd, const PipelineOptions& opt);

} // namespace vigil::harness
