#include "vigil/harness/pipeline.hpp"

#include <deque>

#include <json.hpp>

#include "vigil/harness/bench.hpp"

namespace vigil::harness {

Artifacts train_artifacts(const sim::Icd& icd, const TrainOptions& opt) {
    Artifacts art;
    art.icd = icd;
    art.topology = make_topology(icd, opt.testbed_seed);
    art.whitelist = detect::Whitelist::from_icd_devices(icd.devices);

    if (opt.train_context) {
        sim::SimConfig sc;
        sc.frames = opt.frames;
        sc.seed = opt.traffic_seed;
        const sim::TrafficLog benign = sim::run(icd, sc);
        detect::ContextFitConfig cc = opt.context_cfg;
        cc.verbose = cc.verbose || opt.verbose;
        art.context = detect::fit_context(benign.messages(), cc);
    }
    if (opt.train_fingerprints) {
        signal::Topology topo = art.topology;  // drift stays at epoch 0 for training
        const auto traces =
            gen_traces(topo, fingerprint_device_set(), opt.traces_per_device, opt.testbed_seed + 5);
        detect::FingerprintFitConfig fc = opt.fingerprint_cfg;
        fc.verbose = fc.verbose || opt.verbose;
        art.fingerprints = detect::fit_all(traces, fc);
    }
    if (opt.train_physical) {
        signal::Topology topo = art.topology;
        const std::size_t per_dev =
            opt.physical_traces / fingerprint_device_set().size() + 1;
        auto traces = gen_traces(topo, fingerprint_device_set(), per_dev, opt.testbed_seed + 9);
        traces.resize(opt.physical_traces);
        detect::PhysicalFitConfig pc = opt.physical_cfg;
        pc.verbose = pc.verbose || opt.verbose;
        art.physical = detect::fit_physical(traces, pc);
    }
    if (opt.train_translator) {
        const auto corpus = explain::generate_corpus(icd, explain::enumerate_templates(icd),
                                                     opt.corpus_cfg);
        explain::NmtConfig nc = opt.nmt_cfg;
        nc.verbose = nc.verbose || opt.verbose;
        art.translator = explain::Translator::train(corpus, nc);
    }
    return art;
}

sim::TrafficLog make_eval_traffic(const sim::Icd& icd, int scenario, std::uint64_t eval_seed,
                                  std::int64_t frames, double malicious_fraction) {
    sim::SimConfig sc;
    sc.frames = frames;
    sc.seed = eval_seed;
    const sim::TrafficLog benign = sim::run(icd, sc);
    if (scenario == 0) return benign;
    attack::InjectConfig ic;
    ic.seed = eval_seed ^ 0xbeefULL;
    ic.malicious_fraction = malicious_fraction;
    return attack::inject(icd, benign, scenario, ic);
}

MonitorResult monitor(const Artifacts& art, const sim::TrafficLog& log,
                      const MonitorOptions& opt) {
    MonitorResult res;

    // phase one: start-up physical intrusion check on the live topology
    {
        signal::Topology topo = art.topology;
        std::vector<signal::VoltageTrace> startup =
            gen_traces(topo, fingerprint_device_set(), 12, opt.trace_seed ^ 0x57a27ULL);
        if (art.physical.detect_startup(startup) == detect::PhysicalVerdict::IntrusionAlert)
            res.startup_alerts = 1;
    }

    detect::ContextDetector detector(art.context);
    explain::ExplainEngine engine;
    engine.icd = &art.icd;
    engine.context_model = &art.context;
    engine.fingerprints = &art.fingerprints;
    engine.translator = &art.translator;
    engine.n_history = opt.n_history;
    engine.top_f = opt.top_f;
    engine.b_prime = opt.b_prime;
    engine.surrogate_cfg.seed = opt.surrogate_seed;

    std::deque<std::vector<detect::FeatureVector>> history;
    std::deque<explain::CorpusFeatures> recent_benign;
    std::uint64_t trace_n = opt.trace_seed;

    for (const auto& e : log.entries) {
        const bool truth_malicious = !e.label.benign();

        // device fingerprinting on the transmission's voltage trace
        const signal::VoltageTrace trace =
            signal::synthesize(art.topology, e.source_device, ++trace_n * 0x9e3779b9ULL);
        const std::optional<int> claimed_dev = art.icd.device_of_address(e.claimed_address);
        bool spoof_alert = false;
        bool truth_spoofed = claimed_dev.has_value() && *claimed_dev != e.source_device;
        if (claimed_dev && art.fingerprints.count(*claimed_dev)) {
            spoof_alert = detect::authenticate(art.fingerprints, trace, *claimed_dev) ==
                          detect::AuthResult::SpoofAlert;
            if (spoof_alert && truth_spoofed) ++res.fingerprint.tp;
            else if (spoof_alert) ++res.fingerprint.fp;
            else if (truth_spoofed) ++res.fingerprint.fn;
            else ++res.fingerprint.tn;
        }

        const auto ctx_before = detector.context();
        const bool warmed = detector.warmed_up();
        const detect::ContextVerdict v = detector.observe(e.msg);
        const detect::FeatureVector fv = detector.last_features();
        const bool flagged = v == detect::ContextVerdict::Anomalous;

        if (flagged && truth_malicious) ++res.context.tp;
        else if (flagged) ++res.context.fp;
        else if (truth_malicious) ++res.context.fn;
        else ++res.context.tn;

        std::vector<detect::FeatureVector> msg_window;
        if (warmed) {
            msg_window.assign(ctx_before.begin(), ctx_before.end());
            msg_window.push_back(fv);
        }

        if ((flagged || spoof_alert) && opt.explain_alerts && warmed &&
            history.size() >= opt.n_history) {
            auto& bucket = res.explanations[e.label.scenario];
            if (bucket.size() < opt.explain_per_scenario) {
                bucket.push_back(engine.explain(
                    {history.begin(), history.end()}, msg_window,
                    {recent_benign.begin(), recent_benign.end()},
                    explain::corpus_features(e.msg), flagged, &trace,
                    claimed_dev.value_or(-1), nullptr));
            }
        }

        if (!flagged) {
            if (warmed) {
                history.push_back(msg_window);
                while (history.size() > opt.n_history) history.pop_front();
            }
            recent_benign.push_back(explain::corpus_features(e.msg));
            while (recent_benign.size() > 4) recent_benign.pop_front();
        }
    }
    return res;
}

PreventionEval eval_prevention(const Artifacts& art, const sim::TrafficLog& log) {
    PreventionEval ev;
    for (const auto& e : log.entries) {
        const detect::FilterDecision d = art.whitelist.filter_write(e.source_device, e.msg);
        const sim::DeviceSpec* dev = art.icd.device(e.source_device);
        const bool spoofed =
            dev && std::find(dev->addresses.begin(), dev->addresses.end(), e.claimed_address) ==
                       dev->addresses.end();
        if (spoofed) {
            ++ev.spoofed_total;
            if (d.action == detect::FilterAction::Blocked) {
                ++ev.spoofed_blocked;
                if (d.alert.real_terminal != dev->addresses.front() ||
                    d.alert.timestamp_us != e.msg.timestamp_us)
                    ev.alerts_consistent = false;
            }
        } else {
            ++ev.legit_total;
            if (d.action == detect::FilterAction::Transmit) ++ev.legit_passed;
        }
    }
    return ev;
}

std::string run_pipeline(const sim::Icd& icd, const PipelineOptions& opt) {
    using nlohmann::ordered_json;
    Artifacts art = train_artifacts(icd, opt.train);

    ordered_json report;
    report["icd_terminals"] = icd.terminals.size();

    // context detection per scenario, trained on testbed 1, evaluated on
    // freshly seeded testbed-2 traffic
    ordered_json per_scenario = ordered_json::object();
    ordered_json explanations = ordered_json::object();
    for (int s = 1; s <= 6; ++s) {
        const sim::TrafficLog log = make_eval_traffic(
            icd, s, opt.eval_traffic_seed + static_cast<std::uint64_t>(s), opt.eval_frames,
            opt.malicious_fraction);
        MonitorOptions mo;
        mo.trace_seed = opt.eval_testbed_seed + static_cast<std::uint64_t>(s);
        const MonitorResult r = monitor(art, log, mo);
        per_scenario[std::to_string(s)] = {
            {"precision", r.context.precision()}, {"recall", r.context.recall()},
            {"tp", r.context.tp},                 {"fp", r.context.fp},
            {"fn", r.context.fn},                 {"tn", r.context.tn}};
        if (!r.explanations.empty() && r.explanations.count(s) && !r.explanations.at(s).empty())
            explanations[std::to_string(s)] =
                nlohmann::ordered_json::parse(r.explanations.at(s).front().to_json());
    }
    report["context_detection"] = per_scenario;
    report["explanations"] = explanations;

    // fingerprinting FAR/FRR on held-out traces
    {
        signal::Topology topo = art.topology;
        const auto held = gen_traces(topo, fingerprint_device_set(), 400,
                                     opt.train.testbed_seed + 0x777ULL);
        ordered_json per_device = ordered_json::object();
        for (const auto& [dev, model] : art.fingerprints) {
            std::size_t genuine = 0, rejected = 0, impostor = 0, accepted = 0;
            for (const auto& t : held) {
                const bool is_dev = t.source_device == dev;
                const bool authentic = model.score(t) >= 0.5;
                if (is_dev) {
                    ++genuine;
                    if (!authentic) ++rejected;
                } else {
                    ++impostor;
                    if (authentic) ++accepted;
                }
            }
            per_device[std::to_string(dev)] = {
                {"frr", genuine ? static_cast<double>(rejected) / static_cast<double>(genuine) : 0.0},
                {"far", impostor ? static_cast<double>(accepted) / static_cast<double>(impostor) : 0.0}};
        }
        report["fingerprinting"] = per_device;
    }

    // physical intrusion: benign vs compromised topologies
    {
        std::size_t tp = 0, fp = 0, n_benign = 0, n_comp = 0;
        signal::Topology topo = art.topology;
        const auto benign = gen_traces(topo, fingerprint_device_set(), 120,
                                       opt.train.testbed_seed + 0x888ULL);
        for (const auto& t : benign) {
            ++n_benign;
            if (art.physical.detect(t) == detect::PhysicalVerdict::IntrusionAlert) ++fp;
        }
        for (int p = 1; p <= 3; ++p) {
            signal::Topology comp = attack::physical_intrusion(
                art.topology, static_cast<signal::AttachPoint>(p), p == 2);
            const auto traces = gen_traces(comp, fingerprint_device_set(), 40,
                                           opt.train.testbed_seed + 0x999ULL + static_cast<std::uint64_t>(p));
            for (const auto& t : traces) {
                ++n_comp;
                if (art.physical.detect(t) == detect::PhysicalVerdict::IntrusionAlert) ++tp;
            }
        }
        report["physical_intrusion"] = {
            {"tpr", n_comp ? static_cast<double>(tp) / static_cast<double>(n_comp) : 0.0},
            {"fpr", n_benign ? static_cast<double>(fp) / static_cast<double>(n_benign) : 0.0}};
    }

    // prevention on the spoofing scenarios
    {
        PreventionEval total;
        for (int s : {3, 4}) {
            const sim::TrafficLog log = make_eval_traffic(
                icd, s, opt.eval_traffic_seed + 40 + static_cast<std::uint64_t>(s),
                opt.eval_frames, opt.malicious_fraction);
            const PreventionEval ev = eval_prevention(art, log);
            total.spoofed_total += ev.spoofed_total;
            total.spoofed_blocked += ev.spoofed_blocked;
            total.legit_total += ev.legit_total;
            total.legit_passed += ev.legit_passed;
            total.alerts_consistent = total.alerts_consistent && ev.alerts_consistent;
        }
        report["prevention"] = {
            {"block_rate", total.spoofed_total ? static_cast<double>(total.spoofed_blocked) /
                                                     static_cast<double>(total.spoofed_total)
                                               : 1.0},
            {"pass_rate", total.legit_total ? static_cast<double>(total.legit_passed) /
                                                  static_cast<double>(total.legit_total)
                                            : 1.0},
            {"alerts_consistent", total.alerts_consistent}};
    }

    if (opt.with_timing) {
        const auto rows = bench_all(art);
        ordered_json timing = ordered_json::object();
        for (const auto& r : rows) timing[r.name] = r.mean_ms;
        report["timing_ms"] = timing;
    }
    return report.dump(2);
}

} // namespace vigil::harness
