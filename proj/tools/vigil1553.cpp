// vigil1553: workbench CLI for the 1553 bus defense stack.
//
//   simulate   generate benign traffic from an ICD
//   attack     inject an attack scenario into a capture
//   pid        physical intrusion detector: train / detect
//   fp         device fingerprinting: train / auth / drift-bench
//   ctx        context anomaly detector: train / detect / eval
//   explain    explain alerts in a labeled capture
//   pipeline   end-to-end run from a JSON run spec
//   bench      per-mechanism timing table

#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "vigil/attack/scenarios.hpp"
#include "vigil/bus/capture.hpp"
#include "vigil/detect/context.hpp"
#include "vigil/detect/fingerprint.hpp"
#include "vigil/detect/physical.hpp"
#include "vigil/explain/engine.hpp"
#include "vigil/harness/bench.hpp"
#include "vigil/harness/pipeline.hpp"

using namespace vigil;

namespace {

sim::Icd load_icd_arg(const std::string& path) {
    if (path.empty() || path == "default") return sim::default_testbed_icd();
    return sim::load_icd_file(path);
}

void write_traffic(const sim::TrafficLog& log, const std::string& out,
                   const std::string& messages_out) {
    bus::write_capture_file(out, log.words());
    sim::write_labels_file(out + ".labels", log);
    if (!messages_out.empty()) {
        std::ofstream os(messages_out);
        bus::write_messages_json(os, log.messages());
    }
}

int cmd_simulate(const std::string& icd_path, std::int64_t frames, std::uint64_t seed,
                 const std::string& out, const std::string& messages_out,
                 const std::string& dump_icd) {
    const sim::Icd icd = load_icd_arg(icd_path);
    if (!dump_icd.empty()) sim::save_icd_file(dump_icd, icd);
    sim::SimConfig cfg;
    cfg.frames = frames;
    cfg.seed = seed;
    const sim::TrafficLog log = sim::run(icd, cfg);
    write_traffic(log, out, messages_out);
    std::cout << "wrote " << log.size() << " transfers to " << out << "\n";
    return 0;
}

int cmd_attack(const std::string& icd_path, int scenario, const std::string& in,
               const std::string& out, std::uint64_t seed, double fraction) {
    const sim::Icd icd = load_icd_arg(icd_path);
    sim::TrafficLog log = sim::read_traffic(in, in + ".labels");
    attack::InjectConfig cfg;
    cfg.seed = seed;
    cfg.malicious_fraction = fraction;
    const sim::TrafficLog attacked = attack::inject(icd, log, scenario, cfg);
    write_traffic(attacked, out, "");
    std::size_t malicious = 0;
    for (const auto& e : attacked.entries)
        if (!e.label.benign()) ++malicious;
    std::cout << "scenario " << scenario << ": " << malicious << " malicious of "
              << attacked.size() << " transfers\n";
    return 0;
}

int cmd_pipeline(const std::string& spec_path, const std::string& report_path) {
    std::ifstream is(spec_path);
    if (!is) throw std::runtime_error("cannot read " + spec_path);
    nlohmann::json spec;
    is >> spec;
    const sim::Icd icd = load_icd_arg(spec.value("icd", std::string("default")));
    harness::PipelineOptions opt;
    opt.train.traffic_seed = spec.value("train_seed", opt.train.traffic_seed);
    opt.train.testbed_seed = spec.value("testbed_seed", opt.train.testbed_seed);
    opt.train.frames = spec.value("train_frames", opt.train.frames);
    opt.eval_traffic_seed = spec.value("eval_seed", opt.eval_traffic_seed);
    opt.eval_testbed_seed = spec.value("eval_testbed_seed", opt.eval_testbed_seed);
    opt.eval_frames = spec.value("eval_frames", opt.eval_frames);
    opt.malicious_fraction = spec.value("malicious_fraction", opt.malicious_fraction);
    opt.with_timing = spec.value("with_timing", true);
    const std::string report = harness::run_pipeline(icd, opt);
    std::ofstream os(report_path);
    os << report << "\n";
    std::cout << "report -> " << report_path << "\n";

    const auto j = nlohmann::json::parse(report);
    for (const auto& [s, row] : j.at("context_detection").items()) {
        const double precision = row.at("precision").get<double>();
        const double recall = row.at("recall").get<double>();
        std::cout << "scenario " << s << ": precision " << precision << " recall " << recall
                  << "\n";
        if (precision < 0.97 || recall < 0.99) return 2;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"1553 bus defense workbench"};
    app.require_subcommand(1);

    std::string icd_path = "default", in, out, messages_out, model_path, traces_path,
                report_path = "report.json", dump_icd;
    std::int64_t frames = 100;
    std::uint64_t seed = 1;
    int scenario = 1;
    double fraction = 0.03;

    auto* s_sim = app.add_subcommand("simulate", "generate benign traffic");
    s_sim->add_option("--icd", icd_path, "ICD json file or 'default'");
    s_sim->add_option("--frames", frames, "major frames to run");
    s_sim->add_option("--seed", seed);
    s_sim->add_option("--out", out, "capture file")->required();
    s_sim->add_option("--messages", messages_out, "message-level JSONL export");
    s_sim->add_option("--write-icd", dump_icd, "also dump the ICD used");

    auto* s_att = app.add_subcommand("attack", "inject an attack scenario");
    s_att->add_option("--icd", icd_path);
    s_att->add_option("--scenario", scenario)->check(CLI::Range(1, 6))->required();
    s_att->add_option("--in", in)->required();
    s_att->add_option("--out", out)->required();
    s_att->add_option("--seed", seed);
    s_att->add_option("--fraction", fraction, "malicious fraction target");

    auto* s_pid = app.add_subcommand("pid", "physical intrusion detector");
    auto* pid_train = s_pid->add_subcommand("train");
    pid_train->add_option("--traces", traces_path)->required();
    pid_train->add_option("--out", model_path)->required();
    auto* pid_detect = s_pid->add_subcommand("detect");
    pid_detect->add_option("--model", model_path)->required();
    pid_detect->add_option("--traces", traces_path)->required();
    pid_detect->add_option("--report", report_path);

    auto* s_fp = app.add_subcommand("fp", "device fingerprinting");
    auto* fp_train = s_fp->add_subcommand("train");
    fp_train->add_option("--traces", traces_path)->required();
    fp_train->add_option("--out", out, "model file prefix")->required();
    auto* fp_auth = s_fp->add_subcommand("auth");
    fp_auth->add_option("--model", model_path)->required();
    fp_auth->add_option("--traces", traces_path)->required();
    auto* fp_drift = s_fp->add_subcommand("drift-bench");
    fp_drift->add_option("--icd", icd_path);
    fp_drift->add_option("--seed", seed);
    fp_drift->add_option("--report", report_path);

    auto* s_ctx = app.add_subcommand("ctx", "context anomaly detector");
    auto* ctx_train = s_ctx->add_subcommand("train");
    ctx_train->add_option("--icd", icd_path);
    ctx_train->add_option("--capture", in)->required();
    ctx_train->add_option("--model", model_path)->required();
    auto* ctx_detect = s_ctx->add_subcommand("detect");
    ctx_detect->add_option("--model", model_path)->required();
    ctx_detect->add_option("--capture", in)->required();
    ctx_detect->add_option("--report", report_path);
    auto* ctx_eval = s_ctx->add_subcommand("eval");
    ctx_eval->add_option("--icd", icd_path);
    ctx_eval->add_option("--model", model_path)->required();
    ctx_eval->add_option("--capture", in)->required();
    ctx_eval->add_option("--report", report_path);

    auto* s_exp = app.add_subcommand("explain", "explain alerts in a capture");
    std::int64_t alert_index = -1;
    s_exp->add_option("--icd", icd_path);
    s_exp->add_option("--alert", alert_index, "alert ordinal (default: all)");
    s_exp->add_option("--capture", in)->required();
    s_exp->add_option("--models", model_path, "artifacts directory")->required();
    s_exp->add_option("--report", report_path);

    auto* s_pipe = app.add_subcommand("pipeline", "end-to-end run from a run spec");
    std::string spec_path;
    s_pipe->add_option("--spec", spec_path, "run spec json")->required();
    s_pipe->add_option("--report", report_path);

    auto* s_bench = app.add_subcommand("bench", "per-mechanism timing");
    s_bench->add_option("--icd", icd_path);
    s_bench->add_option("--report", report_path);

    CLI11_PARSE(app, argc, argv);

    try {
        if (s_sim->parsed())
            return cmd_simulate(icd_path, frames, seed, out, messages_out, dump_icd);
        if (s_att->parsed()) return cmd_attack(icd_path, scenario, in, out, seed, fraction);
        if (s_pid->parsed()) {
            if (pid_train->parsed()) {
                const auto data = signal::load_traces(traces_path, traces_path + ".labels");
                const auto model = detect::fit_physical(data, {});
                model.save_file(model_path);
                std::cout << "thresh_alpha " << model.thresh_alpha << ", model -> " << model_path
                          << "\n";
                return 0;
            }
            if (pid_detect->parsed()) {
                const auto model = detect::PhysicalIntrusionModel::load_file(model_path);
                const auto data = signal::load_traces(traces_path, traces_path + ".labels");
                std::size_t alerts = 0;
                for (const auto& t : data)
                    if (model.detect(t) == detect::PhysicalVerdict::IntrusionAlert) ++alerts;
                nlohmann::ordered_json j;
                j["traces"] = data.size();
                j["alerts"] = alerts;
                j["startup_alert"] =
                    model.detect_startup(data) == detect::PhysicalVerdict::IntrusionAlert;
                std::ofstream os(report_path);
                os << j.dump(2) << "\n";
                std::cout << alerts << "/" << data.size() << " alerts, report -> " << report_path
                          << "\n";
                return 0;
            }
        }
        if (s_fp->parsed()) {
            if (fp_train->parsed()) {
                const auto data = signal::load_traces(traces_path, traces_path + ".labels");
                const auto models = detect::fit_all(data, {});
                for (const auto& [dev, m] : models)
                    m.save_file(out + ".dev" + std::to_string(dev) + ".bin");
                std::cout << models.size() << " device models -> " << out << ".dev*.bin\n";
                return 0;
            }
            if (fp_auth->parsed()) {
                const auto m = detect::FingerprintModel::load_file(model_path);
                const auto data = signal::load_traces(traces_path, traces_path + ".labels");
                std::size_t alerts = 0;
                for (const auto& t : data)
                    if (m.score(t) < 0.5) ++alerts;
                std::cout << alerts << "/" << data.size() << " spoof alerts\n";
                return 0;
            }
            if (fp_drift->parsed()) {
                const sim::Icd icd = load_icd_arg(icd_path);
                harness::TrainOptions topt;
                topt.testbed_seed = seed + 100;
                topt.train_context = false;
                topt.train_physical = false;
                topt.train_translator = false;
                harness::Artifacts art = harness::train_artifacts(icd, topt);
                auto frozen = art.fingerprints;
                signal::Topology topo = art.topology;
                std::size_t online_ok = 0, frozen_ok = 0, total = 0;
                const auto devices = harness::fingerprint_device_set();
                for (std::size_t step = 0; step < 10000; ++step) {
                    topo.drift_step();
                    const int dev = devices[step % devices.size()];
                    const auto tr = signal::synthesize(topo, dev, seed + step);
                    ++total;
                    auto& om = art.fingerprints.at(dev);
                    if (om.score(tr) >= 0.5) ++online_ok;
                    if (frozen.at(dev).score(tr) >= 0.5) ++frozen_ok;
                    detect::online_update(om, tr);
                }
                nlohmann::ordered_json j;
                j["steps"] = total;
                j["online_accuracy"] =
                    static_cast<double>(online_ok) / static_cast<double>(total);
                j["frozen_accuracy"] =
                    static_cast<double>(frozen_ok) / static_cast<double>(total);
                std::ofstream os(report_path);
                os << j.dump(2) << "\n";
                std::cout << j.dump(2) << "\n";
                return 0;
            }
        }
        if (s_ctx->parsed()) {
            if (ctx_train->parsed()) {
                const sim::TrafficLog log = sim::read_traffic(in, in + ".labels");
                const auto model = detect::fit_context(log.messages(), {});
                model.save_file(model_path);
                std::cout << "thresh_beta " << model.thresh_beta << ", model -> " << model_path
                          << "\n";
                return 0;
            }
            const auto model = detect::ContextModel::load_file(model_path);
            const sim::TrafficLog log = sim::read_traffic(in, in + ".labels");
            detect::ContextDetector det(model);
            harness::Confusion c;
            std::vector<std::size_t> alerts;
            for (std::size_t i = 0; i < log.entries.size(); ++i) {
                const auto& e = log.entries[i];
                const bool flagged = det.observe(e.msg) == detect::ContextVerdict::Anomalous;
                const bool truth = !e.label.benign();
                if (flagged) alerts.push_back(i);
                if (flagged && truth) ++c.tp;
                else if (flagged) ++c.fp;
                else if (truth) ++c.fn;
                else ++c.tn;
            }
            nlohmann::ordered_json j;
            j["alerts"] = alerts;
            j["precision"] = c.precision();
            j["recall"] = c.recall();
            std::ofstream os(report_path);
            os << j.dump(2) << "\n";
            std::cout << "precision " << c.precision() << " recall " << c.recall() << "\n";
            if (ctx_eval->parsed() && (c.precision() < 0.97 || c.recall() < 0.99)) return 2;
            return 0;
        }
        if (s_exp->parsed()) {
            const sim::Icd icd = load_icd_arg(icd_path);
            harness::Artifacts art;
            art.icd = icd;
            art.topology = harness::make_topology(icd, 101);
            art.whitelist = detect::Whitelist::from_icd_devices(icd.devices);
            art.context = detect::ContextModel::load_file(model_path + "/context.bin");
            art.physical =
                detect::PhysicalIntrusionModel::load_file(model_path + "/physical.bin");
            art.translator = explain::Translator::load_file(model_path + "/translator.bin");
            for (int dev : harness::fingerprint_device_set())
                art.fingerprints.emplace(
                    dev, detect::FingerprintModel::load_file(model_path + "/fp.dev" +
                                                             std::to_string(dev) + ".bin"));
            const sim::TrafficLog log = sim::read_traffic(in, in + ".labels");
            harness::MonitorOptions mo;
            mo.explain_per_scenario = alert_index < 0 ? 1000 : 1;
            const auto res = harness::monitor(art, log, mo);
            nlohmann::ordered_json j = nlohmann::ordered_json::array();
            for (const auto& [sc, exps] : res.explanations)
                for (const auto& ex : exps)
                    j.push_back(nlohmann::ordered_json::parse(ex.to_json()));
            std::ofstream os(report_path);
            os << j.dump(2) << "\n";
            std::cout << j.size() << " explanations -> " << report_path << "\n";
            return 0;
        }
        if (s_pipe->parsed()) return cmd_pipeline(spec_path, report_path);
        if (s_bench->parsed()) {
            const sim::Icd icd = load_icd_arg(icd_path);
            harness::TrainOptions topt;
            topt.frames = 120;
            topt.traces_per_device = 300;
            topt.physical_traces = 400;
            harness::Artifacts art = harness::train_artifacts(icd, topt);
            nlohmann::ordered_json j;
            for (const auto& row : harness::bench_all(art)) {
                j[row.name] = {{"mean_ms", row.mean_ms}, {"cv", row.cv}};
                std::cout << row.name << ": " << row.mean_ms << " ms (cv " << row.cv << ")\n";
            }
            std::ofstream os(report_path);
            os << j.dump(2) << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
