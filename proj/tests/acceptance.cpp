// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Heavy artifacts (traffic, trained models) are shared
// across criteria.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <set>

#include "vigil/attack/scenarios.hpp"
#include "vigil/bus/capture.hpp"
#include "vigil/core/rng.hpp"
#include "vigil/explain/corpus.hpp"
#include "vigil/explain/engine.hpp"
#include "vigil/explain/nmt.hpp"
#include "vigil/explain/shap.hpp"
#include "vigil/harness/bench.hpp"
#include "vigil/harness/pipeline.hpp"
#include "vigil/kernels/kernels.hpp"
#include "vigil/nn/gradcheck.hpp"

using namespace vigil;
using clk = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] C%-2d %-22s %s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double secs_since(clk::time_point t0) {
    return std::chrono::duration<double>(clk::now() - t0).count();
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

// ---------------------------------------------------------------- C1
void c1_codec() {
    const auto t0 = clk::now();
    bool ok = true;
    // every command-word field tuple == every 16-bit payload
    for (std::uint32_t p = 0; p <= 0xffff && ok; ++p) {
        const auto w = bus::encode_word(bus::WordKind::Command, static_cast<std::uint16_t>(p));
        const auto back = bus::decode_word(w.pattern());
        const auto f = bus::parse_command(back);
        ok = back.payload == p && bus::pack_command(f) == p;
    }
    Rng rng(1553);
    for (int i = 0; i < 10000 && ok; ++i) {
        const auto payload = static_cast<std::uint16_t>(rng.next_u64() & 0xffff);
        const auto w = bus::encode_data(payload);
        ok = bus::decode_word(w.pattern()).payload == payload;
    }
    const double dt = secs_since(t0);
    report(1, "codec soundness", ok && dt < 1.0,
           fmt("2^16 command + 1e4 data round trips, %.2fs", dt));
}

// ---------------------------------------------------------------- C7
void c7_gradients() {
    Rng rng(20250808);
    double worst = 0.0;
    std::size_t checked = 0;
    const nn::Act acts[] = {nn::Act::None, nn::Act::Relu, nn::Act::LeakyRelu, nn::Act::Sigmoid,
                            nn::Act::Tanh};
    for (int cfg = 0; cfg < 20; ++cfg) {
        const bool bce = cfg % 2 == 1;
        const nn::Act act = acts[cfg % 5];
        const nn::Act cell_act = cfg % 3 == 0 ? nn::Act::Relu : nn::Act::Tanh;
        const std::size_t in = 3 + cfg % 4, hid = 4 + cfg % 3;
        std::vector<nn::LayerSpec> specs;
        specs.push_back(nn::lstm_spec(in, hid, cell_act, true));
        specs.push_back(nn::lstm_spec(hid, 3, cell_act, false));
        specs.push_back(nn::repeat_spec(3, 3));
        specs.push_back(nn::lstm_spec(3, hid, cell_act, true));
        specs.push_back(nn::dense_spec(hid, 4, act));
        if (bce) specs.push_back(nn::dense_spec(4, 2, nn::Act::Sigmoid));
        nn::Network net(specs, 1000 + static_cast<std::uint64_t>(cfg));
        nn::Seq input, target;
        for (int t = 0; t < 3; ++t) {
            nn::Vec x(in), y(bce ? 2 : 4);
            for (auto& v : x) v = rng.uniform(-1, 1);
            for (auto& v : y) v = bce ? (rng.bernoulli(0.5) ? 1.0 : 0.0) : rng.uniform(-1, 1);
            input.push_back(x);
            target.push_back(y);
        }
        const auto res = nn::grad_check(net, bce ? nn::LossKind::Bce : nn::LossKind::Mse, input,
                                        target, 400);
        worst = std::max(worst, res.max_rel_error);
        checked += res.checked_params;
    }
    report(7, "gradient checks", worst < 1e-4,
           fmt("20 configs, %zu params, max rel err %.3g", checked, worst));
}

// ---------------------------------------------------------------- C9
void c9_shapley() {
    // constructed single-split surrogates: null players exactly zero,
    // efficiency to 1e-9
    bool ok = true;
    double worst_eff = 0.0;
    Rng rng(77);
    for (int f = 0; f < 8; ++f) {
        explain::Tree t;
        t.nodes = {explain::TreeNode{f, 0.5, 1, 2, 0.0}, explain::TreeNode{-1, 0, -1, -1, 0.0},
                   explain::TreeNode{-1, 0, -1, -1, 1.0}};
        const auto model = explain::BoostedTrees::from_parts(0.1, {t}, 0.7);
        std::vector<explain::FeatureRow> background;
        for (int b = 0; b < 10; ++b) {
            explain::FeatureRow r{};
            for (auto& v : r) v = rng.bernoulli(0.5) ? 0.0 : 1.0;
            background.push_back(r);
        }
        explain::FeatureRow x{};
        for (auto& v : x) v = 1.0;
        const auto phi = explain::shapley_values(model, x, background);
        double sum = 0.0;
        for (std::size_t i = 0; i < phi.size(); ++i) {
            sum += phi[i];
            if (static_cast<int>(i) != f && phi[i] != 0.0) ok = false;
        }
        const double eff =
            std::abs(sum - (model.predict(x) - explain::background_mean(model, background)));
        worst_eff = std::max(worst_eff, eff);
        if (eff > 1e-9) ok = false;
    }
    report(9, "shapley exactness", ok, fmt("efficiency gap %.2g, null players exact", worst_eff));
}

// ---------------------------------------------------------------- C11
void c11_tokenization() {
    bool ok = explain::offsets_disjoint();
    ok = ok && explain::kTokenOffsets == std::array<int, 6>{0, 33, 66, 98, 131, 133};
    Rng rng(42);
    std::size_t inverted = 0;
    for (int i = 0; i < 10000; ++i) {
        explain::CorpusFeatures f;
        f.src_addr = static_cast<int>(rng.uniform_int(0, 32));
        f.src_sub = static_cast<int>(rng.uniform_int(0, 32));
        f.dst_addr = static_cast<int>(rng.uniform_int(0, 32));
        f.dst_sub = f.dst_addr == 32 ? 32 : static_cast<int>(rng.uniform_int(0, 31));
        f.is_mode = static_cast<int>(rng.uniform_int(0, 1));
        f.count = static_cast<int>(rng.uniform_int(0, 32));
        if (explain::detokenize(explain::tokenize(f)) == f) ++inverted;
    }
    ok = ok && inverted == 10000;
    report(11, "tokenization", ok, fmt("offsets disjoint, %zu/10000 range-decoded", inverted));
}

// shared artifacts -------------------------------------------------
struct Shared {
    sim::Icd icd;
    harness::Artifacts art;
    double context_train_secs = 0.0;
    double translator_secs = 0.0;
};

Shared train_shared() {
    Shared sh;
    sh.icd = sim::default_testbed_icd();
    harness::TrainOptions opt;  // testbed-1 seeds
    opt.train_translator = false;
    opt.train_context = false;
    sh.art = harness::train_artifacts(sh.icd, opt);

    auto t0 = clk::now();
    {
        harness::TrainOptions copt;
        copt.train_fingerprints = false;
        copt.train_physical = false;
        copt.train_translator = false;
        const harness::Artifacts c = harness::train_artifacts(sh.icd, copt);
        sh.art.context = c.context;
    }
    sh.context_train_secs = secs_since(t0);

    t0 = clk::now();
    const auto corpus =
        explain::generate_corpus(sh.icd, explain::enumerate_templates(sh.icd), {});
    sh.art.translator = explain::Translator::train(corpus, {});
    sh.translator_secs = secs_since(t0);
    return sh;
}

// ---------------------------------------------------------------- C4
void c4_physical(const Shared& sh) {
    const auto t0 = clk::now();
    std::size_t fp = 0, n_benign = 0, tp = 0, n_comp = 0;
    signal::Topology topo = sh.art.topology;
    const auto benign = harness::gen_traces(topo, harness::fingerprint_device_set(), 600, 88001);
    for (const auto& t : benign) {
        ++n_benign;
        if (sh.art.physical.detect(t) == detect::PhysicalVerdict::IntrusionAlert) ++fp;
    }
    for (int p = 1; p <= 3; ++p) {
        for (const bool active : {false, true}) {
            signal::Topology comp = attack::physical_intrusion(
                sh.art.topology, static_cast<signal::AttachPoint>(p), active,
                900 + static_cast<std::uint64_t>(p));
            const auto traces = harness::gen_traces(comp, harness::fingerprint_device_set(), 100,
                                                    99000 + static_cast<std::uint64_t>(p) +
                                                        (active ? 7 : 0));
            for (const auto& t : traces) {
                ++n_comp;
                if (sh.art.physical.detect(t) == detect::PhysicalVerdict::IntrusionAlert) ++tp;
            }
        }
    }
    const double tpr = static_cast<double>(tp) / static_cast<double>(n_comp);
    const double fpr = static_cast<double>(fp) / static_cast<double>(n_benign);
    const double dt = secs_since(t0);
    report(4, "physical intrusion", tpr >= 0.99 && fpr <= 0.01 && dt < 120.0,
           fmt("tpr %.4f (n=%zu) fpr %.4f (n=%zu), %.1fs", tpr, n_comp, fpr, n_benign, dt));
}

// ---------------------------------------------------------------- C5
void c5_fingerprint(Shared& sh) {
    const auto t0 = clk::now();
    signal::Topology topo = sh.art.topology;
    const auto held = harness::gen_traces(topo, harness::fingerprint_device_set(), 600, 654321);
    double worst_frr = 0.0, worst_far = 0.0;
    for (const auto& [dev, model] : sh.art.fingerprints) {
        std::size_t genuine = 0, rejected = 0, impostor = 0, accepted = 0;
        for (const auto& t : held) {
            const bool is_dev = t.source_device == dev;
            const bool auth = model.score(t) >= 0.5;
            if (is_dev) {
                ++genuine;
                if (!auth) ++rejected;
            } else {
                ++impostor;
                if (auth) ++accepted;
            }
        }
        worst_frr = std::max(worst_frr,
                             static_cast<double>(rejected) / static_cast<double>(genuine));
        worst_far = std::max(worst_far,
                             static_cast<double>(accepted) / static_cast<double>(impostor));
    }

    // drift endurance: online updates track, a frozen copy degrades
    auto online = sh.art.fingerprints;
    const auto frozen = sh.art.fingerprints;
    signal::Topology drift_topo = sh.art.topology;
    std::size_t online_ok = 0, frozen_ok = 0, total = 0;
    const auto devices = harness::fingerprint_device_set();
    for (std::size_t step = 0; step < 10000; ++step) {
        drift_topo.drift_step();
        const int dev = devices[step % devices.size()];
        const auto tr = signal::synthesize(drift_topo, dev, 777000 + step);
        ++total;
        auto& om = online.at(dev);
        if (om.score(tr) >= 0.5) ++online_ok;
        if (frozen.at(dev).score(tr) >= 0.5) ++frozen_ok;
        detect::online_update(om, tr);
    }
    const double online_acc = static_cast<double>(online_ok) / static_cast<double>(total);
    const double frozen_acc = static_cast<double>(frozen_ok) / static_cast<double>(total);
    const double dt = secs_since(t0);
    const bool pass = worst_frr <= 0.05 && worst_far <= 0.01 && online_acc >= 0.99 &&
                      frozen_acc < 0.95 && dt < 600.0;
    report(5, "fingerprinting", pass,
           fmt("worst frr %.4f far %.4f; drift online %.4f frozen %.4f; %.1fs", worst_frr,
               worst_far, online_acc, frozen_acc, dt));
}

// ---------------------------------------------------------------- C2
// straight-line reimplementation of the context model's verdict path
double oracle_window_mse(const detect::ContextModel& m, const nn::Seq& win) {
    nn::Seq cur = win;
    for (std::size_t li = 0; li < m.lstm_ae.n_layers(); ++li) {
        const nn::Layer& layer = m.lstm_ae.layer(li);
        const nn::LayerSpec& s = layer.spec();
        const nn::Vec& p = layer.params();
        if (s.kind == nn::LayerKind::Dense) {
            nn::Seq out(cur.size());
            for (std::size_t t = 0; t < cur.size(); ++t) {
                out[t].resize(s.out);
                for (std::size_t r = 0; r < s.out; ++r) {
                    double z = p[s.out * s.in + r];
                    for (std::size_t c = 0; c < s.in; ++c) z += p[r * s.in + c] * cur[t][c];
                    out[t][r] = nn::activate(s.act, z);
                }
            }
            cur = out;
        } else if (s.kind == nn::LayerKind::Repeat) {
            cur = nn::Seq(s.repeat, cur.at(0));
        } else {
            const std::size_t h = s.out, in = s.in;
            const double* wxt = p.data();  // input-major [in x 4H]
            const double* wh = wxt + 4 * h * in;
            const double* b = wh + h * 4 * h;
            nn::Vec hp(h, 0.0), cp(h, 0.0);
            nn::Seq hist;
            for (const auto& x : cur) {
                nn::Vec z(4 * h);
                for (std::size_t r = 0; r < 4 * h; ++r) {
                    double acc = b[r];
                    for (std::size_t c = 0; c < in; ++c) acc += wxt[c * 4 * h + r] * x[c];
                    for (std::size_t c = 0; c < h; ++c) acc += wh[c * 4 * h + r] * hp[c];
                    z[r] = acc;
                }
                nn::Vec hn(h), cn(h);
                for (std::size_t j = 0; j < h; ++j) {
                    const double ig = 1.0 / (1.0 + std::exp(-z[j]));
                    const double fg = 1.0 / (1.0 + std::exp(-z[h + j]));
                    const double cand = nn::activate(s.act, z[2 * h + j]);
                    const double og = 1.0 / (1.0 + std::exp(-z[3 * h + j]));
                    cn[j] = fg * cp[j] + ig * cand;
                    hn[j] = og * nn::activate(s.act, cn[j]);
                }
                hp = hn;
                cp = cn;
                hist.push_back(hn);
            }
            cur = s.return_seq ? hist : nn::Seq{hp};
        }
    }
    double acc = 0.0;
    std::size_t n = 0;
    for (std::size_t t = 0; t < win.size(); ++t)
        for (std::size_t d = 0; d < win[t].size(); ++d) {
            const double e = cur[t][d] - win[t][d];
            acc += e * e;
            ++n;
        }
    return acc / static_cast<double>(n);
}

void c2_alg1_oracle(const Shared& sh) {
    const auto& model = sh.art.context;
    detect::ContextDetector det(model);
    Rng rng(31415);
    std::size_t agree = 0;
    const std::size_t n = 10000;
    auto random_fv = [&rng] {
        detect::FeatureVector fv;
        fv.source_address = static_cast<int>(rng.uniform_int(0, 32));
        fv.source_subaddress = static_cast<int>(rng.uniform_int(0, 32));
        fv.destination_address = static_cast<int>(rng.uniform_int(0, 32));
        fv.destination_subaddress = static_cast<int>(rng.uniform_int(0, 32));
        fv.channel = static_cast<int>(rng.uniform_int(0, 1));
        fv.is_mode_command = static_cast<int>(rng.uniform_int(0, 1));
        fv.data_count = static_cast<int>(rng.uniform_int(0, 32));
        fv.time_difference_us = rng.uniform(0.0, 12000.0);
        return fv;
    };
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<detect::FeatureVector> ctx{random_fv(), random_fv(), random_fv()};
        const detect::FeatureVector msg = random_fv();
        const auto verdict = det.detect(ctx, msg);
        nn::Seq win;
        for (const auto& fv : ctx) win.push_back(model.encoder.encode(fv));
        win.push_back(model.encoder.encode(msg));
        const bool oracle_anomalous = oracle_window_mse(model, win) > model.thresh_beta;
        if ((verdict == detect::ContextVerdict::Anomalous) == oracle_anomalous) ++agree;
    }
    report(2, "alg-1 oracle", agree == n, fmt("%zu/%zu verdicts agree", agree, n));
}

// ---------------------------------------------------------------- C3
void c3_context(const Shared& sh) {
    const auto t0 = clk::now();
    bool pass = true;
    std::string detail;
    for (int s = 1; s <= 6; ++s) {
        const auto log = harness::make_eval_traffic(
            sh.icd, s, 9001 + static_cast<std::uint64_t>(s), 120, 0.03);
        harness::MonitorOptions mo;
        mo.explain_alerts = false;
        mo.trace_seed = 20200 + static_cast<std::uint64_t>(s);
        const auto r = harness::monitor(sh.art, log, mo);
        const double precision = r.context.precision();
        const double recall = r.context.recall();
        if (precision < 0.97 || recall < 0.99) pass = false;
        detail += fmt("s%d p=%.3f r=%.3f ", s, precision, recall);
    }
    const double total = sh.context_train_secs + secs_since(t0);
    if (total >= 600.0) pass = false;
    report(3, "context detection", pass, detail + fmt("(train+eval %.0fs)", total));
}

// ---------------------------------------------------------------- C6
void c6_prevention(const Shared& sh) {
    harness::PreventionEval total;
    for (int s : {3, 4}) {
        const auto log = harness::make_eval_traffic(
            sh.icd, s, 9100 + static_cast<std::uint64_t>(s), 120, 0.03);
        const auto ev = harness::eval_prevention(sh.art, log);
        total.spoofed_total += ev.spoofed_total;
        total.spoofed_blocked += ev.spoofed_blocked;
        total.legit_total += ev.legit_total;
        total.legit_passed += ev.legit_passed;
        total.alerts_consistent = total.alerts_consistent && ev.alerts_consistent;
    }
    // relative cost of the wrapper check vs one authenticator inference
    const bus::Message msg = bus::make_rt_to_bc(1, 4, {1}, 0);
    const auto filter_row = harness::time_op(
        "filter", [&] { (void)sh.art.whitelist.filter_write(1, msg); }, 200000, 3);
    signal::Topology topo = sh.art.topology;
    const auto trace = signal::synthesize(topo, 1, 5);
    const auto& fp0 = sh.art.fingerprints.begin()->second;
    const auto auth_row =
        harness::time_op("auth", [&] { (void)fp0.score(trace); }, 3000, 3);
    const double ratio = auth_row.mean_ms / filter_row.mean_ms;

    const bool pass = total.spoofed_blocked == total.spoofed_total &&
                      total.legit_passed == total.legit_total && total.spoofed_total > 0 &&
                      total.alerts_consistent && ratio >= 100.0;
    report(6, "prevention", pass,
           fmt("blocked %zu/%zu, passed %zu/%zu, alerts ok=%d, cost ratio %.0fx",
               total.spoofed_blocked, total.spoofed_total, total.legit_passed,
               total.legit_total, total.alerts_consistent ? 1 : 0, ratio));
}

// ---------------------------------------------------------------- C8
void c8_explanations(const Shared& sh) {
    struct Expect {
        const char* mif;
        const char* claimed;
        const char* real;
    };
    const std::map<int, Expect> expect = {
        {1, {"Data Count", "Navigation system", "Navigation system"}},
        {2, {"Mode Command", "Bus controller", "Bus controller"}},
        {3, {"Time Difference", "Bus controller", "Navigation system"}},
        {4, {"Time Difference", "Bus controller", "Radar system"}},
        {5, {"Destination Address", "Bus controller", "Bus controller"}},
        {6, {"Data Count", "Radar system", "Radar system"}},
    };
    const int reps = 5;
    std::map<int, int> mif_ok, pair_ok, explained;
    for (int rep = 0; rep < reps; ++rep) {
        for (int s = 1; s <= 6; ++s) {
            const auto log = harness::make_eval_traffic(
                sh.icd, s, 9500 + static_cast<std::uint64_t>(100 * rep + s), 60, 0.03);
            harness::MonitorOptions mo;
            mo.trace_seed = 31000 + static_cast<std::uint64_t>(100 * rep + s);
            mo.surrogate_seed = 500 + static_cast<std::uint64_t>(rep);
            const auto r = harness::monitor(sh.art, log, mo);
            if (!r.explanations.count(s) || r.explanations.at(s).empty()) continue;
            const auto& ex = r.explanations.at(s).front();
            ++explained[s];
            const auto& want = expect.at(s);
            if (!ex.most_influential_features.empty() &&
                ex.most_influential_features[0].name == want.mif)
                ++mif_ok[s];
            if (ex.claimed_device_name == want.claimed && ex.real_device_name == want.real)
                ++pair_ok[s];
        }
    }
    bool pass = true;
    std::string detail;
    for (int s = 1; s <= 6; ++s) {
        if (mif_ok[s] < 4 || pair_ok[s] != reps || explained[s] != reps) pass = false;
        detail += fmt("s%d mif %d/%d pair %d/%d ", s, mif_ok[s], explained[s], pair_ok[s],
                      explained[s]);
    }
    report(8, "explanation fidelity", pass, detail);
}

// ---------------------------------------------------------------- C10
void c10_translator(const Shared& sh) {
    const auto corpus =
        explain::generate_corpus(sh.icd, explain::enumerate_templates(sh.icd), {});
    const double train_acc = sh.art.translator.exact_match(corpus.train);
    const double held_acc = sh.art.translator.exact_match(corpus.held_out_pairs);

    const std::string m1 = sh.art.translator.translate(
        std::vector<explain::CorpusFeatures>{{1, 4, 32, 32, 0, 1}});
    const std::string m4 = sh.art.translator.translate(
        std::vector<explain::CorpusFeatures>{{32, 32, 31, 0, 1, 1}});
    const bool verbatim =
        m1 == "Navigation system reporting status to Bus controller" &&
        m4 == "Bus controller sending reset command to all RTs";
    const bool pass = train_acc >= 1.0 && held_acc >= 0.95 && verbatim;
    report(10, "translator", pass,
           fmt("train %.3f, held-out pairs %.3f, m1/m4 verbatim=%d (train %.0fs)", train_acc,
               held_acc, verbatim ? 1 : 0, sh.translator_secs));
}

} // namespace

int main() {
    std::printf("acceptance: kernels isa=%s\n", vigil::kern::isa_name(vigil::kern::active_isa()));
    c1_codec();
    c7_gradients();
    c9_shapley();
    c11_tokenization();

    std::printf("-- training shared artifacts --\n");
    std::fflush(stdout);
    Shared sh = train_shared();
    std::printf("-- context %.0fs, translator %.0fs --\n", sh.context_train_secs,
                sh.translator_secs);

    c4_physical(sh);
    c5_fingerprint(sh);
    c2_alg1_oracle(sh);
    c3_context(sh);
    c6_prevention(sh);
    c8_explanations(sh);
    c10_translator(sh);

    std::printf("%d criterion(s) failed\n", g_failures);
    return g_failures;
}
