#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vigil/core/rng.hpp"
#include "vigil/detect/context.hpp"
#include "vigil/detect/fingerprint.hpp"
#include "vigil/detect/physical.hpp"
#include "vigil/detect/smote.hpp"
#include "vigil/harness/datasets.hpp"
#include "vigil/sim/bus_sim.hpp"

using namespace vigil;
using namespace vigil::detect;

TEST_CASE("feature extraction maps the bus controller to 32") {
    const auto bc_cmd = bus::make_bc_to_rt(5, 7, {1}, 2000);
    const auto fv = extract_features(bc_cmd, nullptr);
    CHECK(fv.source_address == 32);
    CHECK(fv.source_subaddress == 32);
    CHECK(fv.destination_address == 5);
    CHECK(fv.destination_subaddress == 7);
    CHECK(fv.is_mode_command == 0);
    CHECK(fv.data_count == 1);
    CHECK(fv.time_difference_us == 0.0);  // first message
}

TEST_CASE("mode commands carry the mode code in data count") {
    const auto mode = bus::make_mode(4, 1, false, 3000);
    const auto fv = extract_features(mode, nullptr);
    CHECK(fv.is_mode_command == 1);
    CHECK(fv.data_count == 1);  // reset code
    CHECK(fv.destination_address == 4);
    CHECK(fv.destination_subaddress == 0);
}

TEST_CASE("time difference is a plain subtraction") {
    const auto prev = bus::make_rt_to_bc(1, 4, {0}, 900);
    const auto cur = bus::make_rt_to_bc(2, 7, {0}, 1000);
    const auto fv = extract_features(cur, &prev);
    CHECK(fv.time_difference_us == 100.0);
}

TEST_CASE("encoding: one-hot blocks each sum to one") {
    FeatureEncoder enc;
    enc.set_dt_scale(1000.0);
    Rng rng(3);
    for (int i = 0; i < 500; ++i) {
        FeatureVector fv;
        fv.source_address = static_cast<int>(rng.uniform_int(0, 32));
        fv.source_subaddress = static_cast<int>(rng.uniform_int(0, 32));
        fv.destination_address = static_cast<int>(rng.uniform_int(0, 32));
        fv.destination_subaddress = static_cast<int>(rng.uniform_int(0, 32));
        fv.channel = static_cast<int>(rng.uniform_int(0, 1));
        fv.is_mode_command = static_cast<int>(rng.uniform_int(0, 1));
        fv.data_count = static_cast<int>(rng.uniform_int(0, 32));
        fv.time_difference_us = rng.uniform(0.0, 2000.0);
        const auto v = enc.encode(fv);
        REQUIRE(v.size() == kEncodedDim);
        std::size_t off = 0;
        for (std::size_t card : {33u, 33u, 33u, 33u, 2u, 2u, 33u}) {
            double s = 0.0;
            for (std::size_t k = 0; k < card; ++k) s += v[off + k];
            CHECK(s == doctest::Approx(1.0));
            off += card;
        }
        // categorical decode is exact
        const auto back = enc.decode(v);
        CHECK(back.source_address == fv.source_address);
        CHECK(back.source_subaddress == fv.source_subaddress);
        CHECK(back.destination_address == fv.destination_address);
        CHECK(back.destination_subaddress == fv.destination_subaddress);
        CHECK(back.channel == fv.channel);
        CHECK(back.is_mode_command == fv.is_mode_command);
        CHECK(back.data_count == fv.data_count);
    }
}

TEST_CASE("encoding clamps and scales the numeric feature") {
    FeatureEncoder enc;
    std::vector<FeatureVector> train(3);
    train[0].time_difference_us = 100;
    train[1].time_difference_us = 400;
    train[2].time_difference_us = 1000;
    enc.fit(train);
    FeatureVector fv;
    fv.time_difference_us = 1000;
    CHECK(enc.encode(fv).back() == doctest::Approx(1.0));
    fv.time_difference_us = 2000;  // beyond training max: clip
    CHECK(enc.encode(fv).back() == doctest::Approx(1.0));
    fv.time_difference_us = 0;
    CHECK(enc.encode(fv).back() == doctest::Approx(0.0));
}

TEST_CASE("unseen categories are rejected") {
    FeatureEncoder enc;
    enc.set_dt_scale(1.0);
    FeatureVector fv;
    fv.source_address = 33;
    CHECK_THROWS_AS(enc.encode(fv), UnseenCategory);
}

TEST_CASE("smote synthesizes convex combinations of minority neighbors") {
    Rng rng(17);
    std::vector<nn::Vec> minority, majority;
    for (int i = 0; i < 12; ++i) {
        nn::Vec v(4);
        for (auto& x : v) x = rng.uniform(0.0, 1.0);
        minority.push_back(v);
    }
    for (int i = 0; i < 40; ++i) {
        nn::Vec v(4);
        for (auto& x : v) x = rng.uniform(2.0, 3.0);
        majority.push_back(v);
    }
    const auto synth = smote_oversample(minority, majority, 28, 5, 5);
    CHECK(synth.size() == 28);
    for (const auto& s : synth) {
        const auto& a = minority[s.base_index];
        const auto& b = minority[s.neighbor_index];
        CHECK(s.lambda >= 0.0);
        CHECK(s.lambda <= 1.0);
        for (std::size_t d = 0; d < 4; ++d)
            CHECK(s.point[d] ==
                  doctest::Approx(a[d] + s.lambda * (b[d] - a[d])).epsilon(1e-12));
    }
}

namespace {

std::vector<signal::VoltageTrace> five_device_traces(std::size_t per_device,
                                                     std::uint64_t seed,
                                                     signal::Topology* out_topo = nullptr) {
    const sim::Icd icd = sim::default_testbed_icd();
    signal::Topology topo = harness::make_topology(icd, 404);
    if (out_topo) *out_topo = topo;
    return harness::gen_traces(topo, harness::fingerprint_device_set(), per_device, seed);
}

} // namespace

TEST_CASE("physical intrusion: threshold covers the validation set") {
    auto traces = five_device_traces(60, 1);
    PhysicalFitConfig cfg;
    cfg.max_epochs = 120;
    const auto model = fit_physical(traces, cfg);
    const std::size_t n_train = traces.size() * 7 / 10;
    for (std::size_t i = n_train; i < traces.size(); ++i) {
        CHECK(model.trace_mse(traces[i]) <= model.thresh_alpha);
        CHECK(model.detect(traces[i]) == PhysicalVerdict::Clear);
    }
}

TEST_CASE("physical intrusion: identical traces push the threshold to the floor") {
    std::vector<signal::VoltageTrace> traces(120);
    for (auto& t : traces) t.samples.fill(0.25);
    PhysicalFitConfig cfg;
    cfg.max_epochs = 200;
    const auto model = fit_physical(traces, cfg);
    CHECK(model.thresh_alpha < 1e-4);
    CHECK(model.thresh_alpha >= 1e-9);  // epsilon floor
}

TEST_CASE("physical intrusion: too little data is refused") {
    std::vector<signal::VoltageTrace> traces(40);
    CHECK_THROWS_AS(fit_physical(traces, {}), InsufficientData);
}

TEST_CASE("fingerprinting: balanced training, boundary at one half") {
    auto traces = five_device_traces(80, 3);
    FingerprintFitConfig cfg;
    cfg.max_epochs = 12;
    const auto models = fit_all(traces, cfg);
    CHECK(models.size() == 5);

    // strict less-than: a score of exactly 0.5 authenticates
    const auto& m0 = models.begin()->second;
    signal::VoltageTrace t = traces.front();
    const double s = m0.score(t);
    if (s >= 0.5)
        CHECK(authenticate(models, t, m0.device_id) == AuthResult::Authentic);
    CHECK_THROWS_AS(authenticate(models, t, 999), UnknownClaimedDevice);
}

TEST_CASE("fingerprinting rejects single-class data") {
    auto traces = five_device_traces(10, 3);
    for (auto& t : traces) t.source_device = 1;
    CHECK_THROWS_AS(fit_all(traces, {}), SingleClassData);
}

TEST_CASE("online update reinforces the authenticated trace") {
    auto traces = five_device_traces(80, 5);
    FingerprintFitConfig cfg;
    cfg.max_epochs = 10;
    auto models = fit_all(traces, cfg);
    auto& m = models.at(1);
    signal::Topology topo;
    five_device_traces(1, 1, &topo);
    const auto tr = signal::synthesize(topo, 1, 999);
    const double before = m.score(tr);
    if (before >= 0.5) {
        online_update(m, tr);
        CHECK(m.score(tr) >= before - 1e-6);  // one reinforcement step
        CHECK(authenticate(models, tr, 1) == AuthResult::Authentic);
    }
}

TEST_CASE("whitelist blocks spoofed writes and emits a consistent alert") {
    const sim::Icd icd = sim::default_testbed_icd();
    const auto wl = Whitelist::from_icd_devices(icd.devices);

    // navigation writing with its own address passes
    const auto own = bus::make_rt_to_bc(1, 4, {1}, 5000);
    CHECK(wl.filter_write(1, own).action == FilterAction::Transmit);

    // navigation claiming the bus controller is blocked with m_async
    const auto spoof = bus::make_bc_to_rt(5, 7, {1}, 6000);
    const auto d = wl.filter_write(1, spoof);
    REQUIRE(d.action == FilterAction::Blocked);
    CHECK(d.alert.real_terminal == 1);
    CHECK(d.alert.timestamp_us == 6000);
    CHECK(d.alert.spoofed_message.command_words == spoof.command_words);
    const auto alert_msg = d.alert.to_bus_message();
    CHECK(sim::endpoints_of(alert_msg).src_addr == 1);

    CHECK_THROWS_AS(wl.filter_write(77, own), UnregisteredDevice);
}

TEST_CASE("whitelist file round trip") {
    const sim::Icd icd = sim::default_testbed_icd();
    const auto wl = Whitelist::from_icd_devices(icd.devices);
    wl.save_file("/tmp/vigil_wl.json");
    const auto back = Whitelist::load_file("/tmp/vigil_wl.json");
    CHECK(back.entries() == wl.entries());
}

TEST_CASE("whitelist can be learned from attack-free traffic") {
    const sim::Icd icd = sim::default_testbed_icd();
    sim::SimConfig cfg;
    cfg.frames = 5;
    const auto log = sim::run(icd, cfg);
    std::vector<std::pair<int, int>> claims;
    for (const auto& e : log.entries) claims.push_back({e.source_device, e.claimed_address});
    const auto wl = Whitelist::from_traffic(claims);
    for (const auto& e : log.entries)
        CHECK(wl.filter_write(e.source_device, e.msg).action == FilterAction::Transmit);
}

TEST_CASE("context model: insufficient data raises") {
    std::vector<bus::Message> few(10, bus::make_rt_to_bc(1, 4, {0}, 0));
    CHECK_THROWS_AS(fit_context(few, {}), InsufficientData);
}

TEST_CASE("context detector contract on a small model") {
    // tiny training run exercising the window discipline and Alg-1 shape
    sim::SimConfig scfg;
    scfg.frames = 40;
    scfg.seed = 15;
    const auto log = sim::run(sim::default_testbed_icd(), scfg);
    ContextFitConfig cfg;
    cfg.max_epochs = 12;
    cfg.patience = 12;
    const auto model = fit_context(log.messages(), cfg);
    CHECK(model.window == 4);
    CHECK(model.thresh_beta > 0.0);

    // thresh_beta bounds every validation window by construction
    std::vector<FeatureVector> fvs;
    const auto msgs = log.messages();
    for (std::size_t i = 0; i < msgs.size(); ++i)
        fvs.push_back(extract_features(msgs[i], i ? &msgs[i - 1] : nullptr));
    std::vector<nn::Vec> enc;
    for (const auto& fv : fvs) enc.push_back(model.encoder.encode(fv));
    const std::size_t n_windows = enc.size() - model.window + 1;
    const std::size_t n_train = n_windows * 7 / 10;
    for (std::size_t w = n_train; w < n_windows; ++w) {
        nn::Seq win(enc.begin() + static_cast<std::ptrdiff_t>(w),
                    enc.begin() + static_cast<std::ptrdiff_t>(w + model.window));
        CHECK(model.window_mse(win) <= model.thresh_beta + 1e-15);
    }

    ContextDetector det(model);
    CHECK_THROWS_AS(det.detect({fvs[0], fvs[1]}, fvs[2]), WindowUnderfull);

    // anomalous messages must not advance the context window
    ContextDetector stream(model);
    std::size_t processed = 0;
    for (const auto& m : msgs) {
        const auto before = stream.context();
        const auto v = stream.observe(m);
        const auto after = stream.context();
        if (v == ContextVerdict::Anomalous) CHECK(before == after);
        ++processed;
        if (processed > 200) break;
    }
}

TEST_CASE("context model file round trip preserves verdict behavior") {
    sim::SimConfig scfg;
    scfg.frames = 30;
    scfg.seed = 16;
    const auto log = sim::run(sim::default_testbed_icd(), scfg);
    ContextFitConfig cfg;
    cfg.max_epochs = 6;
    const auto model = fit_context(log.messages(), cfg);
    model.save_file("/tmp/vigil_ctx.bin");
    const auto back = ContextModel::load_file("/tmp/vigil_ctx.bin");
    CHECK(back.thresh_beta == model.thresh_beta);
    CHECK(back.window == model.window);
    CHECK(back.encoder.dt_scale() == model.encoder.dt_scale());

    const auto msgs = log.messages();
    std::vector<FeatureVector> fvs;
    for (std::size_t i = 0; i < 4; ++i)
        fvs.push_back(extract_features(msgs[i], i ? &msgs[i - 1] : nullptr));
    nn::Seq win;
    for (const auto& fv : fvs) win.push_back(model.encoder.encode(fv));
    CHECK(back.window_mse(win) == model.window_mse(win));
}
