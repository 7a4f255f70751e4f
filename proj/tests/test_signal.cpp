#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vigil/attack/scenarios.hpp"
#include "vigil/signal/signal_model.hpp"

using namespace vigil;
using namespace vigil::signal;

namespace {

Topology five_device_topology(std::uint64_t seed = 101) {
    std::vector<AttachedDevice> devs;
    for (int id = 0; id < 5; ++id)
        devs.push_back(AttachedDevice{id, make_device_signature(id, seed), AttachPoint::None, true});
    return Topology(std::move(devs), seed);
}

double mean_abs_diff(const VoltageTrace& a, const VoltageTrace& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < kTraceLen; ++i) s += std::abs(a.samples[i] - b.samples[i]);
    return s / static_cast<double>(kTraceLen);
}

VoltageTrace mean_trace(const Topology& topo, int dev, std::uint64_t seed0, int n) {
    VoltageTrace m;
    m.samples.fill(0.0);
    for (int k = 0; k < n; ++k) {
        const auto t = synthesize(topo, dev, seed0 + static_cast<std::uint64_t>(k));
        for (std::size_t i = 0; i < kTraceLen; ++i) m.samples[i] += t.samples[i];
    }
    for (auto& v : m.samples) v /= n;
    return m;
}

} // namespace

TEST_CASE("every sample lands in the unit interval") {
    Topology topo = five_device_topology();
    for (int dev = 0; dev < 5; ++dev)
        for (int k = 0; k < 50; ++k) {
            const auto t = synthesize(topo, dev, 1000 + static_cast<std::uint64_t>(k));
            for (double v : t.samples) {
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
            }
        }
}

TEST_CASE("same device, different seeds: differences stay within the noise envelope") {
    Topology topo = five_device_topology();
    const auto sig = topo.effective_signature(2);
    const auto a = synthesize(topo, 2, 1);
    const auto b = synthesize(topo, 2, 2);
    // two traces differ only by measurement noise; mean |diff| of two
    // gaussians is sigma*2/sqrt(pi), clip can only shrink it
    CHECK(mean_abs_diff(a, b) < 4.0 * sig.noise_sigma);
    CHECK(mean_abs_diff(a, b) > 0.0);
}

TEST_CASE("an attached intruder moves every device's trace beyond 3x noise") {
    const Topology base = five_device_topology();
    const Topology comp = attack::physical_intrusion(base, AttachPoint::P1, false);
    CHECK(comp.device_count() == base.device_count() + 1);
    for (int dev = 0; dev < 5; ++dev) {
        const auto sig = base.effective_signature(dev);
        const auto clean = mean_trace(base, dev, 500, 24);
        const auto dirty = mean_trace(comp, dev, 900, 24);
        CHECK(mean_abs_diff(clean, dirty) > 3.0 * sig.noise_sigma);
    }
}

TEST_CASE("attach then detach restores the topology") {
    const Topology base = five_device_topology();
    const Topology comp = attack::physical_intrusion(base, AttachPoint::P2, true);
    const Topology back = comp.detach(92);  // intruder id = 90 + point
    CHECK(back.device_count() == base.device_count());
    CHECK(back.load_factor() == doctest::Approx(base.load_factor()));
    const auto a = synthesize(base, 1, 77);
    const auto b = synthesize(back, 1, 77);
    CHECK(mean_abs_diff(a, b) == doctest::Approx(0.0));
}

TEST_CASE("occupied attachment points are rejected") {
    const Topology base = five_device_topology();
    const Topology one = attack::physical_intrusion(base, AttachPoint::P3, false);
    CHECK_THROWS_AS(attack::physical_intrusion(one, AttachPoint::P3, false), PointOccupied);
}

TEST_CASE("load factor is strictly monotone in the attached set") {
    const Topology base = five_device_topology();
    Topology grown = base;
    double last = base.load_factor();
    for (int p = 1; p <= 3; ++p) {
        grown = attack::physical_intrusion(grown, static_cast<AttachPoint>(p), false,
                                           static_cast<std::uint64_t>(p));
        CHECK(grown.load_factor() > last);
        last = grown.load_factor();
    }
}

TEST_CASE("drift: one step moves each parameter at most 0.1% relative") {
    Topology topo = five_device_topology();
    const auto before = topo.effective_signature(3);
    topo.drift_step();
    const auto after = topo.effective_signature(3);
    auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(a); };
    CHECK(rel(before.amplitude_gain, after.amplitude_gain) <= 1e-3);
    CHECK(rel(before.rise_time, after.rise_time) <= 1e-3);
    CHECK(rel(before.overshoot_fraction, after.overshoot_fraction) <= 1e-3);
    CHECK(rel(before.ringing_freq, after.ringing_freq) <= 1e-3);
    CHECK(rel(before.ringing_decay, after.ringing_decay) <= 1e-3);
}

TEST_CASE("drift: adjacent epochs differ by less than the noise level") {
    Topology topo = five_device_topology();
    Topology next = topo.at_epoch(1);
    const auto sig = topo.effective_signature(0);
    const auto a = mean_trace(topo, 0, 40, 16);
    const auto b = mean_trace(next, 0, 40, 16);
    CHECK(mean_abs_diff(a, b) < sig.noise_sigma);
}

TEST_CASE("drift accumulates: epoch 1000 differs visibly from epoch 0") {
    Topology topo = five_device_topology();
    const Topology far = topo.at_epoch(1000);
    const auto sig = topo.effective_signature(0);
    const auto a = mean_trace(topo, 0, 60, 16);
    const auto b = mean_trace(far, 0, 60, 16);
    CHECK(mean_abs_diff(a, b) > 0.5 * sig.noise_sigma);
}

TEST_CASE("zero-variance walk is the identity") {
    Topology topo = five_device_topology();
    topo.set_drift_scale(0.0);
    const auto before = topo.effective_signature(1);
    for (int i = 0; i < 100; ++i) topo.drift_step();
    const auto after = topo.effective_signature(1);
    CHECK(before.amplitude_gain == after.amplitude_gain);
    CHECK(before.ringing_freq == after.ringing_freq);
    CHECK(topo.epoch() == 100);
}

TEST_CASE("devices are pairwise separable beyond the noise envelope") {
    Topology topo = five_device_topology();
    std::vector<VoltageTrace> means;
    double max_noise = 0.0;
    for (int dev = 0; dev < 5; ++dev) {
        means.push_back(mean_trace(topo, dev, 1234, 24));
        max_noise = std::max(max_noise, topo.effective_signature(dev).noise_sigma);
    }
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j)
            CHECK(mean_abs_diff(means[static_cast<std::size_t>(i)],
                                means[static_cast<std::size_t>(j)]) > max_noise);
}

TEST_CASE("synthesize rejects unattached devices") {
    Topology topo = five_device_topology();
    CHECK_THROWS_AS(synthesize(topo, 42, 1), DeviceNotAttached);
}

TEST_CASE("trace dataset file round trip") {
    Topology topo = five_device_topology();
    std::vector<VoltageTrace> traces;
    for (int k = 0; k < 10; ++k)
        traces.push_back(synthesize(topo, k % 5, static_cast<std::uint64_t>(k)));
    save_traces("/tmp/vigil_traces.txt", "/tmp/vigil_traces.txt.labels", traces, "t0");
    const auto back = load_traces("/tmp/vigil_traces.txt", "/tmp/vigil_traces.txt.labels");
    REQUIRE(back.size() == traces.size());
    for (std::size_t i = 0; i < traces.size(); ++i) {
        CHECK(back[i].source_device == traces[i].source_device);
        for (std::size_t s = 0; s < kTraceLen; ++s)
            CHECK(back[i].samples[s] == doctest::Approx(traces[i].samples[s]).epsilon(1e-5));
    }
}
