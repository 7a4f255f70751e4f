#include "vigil/signal/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace vigil::signal {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kWalkStep = 5e-4;     // per-step relative walk half-width
constexpr double kWalkBias = 2.5e-5;   // slow environmental trend
constexpr double kWalkBound = 0.20;    // reflection at +-20%
// maintenance stubs are unterminated taps that load the line far more than
// devices on the main coupler
constexpr double kPointCoupling[4] = {1.0, 2.6, 2.9, 3.2};  // None,P1,P2,P3
} // namespace

DeviceSignature make_device_signature(int device_id, std::uint64_t testbed_seed) {
    Rng rng(testbed_seed ^ (0xabcd0000ULL + static_cast<std::uint64_t>(device_id) * 0x9e37ULL));
    DeviceSignature s;
    // coarse per-device ladder plus fine seeded detail keeps devices separable
    s.amplitude_gain = 0.80 + 0.07 * (device_id % 6) + rng.uniform(-0.01, 0.01);
    s.rise_time = 0.05 + 0.015 * ((device_id + 1) % 5) + rng.uniform(0.0, 0.005);
    s.overshoot_fraction = 0.06 + 0.03 * ((device_id + 2) % 4) + rng.uniform(0.0, 0.01);
    s.ringing_freq = 4.0 + 1.1 * ((device_id + 1) % 5) + rng.uniform(0.0, 0.3);
    s.ringing_decay = 6.0 + 1.5 * (device_id % 4) + rng.uniform(0.0, 0.5);
    s.noise_sigma = 0.003;
    s.load_contribution = 0.018 + 0.004 * (device_id % 3) + rng.uniform(0.0, 0.002);
    return s;
}

Topology::Topology(std::vector<AttachedDevice> devices, std::uint64_t drift_seed)
    : devices_(std::move(devices)), drift_seed_(drift_seed) {
    mult_.assign(devices_.size(), {1.0, 1.0, 1.0, 1.0, 1.0});
    bias_.resize(devices_.size());
    for (std::size_t i = 0; i < devices_.size(); ++i) {
        Rng r(drift_seed_ ^ (0x51ab5ULL * (static_cast<std::uint64_t>(devices_[i].device_id) + 7)));
        bias_[i] = r.bernoulli(0.5) ? kWalkBias : -kWalkBias;
    }
}

Topology Topology::attach(const AttachedDevice& dev) const {
    if (dev.point != AttachPoint::None)
        for (const auto& d : devices_)
            if (d.point == dev.point)
                throw PointOccupied("attachment point already in use");
    Topology t(*this);
    t.devices_.push_back(dev);
    t.mult_.push_back({1.0, 1.0, 1.0, 1.0, 1.0});
    Rng r(t.drift_seed_ ^ (0x51ab5ULL * (static_cast<std::uint64_t>(dev.device_id) + 7)));
    t.bias_.push_back(r.bernoulli(0.5) ? kWalkBias : -kWalkBias);
    return t;
}

Topology Topology::detach(int device_id) const {
    Topology t(*this);
    for (std::size_t i = 0; i < t.devices_.size(); ++i) {
        if (t.devices_[i].device_id == device_id) {
            t.devices_.erase(t.devices_.begin() + static_cast<std::ptrdiff_t>(i));
            t.mult_.erase(t.mult_.begin() + static_cast<std::ptrdiff_t>(i));
            t.bias_.erase(t.bias_.begin() + static_cast<std::ptrdiff_t>(i));
            return t;
        }
    }
    throw DeviceNotAttached("detach: no device " + std::to_string(device_id));
}

bool Topology::has_device(int id) const {
    return std::any_of(devices_.begin(), devices_.end(),
                       [id](const AttachedDevice& d) { return d.device_id == id; });
}

double Topology::load_factor() const {
    double load = 0.0;
    for (const auto& d : devices_)
        load += d.signature.load_contribution * kPointCoupling[static_cast<int>(d.point)];
    return load;
}

void Topology::apply_one_step() {
    Rng step(drift_seed_ ^ (0xd00d5eedULL + static_cast<std::uint64_t>(epoch_) * 0x2545f4914f6cdd1dULL));
    for (std::size_t i = 0; i < devices_.size(); ++i) {
        Rng r = step.fork(static_cast<std::uint64_t>(devices_[i].device_id));
        for (auto& m : mult_[i]) {
            double next =
                m * (1.0 + drift_scale_ * (bias_[i] + r.uniform(-kWalkStep, kWalkStep)));
            if (next > 1.0 + kWalkBound) next = 2.0 * (1.0 + kWalkBound) - next;
            if (next < 1.0 - kWalkBound) next = 2.0 * (1.0 - kWalkBound) - next;
            m = next;
        }
    }
    ++epoch_;
}

void Topology::drift_step() { apply_one_step(); }

Topology Topology::at_epoch(std::int64_t epoch) const {
    if (epoch < epoch_) throw std::invalid_argument("cannot rewind drift");
    Topology t(*this);
    while (t.epoch_ < epoch) t.apply_one_step();
    return t;
}

DeviceSignature Topology::effective_signature(int device_id) const {
    for (std::size_t i = 0; i < devices_.size(); ++i) {
        if (devices_[i].device_id != device_id) continue;
        DeviceSignature s = devices_[i].signature;
        s.amplitude_gain *= mult_[i][0];
        s.rise_time *= mult_[i][1];
        s.overshoot_fraction *= mult_[i][2];
        s.ringing_freq *= mult_[i][3];
        s.ringing_decay *= mult_[i][4];
        return s;
    }
    throw DeviceNotAttached("no device " + std::to_string(device_id) + " on topology");
}

VoltageTrace synthesize(const Topology& topo, int device_id, std::uint64_t seed) {
    const DeviceSignature sig = topo.effective_signature(device_id);
    const double load = topo.load_factor();
    const double attenuation = 1.0 / (1.0 + load);
    const double amp = 0.32 * sig.amplitude_gain * attenuation;
    const double ring_f = sig.ringing_freq * (1.0 + 0.8 * load);
    const double decay = sig.ringing_decay * (1.0 + 0.5 * load);

    // unterminated stub points reflect the lobe back after a point-specific
    // round-trip delay; terminated main-coupler devices do not
    struct Reflection {
        double delay, coeff;
    };
    std::vector<Reflection> reflections;
    for (const auto& d : topo.devices()) {
        if (d.point == AttachPoint::None) continue;
        const double k = kPointCoupling[static_cast<int>(d.point)];
        reflections.push_back(
            Reflection{0.18 + 0.17 * static_cast<double>(d.point), 3.2 * k * d.signature.load_contribution});
    }

    Rng rng(seed ^ (0xace1ULL * static_cast<std::uint64_t>(device_id + 3)));
    VoltageTrace tr;
    tr.source_device = device_id;
    tr.drift_epoch = topo.epoch();

    // command/status sync: 1.5 bit-times high, 1.5 low, edges at 0 and 1.5
    auto lobe = [&](double tau) {
        if (tau < 0.0) return 0.0;
        if (tau < 1.5) {
            const double edge = std::min(1.0, tau / sig.rise_time);
            return edge + sig.overshoot_fraction * std::exp(-decay * tau) *
                              std::sin(2.0 * kPi * ring_f * tau);
        }
        const double dt = tau - 1.5;
        const double edge = std::min(1.0, dt / sig.rise_time);
        return 1.0 - 2.0 * edge -
               sig.overshoot_fraction * std::exp(-decay * dt) * std::sin(2.0 * kPi * ring_f * dt);
    };
    for (std::size_t i = 0; i < kTraceLen; ++i) {
        const double tau = 3.0 * static_cast<double>(i) / static_cast<double>(kTraceLen);
        double level = lobe(tau);
        for (const auto& r : reflections) level += r.coeff * lobe(tau - r.delay);
        double v = 0.5 + amp * level + rng.gaussian(0.0, sig.noise_sigma);
        tr.samples[i] = std::clamp(v, 0.0, 1.0);
    }
    return tr;
}

VoltageTrace synthesize(int device_id, const Topology& topo, std::int64_t drift_epoch,
                        std::uint64_t seed) {
    if (drift_epoch == topo.epoch()) return synthesize(topo, device_id, seed);
    return synthesize(topo.at_epoch(drift_epoch), device_id, seed);
}

void save_traces(const std::string& matrix_path, const std::string& labels_path,
                 const std::vector<VoltageTrace>& traces, const std::string& topology_id) {
    std::ofstream m(matrix_path);
    if (!m) throw std::runtime_error("cannot write " + matrix_path);
    std::ofstream l(labels_path);
    if (!l) throw std::runtime_error("cannot write " + labels_path);
    char buf[16];
    for (const auto& t : traces) {
        for (std::size_t i = 0; i < kTraceLen; ++i) {
            std::snprintf(buf, sizeof(buf), "%.6f", t.samples[i]);
            m << buf << (i + 1 == kTraceLen ? "\n" : " ");
        }
        nlohmann::ordered_json j;
        j["device"] = t.source_device;
        j["topology"] = topology_id;
        j["epoch"] = t.drift_epoch;
        l << j.dump() << "\n";
    }
}

std::vector<VoltageTrace> load_traces(const std::string& matrix_path,
                                      const std::string& labels_path) {
    std::ifstream m(matrix_path);
    if (!m) throw std::runtime_error("cannot read " + matrix_path);
    std::vector<VoltageTrace> out;
    std::string line;
    while (std::getline(m, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        VoltageTrace t;
        for (std::size_t i = 0; i < kTraceLen; ++i)
            if (!(ls >> t.samples[i])) throw std::runtime_error("bad trace row");
        out.push_back(t);
    }
    std::ifstream l(labels_path);
    if (l) {
        std::size_t i = 0;
        while (std::getline(l, line) && i < out.size()) {
            if (line.empty()) continue;
            const auto j = nlohmann::json::parse(line);
            out[i].source_device = j.value("device", -1);
            out[i].drift_epoch = j.value("epoch", 0);
            ++i;
        }
    }
    return out;
}

} // namespace vigil::signal
