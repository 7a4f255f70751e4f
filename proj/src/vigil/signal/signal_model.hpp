#pragma once
// Synthetic per-transmission voltage traces.
//
// Each trace covers the three sync bit-times of a word (the portion that is
// fixed per word type): a trapezoidal high/low lobe with device-specific
// rise time, overshoot and damped ringing, attenuated by the bus load that
// every attached device contributes to, plus seeded measurement noise.
// Samples are scaled into [0,1], n=100 per trace.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "vigil/core/rng.hpp"

namespace vigil::signal {

constexpr std::size_t kTraceLen = 100;

struct DeviceNotAttached : std::runtime_error {
    explicit DeviceNotAttached(const std::string& w) : std::runtime_error(w) {}
};
struct PointOccupied : std::runtime_error {
    explicit PointOccupied(const std::string& w) : std::runtime_error(w) {}
};

struct DeviceSignature {
    double amplitude_gain = 1.0;    // unitless, ~1
    double rise_time = 0.08;        // bit-times
    double overshoot_fraction = 0.1;
    double ringing_freq = 6.0;      // cycles per bit-time
    double ringing_decay = 8.0;     // 1/bit-times
    double noise_sigma = 0.003;     // fraction of full scale
    double load_contribution = 0.02;
};

// Deterministic, well-separated signatures for a testbed's devices.
DeviceSignature make_device_signature(int device_id, std::uint64_t testbed_seed);

struct VoltageTrace {
    std::array<double, kTraceLen> samples{};
    int source_device = -1;
    std::int64_t drift_epoch = 0;
};

enum class AttachPoint : std::uint8_t { None = 0, P1 = 1, P2 = 2, P3 = 3 };

struct AttachedDevice {
    int device_id = -1;
    DeviceSignature signature;
    AttachPoint point = AttachPoint::None;  // main coupler unless a stub point
    bool transmits = true;
};

class Topology {
public:
    Topology() = default;
    Topology(std::vector<AttachedDevice> devices, std::uint64_t drift_seed);

    // Stub-point attachment used by the physical-intrusion scenarios.
    Topology attach(const AttachedDevice& dev) const;  // throws PointOccupied
    Topology detach(int device_id) const;

    bool has_device(int id) const;
    std::size_t device_count() const { return devices_.size(); }
    // Strictly monotone in the attached set: every device adds load.
    double load_factor() const;

    std::int64_t epoch() const { return epoch_; }
    // One epoch of bounded random walk over every signature parameter
    // (per-step relative change <= 0.1%, reflected at +-20%).
    void drift_step();
    // Deterministically advanced copy.
    Topology at_epoch(std::int64_t epoch) const;
    // Scales the walk step and trend; 0 freezes the environment.
    void set_drift_scale(double scale) { drift_scale_ = scale; }
    double drift_scale() const { return drift_scale_; }

    // Signature with the current drift multipliers applied.
    DeviceSignature effective_signature(int device_id) const;

    const std::vector<AttachedDevice>& devices() const { return devices_; }

private:
    void apply_one_step();

    std::vector<AttachedDevice> devices_;
    std::uint64_t drift_seed_ = 0;
    std::int64_t epoch_ = 0;
    double drift_scale_ = 1.0;
    // multiplicative walk state per device: [gain, rise, overshoot, freq, decay]
    std::vector<std::array<double, 5>> mult_;
    std::vector<double> bias_;  // slow deterministic drift direction per device
};

VoltageTrace synthesize(const Topology& topo, int device_id, std::uint64_t seed);

// Spec-shaped convenience: synthesize at an explicit drift epoch.
VoltageTrace synthesize(int device_id, const Topology& topo, std::int64_t drift_epoch,
                        std::uint64_t seed);

// Trace dataset I/O: text matrix (one row per trace, 100 columns) plus a
// JSONL sidecar with {device, topology, epoch} per row.
void save_traces(const std::string& matrix_path, const std::string& labels_path,
                 const std::vector<VoltageTrace>& traces, const std::string& topology_id);
std::vector<VoltageTrace> load_traces(const std::string& matrix_path,
                                      const std::string& labels_path);

} // namespace vigil::signal
