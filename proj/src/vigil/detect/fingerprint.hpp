#pragma once
// Spoofing defense. Detection: one binary voltage authenticator per device
// (100 -> 32 -> 32 -> 32 -> sigmoid), class-balanced with synthetic minority
// oversampling, adapted online one epoch per authenticated trace.
// Prevention: a transceiver-wrapper whitelist that blocks writes whose
// claimed source address the device does not own, emitting an asynchronous
// alert for each block.

#include <map>
#include <string>
#include <vector>

#include "vigil/bus/message.hpp"
#include "vigil/nn/network.hpp"
#include "vigil/nn/train.hpp"
#include "vigil/signal/signal_model.hpp"
#include "vigil/sim/icd.hpp"

namespace vigil::detect {

struct SingleClassData : std::runtime_error {
    explicit SingleClassData(const std::string& w) : std::runtime_error(w) {}
};
struct UnknownClaimedDevice : std::runtime_error {
    explicit UnknownClaimedDevice(const std::string& w) : std::runtime_error(w) {}
};
struct UnregisteredDevice : std::runtime_error {
    explicit UnregisteredDevice(const std::string& w) : std::runtime_error(w) {}
};

struct FingerprintModel {
    int device_id = -1;
    nn::Network net;
    nn::Optimizer optimizer;  // carried across online updates

    double score(const signal::VoltageTrace& trace) const;  // P(trace is this device)
    void save_file(const std::string& path) const;
    static FingerprintModel load_file(const std::string& path);
};

using FingerprintModels = std::map<int, FingerprintModel>;

struct FingerprintFitConfig {
    double lr = 1e-4;  // RMSProp
    std::size_t batch_size = 32;
    std::size_t max_epochs = 120;
    std::size_t patience = 15;
    std::size_t smote_k = 5;
    std::uint64_t seed = 23;
    bool verbose = false;
};

// One binary model per device present in the labels. Requires >= 2 devices.
FingerprintModels fit_all(const std::vector<signal::VoltageTrace>& traces,
                          const FingerprintFitConfig& cfg);

enum class AuthResult : std::uint8_t { Authentic, SpoofAlert };

// Alert iff the claimed device's model scores the trace strictly below 0.5.
AuthResult authenticate(const FingerprintModels& models, const signal::VoltageTrace& trace,
                        int claimed_device);

// One optimizer epoch over a single authenticated trace, resuming the
// model's stored optimizer state.
void online_update(FingerprintModel& model, const signal::VoltageTrace& trace);

struct AsyncAlert {
    int real_terminal = -1;
    bus::Message spoofed_message;
    std::int64_t timestamp_us = 0;

    // reserved alert transfer carried on the simulated bus
    bus::Message to_bus_message() const;
    std::uint16_t m_crc() const;  // digest of the spoofed message for the alert payload
};

enum class FilterAction : std::uint8_t { Transmit, Blocked };

struct FilterDecision {
    FilterAction action = FilterAction::Transmit;
    AsyncAlert alert;  // populated when blocked
};

class Whitelist {
public:
    // permitted claimed-source addresses for writes issued by this device;
    // the first address is the device's own terminal
    void add_device(int device_id, const std::vector<int>& addresses);

    FilterDecision filter_write(int device_id, const bus::Message& msg) const;

    static Whitelist from_icd_devices(const std::vector<sim::DeviceSpec>& devices);
    // observation mode: record claimed sources seen in attack-free traffic
    static Whitelist from_traffic(const std::vector<std::pair<int, int>>& device_claims);

    void save_file(const std::string& path) const;
    static Whitelist load_file(const std::string& path);

    const std::map<int, std::vector<int>>& entries() const { return entries_; }

private:
    std::map<int, std::vector<int>> entries_;
    std::map<int, std::uint64_t> masks_;
};

} // namespace vigil::detect
