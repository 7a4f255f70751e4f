#pragma once
// Deterministic discrete-event simulation of a bus controller and its remote
// terminals executing the ICD major frame. Produces labeled benign traffic.

#include <cstdint>
#include <string>
#include <vector>

#include "vigil/bus/message.hpp"
#include "vigil/sim/icd.hpp"

namespace vigil::sim {

struct ScheduleOverflow : std::runtime_error {
    explicit ScheduleOverflow(const std::string& w) : std::runtime_error(w) {}
};

enum class LabelKind : std::uint8_t { Benign = 0, Malicious = 1 };

struct Label {
    LabelKind kind = LabelKind::Benign;
    int scenario = 0;  // 1..6 when malicious

    bool benign() const { return kind == LabelKind::Benign; }
    bool operator==(const Label&) const = default;
};

struct LabeledMessage {
    bus::Message msg;
    Label label;
    int source_device = -1;    // physical box that transmitted
    int claimed_address = 0;   // terminal address claimed (32 = BC)
    std::string template_id;   // originating ICD template, empty for injected
};

struct TrafficLog {
    std::vector<LabeledMessage> entries;

    std::size_t size() const { return entries.size(); }
    std::vector<bus::Message> messages() const;
    std::vector<bus::TimedWord> words() const;
};

struct SimConfig {
    std::int64_t frames = 10;
    std::uint64_t seed = 1;
    // slot jitter: uniform, +-min(jitter_fraction*period, jitter_cap_us)
    double jitter_fraction = 0.02;
    std::int64_t jitter_cap_us = 250;
    std::int64_t min_gap_us = 50;  // required idle time between transfers
};

TrafficLog run(const Icd& icd, const SimConfig& cfg);

// Claimed source address of a transfer: the terminal address in the command
// word chain, or 32 when the bus controller is the transmitting side.
int claimed_address_of(const bus::Message& m);

void write_labels_file(const std::string& path, const TrafficLog& log);
TrafficLog read_traffic(const std::string& capture_path, const std::string& labels_path);

} // namespace vigil::sim
