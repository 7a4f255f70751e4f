#pragma once
// The six logical attack scenarios and physical-intrusion topology edits.
//
//  1  compromised navigation RT sends fake location frames to the cockpit
//     display after weapons ready-status updates (wrong data count)
//  2  compromised BC sends a reset mode command to the weapons system after
//     an aircraft location update
//  3  compromised navigation RT immediately replays pilot steering commands,
//     claiming the BC as source
//  4  compromised radar RT floods the bus with BC-claimed steering commands
//     after an aircraft location update
//  5  compromised BC leaks secret data by commanding the exterior lighting
//     controller, encoding bytes in the command word counts
//  6  compromised radar RT pushes maximum-length data transfers at the
//     flight management system

#include <cstdint>

#include "vigil/signal/signal_model.hpp"
#include "vigil/sim/bus_sim.hpp"

namespace vigil::attack {

struct TriggerNeverFires : std::runtime_error {
    explicit TriggerNeverFires(const std::string& w) : std::runtime_error(w) {}
};

struct AttackScenario {
    int id = 0;
    bool compromised_bc = false;
    int compromised_rt = -1;       // terminal address when a RT is the vector
    bool spoofed = false;          // claimed source != real source
    const char* trigger_template;  // benign template that arms the payload
    int burst = 1;                 // messages injected per firing
};

// Table semantics for scenarios 1..6.
AttackScenario scenario(int id);

struct InjectConfig {
    std::uint64_t seed = 1;
    double malicious_fraction = 0.03;  // of the benign message count
};

// Inserts the scenario's malicious messages at trigger-consistent times.
// Benign entries are untouched; injected entries are labeled Malicious(id).
sim::TrafficLog inject(const sim::Icd& icd, const sim::TrafficLog& benign, int scenario_id,
                       const InjectConfig& cfg);

// Attaches an intruder device at a maintenance stub point. A passive
// intruder never transmits but still loads the bus.
signal::Topology physical_intrusion(const signal::Topology& topo, signal::AttachPoint point,
                                    bool active, std::uint64_t intruder_seed = 99);

} // namespace vigil::attack
