#pragma once
// Dataset builders shared by the CLI, the pipeline, and the test suites.

#include <cstdint>
#include <vector>

#include "vigil/signal/signal_model.hpp"
#include "vigil/sim/icd.hpp"

namespace vigil::harness {

// Devices carrying fingerprint authenticators: bus controller, navigation,
// radar, weapons, display.
std::vector<int> fingerprint_device_set();

// Legitimate testbed topology: every ICD device box on the main coupler,
// signatures drawn per testbed seed.
signal::Topology make_topology(const sim::Icd& icd, std::uint64_t testbed_seed);

// Round-robin traces over `devices`, chronological (drift can advance).
std::vector<signal::VoltageTrace> gen_traces(signal::Topology& topo,
                                             const std::vector<int>& devices,
                                             std::size_t per_device, std::uint64_t seed,
                                             bool advance_drift = false);

} // namespace vigil::harness
