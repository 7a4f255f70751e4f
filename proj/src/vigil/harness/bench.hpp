#pragma once
// Wall-clock timing of each mechanism/module, mean per instance.

#include <functional>
#include <string>
#include <vector>

namespace vigil::harness {

struct Artifacts;

struct BenchRow {
    std::string name;
    double mean_ms = 0.0;
    double cv = 0.0;  // coefficient of variation across repeats
};

// Runs `op` n_instances times per repeat; mean over instances, CV over repeats.
BenchRow time_op(const std::string& name, const std::function<void()>& op,
                 std::size_t n_instances, std::size_t repeats = 5);

// The seven mechanism/module rows: physical intrusion detection, device
// fingerprinting (detection), device fingerprinting (prevention),
// context-based anomaly detection, MIF calculator, device identifier
// (detection), and the message translator.
std::vector<BenchRow> bench_all(const Artifacts& art);

} // namespace vigil::harness
