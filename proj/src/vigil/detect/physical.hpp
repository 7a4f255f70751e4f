#pragma once
// Start-up physical intrusion detector: a dense autoencoder over voltage
// traces, alerting when reconstruction error exceeds the maximum validation
// MSE observed on the legitimate topology.

#include <span>
#include <string>

#include "vigil/nn/network.hpp"
#include "vigil/nn/train.hpp"
#include "vigil/signal/signal_model.hpp"

namespace vigil::detect {

enum class PhysicalVerdict : std::uint8_t { Clear, IntrusionAlert };

struct PhysicalFitConfig {
    double lr = 1e-3;
    std::size_t max_epochs = 2000;
    std::size_t patience = 150;
    std::uint64_t seed = 11;
    bool verbose = false;
};

struct PhysicalIntrusionModel {
    nn::Network ae;  // 100 -> 50 leaky-ReLU -> 100
    double thresh_alpha = 0.0;

    double trace_mse(const signal::VoltageTrace& trace) const;
    PhysicalVerdict detect(const signal::VoltageTrace& trace) const;

    // Start-up policy: alert when any of the first `window` traces trips.
    PhysicalVerdict detect_startup(std::span<const signal::VoltageTrace> traces,
                                   std::size_t window = 50) const;

    void save_file(const std::string& path) const;
    static PhysicalIntrusionModel load_file(const std::string& path);
};

// Trains on traces captured from the legitimate topology only.
// Throws nn-level errors on divergence and InsufficientData below 100 traces.
PhysicalIntrusionModel fit_physical(const std::vector<signal::VoltageTrace>& benign_traces,
                                    const PhysicalFitConfig& cfg,
                                    nn::TrainResult* history = nullptr);

} // namespace vigil::detect
