#pragma once
// Context-based anomaly detection: an LSTM autoencoder over K-message
// windows of encoded features, thresholded at the maximum validation
// reconstruction error.

#include <deque>
#include <optional>
#include <string>

#include "vigil/detect/features.hpp"
#include "vigil/nn/network.hpp"
#include "vigil/nn/train.hpp"
#include "vigil/sim/bus_sim.hpp"

namespace vigil::detect {

struct InsufficientData : std::runtime_error {
    explicit InsufficientData(const std::string& w) : std::runtime_error(w) {}
};
struct WindowUnderfull : std::runtime_error {
    explicit WindowUnderfull(const std::string& w) : std::runtime_error(w) {}
};

enum class ContextVerdict : std::uint8_t { Benign, Anomalous };

struct ContextFitConfig {
    std::size_t window = 4;         // K
    std::size_t encoder_units = 32; // x; second encoder layer has x/2
    double lr = 1e-3;
    std::size_t batch_size = 64;
    std::size_t max_epochs = 260;
    std::size_t patience = 35;
    std::uint64_t seed = 7;
    bool verbose = false;
};

struct ContextModel {
    nn::Network lstm_ae;
    FeatureEncoder encoder;
    std::size_t window = 4;
    double thresh_beta = 0.0;

    // reconstruction MSE of one encoded K-window
    double window_mse(const nn::Seq& window_enc) const;

    void save_file(const std::string& path) const;
    static ContextModel load_file(const std::string& path);
};

// Trains on an attack-free message stream. Throws InsufficientData when the
// stream holds fewer than 10*K messages.
ContextModel fit_context(const std::vector<bus::Message>& benign_stream,
                         const ContextFitConfig& cfg, nn::TrainResult* history = nullptr);

// Streaming detector: keeps the last K-1 benign-judged messages as context;
// anomalous messages do not advance the window. The first K-1 messages of a
// session are taken as benign warm-up context. A long unbroken anomalous run
// (far beyond any attack burst) means the kept context has gone stale, so
// the detector re-seeds it from the live stream like a fresh session.
class ContextDetector {
public:
    explicit ContextDetector(const ContextModel& model) : model_(&model) {}

    static constexpr std::size_t kStaleRunLimit = 8;

    ContextVerdict observe(const bus::Message& msg);
    double last_mse() const { return last_mse_; }
    const FeatureVector& last_features() const { return last_fv_; }
    bool warmed_up() const;  // context buffer holds K-1 settled messages

    // Alg-1 style single-shot call on an explicit context.
    ContextVerdict detect(const std::vector<FeatureVector>& last_ben_seq,
                          const FeatureVector& msg_t, double* mse_out = nullptr) const;

    // most recent K-1 benign feature vectors, oldest first
    std::vector<FeatureVector> context() const;

private:
    const ContextModel* model_;
    std::deque<FeatureVector> window_;
    std::optional<std::int64_t> last_ts_;
    double last_mse_ = 0.0;
    FeatureVector last_fv_;
    std::size_t anomalous_run_ = 0;
    std::size_t observed_ = 0;
};

} // namespace vigil::detect
