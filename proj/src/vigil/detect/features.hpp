#pragma once
// Per-message features for the context detector and their one-hot encoding.
//
// Eight features per message: source address/subaddress, destination
// address/subaddress (all 0-32, the bus controller mapped to 32), channel,
// is-mode-command, data count (the mode code for mode commands), and the
// time difference to the previous message in microseconds.

#include <string>
#include <vector>

#include "vigil/bus/message.hpp"
#include "vigil/nn/tensor.hpp"
#include "vigil/sim/icd.hpp"

namespace vigil::detect {

struct UnseenCategory : std::runtime_error {
    explicit UnseenCategory(const std::string& w) : std::runtime_error(w) {}
};

struct FeatureVector {
    int source_address = 0;
    int source_subaddress = 0;
    int destination_address = 0;
    int destination_subaddress = 0;
    int channel = 0;
    int is_mode_command = 0;
    int data_count = 0;
    double time_difference_us = 0.0;

    bool operator==(const FeatureVector&) const = default;
};

constexpr std::size_t kNumFeatures = 8;
// Table order shared by the surrogate and the explanation output.
const char* feature_name(std::size_t index);

FeatureVector extract_features(const bus::Message& msg, const bus::Message* prev_msg);

// raw numeric view in feature-table order (categoricals as their values)
std::array<double, kNumFeatures> to_raw(const FeatureVector& fv);
FeatureVector from_raw(const std::array<double, kNumFeatures>& raw);

// One-hot blocks 33+33+33+33+2+2+33 plus one min-max scaled numeric = 170.
constexpr std::size_t kEncodedDim = 33 * 5 + 2 + 2 + 1;

class FeatureEncoder {
public:
    // Learns the numeric normalization bounds from training features. The
    // lower bound is pinned at zero: the time-difference anomalies the
    // detector must catch sit below the observed benign minimum, which a
    // min-anchored scale would erase.
    void fit(const std::vector<FeatureVector>& train);

    nn::Vec encode(const FeatureVector& fv) const;  // throws UnseenCategory
    FeatureVector decode(const nn::Vec& enc) const; // categorical fields exact

    double dt_scale() const { return dt_max_; }
    bool fitted() const { return dt_max_ > 0.0; }
    void set_dt_scale(double v) { dt_max_ = v; }

private:
    double dt_max_ = 0.0;
};

} // namespace vigil::detect
