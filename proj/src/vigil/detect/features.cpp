#include "vigil/detect/features.hpp"

#include <algorithm>
#include <cmath>

namespace vigil::detect {

namespace {
constexpr std::size_t kAddrCard = 33;
constexpr const char* kFeatureNames[kNumFeatures] = {
    "Source Address",      "Source Subaddress", "Destination Address",
    "Destination Subaddress", "Communication Channel", "Is Mode Command",
    "Data Count",          "Time Difference",
};

void check(int v, int hi, const char* name) {
    if (v < 0 || v > hi)
        throw UnseenCategory(std::string(name) + " value " + std::to_string(v) +
                             " outside [0," + std::to_string(hi) + "]");
}
} // namespace

const char* feature_name(std::size_t index) { return kFeatureNames[index]; }

FeatureVector extract_features(const bus::Message& msg, const bus::Message* prev_msg) {
    const sim::Endpoints ep = sim::endpoints_of(msg);
    FeatureVector fv;
    fv.source_address = ep.src_addr;
    fv.source_subaddress = ep.src_sub;
    fv.destination_address = ep.dst_addr;
    fv.destination_subaddress = ep.dst_sub;
    fv.channel = msg.channel == bus::Channel::A ? 0 : 1;
    fv.is_mode_command = ep.is_mode ? 1 : 0;
    fv.data_count = ep.count;
    fv.time_difference_us =
        prev_msg ? static_cast<double>(msg.timestamp_us - prev_msg->timestamp_us) : 0.0;
    return fv;
}

std::array<double, kNumFeatures> to_raw(const FeatureVector& fv) {
    return {static_cast<double>(fv.source_address),
            static_cast<double>(fv.source_subaddress),
            static_cast<double>(fv.destination_address),
            static_cast<double>(fv.destination_subaddress),
            static_cast<double>(fv.channel),
            static_cast<double>(fv.is_mode_command),
            static_cast<double>(fv.data_count),
            fv.time_difference_us};
}

FeatureVector from_raw(const std::array<double, kNumFeatures>& raw) {
    FeatureVector fv;
    fv.source_address = static_cast<int>(std::lround(raw[0]));
    fv.source_subaddress = static_cast<int>(std::lround(raw[1]));
    fv.destination_address = static_cast<int>(std::lround(raw[2]));
    fv.destination_subaddress = static_cast<int>(std::lround(raw[3]));
    fv.channel = static_cast<int>(std::lround(raw[4]));
    fv.is_mode_command = static_cast<int>(std::lround(raw[5]));
    fv.data_count = static_cast<int>(std::lround(raw[6]));
    fv.time_difference_us = raw[7];
    return fv;
}

void FeatureEncoder::fit(const std::vector<FeatureVector>& train) {
    double mx = 0.0;
    for (const auto& fv : train) mx = std::max(mx, fv.time_difference_us);
    dt_max_ = mx > 0.0 ? mx : 1.0;
}

nn::Vec FeatureEncoder::encode(const FeatureVector& fv) const {
    check(fv.source_address, 32, "source address");
    check(fv.source_subaddress, 32, "source subaddress");
    check(fv.destination_address, 32, "destination address");
    check(fv.destination_subaddress, 32, "destination subaddress");
    check(fv.channel, 1, "channel");
    check(fv.is_mode_command, 1, "is mode command");
    check(fv.data_count, 32, "data count");

    nn::Vec v(kEncodedDim, 0.0);
    std::size_t off = 0;
    auto onehot = [&](int value, std::size_t card) {
        v[off + static_cast<std::size_t>(value)] = 1.0;
        off += card;
    };
    onehot(fv.source_address, kAddrCard);
    onehot(fv.source_subaddress, kAddrCard);
    onehot(fv.destination_address, kAddrCard);
    onehot(fv.destination_subaddress, kAddrCard);
    onehot(fv.channel, 2);
    onehot(fv.is_mode_command, 2);
    onehot(fv.data_count, kAddrCard);
    const double scale = dt_max_ > 0.0 ? dt_max_ : 1.0;
    v[off] = std::clamp(fv.time_difference_us / scale, 0.0, 1.0);
    return v;
}

FeatureVector FeatureEncoder::decode(const nn::Vec& enc) const {
    if (enc.size() != kEncodedDim) throw UnseenCategory("encoded vector has wrong width");
    FeatureVector fv;
    std::size_t off = 0;
    auto argmax = [&](std::size_t card) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < card; ++i)
            if (enc[off + i] > enc[off + best]) best = i;
        off += card;
        return static_cast<int>(best);
    };
    fv.source_address = argmax(kAddrCard);
    fv.source_subaddress = argmax(kAddrCard);
    fv.destination_address = argmax(kAddrCard);
    fv.destination_subaddress = argmax(kAddrCard);
    fv.channel = argmax(2);
    fv.is_mode_command = argmax(2);
    fv.data_count = argmax(kAddrCard);
    fv.time_difference_us = enc[off] * (dt_max_ > 0.0 ? dt_max_ : 1.0);
    return fv;
}

} // namespace vigil::detect
