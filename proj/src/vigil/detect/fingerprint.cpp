#include "vigil/detect/fingerprint.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

#include "vigil/detect/smote.hpp"
#include "vigil/sim/bus_sim.hpp"

namespace vigil::detect {

namespace {

nn::Vec to_vec(const signal::VoltageTrace& t) {
    return nn::Vec(t.samples.begin(), t.samples.end());
}

nn::Network make_fingerprint_net(std::uint64_t seed) {
    const std::size_t n = signal::kTraceLen;
    return nn::Network({nn::dense_spec(n, 32, nn::Act::Relu),
                        nn::dense_spec(32, 32, nn::Act::Relu),
                        nn::dense_spec(32, 32, nn::Act::Relu),
                        nn::dense_spec(32, 1, nn::Act::Sigmoid)},
                       seed);
}

} // namespace

double FingerprintModel::score(const signal::VoltageTrace& trace) const {
    return net.forward_vec(to_vec(trace))[0];
}

void FingerprintModel::save_file(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    const std::int32_t id = device_id;
    os.write(reinterpret_cast<const char*>(&id), sizeof(id));
    net.save(os);
    optimizer.save(os);
}

FingerprintModel FingerprintModel::load_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + path);
    FingerprintModel m;
    std::int32_t id;
    is.read(reinterpret_cast<char*>(&id), sizeof(id));
    m.device_id = id;
    m.net = nn::Network::load(is);
    m.optimizer = nn::Optimizer::load(is);
    return m;
}

FingerprintModels fit_all(const std::vector<signal::VoltageTrace>& traces,
                          const FingerprintFitConfig& cfg) {
    std::set<int> device_set;
    for (const auto& t : traces) device_set.insert(t.source_device);
    if (device_set.size() < 2)
        throw SingleClassData("fingerprinting needs traces from at least two devices");

    FingerprintModels models;
    for (int dev : device_set) {
        // chronological split first; the minority class of the training part
        // is oversampled to parity, validation stays real
        const std::size_t n = traces.size();
        const std::size_t n_train = n * 7 / 10;

        std::vector<nn::Vec> pos, neg;
        std::vector<nn::Seq> inputs;
        std::vector<nn::Seq> targets;
        for (std::size_t i = 0; i < n_train; ++i) {
            const nn::Vec v = to_vec(traces[i]);
            (traces[i].source_device == dev ? pos : neg).push_back(v);
        }
        if (pos.empty() || neg.empty())
            throw SingleClassData("device " + std::to_string(dev) +
                                  " has single-class training data");

        for (std::size_t i = 0; i < n_train; ++i) {
            inputs.push_back(nn::as_seq(to_vec(traces[i])));
            targets.push_back(nn::as_seq({traces[i].source_device == dev ? 1.0 : 0.0}));
        }
        const bool pos_minority = pos.size() < neg.size();
        auto& minority = pos_minority ? pos : neg;
        auto& majority = pos_minority ? neg : pos;
        const auto synth = smote_oversample(minority, majority, majority.size() - minority.size(),
                                            cfg.smote_k, cfg.seed ^ static_cast<std::uint64_t>(dev));
        for (const auto& s : synth) {
            inputs.push_back(nn::as_seq(s.point));
            targets.push_back(nn::as_seq({pos_minority ? 1.0 : 0.0}));
        }
        // validation tail, unbalanced
        for (std::size_t i = n_train; i < n; ++i) {
            inputs.push_back(nn::as_seq(to_vec(traces[i])));
            targets.push_back(nn::as_seq({traces[i].source_device == dev ? 1.0 : 0.0}));
        }

        FingerprintModel m;
        m.device_id = dev;
        m.net = make_fingerprint_net(cfg.seed + static_cast<std::uint64_t>(dev) * 977);
        m.optimizer = nn::Optimizer(nn::OptKind::RmsProp, cfg.lr);

        nn::TrainConfig tc;
        tc.optimizer = nn::OptKind::RmsProp;
        tc.lr = cfg.lr;
        tc.loss = nn::LossKind::Bce;
        tc.batch_size = cfg.batch_size;
        tc.max_epochs = cfg.max_epochs;
        tc.patience = cfg.patience;
        tc.seed = cfg.seed + static_cast<std::uint64_t>(dev);
        tc.verbose = cfg.verbose;
        tc.val_fraction =
            static_cast<double>(n - n_train) / static_cast<double>(inputs.size());
        nn::train(m.net, inputs, targets, tc, &m.optimizer);
        models.emplace(dev, std::move(m));
    }
    return models;
}

AuthResult authenticate(const FingerprintModels& models, const signal::VoltageTrace& trace,
                        int claimed_device) {
    const auto it = models.find(claimed_device);
    if (it == models.end())
        throw UnknownClaimedDevice("no fingerprint model for device " +
                                   std::to_string(claimed_device));
    return it->second.score(trace) < 0.5 ? AuthResult::SpoofAlert : AuthResult::Authentic;
}

void online_update(FingerprintModel& model, const signal::VoltageTrace& trace) {
    const nn::Seq input = nn::as_seq(to_vec(trace));
    const nn::Seq target = nn::as_seq({1.0});
    model.optimizer.attach(model.net);
    model.net.zero_grads();
    const nn::Seq out = model.net.forward_train(input);
    model.net.backward(nn::loss_grad(nn::LossKind::Bce, out, target));
    model.net.clip_grads(5.0);
    model.optimizer.step(model.net);
}

bus::Message AsyncAlert::to_bus_message() const {
    // reserved alert channel: subaddress 30 report toward the bus controller
    const int src = (real_terminal >= 0 && real_terminal <= 30) ? real_terminal : 30;
    std::vector<std::uint16_t> payload;
    payload.push_back(static_cast<std::uint16_t>(real_terminal));
    payload.push_back(m_crc());
    payload.push_back(static_cast<std::uint16_t>(timestamp_us & 0xffff));
    return bus::make_rt_to_bc(src, 30, payload, timestamp_us);
}

std::uint16_t AsyncAlert::m_crc() const {
    std::uint16_t h = 0x1553;
    for (const auto& c : spoofed_message.command_words)
        h = static_cast<std::uint16_t>(h * 31 + bus::pack_command(c));
    for (const auto& d : spoofed_message.data_words)
        h = static_cast<std::uint16_t>(h * 31 + d.payload);
    return h;
}

void Whitelist::add_device(int device_id, const std::vector<int>& addresses) {
    if (addresses.empty()) throw UnregisteredDevice("whitelist entry must not be empty");
    entries_[device_id] = addresses;
    std::uint64_t mask = 0;
    for (int a : addresses) mask |= (1ULL << a);
    masks_[device_id] = mask;
}

FilterDecision Whitelist::filter_write(int device_id, const bus::Message& msg) const {
    const auto it = masks_.find(device_id);
    if (it == masks_.end())
        throw UnregisteredDevice("device " + std::to_string(device_id) + " not registered");
    const int claimed = sim::claimed_address_of(msg);
    FilterDecision d;
    if (it->second & (1ULL << claimed)) {
        d.action = FilterAction::Transmit;
        return d;
    }
    d.action = FilterAction::Blocked;
    d.alert.real_terminal = entries_.at(device_id).front();
    d.alert.spoofed_message = msg;
    d.alert.timestamp_us = msg.timestamp_us;
    return d;
}

Whitelist Whitelist::from_icd_devices(const std::vector<sim::DeviceSpec>& devices) {
    Whitelist w;
    for (const auto& d : devices) w.add_device(d.id, d.addresses);
    return w;
}

Whitelist Whitelist::from_traffic(const std::vector<std::pair<int, int>>& device_claims) {
    std::map<int, std::set<int>> seen;
    for (const auto& [dev, claim] : device_claims) seen[dev].insert(claim);
    Whitelist w;
    for (const auto& [dev, claims] : seen)
        w.add_device(dev, std::vector<int>(claims.begin(), claims.end()));
    return w;
}

void Whitelist::save_file(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    nlohmann::ordered_json j;
    for (const auto& [dev, addrs] : entries_) j[std::to_string(dev)] = addrs;
    os << j.dump(2) << "\n";
}

Whitelist Whitelist::load_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    nlohmann::json j;
    is >> j;
    Whitelist w;
    for (const auto& [k, v] : j.items()) w.add_device(std::stoi(k), v.get<std::vector<int>>());
    return w;
}

} // namespace vigil::detect
