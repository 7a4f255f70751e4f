#include "vigil/detect/physical.hpp"

#include <algorithm>
#include <fstream>

#include "vigil/detect/context.hpp"  // InsufficientData

namespace vigil::detect {

namespace {
nn::Vec to_vec(const signal::VoltageTrace& t) {
    return nn::Vec(t.samples.begin(), t.samples.end());
}
} // namespace

double PhysicalIntrusionModel::trace_mse(const signal::VoltageTrace& trace) const {
    const nn::Vec x = to_vec(trace);
    const nn::Vec y = ae.forward_vec(x);
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        acc += d * d;
    }
    return acc / static_cast<double>(x.size());
}

PhysicalVerdict PhysicalIntrusionModel::detect(const signal::VoltageTrace& trace) const {
    return trace_mse(trace) > thresh_alpha ? PhysicalVerdict::IntrusionAlert
                                           : PhysicalVerdict::Clear;
}

PhysicalVerdict PhysicalIntrusionModel::detect_startup(
    std::span<const signal::VoltageTrace> traces, std::size_t window) const {
    const std::size_t n = std::min(window, traces.size());
    for (std::size_t i = 0; i < n; ++i)
        if (detect(traces[i]) == PhysicalVerdict::IntrusionAlert)
            return PhysicalVerdict::IntrusionAlert;
    return PhysicalVerdict::Clear;
}

void PhysicalIntrusionModel::save_file(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    ae.save(os);
    os.write(reinterpret_cast<const char*>(&thresh_alpha), sizeof(thresh_alpha));
}

PhysicalIntrusionModel PhysicalIntrusionModel::load_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + path);
    PhysicalIntrusionModel m;
    m.ae = nn::Network::load(is);
    is.read(reinterpret_cast<char*>(&m.thresh_alpha), sizeof(m.thresh_alpha));
    if (!is) throw std::runtime_error("physical model truncated");
    return m;
}

PhysicalIntrusionModel fit_physical(const std::vector<signal::VoltageTrace>& benign_traces,
                                    const PhysicalFitConfig& cfg, nn::TrainResult* history) {
    if (benign_traces.size() < 100)
        throw InsufficientData("physical intrusion training needs at least 100 traces");

    std::vector<nn::Seq> data;
    data.reserve(benign_traces.size());
    for (const auto& t : benign_traces) data.push_back(nn::as_seq(to_vec(t)));

    PhysicalIntrusionModel model;
    const std::size_t n = signal::kTraceLen;
    model.ae = nn::Network({nn::dense_spec(n, n / 2, nn::Act::LeakyRelu),
                            nn::dense_spec(n / 2, n, nn::Act::None)},
                           cfg.seed);

    nn::TrainConfig tc;
    tc.optimizer = nn::OptKind::Adam;
    tc.lr = cfg.lr;
    tc.loss = nn::LossKind::Mse;
    tc.batch_size = 0;  // full batch
    tc.max_epochs = cfg.max_epochs;
    tc.patience = cfg.patience;
    tc.seed = cfg.seed;
    tc.verbose = cfg.verbose;
    nn::TrainResult res = nn::train(model.ae, data, data, tc);
    if (history) *history = res;

    const std::size_t n_train = benign_traces.size() * 7 / 10;
    double mx = 0.0;
    for (std::size_t i = n_train; i < benign_traces.size(); ++i)
        mx = std::max(mx, model.trace_mse(benign_traces[i]));
    model.thresh_alpha = std::max(mx, 1e-9);
    return model;
}

} // namespace vigil::detect
