#include "vigil/detect/context.hpp"

#include <fstream>

namespace vigil::detect {

double ContextModel::window_mse(const nn::Seq& window_enc) const {
    const nn::Seq out = lstm_ae.forward(window_enc);
    return nn::loss_value(nn::LossKind::Mse, out, window_enc);
}

void ContextModel::save_file(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    lstm_ae.save(os);
    const std::uint64_t k = window;
    os.write(reinterpret_cast<const char*>(&k), sizeof(k));
    os.write(reinterpret_cast<const char*>(&thresh_beta), sizeof(thresh_beta));
    const double dt = encoder.dt_scale();
    os.write(reinterpret_cast<const char*>(&dt), sizeof(dt));
}

ContextModel ContextModel::load_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + path);
    ContextModel m;
    m.lstm_ae = nn::Network::load(is);
    std::uint64_t k;
    is.read(reinterpret_cast<char*>(&k), sizeof(k));
    m.window = k;
    is.read(reinterpret_cast<char*>(&m.thresh_beta), sizeof(m.thresh_beta));
    double dt;
    is.read(reinterpret_cast<char*>(&dt), sizeof(dt));
    if (!is) throw std::runtime_error("context model truncated");
    m.encoder.set_dt_scale(dt);
    return m;
}

ContextModel fit_context(const std::vector<bus::Message>& benign_stream,
                         const ContextFitConfig& cfg, nn::TrainResult* history) {
    const std::size_t k = cfg.window;
    if (benign_stream.size() < 10 * k)
        throw InsufficientData("need at least " + std::to_string(10 * k) + " messages");

    std::vector<FeatureVector> fvs;
    fvs.reserve(benign_stream.size());
    for (std::size_t i = 0; i < benign_stream.size(); ++i)
        fvs.push_back(extract_features(benign_stream[i], i ? &benign_stream[i - 1] : nullptr));

    ContextModel model;
    model.window = k;
    const std::size_t n_train_msgs = fvs.size() * 7 / 10;
    model.encoder.fit({fvs.begin(), fvs.begin() + static_cast<std::ptrdiff_t>(n_train_msgs)});

    std::vector<nn::Vec> enc(fvs.size());
    for (std::size_t i = 0; i < fvs.size(); ++i) enc[i] = model.encoder.encode(fvs[i]);

    std::vector<nn::Seq> windows;
    windows.reserve(enc.size() - k + 1);
    for (std::size_t i = 0; i + k <= enc.size(); ++i)
        windows.emplace_back(enc.begin() + static_cast<std::ptrdiff_t>(i),
                             enc.begin() + static_cast<std::ptrdiff_t>(i + k));

    const std::size_t x = cfg.encoder_units;
    model.lstm_ae = nn::Network(
        {nn::lstm_spec(kEncodedDim, x, nn::Act::Relu, true),
         nn::lstm_spec(x, x / 2, nn::Act::Relu, false),
         nn::repeat_spec(x / 2, k),
         nn::lstm_spec(x / 2, x / 2, nn::Act::Relu, true),
         nn::lstm_spec(x / 2, x, nn::Act::Relu, true),
         nn::dense_spec(x, kEncodedDim, nn::Act::None)},
        cfg.seed);

    nn::TrainConfig tc;
    tc.optimizer = nn::OptKind::Adam;
    tc.lr = cfg.lr;
    tc.loss = nn::LossKind::Mse;
    tc.batch_size = cfg.batch_size;
    tc.max_epochs = cfg.max_epochs;
    tc.patience = cfg.patience;
    tc.seed = cfg.seed;
    tc.decay_start = cfg.max_epochs / 2;
    tc.verbose = cfg.verbose;
    nn::TrainResult res = nn::train(model.lstm_ae, windows, windows, tc);
    if (history) *history = res;

    const std::size_t n_train_win = windows.size() * 7 / 10;
    double mx = 0.0;
    for (std::size_t i = n_train_win; i < windows.size(); ++i)
        mx = std::max(mx, model.window_mse(windows[i]));
    model.thresh_beta = std::max(mx, 1e-9);
    return model;
}

bool ContextDetector::warmed_up() const {
    // the session's opening messages carry start-of-capture gap artifacts
    // (dt = 0); hold verdicts until they have rolled out of the context
    return window_.size() + 1 >= model_->window && observed_ >= 2 * model_->window - 1;
}

std::vector<FeatureVector> ContextDetector::context() const {
    return {window_.begin(), window_.end()};
}

ContextVerdict ContextDetector::detect(const std::vector<FeatureVector>& last_ben_seq,
                                       const FeatureVector& msg_t, double* mse_out) const {
    if (last_ben_seq.size() + 1 != model_->window)
        throw WindowUnderfull("context must hold K-1 messages");
    nn::Seq input;
    input.reserve(model_->window);
    for (const auto& fv : last_ben_seq) input.push_back(model_->encoder.encode(fv));
    input.push_back(model_->encoder.encode(msg_t));
    const double mse = model_->window_mse(input);
    if (mse_out) *mse_out = mse;
    return mse > model_->thresh_beta ? ContextVerdict::Anomalous : ContextVerdict::Benign;
}

ContextVerdict ContextDetector::observe(const bus::Message& msg) {
    FeatureVector fv;
    fv = extract_features(msg, nullptr);
    // time difference to the previous message on the bus, whatever its verdict
    fv.time_difference_us =
        last_ts_ ? static_cast<double>(msg.timestamp_us - *last_ts_) : 0.0;
    last_ts_ = msg.timestamp_us;
    last_fv_ = fv;
    ++observed_;

    if (!warmed_up()) {
        // cold start: the opening messages seed the benign context
        window_.push_back(fv);
        while (window_.size() > model_->window - 1) window_.pop_front();
        last_mse_ = 0.0;
        return ContextVerdict::Benign;
    }

    double mse = 0.0;
    const ContextVerdict v = detect({window_.begin(), window_.end()}, fv, &mse);
    last_mse_ = mse;
    if (v == ContextVerdict::Benign) {
        window_.push_back(fv);
        while (window_.size() > model_->window - 1) window_.pop_front();
        anomalous_run_ = 0;
    } else if (++anomalous_run_ >= kStaleRunLimit) {
        // the kept context no longer matches the live stream; start over
        window_.clear();
        anomalous_run_ = 0;
    }
    return v;
}

} // namespace vigil::detect
