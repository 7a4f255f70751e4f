#include "vigil/nn/train.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <stdexcept>

namespace vigil::nn {

namespace {
constexpr double kBceEps = 1e-12;
constexpr double kAdamB1 = 0.9;
constexpr double kAdamB2 = 0.999;
constexpr double kAdamEps = 1e-8;
constexpr double kRmsRho = 0.9;
constexpr double kRmsEps = 1e-8;

std::size_t elem_count(const Seq& s) {
    std::size_t n = 0;
    for (const auto& v : s) n += v.size();
    return n;
}
} // namespace

double loss_value(LossKind kind, const Seq& output, const Seq& target) {
    if (output.size() != target.size())
        throw ShapeMismatch("loss: sequence length mismatch");
    const double n = static_cast<double>(elem_count(output));
    double acc = 0.0;
    for (std::size_t t = 0; t < output.size(); ++t) {
        if (output[t].size() != target[t].size())
            throw ShapeMismatch("loss: vector dim mismatch");
        for (std::size_t j = 0; j < output[t].size(); ++j) {
            const double y = output[t][j], tv = target[t][j];
            if (kind == LossKind::Mse) {
                const double d = y - tv;
                acc += d * d;
            } else {
                const double yc = std::clamp(y, kBceEps, 1.0 - kBceEps);
                acc -= tv * std::log(yc) + (1.0 - tv) * std::log(1.0 - yc);
            }
        }
    }
    return acc / n;
}

Seq loss_grad(LossKind kind, const Seq& output, const Seq& target) {
    const double n = static_cast<double>(elem_count(output));
    Seq g(output.size());
    for (std::size_t t = 0; t < output.size(); ++t) {
        g[t].resize(output[t].size());
        for (std::size_t j = 0; j < output[t].size(); ++j) {
            const double y = output[t][j], tv = target[t][j];
            if (kind == LossKind::Mse) {
                g[t][j] = 2.0 * (y - tv) / n;
            } else {
                const double yc = std::clamp(y, kBceEps, 1.0 - kBceEps);
                g[t][j] = (-tv / yc + (1.0 - tv) / (1.0 - yc)) / n;
            }
        }
    }
    return g;
}

Optimizer::Optimizer(OptKind kind, double lr) : kind_(kind), lr_(lr) {
    if (lr <= 0.0 || lr >= 1.0) throw std::invalid_argument("learning rate out of (0,1)");
}

void Optimizer::attach(Network& net) {
    const std::size_t n = net.total_params();
    if (n_ == n) return;
    n_ = n;
    t_ = 0;
    m_.assign(n, 0.0);
    v_.assign(kind_ == OptKind::Adam ? n : 0, 0.0);
}

void Optimizer::step(Network& net) {
    if (n_ != net.total_params()) attach(net);
    ++t_;
    std::size_t off = 0;
    const auto params = net.param_blocks();
    const auto grads = net.grad_blocks();
    if (kind_ == OptKind::Adam) {
        const double bc1 = 1.0 - std::pow(kAdamB1, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(kAdamB2, static_cast<double>(t_));
        for (std::size_t b = 0; b < params.size(); ++b) {
            Vec& p = *params[b];
            Vec& g = *grads[b];
            for (std::size_t i = 0; i < p.size(); ++i) {
                double& m = m_[off + i];
                double& v = v_[off + i];
                m = kAdamB1 * m + (1.0 - kAdamB1) * g[i];
                v = kAdamB2 * v + (1.0 - kAdamB2) * g[i] * g[i];
                p[i] -= lr_ * (m / bc1) / (std::sqrt(v / bc2) + kAdamEps);
            }
            off += p.size();
        }
    } else {
        for (std::size_t b = 0; b < params.size(); ++b) {
            Vec& p = *params[b];
            Vec& g = *grads[b];
            for (std::size_t i = 0; i < p.size(); ++i) {
                double& ms = m_[off + i];
                ms = kRmsRho * ms + (1.0 - kRmsRho) * g[i] * g[i];
                p[i] -= lr_ * g[i] / (std::sqrt(ms) + kRmsEps);
            }
            off += p.size();
        }
    }
}

void Optimizer::save(std::ostream& os) const {
    os.write("VGOP", 4);
    const std::uint8_t k = static_cast<std::uint8_t>(kind_);
    os.write(reinterpret_cast<const char*>(&k), 1);
    os.write(reinterpret_cast<const char*>(&lr_), sizeof(double));
    os.write(reinterpret_cast<const char*>(&t_), sizeof(std::uint64_t));
    const std::uint64_t n = n_;
    os.write(reinterpret_cast<const char*>(&n), sizeof(std::uint64_t));
    os.write(reinterpret_cast<const char*>(m_.data()),
             static_cast<std::streamsize>(m_.size() * sizeof(double)));
    os.write(reinterpret_cast<const char*>(v_.data()),
             static_cast<std::streamsize>(v_.size() * sizeof(double)));
}

Optimizer Optimizer::load(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::string(magic, 4) != "VGOP")
        throw std::runtime_error("not an optimizer-state section");
    std::uint8_t k;
    is.read(reinterpret_cast<char*>(&k), 1);
    Optimizer o;
    o.kind_ = static_cast<OptKind>(k);
    is.read(reinterpret_cast<char*>(&o.lr_), sizeof(double));
    is.read(reinterpret_cast<char*>(&o.t_), sizeof(std::uint64_t));
    std::uint64_t n;
    is.read(reinterpret_cast<char*>(&n), sizeof(std::uint64_t));
    o.n_ = n;
    o.m_.resize(n);
    is.read(reinterpret_cast<char*>(o.m_.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    if (o.kind_ == OptKind::Adam) {
        o.v_.resize(n);
        is.read(reinterpret_cast<char*>(o.v_.data()),
                static_cast<std::streamsize>(n * sizeof(double)));
    }
    if (!is) throw std::runtime_error("optimizer state truncated");
    return o;
}

TrainResult train(Network& net, const std::vector<Seq>& inputs,
                  const std::vector<Seq>& targets, const TrainConfig& cfg,
                  Optimizer* opt_io) {
    if (inputs.empty() || inputs.size() != targets.size())
        throw std::invalid_argument("train: empty or mismatched dataset");

    const std::size_t n = inputs.size();
    std::size_t n_train = static_cast<std::size_t>(
        std::round(static_cast<double>(n) * (1.0 - cfg.val_fraction)));
    n_train = std::clamp<std::size_t>(n_train, 1, n);
    const std::size_t n_val = n - n_train;

    Optimizer local(cfg.optimizer, cfg.lr);
    Optimizer& opt = opt_io ? *opt_io : local;
    opt.attach(net);

    Rng rng(cfg.seed);
    std::vector<std::size_t> order(n_train);
    std::iota(order.begin(), order.end(), 0);

    const std::size_t batch = cfg.batch_size == 0 ? n_train : cfg.batch_size;

    TrainResult res;
    Network best(net);
    double best_val = std::numeric_limits<double>::infinity();
    std::size_t best_epoch = 0, since_best = 0;

    auto eval_val = [&]() {
        if (n_val == 0) return 0.0;
        double acc = 0.0;
        for (std::size_t i = n_train; i < n; ++i)
            acc += loss_value(cfg.loss, net.forward(inputs[i]), targets[i]);
        return acc / static_cast<double>(n_val);
    };

    for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        if (cfg.decay_start > 0 && epoch >= cfg.decay_start &&
            (epoch - cfg.decay_start) % cfg.decay_every == 0)
            opt.set_learning_rate(std::max(cfg.lr_floor, opt.learning_rate() * cfg.decay_factor));
        if (cfg.batch_size != 0) rng.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t done = 0;
        while (done < n_train) {
            const std::size_t bs = std::min(batch, n_train - done);
            net.zero_grads();
            double batch_loss = 0.0;
            for (std::size_t k = 0; k < bs; ++k) {
                const std::size_t idx = order[done + k];
                Seq out = net.forward_train(inputs[idx]);
                batch_loss += loss_value(cfg.loss, out, targets[idx]);
                Seq g = loss_grad(cfg.loss, out, targets[idx]);
                // scale so the step is the batch-mean gradient
                for (auto& gv : g)
                    for (auto& x : gv) x /= static_cast<double>(bs);
                net.backward(g);
            }
            batch_loss /= static_cast<double>(bs);
            if (!std::isfinite(batch_loss)) throw Divergence("training loss became non-finite");
            if (cfg.clip_norm > 0.0) net.clip_grads(cfg.clip_norm);
            opt.step(net);
            epoch_loss += batch_loss * static_cast<double>(bs);
            done += bs;
        }
        epoch_loss /= static_cast<double>(n_train);
        const double val = n_val ? eval_val() : epoch_loss;
        if (!std::isfinite(val)) throw Divergence("validation loss became non-finite");
        res.train_loss.push_back(epoch_loss);
        res.val_loss.push_back(val);
        if (cfg.verbose)
            std::cerr << "epoch " << epoch << " train " << epoch_loss << " val " << val << "\n";
        if (val < best_val) {
            best_val = val;
            best_epoch = epoch;
            best.copy_params_from(net);
            since_best = 0;
        } else if (++since_best > cfg.patience) {
            break;
        }
    }

    net.copy_params_from(best);
    res.best_epoch = best_epoch;
    res.best_val = best_val;
    return res;
}

} // namespace vigil::nn
