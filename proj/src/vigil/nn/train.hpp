#pragma once
// Loss functions, optimizers, and the validation-stopped training loop.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "vigil/nn/network.hpp"
#include "vigil/nn/tensor.hpp"

namespace vigil::nn {

enum class LossKind : std::uint8_t { Mse = 0, Bce = 1 };
enum class OptKind : std::uint8_t { Adam = 0, RmsProp = 1 };

// Loss over a whole output sequence, averaged over every element.
double loss_value(LossKind kind, const Seq& output, const Seq& target);
// dL/d(output); same shape as output.
Seq loss_grad(LossKind kind, const Seq& output, const Seq& target);

class Optimizer {
public:
    Optimizer() = default;
    Optimizer(OptKind kind, double lr);

    void attach(Network& net);  // sizes state to the network
    void step(Network& net);    // consumes accumulated grads

    OptKind kind() const { return kind_; }
    double learning_rate() const { return lr_; }
    void set_learning_rate(double lr) { lr_ = lr; }

    void save(std::ostream& os) const;
    static Optimizer load(std::istream& is);

private:
    OptKind kind_ = OptKind::Adam;
    double lr_ = 1e-3;
    std::uint64_t t_ = 0;
    std::vector<double> m_, v_;  // adam: m,v ; rmsprop: only m_ (mean square)
    std::size_t n_ = 0;
};

struct TrainConfig {
    OptKind optimizer = OptKind::Adam;
    double lr = 1e-3;
    LossKind loss = LossKind::Mse;
    std::size_t batch_size = 0;    // 0 = full batch
    std::size_t max_epochs = 200;
    std::size_t patience = 12;     // epochs without a new validation minimum
    double val_fraction = 0.30;    // chronological tail
    std::uint64_t seed = 1;
    double clip_norm = 5.0;        // 0 disables
    // learning-rate step decay: lr *= decay_factor every decay_every epochs
    // after decay_start (0 disables)
    std::size_t decay_start = 0;
    std::size_t decay_every = 40;
    double decay_factor = 0.5;
    double lr_floor = 1e-4;
    bool verbose = false;
};

struct TrainResult {
    std::vector<double> train_loss;
    std::vector<double> val_loss;
    std::size_t best_epoch = 0;
    double best_val = 0.0;
};

// Chronological 70/30 split, train until the validation loss stops improving,
// restore the parameters of the best epoch. Throws Divergence on non-finite loss.
TrainResult train(Network& net, const std::vector<Seq>& inputs,
                  const std::vector<Seq>& targets, const TrainConfig& cfg,
                  Optimizer* opt_io = nullptr);

} // namespace vigil::nn
