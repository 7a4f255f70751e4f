#pragma once
// Layer zoo: dense (time-distributed over sequences), LSTM cell with
// optional sequence output, and a repeat-vector adapter for
// sequence-autoencoder decoders.

#include <cstdint>
#include <memory>

#include "vigil/core/rng.hpp"
#include "vigil/nn/tensor.hpp"

namespace vigil::nn {

enum class Act : std::uint8_t { None = 0, Relu = 1, LeakyRelu = 2, Sigmoid = 3, Tanh = 4 };

constexpr double kLeakySlope = 0.01;

double activate(Act a, double z);
double activate_grad(Act a, double z_pre, double z_post);

enum class LayerKind : std::uint8_t { Dense = 0, Lstm = 1, Repeat = 2 };

struct LayerSpec {
    LayerKind kind;
    std::uint64_t in = 0;
    std::uint64_t out = 0;
    Act act = Act::None;
    bool return_seq = true;
    std::uint64_t repeat = 0;
};

class Layer {
public:
    virtual ~Layer() = default;

    virtual const LayerSpec& spec() const = 0;
    virtual Seq forward(const Seq& x) = 0;
    // Accumulates parameter gradients, returns gradient w.r.t. input.
    // need_dx=false skips the input-gradient pass (first layer).
    virtual Seq backward(const Seq& grad_out, bool need_dx = true) = 0;

    virtual Vec& params() = 0;
    virtual Vec& grads() = 0;
    const Vec& params() const { return const_cast<Layer*>(this)->params(); }

    virtual void init_weights(Rng& rng) = 0;
    void zero_grads();
};

std::unique_ptr<Layer> make_layer(const LayerSpec& spec);

// Dense: y_t = act(W x_t + b) applied to every timestep.
LayerSpec dense_spec(std::size_t in, std::size_t out, Act act);
// LSTM with sigmoid gates; `act` is the candidate/cell-output activation.
LayerSpec lstm_spec(std::size_t in, std::size_t hidden, Act act, bool return_seq);
// Repeats a length-1 input sequence K times.
LayerSpec repeat_spec(std::size_t dim, std::size_t k);

} // namespace vigil::nn
