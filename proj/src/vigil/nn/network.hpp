#pragma once
// Sequential network container + binary serialization.
//
// Model file layout (little-endian), version 1:
//   magic   : 4 bytes "VGNN"
//   version : u32
//   n_layers: u32
//   per layer:
//     kind       : u8   (0 dense, 1 lstm, 2 repeat)
//     in, out    : u64, u64
//     act        : u8   (0 none, 1 relu, 2 leaky-relu, 3 sigmoid, 4 tanh)
//     return_seq : u8
//     repeat     : u64
//     n_params   : u64
//     params     : n_params raw IEEE-754 doubles
// An optional optimizer-state section follows when present:
//   magic "VGOP", kind u8 (0 adam, 1 rmsprop), lr f64, t u64,
//   n_slots u64, then n_slots doubles per slot buffer (2 for adam, 1 for rmsprop).

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "vigil/core/rng.hpp"
#include "vigil/nn/layers.hpp"
#include "vigil/nn/tensor.hpp"

namespace vigil::nn {

class Network {
public:
    Network() = default;
    explicit Network(const std::vector<LayerSpec>& specs, std::uint64_t init_seed);

    Network(const Network& other);
    Network& operator=(const Network& other);
    Network(Network&&) = default;
    Network& operator=(Network&&) = default;

    Seq forward(const Seq& x) const;        // inference only, still caches
    Seq forward_train(const Seq& x);        // same, named for clarity
    Vec forward_vec(const Vec& x) const;    // length-1 sequence helper

    // Backprop from the loss gradient on the output; accumulates layer grads.
    void backward(const Seq& grad_out);

    void zero_grads();
    double grad_norm() const;
    void clip_grads(double max_norm);

    std::size_t n_layers() const { return layers_.size(); }
    Layer& layer(std::size_t i) { return *layers_[i]; }
    const Layer& layer(std::size_t i) const { return *layers_[i]; }

    std::size_t total_params() const;
    void copy_params_from(const Network& other);

    void save(std::ostream& os) const;
    static Network load(std::istream& is);
    void save_file(const std::string& path) const;
    static Network load_file(const std::string& path);

    std::vector<Vec*> param_blocks();
    std::vector<Vec*> grad_blocks();

private:
    std::vector<std::unique_ptr<Layer>> layers_;
};

} // namespace vigil::nn
