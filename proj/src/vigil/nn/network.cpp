#include "vigil/nn/network.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace vigil::nn {

namespace {

constexpr char kMagic[4] = {'V', 'G', 'N', 'N'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("model file truncated");
    return v;
}

} // namespace

Network::Network(const std::vector<LayerSpec>& specs, std::uint64_t init_seed) {
    Rng rng(init_seed);
    for (const auto& s : specs) {
        layers_.push_back(make_layer(s));
        layers_.back()->init_weights(rng);
    }
}

Network::Network(const Network& other) {
    for (const auto& l : other.layers_) {
        layers_.push_back(make_layer(l->spec()));
        layers_.back()->params() = l->params();
    }
}

Network& Network::operator=(const Network& other) {
    if (this == &other) return *this;
    layers_.clear();
    for (const auto& l : other.layers_) {
        layers_.push_back(make_layer(l->spec()));
        layers_.back()->params() = l->params();
    }
    return *this;
}

Seq Network::forward(const Seq& x) const {
    return const_cast<Network*>(this)->forward_train(x);
}

Seq Network::forward_train(const Seq& x) {
    Seq cur = x;
    for (auto& l : layers_) cur = l->forward(cur);
    return cur;
}

Vec Network::forward_vec(const Vec& x) const {
    Seq out = forward(Seq{x});
    return out.empty() ? Vec{} : out.back();
}

void Network::backward(const Seq& grad_out) {
    Seq g = grad_out;
    for (std::size_t i = layers_.size(); i-- > 0;)
        g = layers_[i]->backward(g, /*need_dx=*/i != 0);
}

void Network::zero_grads() {
    for (auto& l : layers_) l->zero_grads();
}

double Network::grad_norm() const {
    double s = 0.0;
    for (const auto& l : layers_)
        for (double g : const_cast<Layer&>(*l).grads()) s += g * g;
    return std::sqrt(s);
}

void Network::clip_grads(double max_norm) {
    const double n = grad_norm();
    if (n <= max_norm || n == 0.0) return;
    const double scale = max_norm / n;
    for (auto& l : layers_)
        for (double& g : l->grads()) g *= scale;
}

std::size_t Network::total_params() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += l->params().size();
    return n;
}

void Network::copy_params_from(const Network& other) {
    if (other.layers_.size() != layers_.size())
        throw ShapeMismatch("copy_params_from: layer count mismatch");
    for (std::size_t i = 0; i < layers_.size(); ++i)
        layers_[i]->params() = other.layers_[i]->params();
}

std::vector<Vec*> Network::param_blocks() {
    std::vector<Vec*> out;
    for (auto& l : layers_) out.push_back(&l->params());
    return out;
}

std::vector<Vec*> Network::grad_blocks() {
    std::vector<Vec*> out;
    for (auto& l : layers_) out.push_back(&l->grads());
    return out;
}

void Network::save(std::ostream& os) const {
    os.write(kMagic, 4);
    put<std::uint32_t>(os, kVersion);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(layers_.size()));
    for (const auto& l : layers_) {
        const LayerSpec& s = l->spec();
        put<std::uint8_t>(os, static_cast<std::uint8_t>(s.kind));
        put<std::uint64_t>(os, s.in);
        put<std::uint64_t>(os, s.out);
        put<std::uint8_t>(os, static_cast<std::uint8_t>(s.act));
        put<std::uint8_t>(os, s.return_seq ? 1 : 0);
        put<std::uint64_t>(os, s.repeat);
        const Vec& p = l->params();
        put<std::uint64_t>(os, p.size());
        os.write(reinterpret_cast<const char*>(p.data()),
                 static_cast<std::streamsize>(p.size() * sizeof(double)));
    }
}

Network Network::load(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("not a model file");
    const auto version = get<std::uint32_t>(is);
    if (version != kVersion) throw std::runtime_error("unsupported model version");
    const auto n_layers = get<std::uint32_t>(is);
    Network net;
    for (std::uint32_t i = 0; i < n_layers; ++i) {
        LayerSpec s;
        s.kind = static_cast<LayerKind>(get<std::uint8_t>(is));
        s.in = get<std::uint64_t>(is);
        s.out = get<std::uint64_t>(is);
        s.act = static_cast<Act>(get<std::uint8_t>(is));
        s.return_seq = get<std::uint8_t>(is) != 0;
        s.repeat = get<std::uint64_t>(is);
        auto layer = make_layer(s);
        const auto n_params = get<std::uint64_t>(is);
        if (n_params != layer->params().size())
            throw std::runtime_error("model file: parameter count mismatch");
        is.read(reinterpret_cast<char*>(layer->params().data()),
                static_cast<std::streamsize>(n_params * sizeof(double)));
        if (!is) throw std::runtime_error("model file truncated");
        net.layers_.push_back(std::move(layer));
    }
    return net;
}

void Network::save_file(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    save(os);
}

Network Network::load_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + path);
    return load(is);
}

} // namespace vigil::nn
