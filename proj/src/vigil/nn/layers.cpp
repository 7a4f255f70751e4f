#include "vigil/nn/layers.hpp"

#include <cmath>
#include <cstring>

#include "vigil/kernels/kernels.hpp"

namespace vigil::nn {

double activate(Act a, double z) {
    switch (a) {
        case Act::None: return z;
        case Act::Relu: return z > 0.0 ? z : 0.0;
        case Act::LeakyRelu: return z > 0.0 ? z : kLeakySlope * z;
        case Act::Sigmoid: return 1.0 / (1.0 + std::exp(-z));
        case Act::Tanh: return std::tanh(z);
    }
    return z;
}

double activate_grad(Act a, double z_pre, double z_post) {
    switch (a) {
        case Act::None: return 1.0;
        case Act::Relu: return z_pre > 0.0 ? 1.0 : 0.0;
        case Act::LeakyRelu: return z_pre > 0.0 ? 1.0 : kLeakySlope;
        case Act::Sigmoid: return z_post * (1.0 - z_post);
        case Act::Tanh: return 1.0 - z_post * z_post;
    }
    return 1.0;
}

void Layer::zero_grads() {
    auto& g = grads();
    std::fill(g.begin(), g.end(), 0.0);
}

namespace {

void glorot_uniform(double* w, std::size_t n, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (std::size_t i = 0; i < n; ++i) w[i] = rng.uniform(-limit, limit);
}

class DenseLayer final : public Layer {
public:
    explicit DenseLayer(const LayerSpec& s) : spec_(s) {
        const std::size_t n = s.out * s.in + s.out;
        params_.assign(n, 0.0);
        grads_.assign(n, 0.0);
    }

    const LayerSpec& spec() const override { return spec_; }

    void init_weights(Rng& rng) override {
        glorot_uniform(params_.data(), spec_.out * spec_.in, spec_.in, spec_.out, rng);
        std::fill(params_.begin() + static_cast<std::ptrdiff_t>(spec_.out * spec_.in),
                  params_.end(), 0.0);
    }

    Seq forward(const Seq& x) override {
        if (!x.empty() && x[0].size() != spec_.in)
            throw ShapeMismatch("dense: input dim " + std::to_string(x[0].size()) +
                                " != " + std::to_string(spec_.in));
        xs_ = x;
        zs_.resize(x.size());
        Seq y(x.size());
        const double* w = params_.data();
        const double* b = w + spec_.out * spec_.in;
        for (std::size_t t = 0; t < x.size(); ++t) {
            zs_[t].resize(spec_.out);
            kern::gemv(w, spec_.out, spec_.in, x[t].data(), b, zs_[t].data());
            y[t].resize(spec_.out);
            for (std::size_t j = 0; j < spec_.out; ++j)
                y[t][j] = activate(spec_.act, zs_[t][j]);
        }
        ys_ = y;
        return y;
    }

    Seq backward(const Seq& grad_out, bool need_dx) override {
        Seq dx(need_dx ? xs_.size() : 0);
        double* gw = grads_.data();
        double* gb = gw + spec_.out * spec_.in;
        const double* w = params_.data();
        Vec dz(spec_.out);
        for (std::size_t t = 0; t < xs_.size(); ++t) {
            for (std::size_t j = 0; j < spec_.out; ++j)
                dz[j] = grad_out[t][j] * activate_grad(spec_.act, zs_[t][j], ys_[t][j]);
            kern::ger_acc(gw, dz.data(), spec_.out, xs_[t].data(), spec_.in, 1.0);
            kern::axpy(1.0, dz.data(), gb, spec_.out);
            if (need_dx) {
                dx[t].assign(spec_.in, 0.0);
                kern::gemv_t_acc(w, spec_.out, spec_.in, dz.data(), dx[t].data());
            }
        }
        return dx;
    }

    Vec& params() override { return params_; }
    Vec& grads() override { return grads_; }

private:
    LayerSpec spec_;
    Vec params_, grads_;
    Seq xs_, zs_, ys_;
};

// Gate layout in the stacked weight matrices: input, forget, candidate,
// output. The input weights are stored input-major (WxT, [in x 4H]) so
// sparse inputs touch contiguous rows; one-hot encoded features make the
// input almost entirely zeros.
class LstmLayer final : public Layer {
public:
    explicit LstmLayer(const LayerSpec& s) : spec_(s), h_(s.out), in_(s.in) {
        const std::size_t n = wx_len() + wh_len() + 4 * h_;
        params_.assign(n, 0.0);
        grads_.assign(n, 0.0);
    }

    const LayerSpec& spec() const override { return spec_; }

    void init_weights(Rng& rng) override {
        glorot_uniform(params_.data(), wx_len(), in_, h_, rng);
        glorot_uniform(params_.data() + wx_len(), wh_len(), h_, h_, rng);
        double* b = bias();
        std::fill(b, b + 4 * h_, 0.0);
        // forget-gate bias at 1 stabilizes early training
        for (std::size_t j = 0; j < h_; ++j) b[h_ + j] = 1.0;
    }

    Seq forward(const Seq& x) override {
        if (!x.empty() && x[0].size() != in_)
            throw ShapeMismatch("lstm: input dim " + std::to_string(x[0].size()) +
                                " != " + std::to_string(in_));
        const std::size_t steps = x.size();
        xs_ = x;
        active_.assign(steps, {});
        z_pre_.assign(steps, Vec(4 * h_));
        gates_.assign(steps, Vec(4 * h_));
        cs_.assign(steps, Vec(h_));
        as_.assign(steps, Vec(h_));
        hs_.assign(steps, Vec(h_));

        Vec h_prev(h_, 0.0), c_prev(h_, 0.0);
        const double* wxt = params_.data();
        const double* wh = wxt + wx_len();
        const double* b = wh + wh_len();
        for (std::size_t t = 0; t < steps; ++t) {
            Vec& z = z_pre_[t];
            std::copy(b, b + 4 * h_, z.begin());
            auto& act_idx = active_[t];
            for (std::size_t i = 0; i < in_; ++i) {
                const double xi = x[t][i];
                if (xi == 0.0) continue;
                act_idx.push_back(i);
                kern::axpy(xi, wxt + i * 4 * h_, z.data(), 4 * h_);
            }
            kern::gemv_t_acc(wh, h_, 4 * h_, h_prev.data(), z.data());
            Vec& g = gates_[t];
            for (std::size_t j = 0; j < h_; ++j) {
                const double ig = activate(Act::Sigmoid, z[j]);
                const double fg = activate(Act::Sigmoid, z[h_ + j]);
                const double cand = activate(spec_.act, z[2 * h_ + j]);
                const double og = activate(Act::Sigmoid, z[3 * h_ + j]);
                g[j] = ig;
                g[h_ + j] = fg;
                g[2 * h_ + j] = cand;
                g[3 * h_ + j] = og;
                const double c = fg * c_prev[j] + ig * cand;
                cs_[t][j] = c;
                const double a = activate(spec_.act, c);
                as_[t][j] = a;
                hs_[t][j] = og * a;
            }
            h_prev = hs_[t];
            c_prev = cs_[t];
        }
        if (spec_.return_seq) return hs_;
        return Seq{hs_.empty() ? Vec(h_, 0.0) : hs_.back()};
    }

    Seq backward(const Seq& grad_out, bool need_dx) override {
        const std::size_t steps = xs_.size();
        Seq dx(need_dx ? steps : 0);
        if (need_dx)
            for (auto& v : dx) v.assign(in_, 0.0);
        const double* wxt = params_.data();
        const double* wh = wxt + wx_len();
        double* gwxt = grads_.data();
        double* gwh = gwxt + wx_len();
        double* gb = gwh + wh_len();

        Vec dh_next(h_, 0.0), dc_next(h_, 0.0);
        Vec dz(4 * h_);
        for (std::size_t ti = steps; ti-- > 0;) {
            Vec dh = dh_next;
            if (spec_.return_seq) {
                for (std::size_t j = 0; j < h_; ++j) dh[j] += grad_out[ti][j];
            } else if (ti == steps - 1) {
                for (std::size_t j = 0; j < h_; ++j) dh[j] += grad_out[0][j];
            }
            const Vec& g = gates_[ti];
            const Vec& z = z_pre_[ti];
            const Vec& c_prev = (ti == 0) ? zero_h() : cs_[ti - 1];
            Vec dc(h_);
            for (std::size_t j = 0; j < h_; ++j) {
                const double og = g[3 * h_ + j];
                const double da = dh[j] * og;
                dc[j] = da * activate_grad(spec_.act, cs_[ti][j], as_[ti][j]) + dc_next[j];
                const double d_og = dh[j] * as_[ti][j];
                const double d_ig = dc[j] * g[2 * h_ + j];
                const double d_fg = dc[j] * c_prev[j];
                const double d_cand = dc[j] * g[j];
                dz[j] = d_ig * activate_grad(Act::Sigmoid, z[j], g[j]);
                dz[h_ + j] = d_fg * activate_grad(Act::Sigmoid, z[h_ + j], g[h_ + j]);
                dz[2 * h_ + j] = d_cand * activate_grad(spec_.act, z[2 * h_ + j], g[2 * h_ + j]);
                dz[3 * h_ + j] = d_og * activate_grad(Act::Sigmoid, z[3 * h_ + j], g[3 * h_ + j]);
            }
            const Vec& h_prev = (ti == 0) ? zero_h() : hs_[ti - 1];
            for (std::size_t i : active_[ti])
                kern::axpy(xs_[ti][i], dz.data(), gwxt + i * 4 * h_, 4 * h_);
            kern::ger_acc(gwh, h_prev.data(), h_, dz.data(), 4 * h_, 1.0);
            kern::axpy(1.0, dz.data(), gb, 4 * h_);
            if (need_dx)
                for (std::size_t i = 0; i < in_; ++i)
                    dx[ti][i] = kern::dot(wxt + i * 4 * h_, dz.data(), 4 * h_);
            dh_next.assign(h_, 0.0);
            kern::gemv(wh, h_, 4 * h_, dz.data(), nullptr, dh_next.data());
            for (std::size_t j = 0; j < h_; ++j) dc_next[j] = dc[j] * g[h_ + j];
        }
        return dx;
    }

    Vec& params() override { return params_; }
    Vec& grads() override { return grads_; }

private:
    std::size_t wx_len() const { return in_ * 4 * h_; }
    std::size_t wh_len() const { return h_ * 4 * h_; }
    double* bias() { return params_.data() + wx_len() + wh_len(); }
    const Vec& zero_h() const {
        static thread_local Vec z;
        z.assign(h_, 0.0);
        return z;
    }

    LayerSpec spec_;
    std::size_t h_, in_;
    Vec params_, grads_;
    Seq xs_, z_pre_, gates_, cs_, as_, hs_;
    std::vector<std::vector<std::size_t>> active_;
};

class RepeatLayer final : public Layer {
public:
    explicit RepeatLayer(const LayerSpec& s) : spec_(s) {}

    const LayerSpec& spec() const override { return spec_; }
    void init_weights(Rng&) override {}

    Seq forward(const Seq& x) override {
        if (x.size() != 1)
            throw ShapeMismatch("repeat: expected a length-1 sequence");
        return Seq(spec_.repeat, x[0]);
    }

    Seq backward(const Seq& grad_out, bool) override {
        Vec acc(spec_.in, 0.0);
        for (const auto& g : grad_out)
            kern::axpy(1.0, g.data(), acc.data(), spec_.in);
        return Seq{std::move(acc)};
    }

    Vec& params() override { return empty_; }
    Vec& grads() override { return empty_; }

private:
    LayerSpec spec_;
    Vec empty_;
};

} // namespace

LayerSpec dense_spec(std::size_t in, std::size_t out, Act act) {
    return LayerSpec{LayerKind::Dense, in, out, act, true, 0};
}

LayerSpec lstm_spec(std::size_t in, std::size_t hidden, Act act, bool return_seq) {
    return LayerSpec{LayerKind::Lstm, in, hidden, act, return_seq, 0};
}

LayerSpec repeat_spec(std::size_t dim, std::size_t k) {
    return LayerSpec{LayerKind::Repeat, dim, dim, Act::None, true, k};
}

std::unique_ptr<Layer> make_layer(const LayerSpec& spec) {
    switch (spec.kind) {
        case LayerKind::Dense: return std::make_unique<DenseLayer>(spec);
        case LayerKind::Lstm: return std::make_unique<LstmLayer>(spec);
        case LayerKind::Repeat: return std::make_unique<RepeatLayer>(spec);
    }
    throw ShapeMismatch("unknown layer kind");
}

} // namespace vigil::nn
