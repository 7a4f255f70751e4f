#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "vigil/core/rng.hpp"
#include "vigil/nn/gradcheck.hpp"
#include "vigil/nn/network.hpp"
#include "vigil/nn/train.hpp"

using namespace vigil;
using nn::Act;
using nn::Seq;
using nn::Vec;

namespace {

Vec random_vec(Rng& rng, std::size_t n, double scale = 1.0) {
    Vec v(n);
    for (auto& x : v) x = rng.uniform(-scale, scale);
    return v;
}

// Straight-line reimplementation of dense/lstm forward arithmetic, no
// kernels, used as the independent forward oracle.
Seq oracle_forward(const nn::Network& net, const Seq& input) {
    Seq cur = input;
    for (std::size_t li = 0; li < net.n_layers(); ++li) {
        const nn::Layer& layer = net.layer(li);
        const nn::LayerSpec& s = layer.spec();
        const Vec& p = layer.params();
        if (s.kind == nn::LayerKind::Dense) {
            Seq out(cur.size());
            for (std::size_t t = 0; t < cur.size(); ++t) {
                out[t].resize(s.out);
                for (std::size_t r = 0; r < s.out; ++r) {
                    double z = p[s.out * s.in + r];
                    for (std::size_t c = 0; c < s.in; ++c) z += p[r * s.in + c] * cur[t][c];
                    out[t][r] = nn::activate(s.act, z);
                }
            }
            cur = out;
        } else if (s.kind == nn::LayerKind::Repeat) {
            cur = Seq(s.repeat, cur.at(0));
        } else {
            const std::size_t h = s.out, in = s.in;
            const double* wxt = p.data();  // input-major [in x 4H]
            const double* wh = wxt + 4 * h * in;
            const double* b = wh + h * 4 * h;
            Vec hp(h, 0.0), cp(h, 0.0);
            Seq hist;
            for (const auto& x : cur) {
                Vec z(4 * h);
                for (std::size_t r = 0; r < 4 * h; ++r) {
                    double acc = b[r];
                    for (std::size_t c = 0; c < in; ++c) acc += wxt[c * 4 * h + r] * x[c];
                    for (std::size_t c = 0; c < h; ++c) acc += wh[c * 4 * h + r] * hp[c];
                    z[r] = acc;
                }
                Vec hn(h), cn(h);
                for (std::size_t j = 0; j < h; ++j) {
                    const double ig = 1.0 / (1.0 + std::exp(-z[j]));
                    const double fg = 1.0 / (1.0 + std::exp(-z[h + j]));
                    const double cand = nn::activate(s.act, z[2 * h + j]);
                    const double og = 1.0 / (1.0 + std::exp(-z[3 * h + j]));
                    cn[j] = fg * cp[j] + ig * cand;
                    hn[j] = og * nn::activate(s.act, cn[j]);
                }
                hp = hn;
                cp = cn;
                hist.push_back(hn);
            }
            cur = s.return_seq ? hist : Seq{hp};
        }
    }
    return cur;
}

} // namespace

TEST_CASE("identity dense layer passes input through") {
    nn::Network net({nn::dense_spec(3, 3, Act::None)}, 1);
    auto& p = net.layer(0).params();
    std::fill(p.begin(), p.end(), 0.0);
    p[0] = p[4] = p[8] = 1.0;  // identity weights, zero bias
    const Vec x{0.3, -0.7, 2.0};
    CHECK(net.forward_vec(x) == x);
}

TEST_CASE("sigmoid head on zero logits gives one half") {
    nn::Network net({nn::dense_spec(4, 1, Act::Sigmoid)}, 1);
    auto& p = net.layer(0).params();
    std::fill(p.begin(), p.end(), 0.0);
    CHECK(net.forward_vec({1.0, -2.0, 0.5, 3.0})[0] == doctest::Approx(0.5));
}

TEST_CASE("network forward equals straight-line oracle") {
    Rng rng(7);
    for (int rep = 0; rep < 6; ++rep) {
        nn::Network net({nn::lstm_spec(5, 8, Act::Relu, true),
                         nn::lstm_spec(8, 4, Act::Relu, false),
                         nn::repeat_spec(4, 3),
                         nn::lstm_spec(4, 6, Act::Tanh, true),
                         nn::dense_spec(6, 5, Act::None)},
                        static_cast<std::uint64_t>(100 + rep));
        Seq input;
        for (int t = 0; t < 3; ++t) input.push_back(random_vec(rng, 5));
        const Seq got = net.forward(input);
        const Seq want = oracle_forward(net, input);
        REQUIRE(got.size() == want.size());
        for (std::size_t t = 0; t < got.size(); ++t)
            for (std::size_t j = 0; j < got[t].size(); ++j)
                CHECK(std::abs(got[t][j] - want[t][j]) < 1e-12);
    }
}

TEST_CASE("gradients match central differences") {
    Rng rng(21);

    SUBCASE("dense + sigmoid + bce") {
        nn::Network net({nn::dense_spec(6, 4, Act::LeakyRelu), nn::dense_spec(4, 1, Act::Sigmoid)},
                        3);
        const Seq input{random_vec(rng, 6)};
        const Seq target{{1.0}};
        const auto res = nn::grad_check(net, nn::LossKind::Bce, input, target);
        CHECK(res.max_rel_error < 1e-4);
    }

    SUBCASE("lstm through 4 timesteps + mse") {
        nn::Network net({nn::lstm_spec(3, 5, Act::Tanh, true), nn::dense_spec(5, 3, Act::None)},
                        4);
        Seq input, target;
        for (int t = 0; t < 4; ++t) {
            input.push_back(random_vec(rng, 3));
            target.push_back(random_vec(rng, 3));
        }
        const auto res = nn::grad_check(net, nn::LossKind::Mse, input, target);
        CHECK(res.max_rel_error < 1e-4);
    }

    SUBCASE("zero-parameter net is vacuously exact") {
        nn::Network net({nn::repeat_spec(3, 2)}, 5);
        const Seq input{random_vec(rng, 3)};
        const Seq target{input[0], input[0]};
        const auto res = nn::grad_check(net, nn::LossKind::Mse, input, target);
        CHECK(res.max_rel_error == 0.0);
        CHECK(res.checked_params == 0);
    }
}

TEST_CASE("adam recovers linear-regression coefficients") {
    // y = 2x0 - 3x1 + 0.5, solvable in closed form; training should land
    // within 1e-3 of the exact least-squares solution
    Rng rng(31);
    std::vector<Seq> xs, ys;
    for (int i = 0; i < 200; ++i) {
        const Vec x = random_vec(rng, 2);
        xs.push_back(Seq{x});
        ys.push_back(Seq{{2.0 * x[0] - 3.0 * x[1] + 0.5}});
    }
    nn::Network net({nn::dense_spec(2, 1, Act::None)}, 17);
    nn::TrainConfig cfg;
    cfg.optimizer = nn::OptKind::Adam;
    cfg.lr = 0.02;
    cfg.loss = nn::LossKind::Mse;
    cfg.batch_size = 32;
    cfg.max_epochs = 400;
    cfg.patience = 400;
    nn::train(net, xs, ys, cfg);
    const Vec& p = net.layer(0).params();
    CHECK(p[0] == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(p[1] == doctest::Approx(-3.0).epsilon(1e-3));
    CHECK(p[2] == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("autoencoder memorizes a repeated vector") {
    Rng rng(5);
    const Vec proto = random_vec(rng, 8, 0.5);
    std::vector<Seq> data(60, Seq{proto});
    nn::Network net({nn::dense_spec(8, 4, Act::LeakyRelu), nn::dense_spec(4, 8, Act::None)}, 8);
    nn::TrainConfig cfg;
    cfg.lr = 0.01;
    cfg.max_epochs = 500;
    cfg.patience = 500;
    const auto res = nn::train(net, data, data, cfg);
    CHECK(res.best_val < 1e-5);
}

TEST_CASE("early stop returns the minimum-validation epoch weights") {
    Rng rng(9);
    std::vector<Seq> xs, ys;
    for (int i = 0; i < 50; ++i) {
        const Vec x = random_vec(rng, 3);
        xs.push_back(Seq{x});
        ys.push_back(Seq{{x[0] + x[1] + x[2]}});
    }
    nn::Network net({nn::dense_spec(3, 1, Act::None)}, 2);
    nn::TrainConfig cfg;
    cfg.lr = 0.05;
    cfg.max_epochs = 60;
    cfg.patience = 60;
    const auto res = nn::train(net, xs, ys, cfg);
    // re-evaluate: the returned parameters must reproduce the best val loss
    double acc = 0.0;
    const std::size_t n_train = xs.size() * 7 / 10;
    for (std::size_t i = n_train; i < xs.size(); ++i)
        acc += nn::loss_value(nn::LossKind::Mse, net.forward(xs[i]), ys[i]);
    acc /= static_cast<double>(xs.size() - n_train);
    CHECK(acc == doctest::Approx(res.best_val).epsilon(1e-12));
    CHECK(res.best_val == doctest::Approx(*std::min_element(res.val_loss.begin(),
                                                            res.val_loss.end())));
}

TEST_CASE("serialization round-trips bit-identical forward outputs") {
    Rng rng(13);
    nn::Network net({nn::lstm_spec(4, 6, Act::Relu, false), nn::repeat_spec(6, 2),
                     nn::lstm_spec(6, 4, Act::Relu, true), nn::dense_spec(4, 4, Act::Sigmoid)},
                    77);
    std::stringstream ss;
    net.save(ss);
    nn::Network back = nn::Network::load(ss);
    Seq input;
    for (int t = 0; t < 2; ++t) input.push_back(random_vec(rng, 4));
    const Seq a = net.forward(input);
    const Seq b = back.forward(input);
    REQUIRE(a.size() == b.size());
    for (std::size_t t = 0; t < a.size(); ++t)
        for (std::size_t j = 0; j < a[t].size(); ++j)
            CHECK(a[t][j] == b[t][j]);  // bit-identical
}

TEST_CASE("fixed seed gives an identical training trajectory") {
    auto run = [] {
        Rng rng(3);
        std::vector<Seq> xs, ys;
        for (int i = 0; i < 40; ++i) {
            const Vec x = random_vec(rng, 4);
            xs.push_back(Seq{x});
            ys.push_back(Seq{{x[0] - x[3]}});
        }
        nn::Network net({nn::dense_spec(4, 4, Act::Relu), nn::dense_spec(4, 1, Act::None)}, 55);
        nn::TrainConfig cfg;
        cfg.lr = 0.01;
        cfg.batch_size = 8;
        cfg.max_epochs = 20;
        cfg.seed = 99;
        return nn::train(net, xs, ys, cfg).train_loss;
    };
    CHECK(run() == run());
}

TEST_CASE("gradient checks pass across layer and loss combinations") {
    // the layer/loss sweep at the acceptance tolerance, smaller sizes
    Rng rng(77);
    for (int rep = 0; rep < 6; ++rep) {
        const auto act = rep % 2 ? Act::LeakyRelu : Act::Tanh;
        nn::Network net({nn::lstm_spec(4, 5, act, true), nn::lstm_spec(5, 3, act, false),
                         nn::repeat_spec(3, 3), nn::lstm_spec(3, 5, act, true),
                         nn::dense_spec(5, 4, Act::None)},
                        static_cast<std::uint64_t>(rep + 1));
        Seq input, target;
        for (int t = 0; t < 3; ++t) {
            input.push_back(random_vec(rng, 4));
            target.push_back(random_vec(rng, 4));
        }
        const auto res = nn::grad_check(net, nn::LossKind::Mse, input, target, 600);
        CHECK(res.max_rel_error < 1e-4);
    }
}

TEST_CASE("divergence raises instead of returning garbage") {
    // squared error overflows to inf on this scale
    std::vector<Seq> xs{Seq{{1e200}}, Seq{{2e200}}, Seq{{3e200}}};
    std::vector<Seq> ys{Seq{{1.0}}, Seq{{2.0}}, Seq{{3.0}}};
    nn::Network net({nn::dense_spec(1, 1, Act::None)}, 1);
    nn::TrainConfig cfg;
    cfg.max_epochs = 10;
    cfg.clip_norm = 0.0;
    CHECK_THROWS_AS(nn::train(net, xs, ys, cfg), nn::Divergence);
}
