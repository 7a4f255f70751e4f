#include "vigil/explain/nmt.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "vigil/core/rng.hpp"
#include "vigil/kernels/kernels.hpp"

namespace vigil::explain {

namespace {

using Vec = std::vector<double>;

std::vector<std::string> split_words(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    std::string w;
    while (is >> w) out.push_back(w);
    return out;
}

std::string join_words(const std::vector<std::string>& words) {
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i) out += ' ';
        out += words[i];
    }
    return out;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Stand-alone LSTM cell with standard layout: z = Wx x + Wh h + b,
// gate order input/forget/candidate/output, tanh activations.
struct CellDims {
    std::size_t in = 0, h = 0;
    std::size_t wx() const { return 4 * h * in; }
    std::size_t wh() const { return 4 * h * h; }
    std::size_t b() const { return 4 * h; }
    std::size_t total() const { return wx() + wh() + b(); }
};

struct CellStep {
    Vec x, h_prev, c_prev, z, gates, c, a, h;
};

void cell_forward(const double* p, const CellDims& d, CellStep& s) {
    s.z.assign(4 * d.h, 0.0);
    kern::gemv(p, 4 * d.h, d.in, s.x.data(), p + d.wx() + d.wh(), s.z.data());
    Vec hz(4 * d.h, 0.0);
    kern::gemv(p + d.wx(), 4 * d.h, d.h, s.h_prev.data(), nullptr, hz.data());
    for (std::size_t i = 0; i < 4 * d.h; ++i) s.z[i] += hz[i];
    s.gates.resize(4 * d.h);
    s.c.resize(d.h);
    s.a.resize(d.h);
    s.h.resize(d.h);
    for (std::size_t j = 0; j < d.h; ++j) {
        const double ig = sigmoid(s.z[j]);
        const double fg = sigmoid(s.z[d.h + j]);
        const double cand = std::tanh(s.z[2 * d.h + j]);
        const double og = sigmoid(s.z[3 * d.h + j]);
        s.gates[j] = ig;
        s.gates[d.h + j] = fg;
        s.gates[2 * d.h + j] = cand;
        s.gates[3 * d.h + j] = og;
        s.c[j] = fg * s.c_prev[j] + ig * cand;
        s.a[j] = std::tanh(s.c[j]);
        s.h[j] = og * s.a[j];
    }
}

// Accumulates dWx/dWh/db into g, returns dx / dh_prev / dc_prev.
void cell_backward(const double* p, double* g, const CellDims& d, const CellStep& s,
                   const Vec& dh, const Vec& dc_in, Vec& dx, Vec& dh_prev, Vec& dc_prev) {
    Vec dz(4 * d.h);
    dc_prev.assign(d.h, 0.0);
    for (std::size_t j = 0; j < d.h; ++j) {
        const double ig = s.gates[j], fg = s.gates[d.h + j];
        const double cand = s.gates[2 * d.h + j], og = s.gates[3 * d.h + j];
        const double da = dh[j] * og;
        const double dc = da * (1.0 - s.a[j] * s.a[j]) + dc_in[j];
        const double d_og = dh[j] * s.a[j];
        dz[j] = dc * cand * ig * (1.0 - ig);
        dz[d.h + j] = dc * s.c_prev[j] * fg * (1.0 - fg);
        dz[2 * d.h + j] = dc * ig * (1.0 - cand * cand);
        dz[3 * d.h + j] = d_og * og * (1.0 - og);
        dc_prev[j] = dc * fg;
    }
    kern::ger_acc(g, dz.data(), 4 * d.h, s.x.data(), d.in, 1.0);
    kern::ger_acc(g + d.wx(), dz.data(), 4 * d.h, s.h_prev.data(), d.h, 1.0);
    kern::axpy(1.0, dz.data(), g + d.wx() + d.wh(), 4 * d.h);
    dx.assign(d.in, 0.0);
    kern::gemv_t_acc(p, 4 * d.h, d.in, dz.data(), dx.data());
    dh_prev.assign(d.h, 0.0);
    kern::gemv_t_acc(p + d.wx(), 4 * d.h, d.h, dz.data(), dh_prev.data());
}

} // namespace

// Parameter layout and forward/backward of the full network.
struct NmtGraph {
    std::size_t vs, vt, de, h, att;
    CellDims enc{0, 0}, dec{0, 0};

    // offsets into the flat parameter vector
    std::size_t o_es, o_encf, o_encb, o_wh, o_ws, o_v, o_et, o_dec, o_wo, o_bo, total;

    explicit NmtGraph(std::size_t src_vocab, std::size_t tgt_vocab, const NmtConfig& cfg) {
        vs = src_vocab;
        vt = tgt_vocab;
        de = cfg.embed_dim;
        h = cfg.hidden;
        att = cfg.attention_dim;
        enc = CellDims{de, h};
        dec = CellDims{de + 2 * h, h};
        std::size_t off = 0;
        auto take = [&off](std::size_t n) { const std::size_t o = off; off += n; return o; };
        o_es = take(vs * de);
        o_encf = take(enc.total());
        o_encb = take(enc.total());
        o_wh = take(att * 2 * h);
        o_ws = take(att * h);
        o_v = take(att);
        o_et = take(vt * de);
        o_dec = take(dec.total());
        o_wo = take(vt * 3 * h);
        o_bo = take(vt);
        total = off;
    }

    void init(Vec& p, std::uint64_t seed) const {
        p.assign(total, 0.0);
        Rng rng(seed);
        auto glorot = [&](std::size_t off, std::size_t rows, std::size_t cols) {
            const double lim = std::sqrt(6.0 / static_cast<double>(rows + cols));
            for (std::size_t i = 0; i < rows * cols; ++i) p[off + i] = rng.uniform(-lim, lim);
        };
        glorot(o_es, vs, de);
        glorot(o_encf, 4 * h, de + h);
        glorot(o_encb, 4 * h, de + h);
        glorot(o_wh, att, 2 * h);
        glorot(o_ws, att, h);
        glorot(o_v, 1, att);
        glorot(o_et, vt, de);
        glorot(o_dec, 4 * h, de + 2 * h + h);
        glorot(o_wo, vt, 3 * h);
        // forget-gate biases at 1
        for (std::size_t j = 0; j < h; ++j) {
            p[o_encf + enc.wx() + enc.wh() + h + j] = 1.0;
            p[o_encb + enc.wx() + enc.wh() + h + j] = 1.0;
            p[o_dec + dec.wx() + dec.wh() + h + j] = 1.0;
        }
    }

    struct EncoderState {
        std::vector<CellStep> fwd, bwd;
        std::vector<Vec> states;   // per position, 2h (fwd | bwd)
        std::vector<Vec> proj;     // W_h * state, att
        std::vector<int> tokens;
    };

    void encode(const Vec& p, const std::vector<int>& tokens, EncoderState& es) const {
        const std::size_t n = tokens.size();
        es.tokens = tokens;
        es.fwd.resize(n);
        es.bwd.resize(n);
        Vec hf(h, 0.0), cf(h, 0.0);
        for (std::size_t t = 0; t < n; ++t) {
            CellStep& s = es.fwd[t];
            s.x.assign(p.data() + o_es + static_cast<std::size_t>(tokens[t]) * de,
                       p.data() + o_es + static_cast<std::size_t>(tokens[t]) * de + de);
            s.h_prev = hf;
            s.c_prev = cf;
            cell_forward(p.data() + o_encf, enc, s);
            hf = s.h;
            cf = s.c;
        }
        Vec hb(h, 0.0), cb(h, 0.0);
        for (std::size_t t = n; t-- > 0;) {
            CellStep& s = es.bwd[t];
            s.x.assign(p.data() + o_es + static_cast<std::size_t>(tokens[t]) * de,
                       p.data() + o_es + static_cast<std::size_t>(tokens[t]) * de + de);
            s.h_prev = hb;
            s.c_prev = cb;
            cell_forward(p.data() + o_encb, enc, s);
            hb = s.h;
            cb = s.c;
        }
        es.states.assign(n, Vec(2 * h));
        es.proj.assign(n, Vec(att));
        for (std::size_t t = 0; t < n; ++t) {
            std::copy(es.fwd[t].h.begin(), es.fwd[t].h.end(), es.states[t].begin());
            std::copy(es.bwd[t].h.begin(), es.bwd[t].h.end(), es.states[t].begin() + static_cast<std::ptrdiff_t>(h));
            kern::gemv(p.data() + o_wh, att, 2 * h, es.states[t].data(), nullptr, es.proj[t].data());
        }
    }

    struct AttnStep {
        Vec query;        // decoder state used as query (h)
        Vec tanh_arg;     // n x att flattened
        Vec alpha;        // n
        Vec context;      // 2h
    };

    void attend(const Vec& p, const EncoderState& es, const Vec& query, AttnStep& a) const {
        const std::size_t n = es.states.size();
        Vec wsq(att, 0.0);
        kern::gemv(p.data() + o_ws, att, h, query.data(), nullptr, wsq.data());
        a.query = query;
        a.tanh_arg.assign(n * att, 0.0);
        Vec scores(n);
        for (std::size_t i = 0; i < n; ++i) {
            double e = 0.0;
            for (std::size_t k = 0; k < att; ++k) {
                const double th = std::tanh(wsq[k] + es.proj[i][k]);
                a.tanh_arg[i * att + k] = th;
                e += p[o_v + k] * th;
            }
            scores[i] = e;
        }
        const double mx = *std::max_element(scores.begin(), scores.end());
        double zsum = 0.0;
        a.alpha.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            a.alpha[i] = std::exp(scores[i] - mx);
            zsum += a.alpha[i];
        }
        for (auto& v : a.alpha) v /= zsum;
        a.context.assign(2 * h, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            kern::axpy(a.alpha[i], es.states[i].data(), a.context.data(), 2 * h);
    }

    // returns d_query; accumulates grads and dH (per-position encoder-state grads)
    void attend_backward(const Vec& p, Vec& g, const EncoderState& es, const AttnStep& a,
                         const Vec& d_context, std::vector<Vec>& dH, Vec& d_query) const {
        const std::size_t n = es.states.size();
        Vec dalpha(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            dalpha[i] = kern::dot(es.states[i].data(), d_context.data(), 2 * h);
            kern::axpy(a.alpha[i], d_context.data(), dH[i].data(), 2 * h);
        }
        double dot_ad = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot_ad += a.alpha[i] * dalpha[i];
        Vec dwsq(att, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double de_i = a.alpha[i] * (dalpha[i] - dot_ad);
            for (std::size_t k = 0; k < att; ++k) {
                const double th = a.tanh_arg[i * att + k];
                const double dth = de_i * p[o_v + k] * (1.0 - th * th);
                g[o_v + k] += de_i * th;
                dwsq[k] += dth;
                // proj_i = W_h states_i
                for (std::size_t c = 0; c < 2 * h; ++c) {
                    g[o_wh + k * 2 * h + c] += dth * es.states[i][c];
                    dH[i][c] += dth * p[o_wh + k * 2 * h + c];
                }
            }
        }
        kern::ger_acc(g.data() + o_ws, dwsq.data(), att, a.query.data(), h, 1.0);
        d_query.assign(h, 0.0);
        kern::gemv_t_acc(p.data() + o_ws, att, h, dwsq.data(), d_query.data());
    }

    // teacher-forced loss and gradients for one sample
    double sample_loss_grad(const Vec& p, Vec& g, const std::vector<int>& src,
                            const std::vector<int>& tgt_words) const {
        EncoderState es;
        encode(p, src, es);
        const std::size_t n = es.states.size();
        const std::size_t steps = tgt_words.size();  // includes <eos>, excludes <sos>

        std::vector<AttnStep> atts(steps);
        std::vector<CellStep> dsteps(steps);
        std::vector<Vec> probs(steps);
        Vec hd(h, 0.0), cd(h, 0.0);
        double loss = 0.0;
        for (std::size_t t = 0; t < steps; ++t) {
            attend(p, es, hd, atts[t]);
            const int prev = t == 0 ? 0 : tgt_words[t - 1];  // 0 = <sos>
            CellStep& s = dsteps[t];
            s.x.resize(de + 2 * h);
            std::copy(p.data() + o_et + static_cast<std::size_t>(prev) * de,
                      p.data() + o_et + static_cast<std::size_t>(prev) * de + de, s.x.begin());
            std::copy(atts[t].context.begin(), atts[t].context.end(),
                      s.x.begin() + static_cast<std::ptrdiff_t>(de));
            s.h_prev = hd;
            s.c_prev = cd;
            cell_forward(p.data() + o_dec, dec, s);
            hd = s.h;
            cd = s.c;

            Vec feat(3 * h);
            std::copy(s.h.begin(), s.h.end(), feat.begin());
            std::copy(atts[t].context.begin(), atts[t].context.end(),
                      feat.begin() + static_cast<std::ptrdiff_t>(h));
            Vec logits(vt, 0.0);
            kern::gemv(p.data() + o_wo, vt, 3 * h, feat.data(), p.data() + o_bo, logits.data());
            const double mx = *std::max_element(logits.begin(), logits.end());
            double z = 0.0;
            for (auto& v : logits) {
                v = std::exp(v - mx);
                z += v;
            }
            for (auto& v : logits) v /= z;
            loss -= std::log(std::max(1e-12, logits[static_cast<std::size_t>(tgt_words[t])]));
            probs[t] = std::move(logits);
        }

        // backward
        std::vector<Vec> dH(n, Vec(2 * h, 0.0));
        Vec dh_next(h, 0.0), dc_next(h, 0.0);
        for (std::size_t t = steps; t-- > 0;) {
            Vec dlog = probs[t];
            dlog[static_cast<std::size_t>(tgt_words[t])] -= 1.0;
            const CellStep& s = dsteps[t];
            Vec feat(3 * h);
            std::copy(s.h.begin(), s.h.end(), feat.begin());
            std::copy(atts[t].context.begin(), atts[t].context.end(),
                      feat.begin() + static_cast<std::ptrdiff_t>(h));
            kern::ger_acc(g.data() + o_wo, dlog.data(), vt, feat.data(), 3 * h, 1.0);
            kern::axpy(1.0, dlog.data(), g.data() + o_bo, vt);
            Vec dfeat(3 * h, 0.0);
            kern::gemv_t_acc(p.data() + o_wo, vt, 3 * h, dlog.data(), dfeat.data());

            Vec dh(h, 0.0);
            for (std::size_t j = 0; j < h; ++j) dh[j] = dfeat[j] + dh_next[j];
            Vec dctx(2 * h, 0.0);
            for (std::size_t j = 0; j < 2 * h; ++j) dctx[j] = dfeat[h + j];

            Vec dx, dh_prev, dc_prev;
            cell_backward(p.data() + o_dec, g.data() + o_dec, dec, s, dh, dc_next, dx, dh_prev,
                          dc_prev);
            // input grads: embedding slice + attention context slice
            const int prev = t == 0 ? 0 : tgt_words[t - 1];
            kern::axpy(1.0, dx.data(), g.data() + o_et + static_cast<std::size_t>(prev) * de, de);
            for (std::size_t j = 0; j < 2 * h; ++j) dctx[j] += dx[de + j];

            Vec d_query;
            attend_backward(p, g, es, atts[t], dctx, dH, d_query);
            // the query was the previous decoder state
            for (std::size_t j = 0; j < h; ++j) dh_prev[j] += d_query[j];
            dh_next = std::move(dh_prev);
            dc_next = std::move(dc_prev);
        }

        // encoder backward: per-position state grads split into fwd/bwd stacks
        Vec dhf(h, 0.0), dcf(h, 0.0);
        for (std::size_t t = n; t-- > 0;) {
            Vec dh(h);
            for (std::size_t j = 0; j < h; ++j) dh[j] = dH[t][j] + dhf[j];
            Vec dx, dh_prev, dc_prev;
            cell_backward(p.data() + o_encf, g.data() + o_encf, enc, es.fwd[t], dh, dcf, dx,
                          dh_prev, dc_prev);
            kern::axpy(1.0, dx.data(),
                       g.data() + o_es + static_cast<std::size_t>(es.tokens[t]) * de, de);
            dhf = std::move(dh_prev);
            dcf = std::move(dc_prev);
        }
        Vec dhb(h, 0.0), dcb(h, 0.0);
        for (std::size_t t = 0; t < n; ++t) {
            Vec dh(h);
            for (std::size_t j = 0; j < h; ++j) dh[j] = dH[t][h + j] + dhb[j];
            Vec dx, dh_prev, dc_prev;
            cell_backward(p.data() + o_encb, g.data() + o_encb, enc, es.bwd[t], dh, dcb, dx,
                          dh_prev, dc_prev);
            kern::axpy(1.0, dx.data(),
                       g.data() + o_es + static_cast<std::size_t>(es.tokens[t]) * de, de);
            dhb = std::move(dh_prev);
            dcb = std::move(dc_prev);
        }
        return loss / static_cast<double>(steps);
    }

    std::vector<int> greedy_decode(const Vec& p, const std::vector<int>& src,
                                   std::size_t max_len) const {
        EncoderState es;
        encode(p, src, es);
        std::vector<int> out;
        Vec hd(h, 0.0), cd(h, 0.0);
        int prev = 0;  // <sos>
        for (std::size_t t = 0; t < max_len; ++t) {
            AttnStep a;
            attend(p, es, hd, a);
            CellStep s;
            s.x.resize(de + 2 * h);
            std::copy(p.data() + o_et + static_cast<std::size_t>(prev) * de,
                      p.data() + o_et + static_cast<std::size_t>(prev) * de + de, s.x.begin());
            std::copy(a.context.begin(), a.context.end(),
                      s.x.begin() + static_cast<std::ptrdiff_t>(de));
            s.h_prev = hd;
            s.c_prev = cd;
            cell_forward(p.data() + o_dec, dec, s);
            hd = s.h;
            cd = s.c;
            Vec feat(3 * h);
            std::copy(s.h.begin(), s.h.end(), feat.begin());
            std::copy(a.context.begin(), a.context.end(),
                      feat.begin() + static_cast<std::ptrdiff_t>(h));
            Vec logits(vt, 0.0);
            kern::gemv(p.data() + o_wo, vt, 3 * h, feat.data(), p.data() + o_bo, logits.data());
            const int best = static_cast<int>(
                std::max_element(logits.begin(), logits.end()) - logits.begin());
            if (best == 1) break;  // <eos>
            out.push_back(best);
            prev = best;
        }
        return out;
    }
};

Translator Translator::train(const Corpus& corpus, const NmtConfig& cfg) {
    Translator tr;
    tr.cfg_ = cfg;
    tr.vocab_ = {"<sos>", "<eos>"};
    for (const auto& e : corpus.train)
        for (const auto& w : split_words(e.target_text))
            if (!tr.word_index_.count(w)) {
                tr.word_index_[w] = static_cast<int>(tr.vocab_.size());
                tr.vocab_.push_back(w);
            }

    std::vector<std::vector<int>> srcs, tgts;
    for (const auto& e : corpus.train) {
        srcs.push_back(e.source_tokens);
        std::vector<int> t;
        for (const auto& w : split_words(e.target_text)) t.push_back(tr.word_index_.at(w));
        t.push_back(1);  // <eos>
        tgts.push_back(std::move(t));
    }

    NmtGraph graph(kSourceVocab, tr.vocab_.size(), cfg);
    graph.init(tr.params_, cfg.seed);
    Vec grads(graph.total, 0.0);

    // Adam over the flat parameter vector
    Vec m(graph.total, 0.0), v(graph.total, 0.0);
    std::uint64_t step = 0;
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8;

    Rng rng(cfg.seed);
    std::vector<std::size_t> order(srcs.size());
    std::iota(order.begin(), order.end(), 0);

    for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss = 0.0;
        for (std::size_t idx : order) {
            std::fill(grads.begin(), grads.end(), 0.0);
            epoch_loss += graph.sample_loss_grad(tr.params_, grads, srcs[idx], tgts[idx]);
            double norm = 0.0;
            for (double gv : grads) norm += gv * gv;
            norm = std::sqrt(norm);
            const double scale = norm > 5.0 ? 5.0 / norm : 1.0;
            ++step;
            const double bc1 = 1.0 - std::pow(b1, static_cast<double>(step));
            const double bc2 = 1.0 - std::pow(b2, static_cast<double>(step));
            for (std::size_t i = 0; i < graph.total; ++i) {
                const double gi = grads[i] * scale;
                m[i] = b1 * m[i] + (1.0 - b1) * gi;
                v[i] = b2 * v[i] + (1.0 - b2) * gi * gi;
                tr.params_[i] -= cfg.lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
            }
        }
        epoch_loss /= static_cast<double>(srcs.size());
        if (cfg.verbose)
            std::cerr << "nmt epoch " << epoch << " loss " << epoch_loss << "\n";
        if ((epoch + 1) % cfg.check_every == 0 && epoch_loss < 0.10) {
            if (tr.exact_match(corpus.train) >= 1.0) break;
        }
    }
    return tr;
}

std::string Translator::translate(const std::vector<int>& source_tokens) const {
    if (params_.empty()) throw std::runtime_error("translator not trained");
    for (int t : source_tokens)
        if (t < 0 || t >= kSourceVocab)
            throw UnknownToken("token " + std::to_string(t) + " outside the vocabulary");
    NmtGraph graph(kSourceVocab, vocab_.size(), cfg_);
    const auto ids = graph.greedy_decode(params_, source_tokens, cfg_.max_decode_len);
    std::vector<std::string> words;
    for (int id : ids) words.push_back(vocab_[static_cast<std::size_t>(id)]);
    return join_words(words);
}

std::string Translator::translate(const std::vector<CorpusFeatures>& messages) const {
    std::vector<int> tokens;
    for (const auto& msg : messages) {
        const MessageTokens t = tokenize(msg);
        tokens.insert(tokens.end(), t.begin(), t.end());
    }
    return translate(tokens);
}

double Translator::exact_match(const std::vector<CorpusEntry>& entries) const {
    if (entries.empty()) return 1.0;
    std::size_t ok = 0;
    for (const auto& e : entries)
        if (translate(e.source_tokens) == e.target_text) ++ok;
    return static_cast<double>(ok) / static_cast<double>(entries.size());
}

void Translator::save_file(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    os.write("VGMT", 4);
    auto put64 = [&](std::uint64_t x) { os.write(reinterpret_cast<const char*>(&x), 8); };
    put64(cfg_.embed_dim);
    put64(cfg_.hidden);
    put64(cfg_.attention_dim);
    put64(cfg_.max_decode_len);
    put64(vocab_.size());
    for (const auto& w : vocab_) {
        put64(w.size());
        os.write(w.data(), static_cast<std::streamsize>(w.size()));
    }
    put64(params_.size());
    os.write(reinterpret_cast<const char*>(params_.data()),
             static_cast<std::streamsize>(params_.size() * sizeof(double)));
}

Translator Translator::load_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::string(magic, 4) != "VGMT") throw std::runtime_error("not a translator file");
    auto get64 = [&] {
        std::uint64_t x;
        is.read(reinterpret_cast<char*>(&x), 8);
        return x;
    };
    Translator tr;
    tr.cfg_.embed_dim = get64();
    tr.cfg_.hidden = get64();
    tr.cfg_.attention_dim = get64();
    tr.cfg_.max_decode_len = get64();
    const std::uint64_t nv = get64();
    for (std::uint64_t i = 0; i < nv; ++i) {
        const std::uint64_t len = get64();
        std::string w(len, '\0');
        is.read(w.data(), static_cast<std::streamsize>(len));
        tr.word_index_[w] = static_cast<int>(tr.vocab_.size());
        tr.vocab_.push_back(std::move(w));
    }
    const std::uint64_t np = get64();
    tr.params_.resize(np);
    is.read(reinterpret_cast<char*>(tr.params_.data()),
            static_cast<std::streamsize>(np * sizeof(double)));
    if (!is) throw std::runtime_error("translator file truncated");
    return tr;
}

} // namespace vigil::explain
