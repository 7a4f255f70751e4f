#include "vigil/explain/corpus.hpp"

#include <algorithm>
#include <set>

#include "vigil/core/rng.hpp"

namespace vigil::explain {

CorpusFeatures corpus_features(const detect::FeatureVector& fv) {
    return CorpusFeatures{fv.source_address,      fv.source_subaddress, fv.destination_address,
                          fv.destination_subaddress, fv.is_mode_command,  fv.data_count};
}

CorpusFeatures corpus_features(const bus::Message& msg) {
    const sim::Endpoints ep = sim::endpoints_of(msg);
    return CorpusFeatures{ep.src_addr, ep.src_sub, ep.dst_addr, ep.dst_sub,
                          ep.is_mode ? 1 : 0, ep.count};
}

MessageTokens tokenize(const CorpusFeatures& f) {
    const std::array<int, kCorpusFeatures> vals = {f.src_addr, f.src_sub, f.dst_addr,
                                                   f.dst_sub, f.is_mode, f.count};
    MessageTokens t{};
    for (std::size_t i = 0; i < kCorpusFeatures; ++i) {
        if (vals[i] < 0 || vals[i] > kFeatureMax[i])
            throw UnmappedSubaddress("feature value outside its token range");
        t[i] = vals[i] + kTokenOffsets[i];
    }
    return t;
}

CorpusFeatures detokenize(const MessageTokens& t) {
    std::array<int, kCorpusFeatures> vals{};
    std::array<bool, kCorpusFeatures> filled{};
    int boundary_token = -1;

    auto range_of = [](int tok) -> int {
        for (std::size_t i = kCorpusFeatures; i-- > 0;) {
            if (tok >= kTokenOffsets[i] && tok <= kTokenOffsets[i] + kFeatureMax[i])
                return static_cast<int>(i);
        }
        return -1;
    };

    for (int tok : t) {
        if (tok < 0 || tok >= kSourceVocab)
            throw UnmappedSubaddress("token outside the vocabulary");
        // token 98 sits on the shared boundary of the two destination ranges
        if (tok == kTokenOffsets[3]) {
            boundary_token = tok;
            continue;
        }
        const int i = range_of(tok);
        if (i < 0 || filled[static_cast<std::size_t>(i)])
            throw UnmappedSubaddress("tokens do not form one message");
        vals[static_cast<std::size_t>(i)] = tok - kTokenOffsets[static_cast<std::size_t>(i)];
        filled[static_cast<std::size_t>(i)] = true;
    }
    if (boundary_token >= 0) {
        // whichever destination slot remains open claims the boundary token
        const std::size_t slot = filled[2] ? 3 : 2;
        if (filled[slot]) throw UnmappedSubaddress("ambiguous boundary token");
        vals[slot] = boundary_token - kTokenOffsets[slot];
        filled[slot] = true;
    }
    for (bool f : filled)
        if (!f) throw UnmappedSubaddress("missing feature token");
    return CorpusFeatures{vals[0], vals[1], vals[2], vals[3], vals[4], vals[5]};
}

bool offsets_disjoint() {
    for (std::size_t i = 0; i + 1 < kCorpusFeatures; ++i)
        if (kTokenOffsets[i] + kFeatureMax[i] > kTokenOffsets[i + 1]) return false;
    return true;
}

std::string describe_message(const sim::Icd& icd, const CorpusFeatures& f) {
    std::string text = icd.terminal_name(f.src_addr);

    if (f.is_mode) {
        const auto it = icd.mode_codes.find(f.count);
        if (it == icd.mode_codes.end())
            throw UnmappedSubaddress("mode code " + std::to_string(f.count) +
                                     " has no ICD description");
        text += " sending " + it->second;
    } else if (f.src_addr == bus::kBcAddress) {
        text += " sending command";
    } else {
        const sim::SubaddressSpec* sub = icd.subaddress(f.src_addr, f.src_sub);
        if (!sub)
            throw UnmappedSubaddress("no role mapping for terminal " +
                                     std::to_string(f.src_addr) + " subaddress " +
                                     std::to_string(f.src_sub));
        text += " reporting " + sub->description;
    }

    text += " to ";
    if (f.dst_addr == bus::kBcAddress || f.dst_addr == bus::kBroadcastAddress) {
        text += icd.terminal_name(f.dst_addr);
    } else {
        const sim::TerminalSpec* term = icd.terminal(f.dst_addr);
        if (!term)
            throw UnmappedSubaddress("no role mapping for terminal " +
                                     std::to_string(f.dst_addr));
        text += term->name;
        if (f.is_mode) {
            if (!term->mode_target.empty()) text += ", " + term->mode_target;
        } else {
            const sim::SubaddressSpec* sub = icd.subaddress(f.dst_addr, f.dst_sub);
            if (!sub)
                throw UnmappedSubaddress("no role mapping for terminal " +
                                         std::to_string(f.dst_addr) + " subaddress " +
                                         std::to_string(f.dst_sub));
            text += ", " + sub->description;
        }
    }
    return text;
}

std::vector<CorpusFeatures> enumerate_templates(const sim::Icd& icd) {
    std::vector<CorpusFeatures> out;
    auto add = [&](const CorpusFeatures& f) {
        if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
    };

    auto from_template = [](const sim::MessageTemplate& t) {
        return CorpusFeatures{t.src_addr, t.src_sub, t.dst_addr, t.dst_sub,
                              t.is_mode ? 1 : 0, t.word_count};
    };
    for (const auto& p : icd.periodic) add(from_template(p.tmpl));
    for (const auto& a : icd.aperiodic) add(from_template(a.tmpl));

    const int bc = bus::kBcAddress;
    for (const auto& term : icd.terminals) {
        for (const auto& sub : term.subaddresses) {
            if (sub.role == sim::SubRole::AwaitsCommand)
                add(CorpusFeatures{bc, bc, term.address, sub.number, 0, sub.word_count});
            else
                add(CorpusFeatures{term.address, sub.number, bc, bc, 0, sub.word_count});
        }
    }
    for (const auto& [code, desc] : icd.mode_codes) {
        (void)desc;
        add(CorpusFeatures{bc, bc, bus::kBroadcastAddress, 0, 1, code});
        for (const auto& term : icd.terminals)
            add(CorpusFeatures{bc, bc, term.address, 0, 1, code});
    }
    return out;
}

Corpus generate_corpus(const sim::Icd& icd, const std::vector<CorpusFeatures>& messages,
                       const CorpusConfig& cfg) {
    // dedup singles, keep first-seen order
    std::vector<CorpusFeatures> singles;
    for (const auto& m : messages)
        if (std::find(singles.begin(), singles.end(), m) == singles.end()) singles.push_back(m);

    Corpus corpus;
    auto entry_of = [&](const std::vector<CorpusFeatures>& group) {
        CorpusEntry e;
        for (std::size_t i = 0; i < group.size(); ++i) {
            const MessageTokens t = tokenize(group[i]);
            e.source_tokens.insert(e.source_tokens.end(), t.begin(), t.end());
            if (i) e.target_text += kJoinText;
            e.target_text += describe_message(icd, group[i]);
        }
        return e;
    };

    for (const auto& s : singles) corpus.train.push_back(entry_of({s}));

    // count invariance: extra rows per data template with resampled counts
    for (const auto& s : singles) {
        if (s.is_mode) continue;
        for (int c : cfg.count_variants) {
            if (c == s.count) continue;
            CorpusFeatures v = s;
            v.count = c;
            corpus.train.push_back(entry_of({v}));
        }
    }

    // ordered pairs of base templates: a seeded slice trains the join
    // grammar, a disjoint slice is held out for the composition benchmark
    Rng rng(cfg.seed);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < singles.size(); ++i)
        for (std::size_t j = 0; j < singles.size(); ++j)
            if (i != j) pairs.emplace_back(i, j);
    rng.shuffle(pairs);
    const std::size_t n_train_pairs =
        static_cast<std::size_t>(cfg.train_pair_fraction * static_cast<double>(pairs.size()));
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const auto [i, j] = pairs[p];
        if (p < n_train_pairs)
            corpus.train.push_back(entry_of({singles[i], singles[j]}));
        else if (corpus.held_out_pairs.size() < cfg.held_out_pairs)
            corpus.held_out_pairs.push_back(entry_of({singles[i], singles[j]}));
    }

    if (cfg.max_join >= 3) {
        for (std::size_t k = 0; k < cfg.triples && singles.size() >= 3; ++k) {
            const auto i = static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<std::int64_t>(singles.size()) - 1));
            const auto j = static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<std::int64_t>(singles.size()) - 1));
            const auto l = static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<std::int64_t>(singles.size()) - 1));
            corpus.train.push_back(entry_of({singles[i], singles[j], singles[l]}));
        }
    }
    return corpus;
}

} // namespace vigil::explain
