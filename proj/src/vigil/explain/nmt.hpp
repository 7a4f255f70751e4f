#pragma once
// Token-sequence to human-language translator: single-layer bidirectional
// LSTM encoder, additive-attention LSTM decoder, greedy decoding.
// Word-level target vocabulary built from the corpus.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vigil/explain/corpus.hpp"

namespace vigil::explain {

struct UnknownToken : std::runtime_error {
    explicit UnknownToken(const std::string& w) : std::runtime_error(w) {}
};

struct NmtConfig {
    std::size_t embed_dim = 32;
    std::size_t hidden = 64;
    std::size_t attention_dim = 64;
    double lr = 2e-3;
    std::size_t max_epochs = 400;
    std::size_t check_every = 10;     // train exact-match probe interval
    std::size_t max_decode_len = 48;
    std::uint64_t seed = 31;
    bool verbose = false;
};

class Translator {
public:
    Translator() = default;

    static Translator train(const Corpus& corpus, const NmtConfig& cfg);

    std::string translate(const std::vector<int>& source_tokens) const;  // greedy
    std::string translate(const std::vector<CorpusFeatures>& messages) const;

    double exact_match(const std::vector<CorpusEntry>& entries) const;

    void save_file(const std::string& path) const;
    static Translator load_file(const std::string& path);

    const std::vector<std::string>& target_vocab() const { return vocab_; }

private:
    friend struct NmtGraph;
    NmtConfig cfg_;
    std::vector<std::string> vocab_;          // index -> word; [0]=<sos>, [1]=<eos>
    std::map<std::string, int> word_index_;
    std::vector<double> params_;
};

} // namespace vigil::explain
