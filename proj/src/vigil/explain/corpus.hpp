#pragma once
// Parallel corpus for the message translator.
//
// Six features per message (source address, source subaddress, destination
// address, destination subaddress, is-mode-command, data count) map to six
// globally-offset tokens; destination text comes from the ICD role mapping
// and mode-code table. Multi-message samples join their unit texts with
// ", and then ".

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vigil/detect/features.hpp"
#include "vigil/sim/icd.hpp"

namespace vigil::explain {

struct UnmappedSubaddress : std::runtime_error {
    explicit UnmappedSubaddress(const std::string& w) : std::runtime_error(w) {}
};

constexpr std::size_t kCorpusFeatures = 6;
constexpr std::array<int, kCorpusFeatures> kTokenOffsets = {0, 33, 66, 98, 131, 133};
constexpr std::array<int, kCorpusFeatures> kFeatureMax = {32, 32, 32, 32, 1, 32};
constexpr int kSourceVocab = 166;  // last token: 133 + 32

struct CorpusFeatures {
    int src_addr = 0;
    int src_sub = 0;
    int dst_addr = 0;
    int dst_sub = 0;
    int is_mode = 0;
    int count = 0;

    bool operator==(const CorpusFeatures&) const = default;
};

using MessageTokens = std::array<int, kCorpusFeatures>;

CorpusFeatures corpus_features(const detect::FeatureVector& fv);
CorpusFeatures corpus_features(const bus::Message& msg);

MessageTokens tokenize(const CorpusFeatures& f);
// Inverts tokenization by range membership alone; the single shared range
// boundary (token 98) is resolved by which destination slot the other
// tokens occupy, which the BC subaddress convention makes unique.
CorpusFeatures detokenize(const MessageTokens& t);

// Range-disjointness of the offsets: offset_i + max_i <= offset_{i+1}
// (boundary contact allowed, see detokenize).
bool offsets_disjoint();

// Human-language description per the ICD role mapping. Throws
// UnmappedSubaddress when the ICD carries no mapping for a data endpoint.
std::string describe_message(const sim::Icd& icd, const CorpusFeatures& f);

constexpr const char* kJoinText = ", and then ";

struct CorpusEntry {
    std::vector<int> source_tokens;  // 6 tokens per message
    std::string target_text;
};

struct Corpus {
    std::vector<CorpusEntry> train;
    std::vector<CorpusEntry> held_out_pairs;  // unseen 2-message compositions
};

// Template roster the corpus builder enumerates from the ICD: every
// scheduled transfer, the canonical transfer of every mapped subaddress,
// and every mode command per terminal plus its broadcast form.
std::vector<CorpusFeatures> enumerate_templates(const sim::Icd& icd);

struct CorpusConfig {
    int max_join = 3;              // B
    double train_pair_fraction = 0.45;
    std::size_t held_out_pairs = 100;
    std::size_t triples = 48;
    std::vector<int> count_variants = {1, 2, 4, 8, 12, 32};
    std::uint64_t seed = 13;
};

Corpus generate_corpus(const sim::Icd& icd, const std::vector<CorpusFeatures>& messages,
                       const CorpusConfig& cfg);

} // namespace vigil::explain
