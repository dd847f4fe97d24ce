#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "gecforge/corpus.hpp"

namespace gecforge {

// Interpolated trigram language model with add-alpha unigram smoothing.
//
// p(w | u, v) = L3 * c3(u,v,w)/r3(u,v) + L2 * c2(v,w)/r2(v)
//              + L1 * (c1(w) + alpha) / (N + alpha * E)
//
// over the event space E = word types + UNK + EOS. When a context row has no
// counts, its weight folds into the next lower order (L3 into L2, L2 into
// L1), so the distribution sums to exactly one over the event space for any
// context and every event has positive probability.
class NGramLm {
 public:
  struct Options {
    double lambda1 = 0.1;  // unigram weight
    double lambda2 = 0.3;  // bigram weight
    double lambda3 = 0.6;  // trigram weight
    double alpha = 0.5;    // unigram smoothing

    // Lambdas must be non-negative and sum to 1 (within 1e-9); alpha and
    // lambda1 must be positive so every event keeps positive probability.
    void validate() const;
  };

  static constexpr const char* kBos = "<s>";
  static constexpr const char* kEos = "</s>";
  static constexpr const char* kUnk = "<unk>";

  // Trains on a corpus of one sentence per line, whitespace tokens. Blank
  // lines are skipped. Sentences are padded with two BOS and one EOS; BOS
  // appears only as context, EOS only as a predicted event. Unigram counts
  // cover real word tokens only.
  static NGramLm train(std::istream& corpus, const Options& options);
  static NGramLm train(std::istream& corpus) {
    return train(corpus, Options{});
  }

  // Conditional probability of `word` after context (u, v). Words and
  // context tokens outside the vocabulary are treated as UNK; kBos/kEos name
  // the boundary markers. Always positive.
  double prob(const std::string& word, const std::string& u,
              const std::string& v) const;

  // Natural-log probability of the sentence including the EOS transition.
  // An empty sentence scores log p(EOS | BOS, BOS).
  double sentence_logprob(const Sentence& sentence) const;

  // Per-transition log probabilities; entry t predicts token t, the last
  // entry predicts EOS. Size is sentence.size() + 1.
  std::vector<double> transition_logprobs(const Sentence& sentence) const;

  // A scored sentence keeps its id row so single-token substitutions can be
  // rescored without touching the unaffected transitions.
  struct ScoredSentence {
    std::vector<int> ids;           // [BOS BOS w1 .. wT EOS]
    std::vector<double> logprobs;   // T + 1 transitions
    double total = 0.0;
  };
  ScoredSentence analyze(const Sentence& sentence) const;

  // Change in total log probability if token `pos` were replaced; only the
  // up-to-three affected transitions are recomputed.
  double substitution_delta(const ScoredSentence& scored, std::size_t pos,
                            const std::string& replacement) const;

  // All scoreable events: every word type, then UNK, then EOS. Summing
  // prob() over this list is 1 for any context.
  std::vector<std::string> event_space() const;

  std::size_t word_count() const { return words_.size() - kFirstWordId; }
  std::size_t event_size() const { return word_count() + 2; }
  std::uint64_t token_count() const { return total_words_; }
  const Options& options() const { return options_; }

  // Versioned text format; save/load/score is bit-identical because counts
  // are integers and the options round-trip as hex floats.
  void save(std::ostream& out) const;
  static NGramLm load(std::istream& in);

 private:
  static constexpr int kBosId = 0;
  static constexpr int kEosId = 1;
  static constexpr int kUnkId = 2;
  static constexpr int kFirstWordId = 3;

  int intern(const std::string& word);
  int id_or_unk(const std::string& word) const;
  void count_sentence(const std::vector<int>& ids);
  double prob_id(int w, int u, int v) const;

  Options options_;
  std::vector<std::string> words_;  // index = id; [0..2] are markers
  std::unordered_map<std::string, int> word_ids_;
  std::vector<std::uint64_t> c1_;   // unigram counts by id, words only
  std::uint64_t total_words_ = 0;   // N
  std::vector<std::uint64_t> r2_;   // bigram row sums by context id
  std::unordered_map<std::uint64_t, std::uint64_t> c2_;  // (v,w) counts
  std::unordered_map<std::uint64_t, std::uint64_t> c3_;  // (u,v,w) counts
  std::unordered_map<std::uint64_t, std::uint64_t> r3_;  // (u,v) row sums
};

// Capitalization list extraction: lowercase words that appear capitalized
// mid-sentence far more often than lowercase anywhere. Tokens are counted as
// capitalized only at position > 0 of their line; the first token of a line
// is capitalized by convention and says nothing.
struct CapitalConfig {
  // With use_margin false (the default), a word qualifies when
  // cap_count > ratio * low_count; otherwise when
  // cap_count > low_count + margin.
  double ratio = 99.0;
  double margin = 99.0;
  bool use_margin = false;
  std::uint64_t min_capital_count = 10;
};

std::vector<std::string> extract_capital_words(std::istream& corpus,
                                               const CapitalConfig& config =
                                                   {});

}  // namespace gecforge
