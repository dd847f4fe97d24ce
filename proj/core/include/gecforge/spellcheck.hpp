#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "gecforge/corpus.hpp"
#include "gecforge/lm.hpp"

namespace gecforge {

// Known-word list with frequencies, indexed by length for bounded edit
// distance candidate lookups. Membership tests ignore ASCII case; candidate
// surfaces keep the casing they were added with.
class Vocabulary {
 public:
  void add(const std::string& word, std::uint64_t count = 1);

  // One word per line, optionally "word<TAB>count". '#' comments and blank
  // lines are skipped.
  static Vocabulary from_word_list(std::istream& in);
  // Counts every token of a one-sentence-per-line corpus.
  static Vocabulary from_corpus(std::istream& in);

  void save(std::ostream& out) const;

  bool contains(const std::string& token) const;
  std::uint64_t frequency(const std::string& word) const;
  std::size_t size() const { return counts_.size(); }

  struct Near {
    std::string word;
    std::size_t distance = 0;
    std::uint64_t frequency = 0;
  };
  // All vocabulary words within `max_distance` character edits of token
  // (case-insensitive distance). Only length buckets that can possibly be in
  // range are scanned.
  std::vector<Near> near_words(const std::string& token,
                               std::size_t max_distance) const;

 private:
  std::unordered_map<std::string, std::uint64_t> counts_;  // exact surface
  std::unordered_set<std::string> lowercase_;
  std::unordered_map<std::size_t, std::vector<std::string>> by_length_;
};

struct SpellConfig {
  std::size_t max_edit_distance = 2;
  std::size_t max_candidates = 10;
  // Weight on the language model delta; 0 disables LM re-ranking and keeps
  // the distance/frequency order, matching a plain spellchecker.
  double lm_weight = 1.0;
  // When false, candidate ranking ignores frequency (distance, then word).
  bool frequency_tiebreak = true;

  void validate() const;
};

// Positions of misspelled tokens: alphabetic tokens missing from the
// vocabulary. Punctuation, numbers and mixed tokens are never flagged.
std::vector<std::size_t> detect_misspellings(const Sentence& sentence,
                                             const Vocabulary& vocab);

// Ranked correction candidates for one token: by edit distance, then
// frequency (descending, if enabled), then word. Truncated to
// max_candidates, after which the original token is appended as the
// keep-option if not already present.
std::vector<std::string> spell_candidates(const std::string& token,
                                          const Vocabulary& vocab,
                                          const SpellConfig& config);

struct SpellResult {
  Sentence corrected;
  std::vector<Edit> edits;  // single-token substitutions, span-sorted
};

// Whole-sentence correction. Every flagged token (and every token whose
// lowercase form is in capital_words but is not written capitalized) is
// re-ranked by the change in sentence log probability; the original token
// competes as a zero-delta candidate, so the output never scores below the
// input. Ties fall back to smaller edit distance, then the original, then
// the lexicographically smaller word.
SpellResult spell_correct(const Sentence& sentence, const NGramLm& lm,
                          const Vocabulary& vocab,
                          const std::unordered_set<std::string>& capital_words,
                          const SpellConfig& config);

}  // namespace gecforge
