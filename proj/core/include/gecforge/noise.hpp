#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "gecforge/corpus.hpp"
#include "gecforge/lexicon.hpp"
#include "gecforge/rng.hpp"

namespace gecforge {

// Maps a correct token to the spellings annotators corrected into it,
// including the token itself (the identity "variant" counts how often the
// token needed no fixing). Variants are sorted by count descending, then
// token ascending; keys iterate in sorted order.
class EditDictionary {
 public:
  struct Variant {
    std::string token;
    std::uint64_t count = 0;

    friend bool operator==(const Variant&, const Variant&) = default;
  };

  using Entries = std::map<std::string, std::vector<Variant>>;

  const Entries& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  const std::vector<Variant>* find(const std::string& token) const;

  // Draws a variant with probability proportional to its count.
  const std::string& sample(const std::vector<Variant>& variants,
                            SplitRng& rng) const;

  void save(std::ostream& out) const;
  static EditDictionary load(std::istream& in);

  // Used by DictionaryBuilder and tests.
  void insert(const std::string& token, std::vector<Variant> variants);

 private:
  Entries entries_;
};

// Streaming accumulator for building an EditDictionary from annotated pairs.
// For every annotation, tokens outside any edit span count as themselves
// under their own key, and single-token edits count the source spelling
// under the corrected token's key. Edits spanning zero or several tokens on
// either side carry no token-level signal and are skipped.
class DictionaryBuilder {
 public:
  void add(const AnnotatedPair& pair);
  void add_observation(const std::string& correct, const std::string& observed,
                       std::uint64_t count = 1);

  // Prunes variants seen fewer than min_count times, then drops entries whose
  // only surviving variant is the key itself.
  EditDictionary finish(std::uint64_t min_count) const;

 private:
  std::unordered_map<std::string, std::unordered_map<std::string, std::uint64_t>>
      counts_;
};

enum class NoiseMode { kRealistic, kRandom };

struct NoisingConfig {
  NoiseMode mode = NoiseMode::kRealistic;
  // Probability that a token with a dictionary entry is replaced by a drawn
  // variant.
  double token_error_prob = 0.9;
  // Probability that a typed token (preposition, noun, verb) without a
  // dictionary entry gets a type-based error.
  double type_error_prob = 0.1;
  // Per-operation probability for the random mode.
  double random_op_prob = 0.1;
  std::uint64_t seed = 0;
  // Prepositions drawn by the preposition scenario. Empty means "use the
  // lexicon's set". Must contain the empty token when set explicitly.
  std::vector<std::string> preposition_set;

  // Throws ValidationError on out-of-range probabilities or a non-empty
  // preposition set without the empty token.
  void validate() const;
};

// Counters reported by the noisers, for rate checks and logging.
struct NoiseStats {
  std::uint64_t tokens = 0;
  // realistic mode
  std::uint64_t dictionary_tokens = 0;
  std::uint64_t dictionary_draws = 0;
  std::uint64_t typed_tokens = 0;
  std::uint64_t type_draws = 0;
  // random mode; *_draws and delete_suppressed record opportunities so the
  // per-operation firing rates can be measured against the right base.
  std::uint64_t insertions = 0;
  std::uint64_t deletions = 0;
  std::uint64_t delete_suppressed = 0;
  std::uint64_t substitutions = 0;
  std::uint64_t swaps = 0;
  std::uint64_t swap_draws = 0;

  void operator+=(const NoiseStats& other);
};

// Dictionary-and-type-based noising of one sentence. Every token draws at
// most one scenario: a dictionary variant if the token has an entry, else a
// type-based error if the lexicon types it. Unselected tokens are copied.
Sentence noise_sentence(const Sentence& clean, const EditDictionary& dict,
                        const MorphLexicon& lexicon,
                        const NoisingConfig& config, SplitRng& rng,
                        NoiseStats* stats = nullptr);

// Random baseline: per position, insert a vocabulary token before it, delete
// it, or substitute it, each with probability random_op_prob; afterwards,
// swap adjacent output tokens with the same probability. A deletion that
// would leave the output empty with no tokens left to process is skipped, so
// a non-empty input never noises to an empty sentence.
Sentence noise_random(const Sentence& clean,
                      const std::vector<std::string>& vocabulary,
                      const NoisingConfig& config, SplitRng& rng,
                      NoiseStats* stats = nullptr);

struct GenerateResult {
  std::uint64_t lines_in = 0;
  std::uint64_t pairs_out = 0;
  NoiseStats stats;
};

// Streams a clean corpus (one sentence per line, whitespace tokens) and
// writes `repetitions` noised copies of every line as "noised<TAB>clean"
// pairs. Line i, repetition r draws from SplitRng::substream(seed, i, r), so
// the output is byte-identical for any worker count. Workers process blocks
// of lines and results are written in input order.
GenerateResult generate_corpus(std::istream& in, std::ostream& out,
                               const EditDictionary& dict,
                               const MorphLexicon& lexicon,
                               const NoisingConfig& config,
                               std::uint64_t repetitions, int workers = 1,
                               const std::vector<std::string>* random_vocab =
                                   nullptr);

// Collects the distinct tokens of a corpus, sorted; vocabulary source for
// the random mode.
std::vector<std::string> collect_vocabulary(std::istream& in);

}  // namespace gecforge
