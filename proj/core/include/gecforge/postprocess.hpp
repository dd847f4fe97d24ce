#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gecforge/corpus.hpp"
#include "gecforge/evalstats.hpp"
#include "gecforge/lm.hpp"

namespace gecforge {

struct PostprocessConfig {
  // Most edits lm_select_edits may remove from one sentence.
  std::size_t max_removed_edits = 7;
  // Up to this many edits, removal subsets are enumerated exhaustively;
  // beyond it the search turns greedy.
  std::size_t exhaustive_edit_limit = 12;
  // Largest category subset category_filter_search may drop.
  std::size_t max_categories = 3;
  // Evaluation budget for non-empty category subsets.
  std::uint64_t search_rounds = 200;
  std::uint64_t seed = 0;
  std::string unk_marker = "<unk>";

  void validate() const;
};

// Drops edits that would write the unknown-word marker into the sentence.
std::vector<Edit> strip_unk_edits(const std::vector<Edit>& edits,
                                  const std::string& unk_marker = "<unk>");

// Keeps the subset of edits whose application scores best under the
// language model, removing at most max_removed_edits of them. With at most
// exhaustive_edit_limit edits, every removal subset is tried in order of
// size then position, and only a strictly better score displaces the
// incumbent, so keeping everything wins all ties and the result never
// scores below applying all edits. Larger lists fall back to greedily
// removing the single most harmful edit until nothing improves.
std::vector<Edit> lm_select_edits(const Sentence& source,
                                  const std::vector<Edit>& edits,
                                  const NGramLm& lm,
                                  const PostprocessConfig& config = {});

// Searches for a set of edit categories whose wholesale removal maximizes
// corpus F0.5 against a reference. The empty set is evaluated first, then
// all subsets of size below max_categories, then seeded random subsets of
// size max_categories until search_rounds non-empty candidates have been
// scored. Strict improvement moves the incumbent, so the result never
// scores below dropping nothing, and ties resolve to the earliest (smallest,
// lexicographically first) subset.
struct CategorySearchResult {
  std::vector<std::string> dropped;  // sorted
  double f_half = 0.0;
  double baseline_f_half = 0.0;
  ScoreReport report;  // at the chosen subset
};

CategorySearchResult category_filter_search(
    const std::vector<std::vector<Edit>>& hypothesis,
    const std::vector<AnnotatedPair>& gold,
    const PostprocessConfig& config = {},
    const std::set<std::string>* categories = nullptr);

// Removes hypothesis edits whose category is in the dropped set.
std::vector<Edit> drop_categories(const std::vector<Edit>& edits,
                                  const std::set<std::string>& dropped);

}  // namespace gecforge
