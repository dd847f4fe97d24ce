#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gecforge/corpus.hpp"

namespace gecforge {

class MorphLexicon;

// Operation costs for the weighted token alignment. All are multiples of
// 0.5, so sums compare exactly in doubles.
inline constexpr double kAlignMatchCost = 0.0;
inline constexpr double kAlignSubstituteCost = 1.0;
inline constexpr double kAlignCaseSubstituteCost = 0.5;
inline constexpr double kAlignInsertCost = 1.0;
inline constexpr double kAlignDeleteCost = 1.0;
inline constexpr double kAlignTransposeCost = 1.5;

enum class AlignOpKind { kMatch, kSubstitute, kDelete, kInsert, kTranspose };

// One step of an alignment between source and target token ranges.
// kMatch/kSubstitute cover one token on each side, kDelete one source token,
// kInsert one target token, kTranspose two adjacent tokens on each side.
struct AlignOp {
  AlignOpKind kind = AlignOpKind::kMatch;
  std::size_t src_begin = 0;
  std::size_t src_end = 0;
  std::size_t tgt_begin = 0;
  std::size_t tgt_end = 0;
  double cost = 0.0;

  friend bool operator==(const AlignOp&, const AlignOp&) = default;
};

struct Alignment {
  std::vector<AlignOp> ops;
  double cost = 0.0;
};

// Substitution cost between two tokens: 0 for equal, 0.5 for equal ignoring
// ASCII case, 1 otherwise.
double token_substitution_cost(const std::string& a, const std::string& b);

// Minimum-cost alignment under the costs above, allowing transposition of
// two adjacent unequal tokens. Ties are broken deterministically: the walk
// from the front prefers match, then substitute, then delete, then insert,
// then transpose, which keeps edits anchored to the leftmost source
// positions among equal-cost alignments.
Alignment align(const Sentence& source, const Sentence& target);

// Convenience wrapper returning only the optimal cost.
double alignment_cost(const Sentence& source, const Sentence& target);

// Collapses maximal runs of non-match operations into span edits on the
// source. The result is sorted, non-overlapping and satisfies
// apply_edits(source, edits) == target. Categories are left empty.
std::vector<Edit> extract_edits(const Sentence& source,
                                const Sentence& target);

// First-match rule classification of a single edit:
//   PUNCT      every token on both sides is punctuation
//   PREP       both sides (joined, possibly empty) are in the preposition set
//   NOUN:NUM   single-token number toggle per the lexicon
//   VERB:FORM  single-token form change within one verb paradigm
//   ORTH       sides differ only by ASCII case
//   SPELL      single-token substitution of an out-of-vocabulary word within
//              character edit distance 2 of its replacement
//   OTHER      anything else
std::string classify_edit(const Sentence& source, const Edit& edit,
                          const MorphLexicon& lexicon);

// Character-level Damerau-Levenshtein distance (optimal string alignment,
// unit costs), used by the SPELL rule and the spellchecker. Stops early and
// returns limit + 1 when the distance exceeds limit.
std::size_t char_edit_distance(const std::string& a, const std::string& b,
                               std::size_t limit);

}  // namespace gecforge
