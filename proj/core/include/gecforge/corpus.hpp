#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "gecforge/error.hpp"

namespace gecforge {

// A sentence is an ordered list of surface tokens. Tokens are never empty
// and never contain whitespace.
using Sentence = std::vector<std::string>;

// Version of the fixed tokenizer rule table. Bump whenever a rule changes so
// corpora produced under different rules can be told apart.
inline constexpr int kTokenizerRulesVersion = 1;

// Splits raw text into tokens: whitespace-separated chunks, with punctuation
// runs detached from chunk edges, English contraction suffixes split off
// ("don't" -> "do n't"), and dotted acronyms ("U.S.") kept whole. Punctuation
// between letters or digits stays put ("o'clock", "3.5", "high-quality").
// Idempotent: re-tokenizing join_tokens(tokenize(s)) reproduces the tokens.
// Operates on bytes; anything >= 0x80 counts as a word character.
Sentence tokenize(const std::string& text);

// Joins tokens with single spaces.
std::string join_tokens(const Sentence& sentence);

// One span-anchored replacement on a token sequence. The span is
// [span_start, span_end) in source token positions; span_start == span_end
// is a pure insertion and an empty replacement is a deletion.
struct Edit {
  std::size_t span_start = 0;
  std::size_t span_end = 0;
  std::vector<std::string> replacement;
  std::string category;  // error type label, may be empty

  friend bool operator==(const Edit&, const Edit&) = default;
};

// Orders edits by span, which is the canonical on-disk order.
inline bool edit_span_less(const Edit& a, const Edit& b) {
  if (a.span_start != b.span_start) return a.span_start < b.span_start;
  return a.span_end < b.span_end;
}

// One annotator's view of a sentence. Edits are kept sorted by span and must
// not overlap. An empty edit list means the annotator left the sentence as is.
struct Annotation {
  int annotator_id = 0;
  std::vector<Edit> edits;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

// A source sentence with at least one annotation.
struct AnnotatedPair {
  Sentence source;
  std::vector<Annotation> annotations;

  friend bool operator==(const AnnotatedPair&, const AnnotatedPair&) = default;
};

// Checks that edits are span-sorted, pairwise non-overlapping, in range for
// the source, and that replacement tokens are non-empty and whitespace-free.
// Throws ValidationError otherwise.
void validate_edits(const Sentence& source, const std::vector<Edit>& edits);

// Applies a validated edit list to a source sentence. Insertions at the same
// point as an adjacent span boundary are legal; the result never contains an
// empty token.
Sentence apply_edits(const Sentence& source, const std::vector<Edit>& edits);

// Reads an entire M2 file. Each block is an "S <tokens>" line followed by
// zero or more "A <start> <end>|||<type>|||<replacement>|||..." lines; blocks
// are separated by blank lines. A block with no A lines yields a single empty
// annotation for annotator 0. Throws ParseError with a line number on
// malformed input and ValidationError on overlapping or out-of-range spans.
std::vector<AnnotatedPair> read_m2(std::istream& in);

// Streaming variant of read_m2 for corpora that should not sit in memory.
void for_each_m2(std::istream& in,
                 const std::function<void(AnnotatedPair&&)>& fn);

// Writes pairs in M2 format, one blank-line-terminated block per pair.
// Returns the number of bytes written. write_m2(read_m2(f)) reproduces a
// well-formed file byte for byte.
std::size_t write_m2(const std::vector<AnnotatedPair>& pairs,
                     std::ostream& out);
std::size_t write_m2_block(const AnnotatedPair& pair, std::ostream& out);

// Tab-separated parallel corpus, one "source<TAB>target" pair per line.
// Sentences are split on whitespace; either side may be empty.
void for_each_tsv_pair(
    std::istream& in,
    const std::function<void(Sentence&&, Sentence&&, std::size_t)>& fn);
std::size_t write_tsv_pair(const Sentence& source, const Sentence& target,
                           std::ostream& out);

// Calls fn(line, line_number) for every line, line numbers starting at 1.
// Handles both \n and \r\n endings.
void for_each_line(std::istream& in,
                   const std::function<void(std::string&&, std::size_t)>& fn);

// Whitespace-only split, for input that is already tokenized.
Sentence split_tokens(const std::string& line);

}  // namespace gecforge
