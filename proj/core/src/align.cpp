#include "gecforge/align.hpp"

#include <algorithm>
#include <cctype>
#include <limits>

#include "gecforge/lexicon.hpp"

namespace gecforge {

namespace {

std::string lower_copy(const std::string& s) {
  std::string out(s);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

bool equal_ignoring_case(const std::string& a, const std::string& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

bool is_punct_token(const std::string& t) {
  if (t.empty()) return false;
  for (char c : t) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u) || u >= 0x80) return false;
  }
  return true;
}

bool is_alpha_token(const std::string& t) {
  if (t.empty()) return false;
  for (char c : t) {
    if (!std::isalpha(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

double token_substitution_cost(const std::string& a, const std::string& b) {
  if (a == b) return kAlignMatchCost;
  if (equal_ignoring_case(a, b)) return kAlignCaseSubstituteCost;
  return kAlignSubstituteCost;
}

Alignment align(const Sentence& source, const Sentence& target) {
  const std::size_t m = source.size();
  const std::size_t n = target.size();

  // cost_to_go[i][j] is the optimal cost of aligning source[i..m) with
  // target[j..n). Filling it back to front lets the reconstruction walk
  // forward from (0, 0) and apply the tie-break preference at every step,
  // which pins equal-cost alignments to the leftmost source positions.
  std::vector<std::vector<double>> ctg(m + 1, std::vector<double>(n + 1, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    ctg[i][n] = static_cast<double>(m - i) * kAlignDeleteCost;
  }
  for (std::size_t j = 0; j < n; ++j) {
    ctg[m][j] = static_cast<double>(n - j) * kAlignInsertCost;
  }

  const auto can_transpose = [&](std::size_t i, std::size_t j) {
    return i + 1 < m && j + 1 < n && source[i] == target[j + 1] &&
           source[i + 1] == target[j] && source[i] != source[i + 1];
  };

  for (std::size_t ii = m; ii-- > 0;) {
    for (std::size_t jj = n; jj-- > 0;) {
      double best = token_substitution_cost(source[ii], target[jj]) +
                    ctg[ii + 1][jj + 1];
      best = std::min(best, kAlignDeleteCost + ctg[ii + 1][jj]);
      best = std::min(best, kAlignInsertCost + ctg[ii][jj + 1]);
      if (can_transpose(ii, jj)) {
        best = std::min(best, kAlignTransposeCost + ctg[ii + 2][jj + 2]);
      }
      ctg[ii][jj] = best;
    }
  }

  Alignment result;
  result.cost = ctg[0][0];

  // All costs are multiples of 0.5, so these comparisons are exact.
  std::size_t i = 0, j = 0;
  while (i < m || j < n) {
    const double here = ctg[i][j];
    if (i < m && j < n) {
      const double sub = token_substitution_cost(source[i], target[j]);
      if (sub + ctg[i + 1][j + 1] == here) {
        result.ops.push_back({sub == 0.0 ? AlignOpKind::kMatch
                                         : AlignOpKind::kSubstitute,
                              i, i + 1, j, j + 1, sub});
        ++i;
        ++j;
        continue;
      }
    }
    if (i < m && kAlignDeleteCost + ctg[i + 1][j] == here) {
      result.ops.push_back(
          {AlignOpKind::kDelete, i, i + 1, j, j, kAlignDeleteCost});
      ++i;
      continue;
    }
    if (j < n && kAlignInsertCost + ctg[i][j + 1] == here) {
      result.ops.push_back(
          {AlignOpKind::kInsert, i, i, j, j + 1, kAlignInsertCost});
      ++j;
      continue;
    }
    // Only the transposition is left.
    result.ops.push_back(
        {AlignOpKind::kTranspose, i, i + 2, j, j + 2, kAlignTransposeCost});
    i += 2;
    j += 2;
  }
  return result;
}

double alignment_cost(const Sentence& source, const Sentence& target) {
  return align(source, target).cost;
}

std::vector<Edit> extract_edits(const Sentence& source,
                                const Sentence& target) {
  const Alignment alignment = align(source, target);
  std::vector<Edit> edits;

  bool open = false;
  std::size_t src_begin = 0, src_end = 0, tgt_begin = 0, tgt_end = 0;
  const auto flush = [&] {
    if (!open) return;
    Edit e;
    e.span_start = src_begin;
    e.span_end = src_end;
    e.replacement.assign(target.begin() + static_cast<std::ptrdiff_t>(tgt_begin),
                         target.begin() + static_cast<std::ptrdiff_t>(tgt_end));
    edits.push_back(std::move(e));
    open = false;
  };

  for (const AlignOp& op : alignment.ops) {
    if (op.kind == AlignOpKind::kMatch) {
      flush();
      continue;
    }
    if (!open) {
      open = true;
      src_begin = op.src_begin;
      tgt_begin = op.tgt_begin;
    }
    src_end = op.src_end;
    tgt_end = op.tgt_end;
  }
  flush();
  return edits;
}

std::size_t char_edit_distance(const std::string& a, const std::string& b,
                               std::size_t limit) {
  const std::size_t m = a.size();
  const std::size_t n = b.size();
  const std::size_t over = limit + 1;
  if (m > n + limit || n > m + limit) return over;
  if (m == 0 || n == 0) return std::max(m, n);

  // Optimal string alignment: substitution, insertion, deletion and a swap
  // of two adjacent characters, each at cost 1. Three rolling rows; rows are
  // capped at `over` which keeps the early-exit test simple.
  std::vector<std::size_t> two_ago(n + 1), one_ago(n + 1), current(n + 1);
  for (std::size_t j = 0; j <= n; ++j) one_ago[j] = j;

  for (std::size_t i = 1; i <= m; ++i) {
    current[0] = i;
    std::size_t row_min = current[0];
    for (std::size_t j = 1; j <= n; ++j) {
      const std::size_t sub = a[i - 1] == b[j - 1] ? 0 : 1;
      std::size_t best = std::min(one_ago[j - 1] + sub,
                                  std::min(one_ago[j] + 1, current[j - 1] + 1));
      if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1] &&
          a[i - 1] != a[i - 2]) {
        best = std::min(best, two_ago[j - 2] + 1);
      }
      current[j] = std::min(best, over);
      row_min = std::min(row_min, current[j]);
    }
    if (row_min > limit) return over;
    std::swap(two_ago, one_ago);
    std::swap(one_ago, current);
  }
  return std::min(one_ago[n], over);
}

std::string classify_edit(const Sentence& source, const Edit& edit,
                          const MorphLexicon& lexicon) {
  std::vector<std::string> src(source.begin() + static_cast<std::ptrdiff_t>(
                                                    edit.span_start),
                               source.begin() +
                                   static_cast<std::ptrdiff_t>(edit.span_end));
  const std::vector<std::string>& rep = edit.replacement;

  const bool both_empty = src.empty() && rep.empty();

  const auto all_punct = [](const std::vector<std::string>& side) {
    for (const std::string& t : side) {
      if (!is_punct_token(t)) return false;
    }
    return true;
  };
  if (!both_empty && all_punct(src) && all_punct(rep)) return "PUNCT";

  const std::string src_joined = join_tokens(src);
  const std::string rep_joined = join_tokens(rep);

  if (!both_empty && lexicon.is_preposition(src_joined) &&
      lexicon.is_preposition(rep_joined)) {
    return "PREP";
  }

  const bool one_to_one = src.size() == 1 && rep.size() == 1;
  if (one_to_one && lexicon.is_number_pair(src[0], rep[0])) return "NOUN:NUM";

  // An inflection pair is two different forms of one lemma; a case-only
  // rewrite of the same form is orthographic.
  if (one_to_one && lower_copy(src[0]) != lower_copy(rep[0])) {
    const auto lemma_a = lexicon.verb_lemma(src[0]);
    const auto lemma_b = lexicon.verb_lemma(rep[0]);
    if (lemma_a && lemma_b && *lemma_a == *lemma_b) return "VERB:FORM";
  }

  if (src_joined != rep_joined && !src_joined.empty() &&
      lower_copy(src_joined) == lower_copy(rep_joined)) {
    return "ORTH";
  }

  if (one_to_one && is_alpha_token(src[0]) &&
      !lexicon.contains_word(src[0]) &&
      char_edit_distance(lower_copy(src[0]), lower_copy(rep[0]), 2) <= 2) {
    return "SPELL";
  }

  return "OTHER";
}

}  // namespace gecforge
