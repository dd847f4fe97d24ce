#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "gecforge/corpus.hpp"

namespace gecforge {

// Precision and recall default to 1 when their denominator is empty (no
// proposed edits, or nothing to find); F0.5 is 0 when 0.25 * P + R is 0.
// These conventions make an all-noop hypothesis against all-noop references
// score a perfect 1 instead of dividing by zero.
double precision_value(std::uint64_t tp, std::uint64_t fp);
double recall_value(std::uint64_t tp, std::uint64_t fn);
double f_half_value(double precision, double recall);

struct CategoryCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
};

struct ScoreReport {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  double precision = 1.0;
  double recall = 1.0;
  double f_half = 1.0;
  // True positives and misses keyed by the gold category, false alarms by
  // the hypothesis category.
  std::map<std::string, CategoryCounts> by_category;

  void write_json(std::ostream& out) const;
};

// Span-based scoring of hypothesis edits against multi-annotator references.
// Edits match on (span, replacement); category labels only affect the
// per-category breakdown. For every sentence, each annotator is scored in
// isolation and the one giving the highest sentence F0.5 (ties: lowest
// annotator id) contributes that sentence's counts to the totals.
// Throws ValidationError when hypothesis and gold lengths differ.
ScoreReport score_edits(const std::vector<std::vector<Edit>>& hypothesis,
                        const std::vector<AnnotatedPair>& gold);

// Edit density over a corpus: per sentence, edits divided by source tokens;
// sentences with no tokens are skipped. By default only each pair's first
// annotation counts; all_annotators averages the per-annotator densities of
// each sentence instead.
struct DensityStats {
  double mean_density = 0.0;
  std::uint64_t sentences = 0;
  std::uint64_t tokens = 0;
  std::uint64_t edits = 0;
};

std::vector<double> sentence_densities(const std::vector<AnnotatedPair>& pairs,
                                       bool all_annotators = false);
DensityStats edit_density(const std::vector<AnnotatedPair>& pairs,
                          bool all_annotators = false);

// Approximate two-sided permutation test on the difference of group means:
// rounds random relabelings of the pooled values, statistic
// |mean(A') - mean(B')|, p = (1 + count of stat >= observed) / (rounds + 1).
// Round r draws from SplitRng::substream(seed, r), so the result does not
// depend on evaluation order. Statistics within 1e-12 (relative) of the
// observed one count as ties, so splits that reproduce the observed grouping
// are never lost to summation-order rounding.
double permutation_test(const std::vector<double>& a,
                        const std::vector<double>& b, std::uint64_t rounds,
                        std::uint64_t seed);

// Exact version enumerating all C(|a|+|b|, |a|) splits; p is the fraction
// of splits with statistic >= observed, under the same tie tolerance as
// permutation_test. Guarded to small inputs.
double exact_permutation_test(const std::vector<double>& a,
                              const std::vector<double>& b);

}  // namespace gecforge
