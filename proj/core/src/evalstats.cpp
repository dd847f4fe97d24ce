#include "gecforge/evalstats.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "json.hpp"

#include "gecforge/error.hpp"
#include "gecforge/rng.hpp"

namespace gecforge {

namespace {

using nlohmann::json;

// Key identifying an edit for matching: span plus replacement, category
// excluded on purpose.
struct EditKey {
  std::size_t start;
  std::size_t end;
  std::vector<std::string> replacement;

  bool operator<(const EditKey& other) const {
    if (start != other.start) return start < other.start;
    if (end != other.end) return end < other.end;
    return replacement < other.replacement;
  }
};

EditKey key_of(const Edit& e) {
  return EditKey{e.span_start, e.span_end, e.replacement};
}

struct SentenceCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::map<std::string, CategoryCounts> by_category;
};

// Multiset matching of one hypothesis edit list against one annotator.
SentenceCounts match_one(const std::vector<Edit>& hyp,
                         const std::vector<Edit>& gold) {
  std::map<EditKey, std::pair<std::vector<const Edit*>, std::vector<const Edit*>>>
      table;
  for (const Edit& e : hyp) table[key_of(e)].first.push_back(&e);
  for (const Edit& e : gold) table[key_of(e)].second.push_back(&e);

  SentenceCounts counts;
  for (const auto& [key, lists] : table) {
    const auto& [h, g] = lists;
    const std::size_t matched = std::min(h.size(), g.size());
    counts.tp += matched;
    for (std::size_t i = 0; i < matched; ++i) {
      ++counts.by_category[g[i]->category].tp;
    }
    for (std::size_t i = matched; i < h.size(); ++i) {
      ++counts.fp;
      ++counts.by_category[h[i]->category].fp;
    }
    for (std::size_t i = matched; i < g.size(); ++i) {
      ++counts.fn;
      ++counts.by_category[g[i]->category].fn;
    }
  }
  return counts;
}

double sentence_f_half(const SentenceCounts& c) {
  return f_half_value(precision_value(c.tp, c.fp), recall_value(c.tp, c.fn));
}

}  // namespace

double precision_value(std::uint64_t tp, std::uint64_t fp) {
  if (tp + fp == 0) return 1.0;
  return static_cast<double>(tp) / static_cast<double>(tp + fp);
}

double recall_value(std::uint64_t tp, std::uint64_t fn) {
  if (tp + fn == 0) return 1.0;
  return static_cast<double>(tp) / static_cast<double>(tp + fn);
}

double f_half_value(double precision, double recall) {
  const double denom = 0.25 * precision + recall;
  if (denom == 0.0) return 0.0;
  return 1.25 * precision * recall / denom;
}

ScoreReport score_edits(const std::vector<std::vector<Edit>>& hypothesis,
                        const std::vector<AnnotatedPair>& gold) {
  if (hypothesis.size() != gold.size()) {
    throw ValidationError("hypothesis and reference sentence counts differ");
  }

  ScoreReport report;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i].annotations.empty()) {
      throw ValidationError("reference sentence without annotations");
    }
    // Score each annotator separately and keep the friendliest one.
    const SentenceCounts* best = nullptr;
    double best_f = -1.0;
    int best_id = 0;
    std::vector<SentenceCounts> scored;
    scored.reserve(gold[i].annotations.size());
    for (const Annotation& ann : gold[i].annotations) {
      scored.push_back(match_one(hypothesis[i], ann.edits));
      const double f = sentence_f_half(scored.back());
      if (f > best_f || (f == best_f && ann.annotator_id < best_id)) {
        best_f = f;
        best_id = ann.annotator_id;
        best = &scored.back();
      }
    }
    report.tp += best->tp;
    report.fp += best->fp;
    report.fn += best->fn;
    for (const auto& [cat, counts] : best->by_category) {
      CategoryCounts& agg = report.by_category[cat];
      agg.tp += counts.tp;
      agg.fp += counts.fp;
      agg.fn += counts.fn;
    }
  }

  report.precision = precision_value(report.tp, report.fp);
  report.recall = recall_value(report.tp, report.fn);
  report.f_half = f_half_value(report.precision, report.recall);
  return report;
}

void ScoreReport::write_json(std::ostream& out) const {
  json doc;
  doc["format_version"] = 1;
  doc["tp"] = tp;
  doc["fp"] = fp;
  doc["fn"] = fn;
  doc["precision"] = precision;
  doc["recall"] = recall;
  doc["f_half"] = f_half;
  doc["conventions"] =
      "precision=1 when tp+fp=0; recall=1 when tp+fn=0; "
      "f_half=0 when 0.25*precision+recall=0";
  json cats = json::object();
  for (const auto& [cat, counts] : by_category) {
    json row;
    row["tp"] = counts.tp;
    row["fp"] = counts.fp;
    row["fn"] = counts.fn;
    row["precision"] = precision_value(counts.tp, counts.fp);
    row["recall"] = recall_value(counts.tp, counts.fn);
    row["f_half"] = f_half_value(precision_value(counts.tp, counts.fp),
                                 recall_value(counts.tp, counts.fn));
    cats[cat] = row;
  }
  doc["by_category"] = cats;
  out << doc.dump(2) << "\n";
}

std::vector<double> sentence_densities(const std::vector<AnnotatedPair>& pairs,
                                       bool all_annotators) {
  std::vector<double> densities;
  densities.reserve(pairs.size());
  for (const AnnotatedPair& pair : pairs) {
    if (pair.source.empty() || pair.annotations.empty()) continue;
    const double tokens = static_cast<double>(pair.source.size());
    if (all_annotators) {
      double sum = 0.0;
      for (const Annotation& ann : pair.annotations) {
        sum += static_cast<double>(ann.edits.size()) / tokens;
      }
      densities.push_back(sum /
                          static_cast<double>(pair.annotations.size()));
    } else {
      densities.push_back(
          static_cast<double>(pair.annotations.front().edits.size()) / tokens);
    }
  }
  return densities;
}

DensityStats edit_density(const std::vector<AnnotatedPair>& pairs,
                          bool all_annotators) {
  DensityStats stats;
  const std::vector<double> densities =
      sentence_densities(pairs, all_annotators);
  double sum = 0.0;
  for (double d : densities) sum += d;
  stats.sentences = densities.size();
  stats.mean_density =
      densities.empty() ? 0.0 : sum / static_cast<double>(densities.size());
  for (const AnnotatedPair& pair : pairs) {
    if (pair.source.empty() || pair.annotations.empty()) continue;
    stats.tokens += pair.source.size();
    stats.edits += pair.annotations.front().edits.size();
  }
  return stats;
}

namespace {

double mean_of(const double* values, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += values[i];
  return sum / static_cast<double>(n);
}

double group_stat(const std::vector<double>& pool, std::size_t split) {
  return std::abs(mean_of(pool.data(), split) -
                  mean_of(pool.data() + split, pool.size() - split));
}

// Summation order changes under relabeling, so a split that reproduces the
// observed grouping can come out an ulp away from the observed statistic.
// Ties carry real probability mass (the identity split always ties), so the
// comparison gets a tolerance well above accumulated rounding and well below
// any genuine gap between distinct statistics.
double tie_threshold(double observed) {
  return observed - 1e-12 * std::max(1.0, observed);
}

}  // namespace

double permutation_test(const std::vector<double>& a,
                        const std::vector<double>& b, std::uint64_t rounds,
                        std::uint64_t seed) {
  if (a.empty() || b.empty()) {
    throw ValidationError("permutation test needs two non-empty groups");
  }
  if (rounds == 0) {
    throw ValidationError("permutation test needs at least one round");
  }

  std::vector<double> pool(a);
  pool.insert(pool.end(), b.begin(), b.end());
  const double observed =
      std::abs(mean_of(a.data(), a.size()) - mean_of(b.data(), b.size()));

  const double threshold = tie_threshold(observed);
  std::uint64_t at_least = 0;
  std::vector<double> permuted(pool);
  for (std::uint64_t r = 0; r < rounds; ++r) {
    SplitRng rng = SplitRng::substream(seed, r);
    permuted = pool;
    shuffle(permuted, rng);
    if (group_stat(permuted, a.size()) >= threshold) ++at_least;
  }
  return static_cast<double>(1 + at_least) / static_cast<double>(rounds + 1);
}

double exact_permutation_test(const std::vector<double>& a,
                              const std::vector<double>& b) {
  if (a.empty() || b.empty()) {
    throw ValidationError("permutation test needs two non-empty groups");
  }
  const std::size_t n = a.size() + b.size();
  if (n > 24) {
    throw ValidationError("exact permutation test is limited to 24 values");
  }

  std::vector<double> pool(a);
  pool.insert(pool.end(), b.begin(), b.end());
  const double observed =
      std::abs(mean_of(a.data(), a.size()) - mean_of(b.data(), b.size()));

  // Walk every k-subset of the pooled indices as group A.
  const std::size_t k = a.size();
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;

  const double threshold = tie_threshold(observed);
  std::uint64_t total = 0;
  std::uint64_t at_least = 0;
  std::vector<bool> in_a(n);
  while (true) {
    ++total;
    std::fill(in_a.begin(), in_a.end(), false);
    double sum_a = 0.0;
    for (std::size_t i : idx) {
      sum_a += pool[i];
      in_a[i] = true;
    }
    double sum_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!in_a[i]) sum_b += pool[i];
    }
    const double stat = std::abs(sum_a / static_cast<double>(k) -
                                 sum_b / static_cast<double>(n - k));
    if (stat >= threshold) ++at_least;

    // Advance to the next combination in lexicographic order.
    std::size_t pos = k;
    while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
    if (pos == 0) break;
    ++idx[pos - 1];
    for (std::size_t i = pos; i < k; ++i) idx[i] = idx[i - 1] + 1;
  }
  return static_cast<double>(at_least) / static_cast<double>(total);
}

}  // namespace gecforge
