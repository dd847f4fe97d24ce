#include "gecforge/postprocess.hpp"

#include <algorithm>

#include "gecforge/error.hpp"
#include "gecforge/rng.hpp"

namespace gecforge {

void PostprocessConfig::validate() const {
  if (exhaustive_edit_limit > 24) {
    throw ValidationError("exhaustive_edit_limit above 24 is not tractable");
  }
  if (max_categories == 0) {
    throw ValidationError("max_categories must be at least 1");
  }
  if (unk_marker.empty()) {
    throw ValidationError("unk_marker must not be empty");
  }
}

std::vector<Edit> strip_unk_edits(const std::vector<Edit>& edits,
                                  const std::string& unk_marker) {
  std::vector<Edit> kept;
  kept.reserve(edits.size());
  for (const Edit& e : edits) {
    const bool has_unk =
        std::find(e.replacement.begin(), e.replacement.end(), unk_marker) !=
        e.replacement.end();
    if (!has_unk) kept.push_back(e);
  }
  return kept;
}

namespace {

std::vector<Edit> without(const std::vector<Edit>& edits,
                          const std::vector<std::size_t>& removed) {
  std::vector<Edit> kept;
  kept.reserve(edits.size() - removed.size());
  std::size_t r = 0;
  for (std::size_t i = 0; i < edits.size(); ++i) {
    if (r < removed.size() && removed[r] == i) {
      ++r;
      continue;
    }
    kept.push_back(edits[i]);
  }
  return kept;
}

}  // namespace

std::vector<Edit> lm_select_edits(const Sentence& source,
                                  const std::vector<Edit>& edits,
                                  const NGramLm& lm,
                                  const PostprocessConfig& config) {
  config.validate();
  validate_edits(source, edits);
  if (edits.empty()) return edits;

  const auto score_without = [&](const std::vector<std::size_t>& removed) {
    return lm.sentence_logprob(apply_edits(source, without(edits, removed)));
  };

  const std::size_t n = edits.size();
  const std::size_t budget = std::min(config.max_removed_edits, n);

  std::vector<std::size_t> best_removed;
  double best_score = score_without({});

  if (n <= config.exhaustive_edit_limit) {
    // Subsets in order of size, then lexicographic index order. Strict
    // improvement only, so the earliest (smallest) subset wins ties.
    std::vector<std::size_t> idx;
    for (std::size_t k = 1; k <= budget; ++k) {
      idx.resize(k);
      for (std::size_t i = 0; i < k; ++i) idx[i] = i;
      while (true) {
        const double score = score_without(idx);
        if (score > best_score) {
          best_score = score;
          best_removed = idx;
        }
        std::size_t pos = k;
        while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
        if (pos == 0) break;
        ++idx[pos - 1];
        for (std::size_t i = pos; i < k; ++i) idx[i] = idx[i - 1] + 1;
      }
    }
    return without(edits, best_removed);
  }

  // Greedy fallback: repeatedly drop the single edit whose removal helps
  // most, stopping when no removal strictly improves the score.
  std::vector<std::size_t> removed;
  while (removed.size() < budget) {
    double round_best = best_score;
    std::size_t round_pick = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::find(removed.begin(), removed.end(), i) != removed.end()) {
        continue;
      }
      std::vector<std::size_t> trial(removed);
      trial.insert(std::upper_bound(trial.begin(), trial.end(), i), i);
      const double score = score_without(trial);
      if (score > round_best) {
        round_best = score;
        round_pick = i;
      }
    }
    if (round_pick == n) break;
    removed.insert(std::upper_bound(removed.begin(), removed.end(), round_pick),
                   round_pick);
    best_score = round_best;
  }
  return without(edits, removed);
}

std::vector<Edit> drop_categories(const std::vector<Edit>& edits,
                                  const std::set<std::string>& dropped) {
  std::vector<Edit> kept;
  kept.reserve(edits.size());
  for (const Edit& e : edits) {
    if (!dropped.count(e.category)) kept.push_back(e);
  }
  return kept;
}

CategorySearchResult category_filter_search(
    const std::vector<std::vector<Edit>>& hypothesis,
    const std::vector<AnnotatedPair>& gold, const PostprocessConfig& config,
    const std::set<std::string>* categories) {
  config.validate();
  if (gold.empty()) {
    throw ValidationError("category search needs a non-empty reference");
  }

  std::vector<std::string> cats;
  if (categories) {
    cats.assign(categories->begin(), categories->end());
  } else {
    std::set<std::string> seen;
    for (const auto& edits : hypothesis) {
      for (const Edit& e : edits) seen.insert(e.category);
    }
    cats.assign(seen.begin(), seen.end());
  }

  const auto evaluate = [&](const std::set<std::string>& drop) {
    std::vector<std::vector<Edit>> filtered;
    filtered.reserve(hypothesis.size());
    for (const auto& edits : hypothesis) {
      filtered.push_back(drop_categories(edits, drop));
    }
    return score_edits(filtered, gold);
  };

  CategorySearchResult result;
  result.report = evaluate({});
  result.f_half = result.report.f_half;
  result.baseline_f_half = result.report.f_half;

  if (cats.empty()) return result;

  std::set<std::string> best_drop;
  std::uint64_t evaluated = 0;

  const auto consider = [&](const std::set<std::string>& drop) {
    ++evaluated;
    const ScoreReport report = evaluate(drop);
    if (report.f_half > result.f_half) {
      result.f_half = report.f_half;
      result.report = report;
      best_drop = drop;
    }
  };

  // All subsets smaller than the cap, in size then lexicographic order.
  const std::size_t n = cats.size();
  const std::size_t cap = std::min(config.max_categories, n);
  for (std::size_t k = 1; k < cap && evaluated < config.search_rounds; ++k) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (evaluated < config.search_rounds) {
      std::set<std::string> drop;
      for (std::size_t i : idx) drop.insert(cats[i]);
      consider(drop);
      std::size_t pos = k;
      while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
      if (pos == 0) break;
      ++idx[pos - 1];
      for (std::size_t i = pos; i < k; ++i) idx[i] = idx[i - 1] + 1;
    }
  }

  // Seeded random subsets at the cap size for the remaining budget.
  std::set<std::set<std::string>> tried;
  std::uint64_t attempts = 0;
  const std::uint64_t max_attempts = config.search_rounds * 20;
  std::uint64_t draw = 0;
  while (evaluated < config.search_rounds && attempts < max_attempts) {
    ++attempts;
    SplitRng rng = SplitRng::substream(config.seed, draw++);
    std::set<std::string> drop;
    while (drop.size() < cap) {
      drop.insert(cats[rng.next_below(n)]);
    }
    if (!tried.insert(drop).second) continue;
    consider(drop);
  }

  result.dropped.assign(best_drop.begin(), best_drop.end());
  return result;
}

}  // namespace gecforge
