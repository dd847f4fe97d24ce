#include "gecforge/spellcheck.hpp"

#include <algorithm>
#include <cctype>
#include <ostream>

#include "gecforge/align.hpp"
#include "gecforge/error.hpp"

namespace gecforge {

namespace {

std::string lower_copy(const std::string& s) {
  std::string out(s);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

std::string capitalize(const std::string& lower) {
  std::string out(lower);
  if (!out.empty()) {
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  }
  return out;
}

bool is_alpha_token(const std::string& t) {
  if (t.empty()) return false;
  for (char c : t) {
    if (!std::isalpha(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::uint64_t parse_count_field(const std::string& s, std::size_t line) {
  if (s.empty()) throw ParseError("empty count", line);
  std::uint64_t value = 0;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw ParseError("bad count '" + s + "'", line);
    }
    value = value * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return value;
}

}  // namespace

void Vocabulary::add(const std::string& word, std::uint64_t count) {
  if (word.empty()) throw ValidationError("empty vocabulary word");
  auto [it, inserted] = counts_.try_emplace(word, 0);
  it->second += count;
  if (inserted) by_length_[word.size()].push_back(word);
  lowercase_.insert(lower_copy(word));
}

Vocabulary Vocabulary::from_word_list(std::istream& in) {
  Vocabulary vocab;
  for_each_line(in, [&](std::string&& line, std::size_t number) {
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const Sentence cols = split_tokens(line);
    if (cols.empty()) return;
    if (cols.size() == 1) {
      vocab.add(cols[0]);
    } else if (cols.size() == 2) {
      vocab.add(cols[0], parse_count_field(cols[1], number));
    } else {
      throw ParseError("vocabulary row needs 1 or 2 columns", number);
    }
  });
  return vocab;
}

Vocabulary Vocabulary::from_corpus(std::istream& in) {
  Vocabulary vocab;
  for_each_line(in, [&](std::string&& line, std::size_t) {
    for (const std::string& tok : split_tokens(line)) vocab.add(tok);
  });
  return vocab;
}

void Vocabulary::save(std::ostream& out) const {
  std::vector<std::pair<std::string, std::uint64_t>> rows(counts_.begin(),
                                                          counts_.end());
  std::sort(rows.begin(), rows.end());
  for (const auto& [word, count] : rows) {
    out << word << "\t" << count << "\n";
  }
}

bool Vocabulary::contains(const std::string& token) const {
  return lowercase_.count(lower_copy(token)) > 0;
}

std::uint64_t Vocabulary::frequency(const std::string& word) const {
  const auto it = counts_.find(word);
  return it == counts_.end() ? 0 : it->second;
}

std::vector<Vocabulary::Near> Vocabulary::near_words(
    const std::string& token, std::size_t max_distance) const {
  const std::string low = lower_copy(token);
  std::vector<Near> found;
  const std::size_t shortest =
      low.size() > max_distance ? low.size() - max_distance : 1;
  for (std::size_t len = shortest; len <= low.size() + max_distance; ++len) {
    const auto bucket = by_length_.find(len);
    if (bucket == by_length_.end()) continue;
    for (const std::string& word : bucket->second) {
      const std::size_t d =
          char_edit_distance(lower_copy(word), low, max_distance);
      if (d <= max_distance) {
        found.push_back(Near{word, d, counts_.at(word)});
      }
    }
  }
  return found;
}

void SpellConfig::validate() const {
  if (max_edit_distance < 1 || max_edit_distance > 4) {
    throw ValidationError("max_edit_distance must be in [1, 4]");
  }
  if (max_candidates < 1) {
    throw ValidationError("max_candidates must be at least 1");
  }
  if (lm_weight < 0.0) {
    throw ValidationError("lm_weight must be non-negative");
  }
}

std::vector<std::size_t> detect_misspellings(const Sentence& sentence,
                                             const Vocabulary& vocab) {
  std::vector<std::size_t> flagged;
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    if (is_alpha_token(sentence[i]) && !vocab.contains(sentence[i])) {
      flagged.push_back(i);
    }
  }
  return flagged;
}

std::vector<std::string> spell_candidates(const std::string& token,
                                          const Vocabulary& vocab,
                                          const SpellConfig& config) {
  config.validate();
  std::vector<Vocabulary::Near> near =
      vocab.near_words(token, config.max_edit_distance);
  std::sort(near.begin(), near.end(),
            [&](const Vocabulary::Near& a, const Vocabulary::Near& b) {
              if (a.distance != b.distance) return a.distance < b.distance;
              if (config.frequency_tiebreak && a.frequency != b.frequency) {
                return a.frequency > b.frequency;
              }
              return a.word < b.word;
            });
  if (near.size() > config.max_candidates) {
    near.resize(config.max_candidates);
  }
  std::vector<std::string> out;
  out.reserve(near.size() + 1);
  for (const auto& n : near) out.push_back(n.word);
  if (std::find(out.begin(), out.end(), token) == out.end()) {
    out.push_back(token);  // keeping the token is always an option
  }
  return out;
}

SpellResult spell_correct(const Sentence& sentence, const NGramLm& lm,
                          const Vocabulary& vocab,
                          const std::unordered_set<std::string>& capital_words,
                          const SpellConfig& config) {
  config.validate();
  SpellResult result;
  result.corrected = sentence;
  Sentence& working = result.corrected;

  const auto flagged_list = detect_misspellings(working, vocab);
  std::vector<bool> flagged(working.size(), false);
  for (std::size_t i : flagged_list) flagged[i] = true;

  for (std::size_t i = 0; i < working.size(); ++i) {
    const std::string original = working[i];
    const std::string low = lower_copy(original);
    const std::string capital = capitalize(low);
    const bool wants_capital =
        capital_words.count(low) > 0 && original != capital;
    if (!flagged[i] && !wants_capital) continue;

    std::vector<std::string> cands;
    if (flagged[i]) {
      cands = spell_candidates(original, vocab, config);
    } else {
      cands.push_back(original);
    }
    if (wants_capital &&
        std::find(cands.begin(), cands.end(), capital) == cands.end()) {
      cands.push_back(capital);
    }
    if (cands.size() < 2) continue;

    std::size_t best = 0;
    if (config.lm_weight > 0.0) {
      // Re-rank by whole-sentence log probability. The original token is in
      // the list with delta 0, so an accepted change never lowers the score.
      const NGramLm::ScoredSentence scored = lm.analyze(working);
      double best_score = 0.0;
      std::size_t best_distance = 0;
      bool best_is_original = false;
      bool have = false;
      for (std::size_t c = 0; c < cands.size(); ++c) {
        const bool is_original = cands[c] == original;
        const double delta =
            is_original ? 0.0 : lm.substitution_delta(scored, i, cands[c]);
        const double score = config.lm_weight * delta;
        const std::size_t distance = char_edit_distance(
            lower_copy(cands[c]), low, config.max_edit_distance + 1);
        bool better = false;
        if (!have || score > best_score) {
          better = true;
        } else if (score == best_score) {
          if (distance < best_distance) {
            better = true;
          } else if (distance == best_distance && !best_is_original) {
            better = is_original || cands[c] < cands[best];
          }
        }
        if (better) {
          best = c;
          best_score = score;
          best_distance = distance;
          best_is_original = is_original;
          have = true;
        }
      }
    }
    // With lm_weight 0 the ranked order already encodes the choice: the
    // first candidate (smallest distance, then highest frequency) wins.

    if (cands[best] == original) continue;
    Edit e;
    e.span_start = i;
    e.span_end = i + 1;
    e.replacement = {cands[best]};
    e.category = lower_copy(cands[best]) == low ? "ORTH" : "SPELL";
    result.edits.push_back(std::move(e));
    working[i] = cands[best];
  }
  return result;
}

}  // namespace gecforge
