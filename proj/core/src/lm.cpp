#include "gecforge/lm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <map>
#include <ostream>

#include "gecforge/error.hpp"

namespace gecforge {

namespace {

// Ids are packed three to a 64-bit key, which caps the vocabulary; large
// enough for any corpus this toolkit is pointed at.
constexpr int kIdBits = 21;
constexpr std::uint64_t kIdMask = (1ull << kIdBits) - 1;

std::uint64_t pack2(int v, int w) {
  return (static_cast<std::uint64_t>(v) << kIdBits) |
         static_cast<std::uint64_t>(w);
}

std::uint64_t pack3(int u, int v, int w) {
  return (static_cast<std::uint64_t>(u) << (2 * kIdBits)) |
         (static_cast<std::uint64_t>(v) << kIdBits) |
         static_cast<std::uint64_t>(w);
}

std::string format_hex_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

double parse_hex_double(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (end == nullptr || *end != '\0' || s.empty()) {
    throw ParseError("bad float '" + s + "'", line);
  }
  return x;
}

std::uint64_t parse_count(const std::string& s, std::size_t line) {
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

void NGramLm::Options::validate() const {
  if (lambda1 <= 0.0 || lambda2 < 0.0 || lambda3 < 0.0) {
    throw ValidationError("lambdas must be non-negative, lambda1 positive");
  }
  if (std::abs(lambda1 + lambda2 + lambda3 - 1.0) > 1e-9) {
    throw ValidationError("lambdas must sum to 1");
  }
  if (alpha <= 0.0) {
    throw ValidationError("alpha must be positive");
  }
}

int NGramLm::intern(const std::string& word) {
  const auto it = word_ids_.find(word);
  if (it != word_ids_.end()) return it->second;
  if (words_.size() >= (kIdMask + 1)) {
    throw ValidationError("vocabulary exceeds the supported size");
  }
  const int id = static_cast<int>(words_.size());
  words_.push_back(word);
  word_ids_.emplace(word, id);
  c1_.push_back(0);
  return id;
}

int NGramLm::id_or_unk(const std::string& word) const {
  const auto it = word_ids_.find(word);
  return it == word_ids_.end() ? kUnkId : it->second;
}

void NGramLm::count_sentence(const std::vector<int>& ids) {
  // ids = [BOS BOS w1 .. wT EOS]
  const int max_id = static_cast<int>(words_.size());
  if (static_cast<int>(r2_.size()) < max_id) r2_.resize(words_.size(), 0);
  for (std::size_t t = 2; t < ids.size(); ++t) {
    const int u = ids[t - 2];
    const int v = ids[t - 1];
    const int w = ids[t];
    ++c3_[pack3(u, v, w)];
    ++r3_[pack2(u, v)];
    ++c2_[pack2(v, w)];
    ++r2_[static_cast<std::size_t>(v)];
  }
}

NGramLm NGramLm::train(std::istream& corpus, const Options& options) {
  options.validate();
  NGramLm lm;
  lm.options_ = options;
  lm.words_ = {kBos, kEos, kUnk};
  lm.word_ids_ = {{kBos, kBosId}, {kEos, kEosId}, {kUnk, kUnkId}};
  lm.c1_ = {0, 0, 0};

  std::vector<int> ids;
  for_each_line(corpus, [&](std::string&& line, std::size_t) {
    const Sentence tokens = split_tokens(line);
    if (tokens.empty()) return;
    ids.clear();
    ids.push_back(kBosId);
    ids.push_back(kBosId);
    for (const std::string& tok : tokens) {
      const int id = lm.intern(tok);
      ids.push_back(id);
      ++lm.c1_[static_cast<std::size_t>(id)];
      ++lm.total_words_;
    }
    ids.push_back(kEosId);
    lm.count_sentence(ids);
  });
  if (lm.r2_.size() < lm.words_.size()) lm.r2_.resize(lm.words_.size(), 0);
  return lm;
}

double NGramLm::prob_id(int w, int u, int v) const {
  double l1 = options_.lambda1;
  double l2 = options_.lambda2;
  double l3 = options_.lambda3;
  double p = 0.0;

  // Unseen context rows donate their interpolation weight to the next lower
  // order; that keeps the distribution normalized for every context.
  const auto row3 = r3_.find(pack2(u, v));
  if (row3 != r3_.end()) {
    const auto it = c3_.find(pack3(u, v, w));
    if (it != c3_.end()) {
      p += l3 * static_cast<double>(it->second) /
           static_cast<double>(row3->second);
    }
  } else {
    l2 += l3;
  }

  const std::uint64_t row2 = r2_[static_cast<std::size_t>(v)];
  if (row2 > 0) {
    const auto it = c2_.find(pack2(v, w));
    if (it != c2_.end()) {
      p += l2 * static_cast<double>(it->second) / static_cast<double>(row2);
    }
  } else {
    l1 += l2;
  }

  const double denom = static_cast<double>(total_words_) +
                       options_.alpha * static_cast<double>(event_size());
  p += l1 * (static_cast<double>(c1_[static_cast<std::size_t>(w)]) +
             options_.alpha) /
       denom;
  return p;
}

double NGramLm::prob(const std::string& word, const std::string& u,
                     const std::string& v) const {
  return prob_id(id_or_unk(word), id_or_unk(u), id_or_unk(v));
}

NGramLm::ScoredSentence NGramLm::analyze(const Sentence& sentence) const {
  ScoredSentence scored;
  scored.ids.reserve(sentence.size() + 3);
  scored.ids.push_back(kBosId);
  scored.ids.push_back(kBosId);
  for (const std::string& tok : sentence) scored.ids.push_back(id_or_unk(tok));
  scored.ids.push_back(kEosId);

  scored.logprobs.reserve(sentence.size() + 1);
  for (std::size_t t = 2; t < scored.ids.size(); ++t) {
    const double lp = std::log(
        prob_id(scored.ids[t], scored.ids[t - 2], scored.ids[t - 1]));
    scored.logprobs.push_back(lp);
    scored.total += lp;
  }
  return scored;
}

std::vector<double> NGramLm::transition_logprobs(
    const Sentence& sentence) const {
  return analyze(sentence).logprobs;
}

double NGramLm::sentence_logprob(const Sentence& sentence) const {
  return analyze(sentence).total;
}

double NGramLm::substitution_delta(const ScoredSentence& scored,
                                   std::size_t pos,
                                   const std::string& replacement) const {
  const std::size_t transitions = scored.logprobs.size();
  if (pos + 3 > scored.ids.size() - 1) {  // ids = [BOS BOS w1..wT EOS]
    throw ValidationError("substitution position out of range");
  }
  const int new_id = id_or_unk(replacement);
  const std::size_t idx = pos + 2;  // position of the token in the id row
  if (scored.ids[idx] == new_id) return 0.0;

  double delta = 0.0;
  // Transition t reads ids[t], ids[t+1], ids[t+2]; the substitution touches
  // transitions pos (as the event), pos+1 and pos+2 (as context).
  for (std::size_t t = pos; t <= pos + 2 && t < transitions; ++t) {
    const int u = t + 0 == idx ? new_id : scored.ids[t];
    const int v = t + 1 == idx ? new_id : scored.ids[t + 1];
    const int w = t + 2 == idx ? new_id : scored.ids[t + 2];
    delta += std::log(prob_id(w, u, v)) - scored.logprobs[t];
  }
  return delta;
}

std::vector<std::string> NGramLm::event_space() const {
  std::vector<std::string> events(words_.begin() + kFirstWordId, words_.end());
  events.push_back(kUnk);
  events.push_back(kEos);
  return events;
}

void NGramLm::save(std::ostream& out) const {
  out << "gecforge-lm\t1\n";
  out << "options\t" << format_hex_double(options_.lambda1) << "\t"
      << format_hex_double(options_.lambda2) << "\t"
      << format_hex_double(options_.lambda3) << "\t"
      << format_hex_double(options_.alpha) << "\n";

  std::vector<int> order(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin() + kFirstWordId, order.end(),
            [&](int a, int b) { return words_[a] < words_[b]; });

  out << "words\t" << word_count() << "\n";
  for (std::size_t i = kFirstWordId; i < order.size(); ++i) {
    const int id = order[i];
    out << words_[id] << "\t" << c1_[static_cast<std::size_t>(id)] << "\n";
  }

  const auto dump_grams =
      [&](const std::unordered_map<std::uint64_t, std::uint64_t>& grams,
          int arity, const char* name) {
        std::map<std::string, std::uint64_t> rows;
        for (const auto& [key, count] : grams) {
          std::string text;
          for (int k = arity - 1; k >= 0; --k) {
            const int id = static_cast<int>((key >> (k * kIdBits)) & kIdMask);
            if (!text.empty()) text += ' ';
            text += words_[static_cast<std::size_t>(id)];
          }
          rows.emplace(std::move(text), count);
        }
        out << name << "\t" << rows.size() << "\n";
        for (const auto& [text, count] : rows) {
          out << text << "\t" << count << "\n";
        }
      };
  dump_grams(c2_, 2, "bigrams");
  dump_grams(c3_, 3, "trigrams");
  if (!out) throw IoError("writing language model failed");
}

NGramLm NGramLm::load(std::istream& in) {
  NGramLm lm;
  lm.words_ = {kBos, kEos, kUnk};
  lm.word_ids_ = {{kBos, kBosId}, {kEos, kEosId}, {kUnk, kUnkId}};
  lm.c1_ = {0, 0, 0};

  std::string line;
  std::size_t number = 0;
  const auto next_line = [&]() -> std::string& {
    if (!std::getline(in, line)) {
      throw ParseError("unexpected end of language model file", number);
    }
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  };
  const auto split2 = [&](const std::string& s) {
    const std::size_t tab = s.find('\t');
    if (tab == std::string::npos) {
      throw ParseError("expected tab-separated fields", number);
    }
    return std::pair<std::string, std::string>(s.substr(0, tab),
                                               s.substr(tab + 1));
  };

  if (next_line() != "gecforge-lm\t1") {
    throw ParseError("not a gecforge-lm version 1 file", 1);
  }

  {
    const std::string& opts = next_line();
    std::vector<std::string> cols;
    std::size_t pos = 0;
    while (true) {
      const std::size_t tab = opts.find('\t', pos);
      if (tab == std::string::npos) {
        cols.push_back(opts.substr(pos));
        break;
      }
      cols.push_back(opts.substr(pos, tab - pos));
      pos = tab + 1;
    }
    if (cols.size() != 5 || cols[0] != "options") {
      throw ParseError("expected options line", number);
    }
    lm.options_.lambda1 = parse_hex_double(cols[1], number);
    lm.options_.lambda2 = parse_hex_double(cols[2], number);
    lm.options_.lambda3 = parse_hex_double(cols[3], number);
    lm.options_.alpha = parse_hex_double(cols[4], number);
    lm.options_.validate();
  }

  const auto read_section = [&](const char* name) {
    const auto [label, count_text] = split2(next_line());
    if (label != name) {
      throw ParseError(std::string("expected section '") + name + "'", number);
    }
    return parse_count(count_text, number);
  };

  const std::uint64_t n_words = read_section("words");
  for (std::uint64_t i = 0; i < n_words; ++i) {
    const auto [word, count_text] = split2(next_line());
    const std::uint64_t count = parse_count(count_text, number);
    const int id = lm.intern(word);
    lm.c1_[static_cast<std::size_t>(id)] = count;
    lm.total_words_ += count;
  }
  lm.r2_.assign(lm.words_.size(), 0);

  const std::uint64_t n_bigrams = read_section("bigrams");
  for (std::uint64_t i = 0; i < n_bigrams; ++i) {
    const auto [gram, count_text] = split2(next_line());
    const std::uint64_t count = parse_count(count_text, number);
    const Sentence toks = split_tokens(gram);
    if (toks.size() != 2) throw ParseError("bad bigram row", number);
    const int v = lm.intern(toks[0]);
    const int w = lm.intern(toks[1]);
    lm.c2_[pack2(v, w)] += count;
    if (lm.r2_.size() < lm.words_.size()) lm.r2_.resize(lm.words_.size(), 0);
    lm.r2_[static_cast<std::size_t>(v)] += count;
  }

  const std::uint64_t n_trigrams = read_section("trigrams");
  for (std::uint64_t i = 0; i < n_trigrams; ++i) {
    const auto [gram, count_text] = split2(next_line());
    const std::uint64_t count = parse_count(count_text, number);
    const Sentence toks = split_tokens(gram);
    if (toks.size() != 3) throw ParseError("bad trigram row", number);
    const int u = lm.intern(toks[0]);
    const int v = lm.intern(toks[1]);
    const int w = lm.intern(toks[2]);
    lm.c3_[pack3(u, v, w)] += count;
    lm.r3_[pack2(u, v)] += count;
  }

  if (lm.r2_.size() < lm.words_.size()) lm.r2_.resize(lm.words_.size(), 0);
  return lm;
}

std::vector<std::string> extract_capital_words(std::istream& corpus,
                                               const CapitalConfig& config) {
  struct Tally {
    std::uint64_t capitalized = 0;
    std::uint64_t lowercase = 0;
  };
  std::unordered_map<std::string, Tally> tallies;

  const auto classify = [](const std::string& tok) -> int {
    // 1 = Capitalized (initial upper, rest lower), 0 = all lowercase,
    // -1 = anything else (digits, ALLCAPS, CamelCase, punctuation).
    if (tok.empty() ||
        !std::isalpha(static_cast<unsigned char>(tok[0]))) {
      return -1;
    }
    for (std::size_t i = 1; i < tok.size(); ++i) {
      const auto c = static_cast<unsigned char>(tok[i]);
      if (std::isupper(c)) return -1;
      if (!std::isalpha(c) && c != '\'' && c != '-') return -1;
    }
    return std::isupper(static_cast<unsigned char>(tok[0])) ? 1 : 0;
  };

  for_each_line(corpus, [&](std::string&& line, std::size_t) {
    const Sentence tokens = split_tokens(line);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const int kind = classify(tokens[i]);
      if (kind < 0) continue;
      if (kind == 1) {
        // Sentence-initial capitals are conventional, not evidence.
        if (i == 0) continue;
        std::string low(tokens[i]);
        low[0] = static_cast<char>(
            std::tolower(static_cast<unsigned char>(low[0])));
        ++tallies[low].capitalized;
      } else {
        ++tallies[tokens[i]].lowercase;
      }
    }
  });

  std::vector<std::string> result;
  for (const auto& [word, tally] : tallies) {
    if (tally.capitalized < config.min_capital_count) continue;
    const double cap = static_cast<double>(tally.capitalized);
    const double low = static_cast<double>(tally.lowercase);
    const bool qualifies = config.use_margin
                               ? cap > low + config.margin
                               : cap > config.ratio * low;
    if (qualifies) result.push_back(word);
  }
  std::sort(result.begin(), result.end());
  return result;
}

}  // namespace gecforge
