#include "gecforge/subword.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "gecforge/error.hpp"

namespace gecforge {

namespace {

// Splits a token into UTF-8 code points; malformed bytes pass through one at
// a time rather than failing, since corpora are not always clean.
std::vector<std::string> utf8_chars(const std::string& word) {
  std::vector<std::string> chars;
  std::size_t i = 0;
  while (i < word.size()) {
    const auto lead = static_cast<unsigned char>(word[i]);
    std::size_t len = 1;
    if (lead >= 0xF0) {
      len = 4;
    } else if (lead >= 0xE0) {
      len = 3;
    } else if (lead >= 0xC0) {
      len = 2;
    }
    if (i + len > word.size()) len = 1;
    chars.push_back(word.substr(i, len));
    i += len;
  }
  return chars;
}

using SymbolPair = std::pair<std::string, std::string>;

struct TrainingWord {
  std::vector<std::string> symbols;
  std::uint64_t freq = 0;
};

}  // namespace

BpeModel BpeModel::learn(std::istream& corpus,
                         std::size_t target_vocab_size) {
  BpeModel model;

  std::map<std::string, std::uint64_t> word_freq;
  for_each_line(corpus, [&](std::string&& line, std::size_t) {
    for (const std::string& tok : split_tokens(line)) ++word_freq[tok];
  });

  std::vector<TrainingWord> words;
  words.reserve(word_freq.size());
  for (const auto& [word, freq] : word_freq) {
    TrainingWord tw;
    tw.symbols = utf8_chars(word);
    for (const std::string& c : tw.symbols) model.alphabet_.insert(c);
    tw.symbols.push_back(kEndOfWord);
    tw.freq = freq;
    words.push_back(std::move(tw));
  }

  model.vocab_ = model.alphabet_;
  if (!words.empty()) model.vocab_.insert(kEndOfWord);

  // Pair statistics plus an index of the words containing each pair, so a
  // merge only revisits affected words.
  std::map<SymbolPair, std::uint64_t> pair_counts;
  std::map<SymbolPair, std::set<std::size_t>> pair_words;

  const auto count_word = [&](std::size_t w, std::int64_t sign) {
    const TrainingWord& tw = words[w];
    for (std::size_t i = 0; i + 1 < tw.symbols.size(); ++i) {
      const SymbolPair pair(tw.symbols[i], tw.symbols[i + 1]);
      auto it = pair_counts.find(pair);
      if (it == pair_counts.end()) {
        it = pair_counts.emplace(pair, 0).first;
      }
      it->second += static_cast<std::uint64_t>(
          sign * static_cast<std::int64_t>(tw.freq));
      if (sign > 0) {
        pair_words[pair].insert(w);
      } else if (it->second == 0) {
        pair_counts.erase(it);
        pair_words.erase(pair);
      }
    }
  };

  for (std::size_t w = 0; w < words.size(); ++w) count_word(w, +1);

  while (model.vocab_.size() < target_vocab_size && !pair_counts.empty()) {
    // Highest count wins; on ties the lexicographically smaller pair, which
    // the sorted map gives us by scanning in order.
    SymbolPair best;
    std::uint64_t best_count = 0;
    for (const auto& [pair, count] : pair_counts) {
      if (count > best_count) {
        best = pair;
        best_count = count;
      }
    }
    // Merging a pair seen once creates a symbol as rare as the word itself;
    // stop there like standard BPE learners do.
    if (best_count < 2) break;

    const std::string merged = best.first + best.second;
    model.merges_.push_back(best);
    model.vocab_.insert(merged);

    const std::set<std::size_t> affected = pair_words[best];
    for (std::size_t w : affected) {
      count_word(w, -1);
      std::vector<std::string>& sym = words[w].symbols;
      std::vector<std::string> next;
      next.reserve(sym.size());
      std::size_t i = 0;
      while (i < sym.size()) {
        if (i + 1 < sym.size() && sym[i] == best.first &&
            sym[i + 1] == best.second) {
          next.push_back(merged);
          i += 2;
        } else {
          next.push_back(std::move(sym[i]));
          ++i;
        }
      }
      sym = std::move(next);
      count_word(w, +1);
    }
  }

  model.index_merges();
  return model;
}

void BpeModel::index_merges() {
  merge_ranks_.clear();
  for (std::size_t r = 0; r < merges_.size(); ++r) {
    merge_ranks_.emplace(merges_[r], r);
  }
}

std::vector<std::string> BpeModel::encode_word(const std::string& word) const {
  std::vector<std::string> symbols;
  for (std::string& c : utf8_chars(word)) {
    symbols.push_back(alphabet_.count(c) ? std::move(c)
                                         : std::string(kUnknown));
  }
  symbols.push_back(kEndOfWord);

  while (symbols.size() > 1) {
    // Apply the earliest-learned merge present anywhere in the word.
    std::size_t best_rank = merge_ranks_.size();
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
      const auto it =
          merge_ranks_.find(SymbolPair(symbols[i], symbols[i + 1]));
      if (it != merge_ranks_.end() && it->second < best_rank) {
        best_rank = it->second;
      }
    }
    if (best_rank == merge_ranks_.size()) break;

    const SymbolPair& pair = merges_[best_rank];
    std::vector<std::string> next;
    next.reserve(symbols.size());
    std::size_t i = 0;
    while (i < symbols.size()) {
      if (i + 1 < symbols.size() && symbols[i] == pair.first &&
          symbols[i + 1] == pair.second) {
        next.push_back(pair.first + pair.second);
        i += 2;
      } else {
        next.push_back(std::move(symbols[i]));
        ++i;
      }
    }
    symbols = std::move(next);
  }
  return symbols;
}

std::vector<std::string> BpeModel::encode(const Sentence& sentence) const {
  std::vector<std::string> pieces;
  for (const std::string& word : sentence) {
    std::vector<std::string> sub = encode_word(word);
    pieces.insert(pieces.end(), std::make_move_iterator(sub.begin()),
                  std::make_move_iterator(sub.end()));
  }
  return pieces;
}

Sentence BpeModel::decode(const std::vector<std::string>& pieces) const {
  const std::string marker = kEndOfWord;
  Sentence words;
  std::string current;
  for (const std::string& piece : pieces) {
    // The marker can only sit at the end of a symbol: nothing is ever merged
    // after it within a word.
    if (piece.size() >= marker.size() &&
        piece.compare(piece.size() - marker.size(), marker.size(), marker) ==
            0) {
      current += piece.substr(0, piece.size() - marker.size());
      if (!current.empty()) words.push_back(std::move(current));
      current.clear();
    } else {
      current += piece;
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

void BpeModel::save(std::ostream& out) const {
  out << "gecforge-bpe\t1\n";
  out << "alphabet\t" << alphabet_.size() << "\n";
  for (const std::string& c : alphabet_) out << c << "\n";
  out << "merges\t" << merges_.size() << "\n";
  for (const auto& [a, b] : merges_) out << a << " " << b << "\n";
  if (!out) throw IoError("writing BPE model failed");
}

BpeModel BpeModel::load(std::istream& in) {
  std::string line;
  std::size_t number = 0;
  const auto next_line = [&]() -> std::string& {
    if (!std::getline(in, line)) {
      throw ParseError("unexpected end of BPE model file", number);
    }
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  };

  if (next_line() != "gecforge-bpe\t1") {
    throw ParseError("not a gecforge-bpe version 1 file", 1);
  }

  const auto section_count = [&](const char* name) {
    const std::string& header = next_line();
    const std::size_t tab = header.find('\t');
    if (tab == std::string::npos || header.substr(0, tab) != name) {
      throw ParseError(std::string("expected section '") + name + "'", number);
    }
    std::uint64_t count = 0;
    for (std::size_t i = tab + 1; i < header.size(); ++i) {
      if (header[i] < '0' || header[i] > '9') {
        throw ParseError("bad section count", number);
      }
      count = count * 10 + static_cast<std::uint64_t>(header[i] - '0');
    }
    return count;
  };

  BpeModel model;
  const std::uint64_t n_alpha = section_count("alphabet");
  for (std::uint64_t i = 0; i < n_alpha; ++i) {
    model.alphabet_.insert(next_line());
  }
  model.vocab_ = model.alphabet_;
  model.vocab_.insert(kEndOfWord);

  const std::uint64_t n_merges = section_count("merges");
  for (std::uint64_t i = 0; i < n_merges; ++i) {
    const std::string& row = next_line();
    const std::size_t space = row.find(' ');
    if (space == std::string::npos || space == 0 || space + 1 == row.size() ||
        row.find(' ', space + 1) != std::string::npos) {
      throw ParseError("bad merge row", number);
    }
    model.merges_.emplace_back(row.substr(0, space), row.substr(space + 1));
    model.vocab_.insert(row.substr(0, space) + row.substr(space + 1));
  }
  model.index_merges();
  return model;
}

}  // namespace gecforge
