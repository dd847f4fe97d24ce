#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gecforge/corpus.hpp"

namespace gecforge {

// Byte pair encoding over whitespace tokens. Words are split into UTF-8
// characters plus an end-of-word marker; training repeatedly merges the most
// frequent adjacent symbol pair (ties to the lexicographically smaller pair)
// until the symbol vocabulary reaches the target size or no pair occurs
// twice. Characters outside the training alphabet encode as the unknown
// symbol, so decode(encode(s)) == s exactly for sentences over the training
// alphabet.
class BpeModel {
 public:
  static constexpr const char* kEndOfWord = "</w>";
  static constexpr const char* kUnknown = "<unk>";

  static BpeModel learn(std::istream& corpus, std::size_t target_vocab_size);

  // Subword pieces of one word (marker included) or a whole sentence.
  std::vector<std::string> encode_word(const std::string& word) const;
  std::vector<std::string> encode(const Sentence& sentence) const;

  // Joins pieces back into words at end-of-word markers.
  Sentence decode(const std::vector<std::string>& pieces) const;

  const std::vector<std::pair<std::string, std::string>>& merges() const {
    return merges_;
  }
  // Distinct symbols: alphabet, end-of-word marker and merge products.
  std::size_t vocab_size() const { return vocab_.size(); }
  const std::set<std::string>& alphabet() const { return alphabet_; }

  void save(std::ostream& out) const;
  static BpeModel load(std::istream& in);

 private:
  void index_merges();

  std::set<std::string> alphabet_;  // single characters only
  std::set<std::string> vocab_;     // alphabet + marker + merge products
  std::vector<std::pair<std::string, std::string>> merges_;
  std::map<std::pair<std::string, std::string>, std::size_t> merge_ranks_;
};

}  // namespace gecforge
