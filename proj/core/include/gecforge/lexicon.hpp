#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace gecforge {

enum class TokenType { kOther, kPreposition, kNoun, kVerb };

// Slots of a verb paradigm, in table column order.
enum class VerbSlot : std::size_t {
  kBase = 0,
  kThirdSingular = 1,
  kPast = 2,
  kPastParticiple = 3,
  kGerund = 4,
};

const char* token_type_name(TokenType type);
std::optional<TokenType> token_type_from_name(const std::string& name);

// Word tables backing error typing and type-based noising: a preposition
// set (which always contains the empty string, standing for a dropped
// preposition), singular/plural noun pairs, and five-slot verb paradigms.
// Lookups are case-insensitive; inflected outputs mirror an initial capital
// of the query token ("Cats" -> "Cat").
class MorphLexicon {
 public:
  MorphLexicon();

  // Builds the tables from word lists. Nouns: "lemma" (plural derived by
  // rule) or "singular<TAB>plural". Verbs: "base" (forms derived by rule) or
  // all five columns "base 3sg past pastpart gerund" tab-separated.
  // Prepositions: one per line. '#' starts a comment, blank lines are
  // skipped. Throws ParseError on malformed rows.
  static MorphLexicon from_word_lists(std::istream& nouns, std::istream& verbs,
                                      std::istream& prepositions);

  void save(std::ostream& out) const;
  static MorphLexicon load(std::istream& in);

  // Type of a token under the current priority order (default VERB > NOUN >
  // PREP); kOther when no table knows it.
  TokenType token_type(const std::string& token) const;

  // Priority used by token_type when a token sits in several tables.
  void set_type_priority(const std::vector<TokenType>& order);
  const std::vector<TokenType>& type_priority() const { return priority_; }

  bool is_preposition(const std::string& s) const;
  // All prepositions, sorted, with the empty string first.
  const std::vector<std::string>& prepositions() const { return preps_; }

  // Opposite number of a noun ("cat" -> "cats", "children" -> "child");
  // nullopt when the token is not in the noun table.
  std::optional<std::string> toggle_number(const std::string& token) const;
  bool is_number_pair(const std::string& a, const std::string& b) const;

  // Base form of the paradigm containing the token, nullopt for unknowns.
  std::optional<std::string> verb_lemma(const std::string& token) const;

  // Form of the token's paradigm in a given slot.
  std::optional<std::string> verb_form(const std::string& token,
                                       VerbSlot slot) const;

  // Distinct other surface forms of the token's paradigm, sorted; empty for
  // unknown tokens or single-surface paradigms.
  std::vector<std::string> verb_alternatives(const std::string& token) const;

  // True when any table contains the token (case-insensitive).
  bool contains_word(const std::string& token) const;

  // Direct construction, used by tests and tools.
  void add_preposition(const std::string& prep);
  void add_noun_pair(const std::string& singular, const std::string& plural);
  void add_verb_paradigm(const std::array<std::string, 5>& forms);
  // Tags a token with a type without inflection data; type-based noising
  // falls back to copying such tokens.
  void add_typed_word(const std::string& token, TokenType type);

  std::size_t noun_pair_count() const { return noun_pairs_.size(); }
  std::size_t verb_paradigm_count() const { return paradigms_.size(); }

  // Rule-derived regular inflections, exposed for table construction and
  // tests. Inputs are expected lowercase.
  static std::string regular_plural(const std::string& lemma);
  static std::array<std::string, 5> regular_paradigm(const std::string& base);

 private:
  std::vector<std::string> preps_;  // sorted, "" first
  std::unordered_set<std::string> prep_set_;

  std::vector<std::pair<std::string, std::string>> noun_pairs_;
  std::unordered_map<std::string, std::string> noun_toggle_;

  std::vector<std::array<std::string, 5>> paradigms_;
  std::unordered_map<std::string, std::size_t> verb_index_;

  std::unordered_map<std::string, TokenType> typed_words_;

  std::vector<TokenType> priority_;
};

}  // namespace gecforge
