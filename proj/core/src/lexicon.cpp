#include "gecforge/lexicon.hpp"

#include <algorithm>
#include <cctype>
#include <istream>
#include <ostream>
#include <set>

#include "json.hpp"

#include "gecforge/corpus.hpp"
#include "gecforge/error.hpp"

namespace gecforge {

namespace {

using nlohmann::json;

std::string lower_copy(const std::string& s) {
  std::string out(s);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

// Mirrors an initial ASCII capital of the query onto a table result, so
// "Cats" toggles to "Cat" rather than "cat".
std::string match_initial_case(const std::string& pattern,
                               const std::string& word) {
  if (pattern.empty() || word.empty()) return word;
  if (std::isupper(static_cast<unsigned char>(pattern[0])) &&
      std::islower(static_cast<unsigned char>(word[0]))) {
    std::string out(word);
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
    return out;
  }
  return word;
}

bool is_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

bool is_ascii_letter(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) != 0;
}

bool ends_with(const std::string& s, const char* suffix) {
  const std::size_t len = std::char_traits<char>::length(suffix);
  return s.size() >= len && s.compare(s.size() - len, len, suffix) == 0;
}

// Final-consonant doubling for short stems ("stop" -> "stopped"). The real
// rule depends on stress, which a word list cannot express; longer stems
// that double belong in the explicit five-column table.
bool doubles_final_consonant(const std::string& base) {
  if (base.size() < 3 || base.size() > 4) return false;
  const char a = base[base.size() - 3];
  const char b = base[base.size() - 2];
  const char c = base[base.size() - 1];
  if (!is_ascii_letter(a) || !is_ascii_letter(b) || !is_ascii_letter(c)) {
    return false;
  }
  if (is_vowel(a) || !is_vowel(b) || is_vowel(c)) return false;
  return c != 'w' && c != 'x' && c != 'y';
}

std::string strip_line_comment(const std::string& line) {
  const std::size_t hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cols;
  std::size_t pos = 0;
  while (true) {
    const std::size_t tab = line.find('\t', pos);
    if (tab == std::string::npos) {
      cols.push_back(line.substr(pos));
      break;
    }
    cols.push_back(line.substr(pos, tab - pos));
    pos = tab + 1;
  }
  for (std::string& c : cols) {
    while (!c.empty() && std::isspace(static_cast<unsigned char>(c.back()))) {
      c.pop_back();
    }
    std::size_t lead = 0;
    while (lead < c.size() &&
           std::isspace(static_cast<unsigned char>(c[lead]))) {
      ++lead;
    }
    c.erase(0, lead);
  }
  while (!cols.empty() && cols.back().empty()) cols.pop_back();
  return cols;
}

}  // namespace

const char* token_type_name(TokenType type) {
  switch (type) {
    case TokenType::kPreposition:
      return "PREP";
    case TokenType::kNoun:
      return "NOUN";
    case TokenType::kVerb:
      return "VERB";
    case TokenType::kOther:
      break;
  }
  return "OTHER";
}

std::optional<TokenType> token_type_from_name(const std::string& name) {
  if (name == "PREP") return TokenType::kPreposition;
  if (name == "NOUN") return TokenType::kNoun;
  if (name == "VERB") return TokenType::kVerb;
  if (name == "OTHER") return TokenType::kOther;
  return std::nullopt;
}

MorphLexicon::MorphLexicon()
    : priority_{TokenType::kVerb, TokenType::kNoun, TokenType::kPreposition} {
  // The empty preposition is always present; drawing it in the preposition
  // scenario deletes the token.
  add_preposition("");
}

std::string MorphLexicon::regular_plural(const std::string& lemma) {
  if (lemma.empty()) return lemma;
  if (ends_with(lemma, "s") || ends_with(lemma, "x") || ends_with(lemma, "z") ||
      ends_with(lemma, "ch") || ends_with(lemma, "sh") ||
      ends_with(lemma, "o")) {
    return lemma + "es";
  }
  if (lemma.size() >= 2 && lemma.back() == 'y' &&
      !is_vowel(lemma[lemma.size() - 2])) {
    return lemma.substr(0, lemma.size() - 1) + "ies";
  }
  return lemma + "s";
}

std::array<std::string, 5> MorphLexicon::regular_paradigm(
    const std::string& base) {
  std::array<std::string, 5> forms;
  forms[0] = base;
  forms[1] = regular_plural(base);

  if (ends_with(base, "e")) {
    forms[2] = base + "d";
  } else if (base.size() >= 2 && base.back() == 'y' &&
             !is_vowel(base[base.size() - 2])) {
    forms[2] = base.substr(0, base.size() - 1) + "ied";
  } else if (doubles_final_consonant(base)) {
    forms[2] = base + base.back() + "ed";
  } else {
    forms[2] = base + "ed";
  }
  forms[3] = forms[2];

  if (ends_with(base, "ie")) {
    forms[4] = base.substr(0, base.size() - 2) + "ying";
  } else if (ends_with(base, "e") && !ends_with(base, "ee")) {
    forms[4] = base.substr(0, base.size() - 1) + "ing";
  } else if (doubles_final_consonant(base)) {
    forms[4] = base + base.back() + "ing";
  } else {
    forms[4] = base + "ing";
  }
  return forms;
}

void MorphLexicon::add_preposition(const std::string& prep) {
  const std::string low = lower_copy(prep);
  if (prep_set_.insert(low).second) {
    preps_.insert(std::lower_bound(preps_.begin(), preps_.end(), low), low);
  }
}

void MorphLexicon::add_noun_pair(const std::string& singular,
                                 const std::string& plural) {
  const std::string s = lower_copy(singular);
  const std::string p = lower_copy(plural);
  if (s.empty() || p.empty()) {
    throw ValidationError("empty form in noun pair");
  }
  // First entry wins when a surface form is ambiguous across pairs.
  noun_pairs_.emplace_back(s, p);
  noun_toggle_.emplace(s, p);
  noun_toggle_.emplace(p, s);
}

void MorphLexicon::add_verb_paradigm(const std::array<std::string, 5>& forms) {
  std::array<std::string, 5> low;
  for (std::size_t i = 0; i < forms.size(); ++i) {
    low[i] = lower_copy(forms[i]);
    if (low[i].empty()) throw ValidationError("empty form in verb paradigm");
  }
  const std::size_t index = paradigms_.size();
  paradigms_.push_back(low);
  for (const std::string& form : low) {
    verb_index_.emplace(form, index);  // first paradigm wins on collisions
  }
}

void MorphLexicon::add_typed_word(const std::string& token, TokenType type) {
  typed_words_[lower_copy(token)] = type;
}

bool MorphLexicon::is_preposition(const std::string& s) const {
  return prep_set_.count(lower_copy(s)) > 0;
}

std::optional<std::string> MorphLexicon::toggle_number(
    const std::string& token) const {
  const auto it = noun_toggle_.find(lower_copy(token));
  if (it == noun_toggle_.end()) return std::nullopt;
  return match_initial_case(token, it->second);
}

bool MorphLexicon::is_number_pair(const std::string& a,
                                  const std::string& b) const {
  const auto toggled = toggle_number(a);
  return toggled && lower_copy(*toggled) == lower_copy(b) &&
         lower_copy(a) != lower_copy(b);
}

std::optional<std::string> MorphLexicon::verb_lemma(
    const std::string& token) const {
  const auto it = verb_index_.find(lower_copy(token));
  if (it == verb_index_.end()) return std::nullopt;
  return paradigms_[it->second][0];
}

std::optional<std::string> MorphLexicon::verb_form(const std::string& token,
                                                   VerbSlot slot) const {
  const auto it = verb_index_.find(lower_copy(token));
  if (it == verb_index_.end()) return std::nullopt;
  return match_initial_case(token,
                            paradigms_[it->second][static_cast<std::size_t>(slot)]);
}

std::vector<std::string> MorphLexicon::verb_alternatives(
    const std::string& token) const {
  const std::string low = lower_copy(token);
  const auto it = verb_index_.find(low);
  if (it == verb_index_.end()) return {};
  std::set<std::string> forms(paradigms_[it->second].begin(),
                              paradigms_[it->second].end());
  forms.erase(low);
  std::vector<std::string> out;
  out.reserve(forms.size());
  for (const std::string& f : forms) {
    out.push_back(match_initial_case(token, f));
  }
  return out;
}

bool MorphLexicon::contains_word(const std::string& token) const {
  const std::string low = lower_copy(token);
  if (!low.empty() && prep_set_.count(low)) return true;
  return noun_toggle_.count(low) > 0 || verb_index_.count(low) > 0 ||
         typed_words_.count(low) > 0;
}

TokenType MorphLexicon::token_type(const std::string& token) const {
  const std::string low = lower_copy(token);
  const auto typed = typed_words_.find(low);
  for (TokenType type : priority_) {
    switch (type) {
      case TokenType::kVerb:
        if (verb_index_.count(low)) return type;
        break;
      case TokenType::kNoun:
        if (noun_toggle_.count(low)) return type;
        break;
      case TokenType::kPreposition:
        if (!low.empty() && prep_set_.count(low)) return type;
        break;
      case TokenType::kOther:
        break;
    }
    if (typed != typed_words_.end() && typed->second == type) return type;
  }
  return TokenType::kOther;
}

void MorphLexicon::set_type_priority(const std::vector<TokenType>& order) {
  if (order.empty()) throw ValidationError("empty type priority");
  priority_ = order;
}

MorphLexicon MorphLexicon::from_word_lists(std::istream& nouns,
                                           std::istream& verbs,
                                           std::istream& prepositions) {
  MorphLexicon lex;

  for_each_line(nouns, [&](std::string&& raw, std::size_t number) {
    const auto cols = split_tabs(strip_line_comment(raw));
    if (cols.empty()) return;
    if (cols.size() == 1) {
      const std::string lemma = lower_copy(cols[0]);
      lex.add_noun_pair(lemma, regular_plural(lemma));
    } else if (cols.size() == 2) {
      lex.add_noun_pair(cols[0], cols[1]);
    } else {
      throw ParseError("noun row needs 1 or 2 columns", number);
    }
  });

  for_each_line(verbs, [&](std::string&& raw, std::size_t number) {
    const auto cols = split_tabs(strip_line_comment(raw));
    if (cols.empty()) return;
    if (cols.size() == 1) {
      lex.add_verb_paradigm(regular_paradigm(lower_copy(cols[0])));
    } else if (cols.size() == 5) {
      lex.add_verb_paradigm({cols[0], cols[1], cols[2], cols[3], cols[4]});
    } else {
      throw ParseError("verb row needs 1 or 5 columns", number);
    }
  });

  for_each_line(prepositions, [&](std::string&& raw, std::size_t) {
    const auto cols = split_tabs(strip_line_comment(raw));
    if (cols.empty()) return;
    lex.add_preposition(cols[0]);
  });

  return lex;
}

void MorphLexicon::save(std::ostream& out) const {
  json doc;
  doc["format_version"] = 1;

  json prio = json::array();
  for (TokenType t : priority_) prio.push_back(token_type_name(t));
  doc["type_priority"] = prio;

  doc["prepositions"] = preps_;

  std::vector<std::pair<std::string, std::string>> nouns(noun_pairs_);
  std::sort(nouns.begin(), nouns.end());
  json noun_rows = json::array();
  for (const auto& [s, p] : nouns) noun_rows.push_back(json::array({s, p}));
  doc["noun_pairs"] = noun_rows;

  std::vector<std::array<std::string, 5>> verbs(paradigms_);
  std::sort(verbs.begin(), verbs.end());
  json verb_rows = json::array();
  for (const auto& forms : verbs) {
    verb_rows.push_back(json(std::vector<std::string>(forms.begin(),
                                                      forms.end())));
  }
  doc["verb_paradigms"] = verb_rows;

  json typed = json::object();
  std::vector<std::pair<std::string, TokenType>> tagged(typed_words_.begin(),
                                                        typed_words_.end());
  std::sort(tagged.begin(), tagged.end());
  for (const auto& [word, type] : tagged) typed[word] = token_type_name(type);
  doc["typed_words"] = typed;

  out << doc.dump(2) << "\n";
}

MorphLexicon MorphLexicon::load(std::istream& in) {
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ParseError(std::string("lexicon JSON: ") + e.what());
  }

  try {
    if (doc.at("format_version").get<int>() != 1) {
      throw ParseError("unsupported lexicon format_version");
    }
    MorphLexicon lex;
    for (const auto& p : doc.at("prepositions")) {
      lex.add_preposition(p.get<std::string>());
    }
    for (const auto& row : doc.at("noun_pairs")) {
      lex.add_noun_pair(row.at(0).get<std::string>(),
                        row.at(1).get<std::string>());
    }
    for (const auto& row : doc.at("verb_paradigms")) {
      if (row.size() != 5) throw ParseError("verb paradigm needs 5 forms");
      lex.add_verb_paradigm({row.at(0).get<std::string>(),
                             row.at(1).get<std::string>(),
                             row.at(2).get<std::string>(),
                             row.at(3).get<std::string>(),
                             row.at(4).get<std::string>()});
    }
    if (doc.contains("typed_words")) {
      for (const auto& [word, name] : doc.at("typed_words").items()) {
        const auto type = token_type_from_name(name.get<std::string>());
        if (!type) throw ParseError("unknown token type '" +
                                    name.get<std::string>() + "'");
        lex.add_typed_word(word, *type);
      }
    }
    if (doc.contains("type_priority")) {
      std::vector<TokenType> prio;
      for (const auto& name : doc.at("type_priority")) {
        const auto type = token_type_from_name(name.get<std::string>());
        if (!type) throw ParseError("unknown token type in priority");
        prio.push_back(*type);
      }
      lex.set_type_priority(prio);
    }
    return lex;
  } catch (const json::exception& e) {
    throw ParseError(std::string("lexicon JSON: ") + e.what());
  }
}

}  // namespace gecforge
