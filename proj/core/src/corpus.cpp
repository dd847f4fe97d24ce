#include "gecforge/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstring>
#include <istream>
#include <map>
#include <ostream>
#include <string>

namespace gecforge {

namespace {

bool is_word_byte(unsigned char c) {
  // Bytes >= 0x80 (UTF-8 continuation and lead bytes) count as word material;
  // the tokenizer is deliberately Unicode-naive beyond that.
  return std::isalnum(c) != 0 || c >= 0x80;
}

bool is_digit_byte(unsigned char c) { return std::isdigit(c) != 0; }

bool is_alpha_byte(unsigned char c) { return std::isalpha(c) != 0; }

char lower_ascii(char c) {
  return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

std::string lower_copy(const std::string& s) {
  std::string out(s);
  for (char& c : out) c = lower_ascii(c);
  return out;
}

// Clitic suffixes split from the end of a chunk. Longest first so "n't"
// beats a bare "'t" reading of the same ending.
constexpr std::array<const char*, 7> kContractionSuffixes = {
    "n't", "'re", "'ve", "'ll", "'s", "'d", "'m"};

bool is_contraction_token(const std::string& token) {
  const std::string low = lower_copy(token);
  for (const char* s : kContractionSuffixes) {
    if (low == s) return true;
  }
  return false;
}

// Single-letter dotted acronyms like "U.S." or "e.g.": alternating letter
// and period, starting with a letter and ending with a period.
bool is_dotted_acronym(const std::string& token) {
  if (token.size() < 4 || token.size() % 2 != 0) return false;
  for (std::size_t i = 0; i < token.size(); i += 2) {
    if (!is_alpha_byte(static_cast<unsigned char>(token[i]))) return false;
    if (token[i + 1] != '.') return false;
  }
  return true;
}

// Punctuation inside a chunk stays attached when it glues word material
// together: hyphens, apostrophes, slashes and the like between any word
// bytes, commas and colons only between digits ("1,000", "3:30").
bool keeps_internal_punct(char c, unsigned char prev, unsigned char next) {
  switch (c) {
    case '-':
    case '\'':
    case '/':
    case '&':
    case '_':
    case '.':
      return is_word_byte(prev) && is_word_byte(next);
    case ',':
    case ':':
      return is_digit_byte(prev) && is_digit_byte(next);
    default:
      return false;
  }
}

void emit_chunk(const std::string& piece, Sentence& out) {
  if (piece.empty()) return;
  if (is_contraction_token(piece) || is_dotted_acronym(piece)) {
    out.push_back(piece);
    return;
  }

  const std::size_t n = piece.size();

  // Detach a leading run of one repeated punctuation byte ("..." , "((").
  if (!is_word_byte(static_cast<unsigned char>(piece[0]))) {
    std::size_t j = 1;
    while (j < n && piece[j] == piece[0]) ++j;
    out.push_back(piece.substr(0, j));
    emit_chunk(piece.substr(j), out);
    return;
  }

  // Same for a trailing run.
  if (!is_word_byte(static_cast<unsigned char>(piece[n - 1]))) {
    std::size_t j = n - 1;
    while (j > 0 && piece[j - 1] == piece[n - 1]) --j;
    emit_chunk(piece.substr(0, j), out);
    out.push_back(piece.substr(j));
    return;
  }

  // Both ends are word bytes now. Split a clitic suffix if one is present.
  const std::string low = lower_copy(piece);
  for (const char* s : kContractionSuffixes) {
    const std::size_t len = std::strlen(s);
    if (low.size() > len && low.compare(low.size() - len, len, s) == 0) {
      emit_chunk(piece.substr(0, n - len), out);
      out.push_back(piece.substr(n - len));
      return;
    }
  }

  // Split at the first internal punctuation byte that is not glue.
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const char c = piece[i];
    if (is_word_byte(static_cast<unsigned char>(c))) continue;
    if (keeps_internal_punct(c, static_cast<unsigned char>(piece[i - 1]),
                             static_cast<unsigned char>(piece[i + 1]))) {
      continue;
    }
    emit_chunk(piece.substr(0, i), out);
    emit_chunk(piece.substr(i), out);
    return;
  }

  out.push_back(piece);
}

std::vector<std::string> split_on_marker(const std::string& s,
                                         const std::string& marker) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = s.find(marker, pos);
    if (next == std::string::npos) {
      fields.push_back(s.substr(pos));
      break;
    }
    fields.push_back(s.substr(pos, next - pos));
    pos = next + marker.size();
  }
  return fields;
}

long parse_long(const std::string& s, std::size_t line, const char* what) {
  if (s.empty()) throw ParseError(std::string("empty ") + what, line);
  std::size_t used = 0;
  long value = 0;
  try {
    value = std::stol(s, &used);
  } catch (const std::exception&) {
    throw ParseError(std::string("bad ") + what + " '" + s + "'", line);
  }
  if (used != s.size()) {
    throw ParseError(std::string("bad ") + what + " '" + s + "'", line);
  }
  return value;
}

}  // namespace

Sentence tokenize(const std::string& text) {
  Sentence out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < n && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) emit_chunk(text.substr(start, i - start), out);
  }
  return out;
}

std::string join_tokens(const Sentence& sentence) {
  std::string out;
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    if (i) out += ' ';
    out += sentence[i];
  }
  return out;
}

Sentence split_tokens(const std::string& line) {
  Sentence out;
  std::size_t i = 0;
  const std::size_t n = line.size();
  while (i < n) {
    while (i < n && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t start = i;
    while (i < n && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

void validate_edits(const Sentence& source, const std::vector<Edit>& edits) {
  std::size_t prev_end = 0;
  bool first = true;
  for (const Edit& e : edits) {
    if (e.span_end < e.span_start) {
      throw ValidationError("edit span end before start");
    }
    if (e.span_end > source.size()) {
      throw ValidationError("edit span past end of sentence");
    }
    if (!first && e.span_start < prev_end) {
      throw ValidationError("overlapping or unsorted edit spans");
    }
    for (const std::string& tok : e.replacement) {
      if (tok.empty()) {
        throw ValidationError("empty replacement token");
      }
      for (char c : tok) {
        if (std::isspace(static_cast<unsigned char>(c))) {
          throw ValidationError("whitespace inside replacement token");
        }
      }
    }
    prev_end = e.span_end;
    first = false;
  }
}

Sentence apply_edits(const Sentence& source, const std::vector<Edit>& edits) {
  validate_edits(source, edits);
  Sentence out;
  std::size_t pos = 0;
  for (const Edit& e : edits) {
    out.insert(out.end(), source.begin() + pos, source.begin() + e.span_start);
    out.insert(out.end(), e.replacement.begin(), e.replacement.end());
    pos = e.span_end;
  }
  out.insert(out.end(), source.begin() + pos, source.end());
  return out;
}

void for_each_line(std::istream& in,
                   const std::function<void(std::string&&, std::size_t)>& fn) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    fn(std::move(line), number);
    line.clear();
  }
}

namespace {

struct M2BlockState {
  bool active = false;
  std::size_t s_line = 0;
  Sentence source;
  // annotator id -> edits in file order; std::map keeps ids ascending
  std::map<int, std::vector<Edit>> per_annotator;

  void reset() {
    active = false;
    s_line = 0;
    source.clear();
    per_annotator.clear();
  }

  AnnotatedPair finish() {
    AnnotatedPair pair;
    pair.source = std::move(source);
    if (per_annotator.empty()) {
      pair.annotations.push_back(Annotation{0, {}});
    } else {
      for (auto& [id, edits] : per_annotator) {
        std::stable_sort(edits.begin(), edits.end(), edit_span_less);
        try {
          validate_edits(pair.source, edits);
        } catch (const ValidationError& e) {
          throw ValidationError("block at line " + std::to_string(s_line) +
                                ", annotator " + std::to_string(id) + ": " +
                                e.what());
        }
        pair.annotations.push_back(Annotation{id, std::move(edits)});
      }
    }
    reset();
    return pair;
  }
};

}  // namespace

void for_each_m2(std::istream& in,
                 const std::function<void(AnnotatedPair&&)>& fn) {
  M2BlockState block;

  for_each_line(in, [&](std::string&& line, std::size_t number) {
    if (line.empty()) {
      if (block.active) fn(block.finish());
      return;
    }
    if (line[0] == 'S' && (line.size() == 1 || line[1] == ' ')) {
      // A new S line while a block is open means blocks were concatenated
      // without a blank separator; accept it and flush the previous block.
      if (block.active) fn(block.finish());
      block.active = true;
      block.s_line = number;
      block.source = split_tokens(line.size() > 1 ? line.substr(2) : "");
      return;
    }
    if (line.rfind("A ", 0) == 0) {
      if (!block.active) {
        throw ParseError("A line outside a sentence block", number);
      }
      const auto fields = split_on_marker(line.substr(2), "|||");
      if (fields.size() != 6) {
        throw ParseError("expected 6 |||-separated fields in A line, got " +
                             std::to_string(fields.size()),
                         number);
      }
      const auto span = split_tokens(fields[0]);
      if (span.size() != 2) {
        throw ParseError("expected two span offsets", number);
      }
      const long start = parse_long(span[0], number, "span start");
      const long end = parse_long(span[1], number, "span end");
      const int annotator =
          static_cast<int>(parse_long(fields[5], number, "annotator id"));

      if (start == -1 && end == -1) {
        if (fields[1] != "noop") {
          throw ParseError("span -1 -1 requires type 'noop'", number);
        }
        block.per_annotator[annotator];  // annotator saw the sentence as is
        return;
      }
      if (start < 0 || end < 0) {
        throw ParseError("negative span offset", number);
      }
      Edit edit;
      edit.span_start = static_cast<std::size_t>(start);
      edit.span_end = static_cast<std::size_t>(end);
      edit.category = fields[1];
      if (fields[2] != "-NONE-") edit.replacement = split_tokens(fields[2]);
      block.per_annotator[annotator].push_back(std::move(edit));
      return;
    }
    throw ParseError("expected S, A or blank line", number);
  });

  if (block.active) fn(block.finish());
}

std::vector<AnnotatedPair> read_m2(std::istream& in) {
  std::vector<AnnotatedPair> pairs;
  for_each_m2(in, [&](AnnotatedPair&& p) { pairs.push_back(std::move(p)); });
  return pairs;
}

namespace {

void check_m2_writable(const std::string& text, const char* what) {
  if (text.find("|||") != std::string::npos ||
      text.find('\n') != std::string::npos) {
    throw ValidationError(std::string(what) + " not representable in M2: '" +
                          text + "'");
  }
}

}  // namespace

std::size_t write_m2_block(const AnnotatedPair& pair, std::ostream& out) {
  std::string buf = "S " + join_tokens(pair.source) + "\n";
  for (const Annotation& ann : pair.annotations) {
    const std::string id = std::to_string(ann.annotator_id);
    if (ann.edits.empty()) {
      buf += "A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||" + id + "\n";
      continue;
    }
    for (const Edit& e : ann.edits) {
      check_m2_writable(e.category, "edit category");
      const std::string repl = join_tokens(e.replacement);
      check_m2_writable(repl, "edit replacement");
      buf += "A " + std::to_string(e.span_start) + " " +
             std::to_string(e.span_end) + "|||" + e.category + "|||" + repl +
             "|||REQUIRED|||-NONE-|||" + id + "\n";
    }
  }
  buf += "\n";
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  return buf.size();
}

std::size_t write_m2(const std::vector<AnnotatedPair>& pairs,
                     std::ostream& out) {
  std::size_t bytes = 0;
  for (const AnnotatedPair& pair : pairs) bytes += write_m2_block(pair, out);
  return bytes;
}

void for_each_tsv_pair(
    std::istream& in,
    const std::function<void(Sentence&&, Sentence&&, std::size_t)>& fn) {
  for_each_line(in, [&](std::string&& line, std::size_t number) {
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError("missing tab separator", number);
    }
    if (line.find('\t', tab + 1) != std::string::npos) {
      throw ParseError("more than one tab separator", number);
    }
    fn(split_tokens(line.substr(0, tab)), split_tokens(line.substr(tab + 1)),
       number);
  });
}

std::size_t write_tsv_pair(const Sentence& source, const Sentence& target,
                           std::ostream& out) {
  const std::string buf =
      join_tokens(source) + "\t" + join_tokens(target) + "\n";
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  return buf.size();
}

}  // namespace gecforge
