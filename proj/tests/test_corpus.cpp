#include "gecforge/corpus.hpp"

#include <sstream>

#include "doctest.h"
#include "gecforge/error.hpp"
#include "gecforge/rng.hpp"

using namespace gecforge;

namespace {

Sentence toks(std::initializer_list<const char*> words) {
  Sentence s;
  for (const char* w : words) s.emplace_back(w);
  return s;
}

}  // namespace

TEST_CASE("tokenize splits contractions per the rule table") {
  struct Case {
    const char* text;
    Sentence want;
  };
  // The frozen v1 contraction table: split the clitic, keep original bytes.
  const Case cases[] = {
      {"don't stop", toks({"do", "n't", "stop"})},
      {"Don't", toks({"Do", "n't"})},
      {"DON'T", toks({"DO", "N'T"})},
      {"won't", toks({"wo", "n't"})},
      {"can't", toks({"ca", "n't"})},
      {"isn't", toks({"is", "n't"})},
      {"I'm", toks({"I", "'m"})},
      {"she's", toks({"she", "'s"})},
      {"it's here", toks({"it", "'s", "here"})},
      {"we're", toks({"we", "'re"})},
      {"they've", toks({"they", "'ve"})},
      {"he'll", toks({"he", "'ll"})},
      {"I'd", toks({"I", "'d"})},
      {"you'd", toks({"you", "'d"})},
      {"She'S", toks({"She", "'S"})},
      {"THEY'RE", toks({"THEY", "'RE"})},
      {"we'Ve", toks({"we", "'Ve"})},
      {"He'Ll", toks({"He", "'Ll"})},
      {"wasn't mine", toks({"was", "n't", "mine"})},
      {"shouldn't", toks({"should", "n't"})},
  };
  for (const Case& c : cases) {
    CAPTURE(c.text);
    CHECK(tokenize(c.text) == c.want);
  }
}

TEST_CASE("tokenize detaches punctuation and keeps protected forms") {
  CHECK(tokenize("hello, world") == toks({"hello", ",", "world"}));
  CHECK(tokenize("end.") == toks({"end", "."}));
  CHECK(tokenize("(yes)") == toks({"(", "yes", ")"}));
  CHECK(tokenize("wait...") == toks({"wait", "..."}));
  CHECK(tokenize("really?!") == toks({"really", "?", "!"}));
  CHECK(tokenize("stop!!!") == toks({"stop", "!!!"}));
  CHECK(tokenize("\"quoted\"") == toks({"\"", "quoted", "\""}));
  CHECK(tokenize("dogs'") == toks({"dogs", "'"}));
  CHECK(tokenize("'starts") == toks({"'", "starts"}));

  // Dotted single-letter acronyms and word-internal periods stay whole;
  // a trailing period detaches.
  CHECK(tokenize("U.S.") == toks({"U.S."}));
  CHECK(tokenize("e.g.") == toks({"e.g."}));
  CHECK(tokenize("example.com") == toks({"example.com"}));
  CHECK(tokenize("etc.") == toks({"etc", "."}));

  // Internal punctuation survives between word characters.
  CHECK(tokenize("well-known") == toks({"well-known"}));
  CHECK(tokenize("a/b") == toks({"a/b"}));
  CHECK(tokenize("AT&T") == toks({"AT&T"}));
  CHECK(tokenize("foo_bar") == toks({"foo_bar"}));
  CHECK(tokenize("rock'n'roll") == toks({"rock'n'roll"}));

  // Comma and colon glue digits only.
  CHECK(tokenize("1,000") == toks({"1,000"}));
  CHECK(tokenize("12:30") == toks({"12:30"}));
  CHECK(tokenize("a,b") == toks({"a", ",", "b"}));
  CHECK(tokenize("a:b") == toks({"a", ":", "b"}));

  CHECK(tokenize("") == Sentence{});
  CHECK(tokenize("   ") == Sentence{});
  CHECK(tokenize("  spaced   out  ") == toks({"spaced", "out"}));
}

TEST_CASE("tokenize is idempotent") {
  const char* samples[] = {
      "don't stop, I said (twice)... you can't!",
      "The U.S. report, e.g. page 1,000, isn't ready at 12:30.",
      "well-known rock'n'roll AT&T a/b \"quoted\" dogs' x!!!",
      "She'S THEY'RE wasn't ... ?! .",
  };
  for (const char* s : samples) {
    CAPTURE(s);
    const Sentence once = tokenize(s);
    CHECK(tokenize(join_tokens(once)) == once);
  }

  // Random printable ASCII must also settle after one pass.
  SplitRng rng(41);
  const char charset[] =
      "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"
      ".,:;!?'\"()-/&_ ";
  for (int round = 0; round < 300; ++round) {
    std::string text;
    const std::size_t len = rng.next_below(40);
    for (std::size_t i = 0; i < len; ++i) {
      text += charset[rng.next_below(sizeof charset - 1)];
    }
    CAPTURE(text);
    const Sentence once = tokenize(text);
    CHECK(tokenize(join_tokens(once)) == once);
  }
}

TEST_CASE("apply_edits rewrites spans in order") {
  const Sentence src = toks({"I", "has", "a", "apple", "."});

  SUBCASE("substitutions") {
    std::vector<Edit> edits{{1, 2, {"have"}, ""}, {2, 3, {"an"}, ""}};
    CHECK(apply_edits(src, edits) == toks({"I", "have", "an", "apple", "."}));
  }
  SUBCASE("deletion") {
    std::vector<Edit> edits{{2, 3, {}, ""}};
    CHECK(apply_edits(src, edits) == toks({"I", "has", "apple", "."}));
  }
  SUBCASE("insertion at the end") {
    std::vector<Edit> edits{{5, 5, {"Really"}, ""}};
    CHECK(apply_edits(src, edits) ==
          toks({"I", "has", "a", "apple", ".", "Really"}));
  }
  SUBCASE("insertion at the start") {
    std::vector<Edit> edits{{0, 0, {"Now"}, ""}};
    CHECK(apply_edits(src, edits) ==
          toks({"Now", "I", "has", "a", "apple", "."}));
  }
  SUBCASE("multi token replacement") {
    std::vector<Edit> edits{{1, 4, {"am", "hungry"}, ""}};
    CHECK(apply_edits(src, edits) == toks({"I", "am", "hungry", "."}));
  }
}

TEST_CASE("validate_edits rejects malformed edit lists") {
  const Sentence src = toks({"a", "b", "c"});

  CHECK_NOTHROW(validate_edits(src, {{0, 1, {"x"}, ""}, {1, 1, {"y"}, ""}}));
  CHECK_NOTHROW(validate_edits(src, {{3, 3, {"x"}, ""}}));

  // Span end past the sentence.
  CHECK_THROWS_AS(validate_edits(src, {{2, 4, {"x"}, ""}}), ValidationError);
  // Inverted span.
  CHECK_THROWS_AS(validate_edits(src, {{2, 1, {"x"}, ""}}), ValidationError);
  // Overlap.
  CHECK_THROWS_AS(
      validate_edits(src, {{0, 2, {"x"}, ""}, {1, 3, {"y"}, ""}}),
      ValidationError);
  // Out of order.
  CHECK_THROWS_AS(
      validate_edits(src, {{2, 3, {"x"}, ""}, {0, 1, {"y"}, ""}}),
      ValidationError);
  // Replacement token with whitespace.
  CHECK_THROWS_AS(validate_edits(src, {{0, 1, {"two words"}, ""}}),
                  ValidationError);
  // Empty replacement token.
  CHECK_THROWS_AS(validate_edits(src, {{0, 1, {""}, ""}}), ValidationError);
}

TEST_CASE("m2 files round trip through read and write") {
  std::vector<AnnotatedPair> pairs;
  {
    AnnotatedPair p;
    p.source = toks({"She", "go", "home", "."});
    p.annotations.push_back(
        Annotation{0, {{1, 2, {"goes"}, "VERB:FORM"}}});
    p.annotations.push_back(
        Annotation{1, {{1, 2, {"went"}, "VERB:FORM"}, {3, 4, {}, "PUNCT"}}});
    pairs.push_back(p);
  }
  {
    AnnotatedPair p;
    p.source = toks({"Fine", "."});
    p.annotations.push_back(Annotation{0, {}});  // noop annotator
    pairs.push_back(p);
  }

  std::ostringstream out;
  write_m2(pairs, out);
  const std::string text = out.str();

  std::istringstream in(text);
  const std::vector<AnnotatedPair> back = read_m2(in);
  CHECK(back == pairs);

  // Writing what was read reproduces the bytes exactly.
  std::istringstream in2(text);
  std::ostringstream out2;
  write_m2(read_m2(in2), out2);
  CHECK(out2.str() == text);
}

TEST_CASE("m2 reader handles the format's conventions") {
  SUBCASE("noop line registers an annotator with no edits") {
    std::istringstream in(
        "S Fine .\n"
        "A -1 -1|||noop|||-NONE-|||REQUIRED|||-NONE-|||0\n"
        "\n");
    const auto pairs = read_m2(in);
    REQUIRE(pairs.size() == 1);
    REQUIRE(pairs[0].annotations.size() == 1);
    CHECK(pairs[0].annotations[0].edits.empty());
  }

  SUBCASE("-NONE- replacement means deletion") {
    std::istringstream in(
        "S a b c\n"
        "A 1 2|||UNNECESSARY|||-NONE-|||REQUIRED|||-NONE-|||0\n"
        "\n");
    const auto pairs = read_m2(in);
    REQUIRE(pairs[0].annotations[0].edits.size() == 1);
    CHECK(pairs[0].annotations[0].edits[0].replacement.empty());
  }

  SUBCASE("annotators come back sorted by id") {
    std::istringstream in(
        "S a b\n"
        "A 0 1|||X|||x|||REQUIRED|||-NONE-|||2\n"
        "A 1 2|||Y|||y|||REQUIRED|||-NONE-|||0\n"
        "\n");
    const auto pairs = read_m2(in);
    REQUIRE(pairs[0].annotations.size() == 2);
    CHECK(pairs[0].annotations[0].annotator_id == 0);
    CHECK(pairs[0].annotations[1].annotator_id == 2);
  }

  SUBCASE("a new S line flushes the previous block") {
    std::istringstream in(
        "S a\n"
        "S b\n"
        "\n");
    const auto pairs = read_m2(in);
    REQUIRE(pairs.size() == 2);
    CHECK(pairs[0].source == toks({"a"}));
    CHECK(pairs[1].source == toks({"b"}));
  }

  SUBCASE("edit line outside a block is an error") {
    std::istringstream in("A 0 1|||X|||x|||REQUIRED|||-NONE-|||0\n");
    CHECK_THROWS_AS(read_m2(in), ParseError);
  }

  SUBCASE("wrong field count is an error") {
    std::istringstream in(
        "S a\n"
        "A 0 1|||X|||x|||0\n"
        "\n");
    CHECK_THROWS_AS(read_m2(in), ParseError);
  }

  SUBCASE("overlapping annotator edits are an error") {
    std::istringstream in(
        "S a b c\n"
        "A 0 2|||X|||x|||REQUIRED|||-NONE-|||0\n"
        "A 1 3|||Y|||y|||REQUIRED|||-NONE-|||0\n"
        "\n");
    CHECK_THROWS_AS(read_m2(in), ValidationError);
  }
}

TEST_CASE("tsv pair streaming enforces exactly one tab") {
  std::ostringstream out;
  write_tsv_pair(toks({"a", "b"}), toks({"c"}), out);
  write_tsv_pair(toks({"x"}), toks({"y", "z"}), out);

  std::istringstream in(out.str());
  std::vector<std::pair<Sentence, Sentence>> got;
  for_each_tsv_pair(in, [&](Sentence&& s, Sentence&& t, std::size_t line) {
    CHECK(line == got.size() + 1);
    got.emplace_back(std::move(s), std::move(t));
  });
  REQUIRE(got.size() == 2);
  CHECK(got[0].first == toks({"a", "b"}));
  CHECK(got[0].second == toks({"c"}));
  CHECK(got[1].second == toks({"y", "z"}));

  std::istringstream no_tab("a b c\n");
  CHECK_THROWS_AS(
      for_each_tsv_pair(no_tab, [](Sentence&&, Sentence&&, std::size_t) {}),
      ParseError);
  std::istringstream two_tabs("a\tb\tc\n");
  CHECK_THROWS_AS(
      for_each_tsv_pair(two_tabs, [](Sentence&&, Sentence&&, std::size_t) {}),
      ParseError);
}

TEST_CASE("line reader strips carriage returns and keeps blanks") {
  std::istringstream in("one\r\ntwo\n\nthree");
  std::vector<std::string> lines;
  for_each_line(in, [&](std::string&& line, std::size_t) {
    lines.push_back(std::move(line));
  });
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "one");
  CHECK(lines[1] == "two");
  CHECK(lines[2] == "");
  CHECK(lines[3] == "three");
}

TEST_CASE("split and join are inverses on token lists") {
  const Sentence s = toks({"a", "b,", "c'd"});
  CHECK(split_tokens(join_tokens(s)) == s);
  CHECK(split_tokens("  a   b  ") == toks({"a", "b"}));
  CHECK(split_tokens("") == Sentence{});
  CHECK(join_tokens({}) == "");
}
