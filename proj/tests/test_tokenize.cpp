#include "doctest.h"
#include "navkit/tokenize.hpp"

using namespace navkit;

TEST_CASE("tokenize lowercases alphanumeric runs") {
  auto toks = tokenize("Hello, World 42!");
  REQUIRE(toks.size() == 3);
  CHECK(toks[0] == "hello");
  CHECK(toks[1] == "world");
  CHECK(toks[2] == "42");
}

TEST_CASE("tokenize keeps utf-8 bytes inside tokens") {
  auto toks = tokenize("caf\xC3\xA9 au lait");
  REQUIRE(toks.size() == 3);
  CHECK(toks[0] == "caf\xC3\xA9");
}

TEST_CASE("alpha pattern drops digits") {
  auto toks = tokenize("abc 123 x9y", TokenPattern::Alpha);
  REQUIRE(toks.size() == 3);
  CHECK(toks[0] == "abc");
  CHECK(toks[1] == "x");
  CHECK(toks[2] == "y");
}

TEST_CASE("empty input gives no tokens") { CHECK(tokenize("  ,;! ").empty()); }

TEST_CASE("split_sentences splits on terminators followed by whitespace") {
  auto s = split_sentences("one two three. four five six! seven eight nine?");
  REQUIRE(s.size() == 3);
  CHECK(s[0] == "one two three.");
  CHECK(s[1] == "four five six!");
  CHECK(s[2] == "seven eight nine?");
}

TEST_CASE("split_sentences merges short fragments forward") {
  auto s = split_sentences("Dr. Smith went home. then they slept well.");
  // "Dr." has one token, merges into the next sentence
  REQUIRE(s.size() == 2);
  CHECK(s[0] == "Dr. Smith went home.");
}

TEST_CASE("split_sentences trailing short fragment merges backward") {
  auto s = split_sentences("alpha beta gamma delta. ok.");
  REQUIRE(s.size() == 1);
  CHECK(s[0] == "alpha beta gamma delta. ok.");
}

TEST_CASE("text without terminator is one sentence") {
  auto s = split_sentences("no terminator here at all");
  REQUIRE(s.size() == 1);
}

TEST_CASE("a period mid-word does not split") {
  auto s = split_sentences("version 1.2 shipped early. more words follow here.");
  REQUIRE(s.size() == 2);
  CHECK(s[0] == "version 1.2 shipped early.");
}
