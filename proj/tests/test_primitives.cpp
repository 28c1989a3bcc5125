#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "iclgap/primitives.hpp"
#include "testutil.hpp"

using namespace iclgap;

namespace {

DatasetDescriptor with_tokenizer(const std::string& id) {
  return {DatasetId::Custom, id, "scan", "strip-period"};
}

}  // namespace

TEST_CASE("natural tokenization lowercases and strips sentence punctuation") {
  CHECK(tokenize_natural("Did M1 marry M2?") ==
        std::vector<std::string>{"did", "m1", "marry", "m2"});
  CHECK(tokenize_natural("jump twice.") == std::vector<std::string>{"jump", "twice"});
  CHECK(tokenize_natural("  what is  the, size?  ") ==
        std::vector<std::string>{"what", "is", "the", "size"});
  CHECK(tokenize_natural("...") == std::vector<std::string>{});
  CHECK(tokenize_natural("") == std::vector<std::string>{});
  // interior punctuation survives; only the edges are stripped
  CHECK(tokenize_natural("film.actor") == std::vector<std::string>{"film.actor"});
  CHECK(tokenize_natural("m0's") == std::vector<std::string>{"m0's"});
}

TEST_CASE("sparql tokenizer splits braces, parens, commas, stars; periods stay in chunks") {
  const auto t = tokenize_formal(with_tokenizer("sparql"),
                                 "SELECT count(*) WHERE { ?x0 a ns:film.actor . "
                                 "FILTER(?x0 != M1) }");
  CHECK(t.tokens == std::vector<std::string>{"SELECT", "count", "(", "*", ")", "WHERE", "{",
                                             "?x0", "a", "ns:film.actor", ".", "FILTER", "(",
                                             "?x0", "!=", "M1", ")", "}"});
  CHECK(t.balanced);
}

TEST_CASE("sparql tokenizer flags unbalanced delimiters but still tokenizes") {
  const auto t = tokenize_formal(with_tokenizer("sparql"), "SELECT { ?x0 a ?x1");
  CHECK_FALSE(t.balanced);
  CHECK(t.tokens.size() == 5);
  CHECK_FALSE(tokenize_formal(with_tokenizer("sparql"), "( { ) }").balanced);
}

TEST_CASE("funql tokenizer splits parens and commas only") {
  const auto t = tokenize_formal(with_tokenizer("funql"),
                                 "answer ( intersection ( place , loc_2 ( m0 ) ) )");
  CHECK(t.tokens == std::vector<std::string>{"answer", "(", "intersection", "(", "place", ",",
                                             "loc_2", "(", "m0", ")", ")", ")"});
  CHECK(t.balanced);
  CHECK(tokenize_formal(with_tokenizer("funql"), "largest(state(all))").tokens ==
        std::vector<std::string>{"largest", "(", "state", "(", "all", ")", ")"});
}

TEST_CASE("scan tokenizer strips one trailing period from the whole text") {
  CHECK(tokenize_formal(with_tokenizer("scan-actions"), "I_JUMP I_JUMP.").tokens ==
        std::vector<std::string>{"I_JUMP", "I_JUMP"});
  CHECK(tokenize_formal(with_tokenizer("scan-actions"), "I_JUMP I_JUMP").tokens ==
        std::vector<std::string>{"I_JUMP", "I_JUMP"});
  // only the final period is the sentence terminator
  CHECK(tokenize_formal(with_tokenizer("scan-actions"), "A. B.").tokens ==
        std::vector<std::string>{"A.", "B"});
}

TEST_CASE("whitespace tokenizer splits on runs only") {
  CHECK(tokenize_formal(with_tokenizer("whitespace"), "  A  B.C (d) ").tokens ==
        std::vector<std::string>{"A", "B.C", "(d)"});
  CHECK_THROWS_AS(tokenize_formal(with_tokenizer("bpe"), "x"), ConfigError);
}

TEST_CASE("primitive sets deduplicate and sort by (origin, text)") {
  PrimitiveSet s({{Origin::OutputToken, "b"},
                  {Origin::InputWord, "b"},
                  {Origin::InputWord, "a"},
                  {Origin::InputWord, "a"}});
  REQUIRE(s.size() == 3);
  CHECK(s.items()[0] == Primitive{Origin::InputWord, "a"});
  CHECK(s.items()[1] == Primitive{Origin::InputWord, "b"});
  CHECK(s.items()[2] == Primitive{Origin::OutputToken, "b"});
  CHECK(s.contains({Origin::InputWord, "a"}));
  CHECK_FALSE(s.contains({Origin::OutputToken, "a"}));

  PrimitiveSet t({{Origin::InputWord, "b"}, {Origin::OutputToken, "b"}});
  CHECK(s.intersection_size(t) == 2);
  CHECK(PrimitiveSet{}.intersection_size(s) == 0);
}

TEST_CASE("an input word and an equal output token are distinct primitives") {
  const Example ex{0, "run", "run", Split::Train};
  const auto s = primitives_of(ex, with_tokenizer("whitespace"));
  CHECK(s.size() == 2);
  CHECK(s.contains({Origin::InputWord, "run"}));
  CHECK(s.contains({Origin::OutputToken, "run"}));
}

TEST_CASE("inventory counts examples containing a primitive, not occurrences") {
  const std::vector<Example> pool = {
      {0, "jump jump", "JUMP JUMP", Split::Train},  // repeated within one example
      {1, "jump twice", "JUMP JUMP", Split::Train},
      {2, "walk", "WALK", Split::Train},
  };
  const auto inv = build_inventory(pool, with_tokenizer("whitespace"));
  CHECK(inv.pool_size == 3);
  CHECK(inv.count({Origin::InputWord, "jump"}) == 2);
  CHECK(inv.count({Origin::OutputToken, "JUMP"}) == 2);
  CHECK(inv.count({Origin::InputWord, "walk"}) == 1);
  CHECK(inv.count({Origin::InputWord, "absent"}) == 0);
  for (const auto& [p, c] : inv.counts) {
    CHECK(c >= 1);
    CHECK(c <= inv.pool_size);
  }
}

TEST_CASE("synthetic corpus outputs are the uppercase transform of inputs") {
  const auto ex = testutil::synth_split(50, 12, 3, Split::Train);
  for (const Example& e : ex) CHECK(e.output_text == testutil::upper_transform(e.input_text));
}
