#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "iclgap/prompt.hpp"
#include "testutil.hpp"

using namespace iclgap;

namespace {

std::size_t count_occurrences(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t at = hay.find(needle); at != std::string::npos;
       at = hay.find(needle, at + 1))
    ++n;
  return n;
}

std::string golden(const std::string& name) {
  return testutil::slurp(std::string(ICLGAP_TEST_DIR) + "/golden/" + name);
}

}  // namespace

TEST_CASE("rendered prompts match the golden bytes") {
  SUBCASE("cfq") {
    const std::vector<Example> ex = {
        {0,
         "Was a employer of M1 a film distributor?",
         "SELECT count(*) WHERE { ?x0 a film.film_distributor . ?x0 "
         "employment_tenure.person M1 }",
         Split::Train},
    };
    const std::string got =
        render_prompt(builtin_template("cfq"), ex, "Was M1 a screenwriter");
    CHECK(got == golden("prompt_cfq.txt"));
  }
  SUBCASE("scan") {
    std::string actions = "TURN_RIGHT TURN_RIGHT RUN TURN_RIGHT TURN_RIGHT RUN "
                          "TURN_RIGHT TURN_RIGHT RUN";
    for (int i = 0; i < 12; ++i) actions += " TURN_RIGHT JUMP";
    actions += ".";
    const std::vector<Example> ex = {
        {0, "run opposite right thrice and jump around right thrice.", actions,
         Split::Train},
    };
    const std::string got = render_prompt(builtin_template("scan"), ex, "jump twice.");
    CHECK(got == golden("prompt_scan.txt"));
  }
  SUBCASE("geoquery") {
    const std::vector<Example> ex = {
        {0, "how high is the highest point in m0.",
         "answer ( elevation_1 ( highest ( intersection ( place , loc_2 ( m0 ) ) ) ) ).",
         Split::Train},
    };
    const std::string got =
        render_prompt(builtin_template("geoquery"), ex, "how many states are there");
    CHECK(got == golden("prompt_geoquery.txt"));
  }
}

TEST_CASE("prompt structure invariants") {
  const PromptTemplate tmpl = builtin_template("scan");
  std::vector<Example> exemplars;
  for (int i = 0; i < 7; ++i)
    exemplars.push_back({i, "in " + std::to_string(i), "OUT " + std::to_string(i),
                         Split::Train});
  const std::string p = render_prompt(tmpl, exemplars, "the query");

  CHECK(p.starts_with(tmpl.prefix_text));
  CHECK(p.ends_with(tmpl.output_prefix));
  CHECK_FALSE(p.ends_with("\n"));
  CHECK(count_occurrences(p, tmpl.output_prefix) == exemplars.size() + 1);
  CHECK(count_occurrences(p, tmpl.input_prefix) == exemplars.size() + 1);
  // one blank line after the prefix, one between pairs, one before the query
  CHECK(count_occurrences(p, "\n\n") == exemplars.size() + 1);
  CHECK(p.find("the query\n" + tmpl.output_prefix) != std::string::npos);
}

TEST_CASE("exemplar order changes the rendered bytes") {
  const PromptTemplate tmpl = builtin_template("geoquery");
  const std::vector<Example> ab = {{0, "alpha", "A", Split::Train},
                                   {1, "beta", "B", Split::Train}};
  const std::vector<Example> ba = {ab[1], ab[0]};
  CHECK(render_prompt(tmpl, ab, "q") != render_prompt(tmpl, ba, "q"));
}

TEST_CASE("pool-and-picks form renders the same bytes as the direct form") {
  const PromptTemplate tmpl = builtin_template("cfq");
  std::vector<Example> pool;
  for (int i = 0; i < 5; ++i)
    pool.push_back({i, "q" + std::to_string(i), "a" + std::to_string(i), Split::Test});
  const std::vector<std::uint32_t> picks = {3, 0, 4};
  const std::vector<Example> direct = {pool[3], pool[0], pool[4]};
  CHECK(render_prompt(tmpl, pool, picks, "tail") ==
        render_prompt(tmpl, direct, "tail"));
  const std::vector<std::uint32_t> bad = {5};
  CHECK_THROWS_AS(render_prompt(tmpl, pool, bad, "tail"), ArgumentError);
}

TEST_CASE("rendering with no exemplars is rejected") {
  CHECK_THROWS_AS(render_prompt(builtin_template("scan"), std::vector<Example>{}, "q"),
                  ArgumentError);
}

TEST_CASE("custom pair separators thread through") {
  PromptTemplate tmpl = builtin_template("scan");
  tmpl.pair_separator = "\n###\n";
  tmpl.validate();
  const std::vector<Example> ex = {{0, "a", "A", Split::Train},
                                   {1, "b", "B", Split::Train}};
  const std::string p = render_prompt(tmpl, ex, "c");
  CHECK(count_occurrences(p, "\n###\n") == 3);
  CHECK(count_occurrences(p, "\n\n") == 0);
}

TEST_CASE("template validation rejects malformed prefixes") {
  PromptTemplate tmpl = builtin_template("cfq");
  tmpl.validate();  // built-ins are valid

  PromptTemplate no_colon = tmpl;
  no_colon.input_prefix = "Question:";
  CHECK_THROWS_AS(no_colon.validate(), ConfigError);

  PromptTemplate same = tmpl;
  same.output_prefix = same.input_prefix;
  CHECK_THROWS_AS(same.validate(), ConfigError);

  PromptTemplate no_sep = tmpl;
  no_sep.pair_separator.clear();
  CHECK_THROWS_AS(no_sep.validate(), ConfigError);

  CHECK_THROWS_AS(builtin_template("nope"), ConfigError);
}

TEST_CASE("template files load, validate, and shadow built-ins") {
  testutil::TempDir dir("iclgap_prompt_test");
  const std::string path = dir.file("templates.json");
  {
    std::ofstream out(path);
    out << R"({
      "mine": {"prefix_text": "Harness.", "input_prefix": "In: ", "output_prefix": "Out: "},
      "scan": {"prefix_text": "Shadowed.", "input_prefix": "C: ", "output_prefix": "A: ",
               "pair_separator": "\n"}
    })";
  }
  const auto loaded = load_templates(path);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded.at("mine").pair_separator == "\n\n");
  CHECK(loaded.at("scan").prefix_text == "Shadowed.");

  DatasetDescriptor custom{DatasetId::Custom, "whitespace", "mine", "whitespace-only"};
  CHECK(resolve_template(custom, path).prefix_text == "Harness.");

  const auto scan = DatasetDescriptor::builtin(DatasetId::Scan);
  CHECK(resolve_template(scan, path).prefix_text == "Shadowed.");
  CHECK(resolve_template(scan).prefix_text ==
        builtin_template("scan").prefix_text);

  DatasetDescriptor missing{DatasetId::Custom, "whitespace", "absent", "whitespace-only"};
  CHECK_THROWS_AS(resolve_template(missing, path), ConfigError);
  CHECK_THROWS_AS(resolve_template(missing), ConfigError);
}

TEST_CASE("template file errors") {
  testutil::TempDir dir("iclgap_prompt_err");
  const std::string missing_field = dir.file("bad1.json");
  {
    std::ofstream out(missing_field);
    out << R"({"x": {"prefix_text": "p", "input_prefix": "In: "}})";
  }
  CHECK_THROWS_AS(load_templates(missing_field), LoadError);

  const std::string bad_prefix = dir.file("bad2.json");
  {
    std::ofstream out(bad_prefix);
    out << R"({"x": {"prefix_text": "p", "input_prefix": "In", "output_prefix": "Out: "}})";
  }
  CHECK_THROWS_AS(load_templates(bad_prefix), ConfigError);

  const std::string not_json = dir.file("bad3.json");
  {
    std::ofstream out(not_json);
    out << "not json";
  }
  CHECK_THROWS_AS(load_templates(not_json), LoadError);

  CHECK_THROWS_AS(load_templates(dir.file("absent.json")), LoadError);
}
