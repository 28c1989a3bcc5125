#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include <json.hpp>

#include "iclgap/metrics.hpp"
#include "testutil.hpp"

using namespace iclgap;

namespace {

std::vector<std::uint8_t> bernoulli_flags(std::size_t n, double p, std::uint64_t seed) {
  RngStream rng(derive_seed(seed, StreamTag::Synth, {77}));
  std::vector<std::uint8_t> flags(n);
  for (std::size_t i = 0; i < n; ++i) flags[i] = rng.next_double01() < p ? 1 : 0;
  return flags;
}

MatchOutcome outcome(bool matched) {
  MatchOutcome o;
  o.matched = matched;
  return o;
}

}  // namespace

TEST_CASE("accuracy is the matched fraction") {
  const std::vector<MatchOutcome> half = {outcome(true), outcome(false)};
  CHECK(accuracy(half) == 0.5);

  std::vector<MatchOutcome> many;
  for (int i = 0; i < 1045; ++i) many.push_back(outcome(i < 167));
  CHECK(accuracy(many) == doctest::Approx(167.0 / 1045.0).epsilon(1e-12));

  const std::vector<std::uint8_t> flags = {1, 0, 0, 1, 1, 0, 1, 1};
  CHECK(accuracy_of_flags(flags) == 0.625);

  CHECK_THROWS_AS(accuracy({}), ArgumentError);
  CHECK_THROWS_AS(accuracy_of_flags({}), ArgumentError);
}

TEST_CASE("bootstrap argument validation") {
  const std::vector<std::uint8_t> flags = {1, 0};
  CHECK_THROWS_AS(bootstrap_ci({}, 100, 0.95, 0), ArgumentError);
  CHECK_THROWS_AS(bootstrap_ci(flags, 0, 0.95, 0), ArgumentError);
  CHECK_THROWS_AS(bootstrap_ci(flags, 100, 0.0, 0), ArgumentError);
  CHECK_THROWS_AS(bootstrap_ci(flags, 100, 1.0, 0), ArgumentError);
}

TEST_CASE("degenerate samples give point intervals") {
  const std::vector<std::uint8_t> all_true(10, 1);
  CHECK(bootstrap_ci(all_true, 500, 0.95, 3) == CiBounds{1.0, 1.0});
  const std::vector<std::uint8_t> all_false(10, 0);
  CHECK(bootstrap_ci(all_false, 500, 0.95, 3) == CiBounds{0.0, 0.0});
  const std::vector<std::uint8_t> single = {1};
  CHECK(bootstrap_ci(single, 100, 0.9, 3) == CiBounds{1.0, 1.0});
}

TEST_CASE("parallel and serial bootstrap agree bit for bit") {
  for (std::uint64_t seed : {0ull, 9ull, 123ull}) {
    const auto flags = bernoulli_flags(317, 0.43, seed);
    CHECK(bootstrap_ci(flags, 3000, 0.95, seed) ==
          bootstrap_ci_serial(flags, 3000, 0.95, seed));
    CHECK(bootstrap_ci(flags, 999, 0.5, seed) ==
          bootstrap_ci_serial(flags, 999, 0.5, seed));
  }
}

TEST_CASE("bootstrap is deterministic in the seed and sensitive to it") {
  const auto flags = bernoulli_flags(200, 0.5, 4);
  const CiBounds base = bootstrap_ci(flags, 2000, 0.95, 10);
  CHECK(bootstrap_ci(flags, 2000, 0.95, 10) == base);
  bool any_diff = false;
  for (std::uint64_t seed : {11ull, 12ull, 13ull, 14ull})
    any_diff = any_diff || !(bootstrap_ci(flags, 2000, 0.95, seed) == base);
  CHECK(any_diff);
}

TEST_CASE("bootstrap interval brackets the point estimate inside [0, 1]") {
  for (std::uint64_t t = 0; t < 12; ++t) {
    const double p = 0.1 + 0.07 * static_cast<double>(t);
    const auto flags = bernoulli_flags(200, p, t);
    const double point = accuracy_of_flags(flags);
    const CiBounds ci = bootstrap_ci(flags, 2000, 0.95, t);
    CHECK(ci.lo >= 0.0);
    CHECK(ci.hi <= 1.0);
    CHECK(ci.lo <= ci.hi);
    CHECK(ci.lo <= point);
    CHECK(point <= ci.hi);
  }
}

TEST_CASE("bootstrap matches an independently written reference") {
  const auto flags = bernoulli_flags(1000, 0.7, 21);
  const std::vector<std::uint8_t> vec(flags.begin(), flags.end());
  const CiBounds got = bootstrap_ci(flags, 5000, 0.95, 42);
  const auto [ref_lo, ref_hi] = testutil::reference_bootstrap(vec, 5000, 0.95, 42);
  CHECK(std::abs(got.lo - ref_lo) <= 0.01);
  CHECK(std::abs(got.hi - ref_hi) <= 0.01);
}

TEST_CASE("intervals tighten as the sample grows") {
  double width_small = 0.0, width_large = 0.0;
  for (std::uint64_t t = 0; t < 50; ++t) {
    const auto small = bernoulli_flags(100, 0.6, 100 + t);
    const auto large = bernoulli_flags(1000, 0.6, 200 + t);
    const CiBounds a = bootstrap_ci(small, 1000, 0.95, t);
    const CiBounds b = bootstrap_ci(large, 1000, 0.95, t);
    width_small += a.hi - a.lo;
    width_large += b.hi - b.lo;
  }
  CHECK(width_large < width_small);
}

TEST_CASE("gap formula behaves as specified") {
  const std::array<CiBounds, 4> ci{};
  SUBCASE("worked example") {
    const GapReport r = assemble_gap_report({0.2, 0.2, 0.16, 0.16}, ci);
    CHECK(r.mean_id == doctest::Approx(0.2));
    CHECK(r.mean_ood == doctest::Approx(0.16));
    REQUIRE(r.relative_gap.has_value());
    CHECK(*r.relative_gap == doctest::Approx(0.2));
  }
  SUBCASE("equal regimes have zero gap") {
    const GapReport r = assemble_gap_report({0.8, 0.6, 0.75, 0.65}, ci);
    CHECK(r.mean_id == doctest::Approx(0.7));
    CHECK(r.mean_ood == doctest::Approx(0.7));
    CHECK(*r.relative_gap == doctest::Approx(0.0));
  }
  SUBCASE("total collapse out of distribution gives gap 1") {
    const GapReport r = assemble_gap_report({0.5, 0.7, 0.0, 0.0}, ci);
    CHECK(*r.relative_gap == doctest::Approx(1.0));
  }
  SUBCASE("zero in-distribution accuracy leaves the gap undefined") {
    const GapReport r = assemble_gap_report({0.0, 0.0, 0.1, 0.2}, ci);
    CHECK_FALSE(r.relative_gap.has_value());
  }
  SUBCASE("swapping accuracies within a regime changes nothing") {
    const GapReport a = assemble_gap_report({0.9, 0.5, 0.3, 0.1}, ci);
    const GapReport b = assemble_gap_report({0.5, 0.9, 0.1, 0.3}, ci);
    CHECK(a.relative_gap == b.relative_gap);
  }
  SUBCASE("the gap is scale invariant") {
    const GapReport a = assemble_gap_report({0.8, 0.6, 0.5, 0.3}, ci);
    const GapReport b = assemble_gap_report({0.4, 0.3, 0.25, 0.15}, ci);
    CHECK(*a.relative_gap == doctest::Approx(*b.relative_gap));
  }
  SUBCASE("the gap never exceeds 1 and falls as ood accuracy rises") {
    RngStream rng(derive_seed(5, StreamTag::Synth, {6}));
    for (int t = 0; t < 200; ++t) {
      std::array<double, 4> acc;
      for (double& a : acc) a = rng.next_double01();
      const GapReport r = assemble_gap_report(acc, ci);
      if (r.relative_gap) CHECK(*r.relative_gap <= 1.0);
      auto higher = acc;
      higher[setting_index(EvalSetting::TestToTrain)] =
          std::min(1.0, higher[setting_index(EvalSetting::TestToTrain)] + 0.1);
      const GapReport h = assemble_gap_report(higher, ci);
      if (r.relative_gap && h.relative_gap) CHECK(*h.relative_gap <= *r.relative_gap);
    }
  }
}

TEST_CASE("gap_report names the first missing setting") {
  std::array<std::vector<std::uint8_t>, 4> per_setting;
  for (auto& v : per_setting) v = {1, 0, 1};
  per_setting[setting_index(EvalSetting::TrainToTest)].clear();
  CHECK_THROWS_WITH_AS(gap_report(per_setting, 100, 0.95, 0),
                       "gap_report: no outcomes for setting Train->Test", ArgumentError);
}

TEST_CASE("gap_report wires accuracies, intervals, and the gap together") {
  std::array<std::vector<std::uint8_t>, 4> per_setting;
  per_setting[setting_index(EvalSetting::TestToTest)] = {1, 1, 0, 1};
  per_setting[setting_index(EvalSetting::TrainToTrain)] = {1, 0, 1, 1};
  per_setting[setting_index(EvalSetting::TestToTrain)] = {1, 0, 0, 1};
  per_setting[setting_index(EvalSetting::TrainToTest)] = {0, 1, 0, 0};
  const GapReport r = gap_report(per_setting, 2000, 0.95, 9);
  CHECK(r.acc[0] == 0.75);
  CHECK(r.acc[1] == 0.75);
  CHECK(r.acc[2] == 0.5);
  CHECK(r.acc[3] == 0.25);
  CHECK(r.mean_id == doctest::Approx(0.75));
  CHECK(r.mean_ood == doctest::Approx(0.375));
  CHECK(*r.relative_gap == doctest::Approx(0.5));
  for (int i = 0; i < 4; ++i) {
    CHECK(r.ci[i].lo <= r.acc[i]);
    CHECK(r.acc[i] <= r.ci[i].hi);
    // per-setting streams differ, so intervals are not all identical
  }
  CHECK(gap_report(per_setting, 2000, 0.95, 9).to_json_string() == r.to_json_string());
}

TEST_CASE("gap reports serialize with explicit fields and a nullable gap") {
  std::array<CiBounds, 4> ci{};
  ci[setting_index(EvalSetting::TestToTrain)] = {0.25, 0.75};
  const GapReport defined = assemble_gap_report({0.9, 0.7, 0.5, 0.3}, ci);
  const auto j = nlohmann::json::parse(defined.to_json_string());
  CHECK(j.at("acc_test_test") == 0.9);
  CHECK(j.at("acc_train_train") == 0.7);
  CHECK(j.at("acc_test_train") == 0.5);
  CHECK(j.at("acc_train_test") == 0.3);
  CHECK(j.at("mean_id") == 0.8);
  CHECK(j.at("mean_ood") == 0.4);
  CHECK(j.at("relative_gap") == 0.5);
  CHECK(j.at("relative_gap_defined") == true);
  CHECK(j.at("ci_test_train") == nlohmann::json::array({0.25, 0.75}));
  CHECK(j.at("ci_test_test") == nlohmann::json::array({0.0, 0.0}));

  const GapReport undefined = assemble_gap_report({0.0, 0.0, 0.5, 0.5}, {});
  const auto u = nlohmann::json::parse(undefined.to_json_string());
  CHECK(u.at("relative_gap").is_null());
  CHECK(u.at("relative_gap_defined") == false);
}
