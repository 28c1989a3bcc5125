#include "iclgap/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "iclgap/rng.hpp"

namespace iclgap {
namespace {

double resample_mean(std::span<const std::uint8_t> outcomes, std::uint64_t stream_seed) {
  RngStream rng(stream_seed);
  const std::uint64_t n = outcomes.size();
  std::uint64_t ones = 0;
  for (std::uint64_t i = 0; i < n; ++i) ones += outcomes[rng.below(n)] ? 1 : 0;
  return static_cast<double>(ones) / static_cast<double>(n);
}

// Order statistic at quantile q: rank ceil(q * B) clamped to [1, B].
double quantile_sorted(const std::vector<double>& sorted, double q) {
  const auto b = static_cast<double>(sorted.size());
  auto rank = static_cast<std::int64_t>(std::ceil(q * b));
  rank = std::clamp<std::int64_t>(rank, 1, static_cast<std::int64_t>(sorted.size()));
  return sorted[static_cast<std::size_t>(rank - 1)];
}

CiBounds bootstrap_impl(std::span<const std::uint8_t> outcomes, int resamples, double level,
                        std::uint64_t seed, bool parallel) {
  if (outcomes.empty()) throw ArgumentError("bootstrap_ci: outcomes are empty");
  if (resamples < 1) throw ArgumentError("bootstrap_ci: resamples must be at least 1");
  if (!(level > 0.0 && level < 1.0))
    throw ArgumentError("bootstrap_ci: level must lie strictly between 0 and 1");

  std::vector<double> means(static_cast<std::size_t>(resamples));
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (int b = 0; b < resamples; ++b)
      means[static_cast<std::size_t>(b)] = resample_mean(
          outcomes, derive_seed(seed, StreamTag::Bootstrap, {static_cast<std::uint64_t>(b)}));
  } else {
    for (int b = 0; b < resamples; ++b)
      means[static_cast<std::size_t>(b)] = resample_mean(
          outcomes, derive_seed(seed, StreamTag::Bootstrap, {static_cast<std::uint64_t>(b)}));
  }
  std::sort(means.begin(), means.end());
  const double q_lo = (1.0 - level) / 2.0;
  return {quantile_sorted(means, q_lo), quantile_sorted(means, 1.0 - q_lo)};
}

}  // namespace

double accuracy(std::span<const MatchOutcome> outcomes) {
  if (outcomes.empty()) throw ArgumentError("accuracy: outcome list is empty");
  std::size_t matched = 0;
  for (const MatchOutcome& o : outcomes) matched += o.matched ? 1 : 0;
  return static_cast<double>(matched) / static_cast<double>(outcomes.size());
}

double accuracy_of_flags(std::span<const std::uint8_t> matched) {
  if (matched.empty()) throw ArgumentError("accuracy: outcome list is empty");
  std::size_t ones = 0;
  for (std::uint8_t f : matched) ones += f ? 1 : 0;
  return static_cast<double>(ones) / static_cast<double>(matched.size());
}

CiBounds bootstrap_ci(std::span<const std::uint8_t> outcomes, int resamples, double level,
                      std::uint64_t seed) {
  return bootstrap_impl(outcomes, resamples, level, seed, true);
}

CiBounds bootstrap_ci_serial(std::span<const std::uint8_t> outcomes, int resamples,
                             double level, std::uint64_t seed) {
  return bootstrap_impl(outcomes, resamples, level, seed, false);
}

GapReport assemble_gap_report(const std::array<double, 4>& acc,
                              const std::array<CiBounds, 4>& ci) {
  GapReport r;
  r.acc = acc;
  r.ci = ci;
  r.mean_id = (acc[setting_index(EvalSetting::TestToTest)] +
               acc[setting_index(EvalSetting::TrainToTrain)]) /
              2.0;
  r.mean_ood = (acc[setting_index(EvalSetting::TestToTrain)] +
                acc[setting_index(EvalSetting::TrainToTest)]) /
               2.0;
  if (r.mean_id > 0.0) r.relative_gap = (r.mean_id - r.mean_ood) / r.mean_id;
  return r;
}

GapReport gap_report(const std::array<std::vector<std::uint8_t>, 4>& per_setting,
                     int resamples, double level, std::uint64_t seed) {
  std::array<double, 4> acc{};
  std::array<CiBounds, 4> ci{};
  for (EvalSetting s : kAllSettings) {
    const int i = setting_index(s);
    const auto& flags = per_setting[static_cast<std::size_t>(i)];
    if (flags.empty())
      throw ArgumentError(std::string("gap_report: no outcomes for setting ") +
                          setting_name(s));
    acc[static_cast<std::size_t>(i)] = accuracy_of_flags(flags);
    ci[static_cast<std::size_t>(i)] = bootstrap_ci(
        flags, resamples, level,
        derive_seed(seed, StreamTag::Ci, {static_cast<std::uint64_t>(i)}));
  }
  return assemble_gap_report(acc, ci);
}

std::string GapReport::to_json_string() const {
  nlohmann::ordered_json j;
  j["acc_test_test"] = acc[setting_index(EvalSetting::TestToTest)];
  j["acc_train_train"] = acc[setting_index(EvalSetting::TrainToTrain)];
  j["acc_test_train"] = acc[setting_index(EvalSetting::TestToTrain)];
  j["acc_train_test"] = acc[setting_index(EvalSetting::TrainToTest)];
  j["mean_id"] = mean_id;
  j["mean_ood"] = mean_ood;
  if (relative_gap)
    j["relative_gap"] = *relative_gap;
  else
    j["relative_gap"] = nullptr;
  j["relative_gap_defined"] = relative_gap.has_value();
  auto pair = [](const CiBounds& b) { return nlohmann::ordered_json::array({b.lo, b.hi}); };
  j["ci_test_test"] = pair(ci[setting_index(EvalSetting::TestToTest)]);
  j["ci_train_train"] = pair(ci[setting_index(EvalSetting::TrainToTrain)]);
  j["ci_test_train"] = pair(ci[setting_index(EvalSetting::TestToTrain)]);
  j["ci_train_test"] = pair(ci[setting_index(EvalSetting::TrainToTest)]);
  return j.dump(2);
}

}  // namespace iclgap
