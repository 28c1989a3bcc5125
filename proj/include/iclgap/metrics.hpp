#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iclgap/scorer.hpp"
#include "iclgap/settings.hpp"

namespace iclgap {

// Fraction of matched outcomes. ArgumentError on an empty list.
double accuracy(std::span<const MatchOutcome> outcomes);
double accuracy_of_flags(std::span<const std::uint8_t> matched);

struct CiBounds {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const CiBounds&) const = default;
};

// Percentile bootstrap interval for the mean of 0/1 outcomes: `resamples`
// resamples of size n with replacement, empirical (1-level)/2 and
// 1-(1-level)/2 quantiles of the resample means. Resample r draws from a
// stream derived from (seed, r), so the result is independent of execution
// order. Parallelized over resamples.
CiBounds bootstrap_ci(std::span<const std::uint8_t> outcomes, int resamples,
                      double level, std::uint64_t seed);

// Single-threaded reference implementation; identical output by construction.
CiBounds bootstrap_ci_serial(std::span<const std::uint8_t> outcomes, int resamples,
                             double level, std::uint64_t seed);

// Per-setting accuracies and the relative generalization gap
// (mean_id - mean_ood) / mean_id, the proportion of in-distribution
// performance lost out of distribution. The gap is unset when mean_id is 0;
// it is never reported as 0 or infinity in that case.
struct GapReport {
  std::array<double, 4> acc{};       // indexed by setting_index()
  std::array<CiBounds, 4> ci{};
  double mean_id = 0.0;
  double mean_ood = 0.0;
  std::optional<double> relative_gap;

  // JSON with explicit field names (acc_test_test, ..., ci_train_test);
  // an undefined gap serializes as null plus relative_gap_defined = false.
  std::string to_json_string() const;
};

// Fills means and the gap from already-computed per-setting values.
GapReport assemble_gap_report(const std::array<double, 4>& acc,
                              const std::array<CiBounds, 4>& ci);

// Outcome lists for all four settings -> accuracies, CIs, and the gap.
// A missing (empty) setting raises ArgumentError naming it.
GapReport gap_report(const std::array<std::vector<std::uint8_t>, 4>& per_setting,
                     int resamples, double level, std::uint64_t seed);

}  // namespace iclgap
