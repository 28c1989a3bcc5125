#pragma once

#include <array>
#include <optional>
#include <string_view>

#include "iclgap/corpus.hpp"

namespace iclgap {

// An evaluation setting source -> target: exemplars are drawn from the
// source split, queries from the target split. Matching splits are the
// in-distribution regime; crossed splits are out-of-distribution.
enum class EvalSetting : int {
  TestToTest = 0,
  TrainToTrain = 1,
  TestToTrain = 2,
  TrainToTest = 3,
};

inline constexpr std::array<EvalSetting, 4> kAllSettings = {
    EvalSetting::TestToTest,
    EvalSetting::TrainToTrain,
    EvalSetting::TestToTrain,
    EvalSetting::TrainToTest,
};

enum class Regime { InDistribution, OutOfDistribution };

constexpr int setting_index(EvalSetting s) { return static_cast<int>(s); }

constexpr Split source_split(EvalSetting s) {
  switch (s) {
    case EvalSetting::TestToTest:
    case EvalSetting::TestToTrain:
      return Split::Test;
    default:
      return Split::Train;
  }
}

constexpr Split target_split(EvalSetting s) {
  switch (s) {
    case EvalSetting::TestToTest:
    case EvalSetting::TrainToTest:
      return Split::Test;
    default:
      return Split::Train;
  }
}

constexpr Regime regime_of(EvalSetting s) {
  return source_split(s) == target_split(s) ? Regime::InDistribution
                                            : Regime::OutOfDistribution;
}

// Two-letter codes used in CLI flags, config files, and CSV rows:
// first letter is the source split, second the target (t = test, r = train).
constexpr const char* setting_code(EvalSetting s) {
  switch (s) {
    case EvalSetting::TestToTest: return "tt";
    case EvalSetting::TrainToTrain: return "rr";
    case EvalSetting::TestToTrain: return "tr";
    default: return "rt";
  }
}

constexpr const char* setting_name(EvalSetting s) {
  switch (s) {
    case EvalSetting::TestToTest: return "Test->Test";
    case EvalSetting::TrainToTrain: return "Train->Train";
    case EvalSetting::TestToTrain: return "Test->Train";
    default: return "Train->Test";
  }
}

inline std::optional<EvalSetting> setting_from_code(std::string_view code) {
  for (EvalSetting s : kAllSettings)
    if (code == setting_code(s)) return s;
  return std::nullopt;
}

}  // namespace iclgap
