#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "iclgap/corpus.hpp"

namespace iclgap {

struct MatchOutcome {
  std::int32_t example_id = -1;
  bool matched = false;  // byte equality of the two normalized strings
  std::string prediction_normalized;
  std::string gold_normalized;
};

struct Normalized {
  std::string text;
  bool missing_braces = false;  // cfq-sparql input without a { ... } block
};

// Canonicalizes an output per the dataset's normalizer_id. All normalizers
// collapse whitespace runs and trim; "strip-period" and "cfq-sparql" also
// strip trailing periods; "cfq-sparql" additionally splits the top-level
// { ... } block on " . " separators, then trims, deduplicates, sorts, and
// rejoins the conjuncts. Idempotent.
Normalized normalize(const DatasetDescriptor& dataset, std::string_view output);

MatchOutcome exact_match(const DatasetDescriptor& dataset, std::string_view prediction,
                         std::string_view gold, std::int32_t example_id = -1);

}  // namespace iclgap
