#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "iclgap/corpus.hpp"

namespace iclgap {

enum class Origin : std::uint8_t { InputWord = 0, OutputToken = 1 };

// An atomic vocabulary unit of an example. Identity includes the side it
// came from: the word "run" in an input and the token "run" in an output
// are distinct primitives.
struct Primitive {
  Origin origin = Origin::InputWord;
  std::string text;

  auto operator<=>(const Primitive&) const = default;
};

// Sorted, duplicate-free flat set. Iteration order is (origin, text), which
// is also the rarity tie-break order used by the sampler.
class PrimitiveSet {
 public:
  PrimitiveSet() = default;
  explicit PrimitiveSet(std::vector<Primitive> items);

  bool contains(const Primitive& p) const;
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const std::vector<Primitive>& items() const { return items_; }

  std::size_t intersection_size(const PrimitiveSet& other) const;

  bool operator==(const PrimitiveSet&) const = default;

 private:
  std::vector<Primitive> items_;
};

// Pool-wide primitive frequencies: counts[p] = number of pool examples whose
// primitive set contains p. Every stored count c satisfies 1 <= c <= pool_size.
struct PrimitiveInventory {
  std::map<Primitive, std::uint32_t> counts;
  std::uint32_t pool_size = 0;

  std::uint32_t count(const Primitive& p) const {
    auto it = counts.find(p);
    return it == counts.end() ? 0 : it->second;
  }
};

// Splits on whitespace runs, strips leading/trailing sentence punctuation
// (periods, commas, question marks) from each word, lowercases, and drops
// words that become empty. All-punctuation input yields an empty list.
std::vector<std::string> tokenize_natural(std::string_view text);

struct FormalTokens {
  std::vector<std::string> tokens;
  bool balanced = true;  // false when braces/parentheses do not pair up
};

// Dataset-specific lexical tokenization of a formal output, selected by
// formal_tokenizer_id. Unbalanced delimiters set the warning flag but the
// tokens are still returned.
FormalTokens tokenize_formal(const DatasetDescriptor& dataset, std::string_view text);

PrimitiveSet primitives_of(const Example& example, const DatasetDescriptor& dataset);

PrimitiveInventory build_inventory(std::span<const Example> pool,
                                   const DatasetDescriptor& dataset);

}  // namespace iclgap
