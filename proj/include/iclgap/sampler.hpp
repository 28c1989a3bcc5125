#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "iclgap/primitives.hpp"
#include "iclgap/rng.hpp"
#include "iclgap/settings.hpp"

namespace iclgap {

// Result of exemplar selection for one query. `picks` are positions into the
// pool the selection ran against, in selection order: greedy picks first,
// then uniform random fill.
struct ShotSelection {
  std::vector<std::uint32_t> picks;
  PrimitiveSet covered;      // query primitives present in some picked exemplar
  PrimitiveSet uncoverable;  // query primitives present in no pool example
  double coverage_fraction = 0.0;
  std::uint32_t greedy_count = 0;
};

// Primitive sets plus an inverted index (primitive -> pool positions holding
// it) for one pool. Built once and shared across all queries against it.
class PoolIndex {
 public:
  PoolIndex(std::span<const Example> pool, const DatasetDescriptor& dataset);
  explicit PoolIndex(std::vector<PrimitiveSet> sets);

  std::size_t size() const { return sets_.size(); }
  const PrimitiveSet& set_at(std::size_t pos) const { return sets_[pos]; }
  std::span<const std::uint32_t> holders(const Primitive& p) const;

 private:
  void build_holders();

  std::vector<PrimitiveSet> sets_;
  std::map<Primitive, std::vector<std::uint32_t>> holders_;
};

inline constexpr std::uint32_t kNoExclusion = std::numeric_limits<std::uint32_t>::max();

// Core selection rule. Greedy phase: repeatedly take the rarest not-yet-covered
// query primitive (ties by (origin, text)), then among unpicked pool examples
// holding it the one covering the most still-uncovered query primitives (ties
// by lowest example id). Query primitives held by no eligible pool example are
// marked uncoverable and skipped. Once every coverable primitive is covered,
// remaining slots fill uniformly at random without replacement; the fill draws
// rng.below(m) against the remaining examples in ascending position order.
//
// `exclude` removes one pool position from consideration (the query itself in
// in-distribution settings); rarity counts from `inventory` are reduced by the
// excluded example's own membership, so an inventory built over the full
// source split stays consistent with the effective pool.
//
// `ids` supplies the example id per pool position for tie-breaking.
ShotSelection select_covering(const PrimitiveSet& query_set, const PoolIndex& pool,
                              std::span<const std::int32_t> ids,
                              const PrimitiveInventory& inventory, int k,
                              RngStream& rng, std::uint32_t exclude = kNoExclusion);

// Convenience form matching the one-query-at-a-time contract: the pool must
// not contain the query (callers remove it beforehand in ID settings).
ShotSelection select_exemplars(const Example& query, std::span<const Example> pool,
                               const DatasetDescriptor& dataset,
                               const PrimitiveInventory& inventory, int k,
                               RngStream& rng);

// Mean coverage percentage over queries and seeds under the selection rule
// above. In ID settings each query is excluded from its own pool. When
// max_queries is positive and smaller than |queries|, each seed evaluates an
// independent uniform subsample of that size (stream derived from
// (seed, setting)); otherwise every query is evaluated and the result is
// seed-independent because the greedy phase alone determines coverage.
double coverage_stats(const DatasetDescriptor& dataset, EvalSetting setting,
                      std::span<const Example> queries, std::span<const Example> pool,
                      int k, std::span<const std::uint64_t> seeds,
                      std::uint32_t max_queries = 0);

// Plain single-threaded reference of coverage_stats; must produce identical
// results (kept for equivalence tests and the benchmark).
double coverage_stats_serial(const DatasetDescriptor& dataset, EvalSetting setting,
                             std::span<const Example> queries,
                             std::span<const Example> pool, int k,
                             std::span<const std::uint64_t> seeds,
                             std::uint32_t max_queries = 0);

}  // namespace iclgap
