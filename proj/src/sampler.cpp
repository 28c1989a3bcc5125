#include "iclgap/sampler.hpp"

#include <algorithm>
#include <limits>

namespace iclgap {

PoolIndex::PoolIndex(std::span<const Example> pool, const DatasetDescriptor& dataset) {
  sets_.reserve(pool.size());
  for (const Example& ex : pool) sets_.push_back(primitives_of(ex, dataset));
  build_holders();
}

PoolIndex::PoolIndex(std::vector<PrimitiveSet> sets) : sets_(std::move(sets)) {
  build_holders();
}

void PoolIndex::build_holders() {
  for (std::uint32_t pos = 0; pos < sets_.size(); ++pos)
    for (const Primitive& p : sets_[pos].items()) holders_[p].push_back(pos);
}

std::span<const std::uint32_t> PoolIndex::holders(const Primitive& p) const {
  auto it = holders_.find(p);
  if (it == holders_.end()) return {};
  return it->second;
}

ShotSelection select_covering(const PrimitiveSet& query_set, const PoolIndex& pool,
                              std::span<const std::int32_t> ids,
                              const PrimitiveInventory& inventory, int k, RngStream& rng,
                              std::uint32_t exclude) {
  if (k < 1) throw ArgumentError("select_covering: k must be at least 1");
  const std::uint32_t pool_n = static_cast<std::uint32_t>(pool.size());
  if (ids.size() != pool.size())
    throw ArgumentError("select_covering: ids and pool sizes differ");
  const bool has_exclude = exclude != kNoExclusion;
  if (has_exclude && exclude >= pool_n)
    throw ArgumentError("select_covering: exclude position out of range");
  const std::uint32_t effective_n = pool_n - (has_exclude ? 1u : 0u);
  if (effective_n == 0) throw ArgumentError("select_covering: pool is empty");

  const auto& qitems = query_set.items();  // sorted (origin, text): ties fall out
  enum : std::uint8_t { kUncovered, kCovered, kUncoverable };
  std::vector<std::uint8_t> state(qitems.size(), kUncovered);
  std::vector<char> taken(pool_n, 0);
  if (has_exclude) taken[exclude] = 1;

  // Effective rarity: inventory minus the excluded example's own membership.
  auto rarity = [&](const Primitive& p) {
    std::uint32_t c = inventory.count(p);
    if (c > 0 && has_exclude && pool.set_at(exclude).contains(p)) --c;
    return c;
  };
  auto newly_covered = [&](std::uint32_t pos) {
    std::size_t n = 0;
    const PrimitiveSet& s = pool.set_at(pos);
    for (std::size_t i = 0; i < qitems.size(); ++i)
      if (state[i] == kUncovered && s.contains(qitems[i])) ++n;
    return n;
  };

  ShotSelection sel;
  const std::uint32_t limit = std::min<std::uint32_t>(static_cast<std::uint32_t>(k), effective_n);

  while (sel.picks.size() < limit) {
    std::size_t rare = qitems.size();
    std::uint32_t rare_count = std::numeric_limits<std::uint32_t>::max();
    for (std::size_t i = 0; i < qitems.size(); ++i) {
      if (state[i] != kUncovered) continue;
      const std::uint32_t c = rarity(qitems[i]);
      if (c < rare_count) {  // first hit wins ties: qitems is in tie-break order
        rare_count = c;
        rare = i;
      }
    }
    if (rare == qitems.size()) break;  // everything covered or uncoverable

    std::uint32_t best_pos = kNoExclusion;
    std::size_t best_new = 0;
    std::int32_t best_id = std::numeric_limits<std::int32_t>::max();
    for (std::uint32_t pos : pool.holders(qitems[rare])) {
      if (taken[pos]) continue;
      const std::size_t fresh = newly_covered(pos);
      if (best_pos == kNoExclusion || fresh > best_new ||
          (fresh == best_new && ids[pos] < best_id)) {
        best_pos = pos;
        best_new = fresh;
        best_id = ids[pos];
      }
    }
    if (best_pos == kNoExclusion) {
      state[rare] = kUncoverable;
      continue;
    }

    taken[best_pos] = 1;
    sel.picks.push_back(best_pos);
    ++sel.greedy_count;
    const PrimitiveSet& s = pool.set_at(best_pos);
    for (std::size_t i = 0; i < qitems.size(); ++i)
      if (state[i] == kUncovered && s.contains(qitems[i])) state[i] = kCovered;
  }

  if (sel.picks.size() < limit) {
    std::vector<std::uint32_t> remaining;
    remaining.reserve(effective_n - sel.picks.size());
    for (std::uint32_t pos = 0; pos < pool_n; ++pos)
      if (!taken[pos]) remaining.push_back(pos);
    const auto need = static_cast<std::uint32_t>(limit - sel.picks.size());
    for (std::uint32_t r :
         sample_without_replacement(static_cast<std::uint32_t>(remaining.size()), need, rng))
      sel.picks.push_back(remaining[r]);
  }

  std::vector<Primitive> covered, uncoverable;
  for (std::size_t i = 0; i < qitems.size(); ++i) {
    if (state[i] == kCovered) covered.push_back(qitems[i]);
    if (state[i] == kUncoverable) uncoverable.push_back(qitems[i]);
  }
  sel.covered = PrimitiveSet(std::move(covered));
  sel.uncoverable = PrimitiveSet(std::move(uncoverable));
  sel.coverage_fraction =
      qitems.empty() ? 1.0
                     : static_cast<double>(sel.covered.size()) / static_cast<double>(qitems.size());
  return sel;
}

ShotSelection select_exemplars(const Example& query, std::span<const Example> pool,
                               const DatasetDescriptor& dataset,
                               const PrimitiveInventory& inventory, int k, RngStream& rng) {
  if (pool.empty()) throw ArgumentError("select_exemplars: pool is empty");
  PoolIndex index(pool, dataset);
  std::vector<std::int32_t> ids;
  ids.reserve(pool.size());
  for (const Example& ex : pool) ids.push_back(ex.id);
  return select_covering(primitives_of(query, dataset), index, ids, inventory, k, rng);
}

namespace {

struct CoveragePlan {
  std::vector<std::uint32_t> query_pos;  // index into queries
  std::vector<std::uint64_t> fill_seed;  // rng seed for the matching slot
  std::uint32_t exclude_of(std::uint32_t slot) const {
    return excludes.empty() ? kNoExclusion : excludes[slot];
  }
  std::vector<std::uint32_t> excludes;
};

// Flattens (seed, query) slots so parallel and serial variants walk the same
// list and sum in the same order.
CoveragePlan make_plan(EvalSetting setting, std::span<const Example> queries,
                       std::size_t pool_size, int k, std::span<const std::uint64_t> seeds,
                       std::uint32_t max_queries) {
  if (queries.empty()) throw ArgumentError("coverage_stats: queries are empty");
  if (pool_size == 0) throw ArgumentError("coverage_stats: pool is empty");
  if (seeds.empty()) throw ArgumentError("coverage_stats: seeds are empty");
  if (k < 1) throw ArgumentError("coverage_stats: k must be at least 1");

  const bool id_regime = regime_of(setting) == Regime::InDistribution;
  if (id_regime && queries.size() != pool_size)
    throw ArgumentError("coverage_stats: in-distribution settings need queries == pool");

  const auto n = static_cast<std::uint32_t>(queries.size());
  const bool subsample = max_queries > 0 && max_queries < n;

  CoveragePlan plan;
  if (!subsample) {
    // Coverage is decided by the greedy phase alone, so one pass over every
    // query stands in for all seeds.
    plan.query_pos.resize(n);
    plan.fill_seed.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      plan.query_pos[i] = i;
      plan.fill_seed[i] = derive_seed(seeds[0], StreamTag::Exemplar,
                                      {static_cast<std::uint64_t>(setting_index(setting)),
                                       static_cast<std::uint64_t>(queries[i].id)});
    }
  } else {
    for (std::uint64_t seed : seeds) {
      RngStream sub(derive_seed(seed, StreamTag::Subsample,
                                {static_cast<std::uint64_t>(setting_index(setting))}));
      for (std::uint32_t i : sample_without_replacement(n, max_queries, sub)) {
        plan.query_pos.push_back(i);
        plan.fill_seed.push_back(derive_seed(seed, StreamTag::Exemplar,
                                             {static_cast<std::uint64_t>(setting_index(setting)),
                                              static_cast<std::uint64_t>(queries[i].id)}));
      }
    }
  }
  if (id_regime) plan.excludes = plan.query_pos;
  return plan;
}

double coverage_mean(const DatasetDescriptor& dataset, std::span<const Example> queries,
                     std::span<const Example> pool, int k, const CoveragePlan& plan,
                     bool parallel) {
  const PoolIndex index(pool, dataset);
  const PrimitiveInventory inventory = build_inventory(pool, dataset);
  std::vector<std::int32_t> ids;
  ids.reserve(pool.size());
  for (const Example& ex : pool) ids.push_back(ex.id);

  const auto slots = static_cast<std::int64_t>(plan.query_pos.size());
  std::vector<double> cov(plan.query_pos.size());
  auto eval_slot = [&](std::int64_t s) {
    const Example& q = queries[plan.query_pos[static_cast<std::size_t>(s)]];
    RngStream rng(plan.fill_seed[static_cast<std::size_t>(s)]);
    cov[static_cast<std::size_t>(s)] =
        select_covering(primitives_of(q, dataset), index, ids, inventory, k, rng,
                        plan.exclude_of(static_cast<std::uint32_t>(s)))
            .coverage_fraction;
  };

  if (parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t s = 0; s < slots; ++s) eval_slot(s);
  } else {
    for (std::int64_t s = 0; s < slots; ++s) eval_slot(s);
  }

  double total = 0.0;
  for (double c : cov) total += c;
  return 100.0 * total / static_cast<double>(slots);
}

}  // namespace

double coverage_stats(const DatasetDescriptor& dataset, EvalSetting setting,
                      std::span<const Example> queries, std::span<const Example> pool, int k,
                      std::span<const std::uint64_t> seeds, std::uint32_t max_queries) {
  const CoveragePlan plan = make_plan(setting, queries, pool.size(), k, seeds, max_queries);
  return coverage_mean(dataset, queries, pool, k, plan, true);
}

double coverage_stats_serial(const DatasetDescriptor& dataset, EvalSetting setting,
                             std::span<const Example> queries, std::span<const Example> pool,
                             int k, std::span<const std::uint64_t> seeds,
                             std::uint32_t max_queries) {
  const CoveragePlan plan = make_plan(setting, queries, pool.size(), k, seeds, max_queries);
  return coverage_mean(dataset, queries, pool, k, plan, false);
}

}  // namespace iclgap
