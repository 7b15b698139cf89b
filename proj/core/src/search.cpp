#include "nhq/search.hpp"

#include <algorithm>
#include <string>

#include "nhq/detail/bounded_pool.hpp"
#include "nhq/rng.hpp"

namespace nhq {
namespace detail {

SearchResult run_search(const CompositeGraph& g, const ObjectSet& s, const Query& q,
                        const SearchParams& p, const SearchConfig& cfg, const EvalHook& hook) {
  const uint32_t n = g.size();
  if (n == 0) throw UsageError("search: empty graph");
  if (n != s.size()) throw UsageError("search: graph and object set sizes differ");
  s.check_query(q);
  if (p.k_results == 0) throw UsageError("search: k_results must be positive");
  if (p.pool_size == 0) throw UsageError("search: pool_size must be positive");
  if (p.pool_size < p.k_results)
    throw UsageError("search: pool_size must be >= k_results");
  if (p.h == 0) throw UsageError("search: h must be >= 1");
  if (cfg.two_stage && g.degree_bound() > 0 && p.h > g.degree_bound())
    throw UsageError("search: h must be <= the graph's degree bound");

  // Stage-1 hops expand this many neighbors; an unbounded graph has no basis
  // for the quota, so every expansion is full and the stages coincide.
  const uint32_t stage1_quota =
      g.degree_bound() > 0 ? (g.degree_bound() + p.h - 1) / p.h
                           : std::numeric_limits<uint32_t>::max();

  SearchResult res;
  BoundedPool R(p.pool_size);
  FrontierHeap C;
  std::vector<uint8_t> visited(n, 0);
  std::vector<uint8_t> fully_expanded(n, 0);
  Rng rng = make_rng(p.rng_seed, RngStream::SearchSeeds);

  const auto evaluate = [&](uint32_t v) {
    const double d = query_distance(s, q, v, g.distance_mode());
    ++res.ndc;
    if (hook) hook(v, d);
    return d;
  };
  const auto try_admit = [&](const Neighbor& c) {
    if (cfg.admit) {
      ++res.attribute_checks;
      if (!cfg.admit(c.id)) return false;
    }
    return R.insert(c);
  };

  std::vector<uint32_t> entries;
  if (!p.entry_points.empty()) {
    entries = p.entry_points;
    for (uint32_t e : entries) {
      if (e >= n) throw UsageError("search: entry point " + std::to_string(e) + " out of range");
    }
  } else {
    entries = sample_distinct(rng, std::min(p.seeds, n), n);
  }
  for (uint32_t e : entries) {
    if (visited[e]) continue;
    visited[e] = 1;
    const Neighbor c{e, evaluate(e)};
    C.push(c);
    try_admit(c);
  }

  int stage = cfg.two_stage ? 1 : 2;
  const auto escalate = [&] {
    stage = 2;
    for (const Neighbor& kept : R.items()) C.push(kept);
  };

  std::vector<uint32_t> order;  // sampled expansion positions, reused per hop
  while (true) {
    if (C.empty()) {
      if (stage == 1) {
        escalate();
        if (C.empty()) break;
        continue;
      }
      break;
    }
    const Neighbor cur = C.top();
    C.pop();
    if (fully_expanded[cur.id]) continue;  // silent: not an iteration

    const std::span<const uint32_t> nbrs = g.neighbors(cur.id);
    const uint32_t degree = static_cast<uint32_t>(nbrs.size());
    const bool sampled = stage == 1 && degree > stage1_quota;
    if (sampled) {
      order = sample_distinct(rng, stage1_quota, degree);
      std::sort(order.begin(), order.end());  // stored adjacency order
    } else {
      fully_expanded[cur.id] = 1;
    }

    res.path.push_back(cur.id);
    ++res.hops;
    if (stage == 1) ++res.stage1_hops; else ++res.stage2_hops;

    bool updated = false;
    const uint32_t count = sampled ? stage1_quota : degree;
    for (uint32_t i = 0; i < count; ++i) {
      const uint32_t v = sampled ? nbrs[order[i]] : nbrs[i];
      if (visited[v]) continue;
      visited[v] = 1;
      const Neighbor c{v, evaluate(v)};
      C.push(c);
      if (try_admit(c)) updated = true;
    }

    if (!updated) {
      // A stalled full expansion is a genuine local optimum: stop. A stalled
      // sampled expansion only exhausted a subset, so escalate and refine.
      if (stage == 1 && sampled) {
        escalate();
        continue;
      }
      break;
    }
  }

  const auto& pool = R.items();
  const size_t take = std::min<size_t>(p.k_results, pool.size());
  res.hits.assign(pool.begin(), pool.begin() + take);
  res.truncated = res.hits.size() < p.k_results;
  return res;
}

}  // namespace detail

SearchResult greedy_search(const CompositeGraph& g, const ObjectSet& s, const Query& q,
                           const SearchParams& p, const EvalHook& hook) {
  return detail::run_search(g, s, q, p, {}, hook);
}

SearchResult two_stage_search(const CompositeGraph& g, const ObjectSet& s, const Query& q,
                              const SearchParams& p, const EvalHook& hook) {
  detail::SearchConfig cfg;
  cfg.two_stage = true;
  return detail::run_search(g, s, q, p, cfg, hook);
}

SearchResult hybrid_query(const CompositeGraph& g, const ObjectSet& s, const Query& q,
                          const SearchParams& p, const EvalHook& hook) {
  if (g.distance_mode().metric != Metric::Fusion)
    throw UsageError("hybrid_query: graph was not built on the fused distance");
  return two_stage_search(g, s, q, p, hook);
}

}  // namespace nhq
