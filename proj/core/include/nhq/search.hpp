#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "nhq/graph.hpp"

namespace nhq {

struct SearchParams {
  uint32_t k_results = 10;
  uint32_t pool_size = 100;  // capacity of the bounded result set R; >= k_results
  uint32_t h = 1;            // stage-1 hops expand ceil(degree_bound / h) neighbors
  uint32_t seeds = 1;        // random entry points drawn when entry_points is empty
  uint64_t rng_seed = 0;
  std::vector<uint32_t> entry_points;  // explicit seed set (overrides `seeds`)
};

struct SearchResult {
  std::vector<Neighbor> hits;  // ascending (dist, id), at most k_results
  uint64_t ndc = 0;            // distance computations, counted exactly
  uint32_t hops = 0;           // expanded vertices (stage1_hops + stage2_hops)
  uint32_t stage1_hops = 0;
  uint32_t stage2_hops = 0;
  uint64_t attribute_checks = 0;  // admission-gate tests (filtering baselines)
  std::vector<uint32_t> path;     // vertices in expansion order
  bool truncated = false;         // fewer than k_results results existed
};

// Called once per distance evaluation, in evaluation order. Lets tests and
// harnesses audit ndc without touching the search internals.
using EvalHook = std::function<void(uint32_t id, double dist)>;

// Best-first search with full neighbor expansion. Terminates when an
// iteration leaves the result set unchanged or the frontier empties.
SearchResult greedy_search(const CompositeGraph& g, const ObjectSet& s, const Query& q,
                           const SearchParams& p, const EvalHook& hook = {});

// Two-stage routing: stage 1 expands a random ceil(degree_bound / h) subset
// of each hop's neighbors to reach the target region cheaply; the first
// stalled iteration whose expansion was sampled escalates to stage 2, which
// re-seeds the frontier from the result set and refines with full expansion.
// A stalled iteration whose expansion was already complete terminates the
// search outright, so h = 1 reproduces greedy_search exactly.
SearchResult two_stage_search(const CompositeGraph& g, const ObjectSet& s, const Query& q,
                              const SearchParams& p, const EvalHook& hook = {});

// Front door for fused-distance graphs: validates the graph's distance mode,
// then routes with two_stage_search. Attributes steer the traversal through
// the fused distance itself; no post-filter runs.
SearchResult hybrid_query(const CompositeGraph& g, const ObjectSet& s, const Query& q,
                          const SearchParams& p, const EvalHook& hook = {});

namespace detail {

struct SearchConfig {
  bool two_stage = false;
  // When set, a candidate enters the result set only if admit(id) holds.
  // The frontier is unaffected, so routing still flows through everything.
  std::function<bool(uint32_t)> admit;
};

SearchResult run_search(const CompositeGraph& g, const ObjectSet& s, const Query& q,
                        const SearchParams& p, const SearchConfig& cfg, const EvalHook& hook);

}  // namespace detail

}  // namespace nhq
