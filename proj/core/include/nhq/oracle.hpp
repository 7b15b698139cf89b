#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nhq/search.hpp"

namespace nhq {

enum class TruthFlavor : uint8_t { Vector, Hybrid };

struct GroundTruthEntry {
  std::vector<Neighbor> hits;  // ascending (dist, id); hybrid may hold < k
};

struct GroundTruth {
  TruthFlavor flavor = TruthFlavor::Vector;
  uint32_t k = 0;
  std::vector<GroundTruthEntry> entries;  // one per query, in query order
};

// Exhaustive scan: exactly n vector-distance evaluations, ties to lower id.
GroundTruthEntry exact_topk_vector(const ObjectSet& s, const Query& q, uint32_t k);

// Exact attribute filter (every code equal) followed by a vector-distance
// ranking of the matches; returns min(k, |matches|) hits, possibly none.
GroundTruthEntry exact_topk_hybrid(const ObjectSet& s, const Query& q, uint32_t k);

GroundTruth compute_ground_truth(const ObjectSet& s, std::span<const Query> queries, uint32_t k,
                                 TruthFlavor flavor, uint32_t threads = 0);

bool attributes_match(const ObjectSet& s, const Query& q, uint32_t id);

// Decoupled baseline: route purely on vector distance over a Euclidean-built
// graph, then reconcile attributes afterwards. Default shape fetches
// candidate_multiplier * k_results vector neighbors and post-filters them to
// attribute matches; filter_during_search = true instead gates admission to
// the result pool during traversal (routing still flows through mismatches).
// ndc counts vector evaluations only; attribute tests land in
// SearchResult::attribute_checks.
SearchResult strategy_b_search(const CompositeGraph& vector_graph, const ObjectSet& s,
                               const Query& q, const SearchParams& p,
                               uint32_t candidate_multiplier = 10,
                               bool filter_during_search = false, const EvalHook& hook = {});

}  // namespace nhq
