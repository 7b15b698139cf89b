#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nhq/graph.hpp"

namespace nhq {

struct BuildParams {
  uint32_t k = 20;                 // degree bound of the final graph
  uint32_t l = 100;                // candidate pool width, >= k
  double quality_threshold = 0.8;  // kgraph: stop refining at this estimate
  uint32_t max_rounds = 30;        // kgraph: refinement cap
  uint64_t seed = 0;
  uint32_t threads = 0;            // 0 = all available; result is thread-count invariant
};

// Connects every ordered pair closer than theta_prime. Quadratic in n, so it
// refuses object sets above n_cap; meant for calibration and small corpora.
CompositeGraph build_threshold_graph(const ObjectSet& s, double theta_prime,
                                     const DistanceMode& mode, uint32_t n_cap = 20000);

// Incremental small-world construction: objects are inserted in id order;
// each new object collects its l closest reachable vertices by greedy search
// over the partial graph, keeps up to k of them via landing-zone selection,
// and links back bidirectionally (overfull endpoints are re-pruned the same
// way). Inherently sequential; `threads` is ignored.
CompositeGraph build_npg_nsw(const ObjectSet& s, const BuildParams& p, const DistanceMode& mode);

struct KgraphTrace {
  CompositeGraph graph;            // landing-zone-pruned result, degree <= k
  CompositeGraph candidate_graph;  // top-k of the final pools, before pruning
  double quality_estimate = 0.0;   // sampled estimate at termination
  uint32_t rounds = 0;             // refinement rounds actually run
  uint32_t quality_sample = 0;     // vertices in the estimate's sample
};

// Descent-style construction: per-vertex pools of l candidates start random
// and are refined in synchronized rounds (each vertex scans its candidates'
// candidates, keeping anything strictly closer). Rounds stop when the sampled
// pool quality reaches p.quality_threshold, a round makes no replacement, or
// p.max_rounds is hit; pools are then landing-zone-pruned down to k edges.
// When l >= n - 1 the pools are exhaustive and no refining is needed.
KgraphTrace build_npg_kgraph_traced(const ObjectSet& s, const BuildParams& p,
                                    const DistanceMode& mode);
CompositeGraph build_npg_kgraph(const ObjectSet& s, const BuildParams& p,
                                const DistanceMode& mode);

namespace detail {

// pools[i] = candidates of vertex i, sorted ascending (dist, id), owner absent.
using Pools = std::vector<std::vector<Neighbor>>;

// One synchronized refinement pass: reads `prev`, writes `next` (resized and
// overwritten), returns how many pool slots changed. Deterministic for any
// thread count because vertex i's next pool depends only on `prev`.
uint64_t kgraph_refine_round(const ObjectSet& s, const DistanceMode& mode, const Pools& prev,
                             Pools& next, uint32_t threads);

// Mean over `sample_vertices` of |top-k(pool) ∩ exact-kNN| / k.
double pool_quality_estimate(const ObjectSet& s, const DistanceMode& mode, const Pools& pools,
                             uint32_t k, std::span<const uint32_t> sample_vertices,
                             uint32_t threads);

}  // namespace detail

}  // namespace nhq
