#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "nhq/core.hpp"

namespace nhq {

// Provenance of a graph, persisted in index archives so a loaded index can be
// reproduced. `params` is a flat "key=value key=value" echo of the builder's
// inputs plus anything it measured (rounds run, final quality estimate, ...).
struct BuildMeta {
  std::string builder;  // "npg-kgraph" | "npg-nsw" | "threshold" | "manual"
  std::string params;
  uint64_t seed = 0;
};

// Directed adjacency over the object ids of one ObjectSet, tagged with the
// distance its edges were chosen under. degree_bound 0 means unbounded
// (threshold graphs); a positive bound is enforced on construction.
class CompositeGraph {
public:
  CompositeGraph() = default;
  CompositeGraph(uint32_t n, uint32_t degree_bound, DistanceMode mode, BuildMeta meta,
                 std::vector<std::vector<uint32_t>> adjacency);

  uint32_t size() const { return static_cast<uint32_t>(adjacency_.size()); }
  uint32_t degree_bound() const { return degree_bound_; }
  const DistanceMode& distance_mode() const { return mode_; }
  const BuildMeta& build_meta() const { return meta_; }

  std::span<const uint32_t> neighbors(uint32_t u) const {
    if (u >= adjacency_.size()) throw UsageError("CompositeGraph: vertex id out of range");
    return adjacency_[u];
  }

  const std::vector<std::vector<uint32_t>>& adjacency() const { return adjacency_; }

private:
  uint32_t degree_bound_ = 0;
  DistanceMode mode_{};
  BuildMeta meta_{};
  std::vector<std::vector<uint32_t>> adjacency_;
};

struct DegreeStats {
  uint32_t min_degree = 0;
  uint32_t max_degree = 0;
  double mean_degree = 0.0;
};

DegreeStats degree_stats(const CompositeGraph& g);

// Exhaustive k-nearest neighbors of vertex u among the other vertices, under
// `mode`. Ties break to the lower id. Shared by quality measurement and the
// builders' convergence checks.
std::vector<Neighbor> exact_knn_of_vertex(const ObjectSet& s, uint32_t u, uint32_t k,
                                          const DistanceMode& mode);

inline constexpr uint32_t kAllVertices = std::numeric_limits<uint32_t>::max();

struct GraphQualityReport {
  // Mean over the sampled vertices of |N(u) ∩ true-kNN(u)| / k. The sampled
  // value estimates the full-graph mean with standard error about
  // sqrt(q * (1 - q) / sampled_vertices); sample = kAllVertices is exact.
  double quality = 0.0;
  uint32_t sampled_vertices = 0;
  uint32_t k_used = 0;
};

// sample = kAllVertices measures every vertex (deterministic, seed unused);
// otherwise `sample` vertices are drawn without replacement from `seed`.
// k defaults to the graph's degree bound; pass k_override for unbounded
// graphs (required: quality is undefined without a k).
GraphQualityReport graph_quality(const CompositeGraph& g, const ObjectSet& s,
                                 uint32_t sample = kAllVertices, uint64_t seed = 0,
                                 uint32_t k_override = 0, uint32_t threads = 0);

}  // namespace nhq
