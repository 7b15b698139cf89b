#include "nhq/graph.hpp"

#include <algorithm>
#include <queue>

#include "nhq/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nhq {

CompositeGraph::CompositeGraph(uint32_t n, uint32_t degree_bound, DistanceMode mode,
                               BuildMeta meta, std::vector<std::vector<uint32_t>> adjacency)
    : degree_bound_(degree_bound), mode_(mode), meta_(std::move(meta)),
      adjacency_(std::move(adjacency)) {
  if (adjacency_.size() != n)
    throw InvariantError("CompositeGraph: adjacency has " + std::to_string(adjacency_.size()) +
                         " rows, expected " + std::to_string(n));
  for (uint32_t u = 0; u < n; ++u) {
    const auto& nbrs = adjacency_[u];
    if (degree_bound_ > 0 && nbrs.size() > degree_bound_)
      throw InvariantError("CompositeGraph: vertex " + std::to_string(u) + " has degree " +
                           std::to_string(nbrs.size()) + " > bound " +
                           std::to_string(degree_bound_));
    for (uint32_t v : nbrs) {
      if (v >= n)
        throw InvariantError("CompositeGraph: vertex " + std::to_string(u) +
                             " references out-of-range neighbor " + std::to_string(v));
      if (v == u)
        throw InvariantError("CompositeGraph: self loop at vertex " + std::to_string(u));
    }
  }
}

DegreeStats degree_stats(const CompositeGraph& g) {
  if (g.size() == 0) throw UsageError("degree_stats: empty graph");
  DegreeStats st;
  st.min_degree = std::numeric_limits<uint32_t>::max();
  uint64_t total = 0;
  for (uint32_t u = 0; u < g.size(); ++u) {
    const uint32_t d = static_cast<uint32_t>(g.neighbors(u).size());
    st.min_degree = std::min(st.min_degree, d);
    st.max_degree = std::max(st.max_degree, d);
    total += d;
  }
  st.mean_degree = static_cast<double>(total) / g.size();
  return st;
}

std::vector<Neighbor> exact_knn_of_vertex(const ObjectSet& s, uint32_t u, uint32_t k,
                                          const DistanceMode& mode) {
  if (u >= s.size()) throw UsageError("exact_knn_of_vertex: vertex id out of range");
  if (k == 0) throw UsageError("exact_knn_of_vertex: k must be positive");
  // Max-heap of the k best so far; top is the current worst keeper.
  std::priority_queue<Neighbor, std::vector<Neighbor>, decltype(&neighbor_less)> heap(
      &neighbor_less);
  for (uint32_t v = 0; v < s.size(); ++v) {
    if (v == u) continue;
    Neighbor cand{v, object_distance(s, u, v, mode)};
    if (heap.size() < k) {
      heap.push(cand);
    } else if (neighbor_less(cand, heap.top())) {
      heap.pop();
      heap.push(cand);
    }
  }
  std::vector<Neighbor> out;
  out.reserve(heap.size());
  while (!heap.empty()) {
    out.push_back(heap.top());
    heap.pop();
  }
  std::reverse(out.begin(), out.end());
  return out;
}

GraphQualityReport graph_quality(const CompositeGraph& g, const ObjectSet& s, uint32_t sample,
                                 uint64_t seed, uint32_t k_override, uint32_t threads) {
  if (g.size() == 0) throw UsageError("graph_quality: empty graph");
  if (g.size() != s.size())
    throw UsageError("graph_quality: graph and object set sizes differ");
  const uint32_t k = k_override > 0 ? k_override : g.degree_bound();
  if (k == 0)
    throw UsageError("graph_quality: graph has no degree bound; pass k_override");
  if (sample != kAllVertices && (sample == 0 || sample > g.size()))
    throw UsageError("graph_quality: sample must be in [1, n] or kAllVertices");

  std::vector<uint32_t> vertices;
  if (sample == kAllVertices || sample == g.size()) {
    vertices.resize(g.size());
    for (uint32_t u = 0; u < g.size(); ++u) vertices[u] = u;
  } else {
    Rng rng = make_rng(seed, RngStream::GraphQualitySample);
    vertices = sample_distinct(rng, sample, g.size());
  }

  // Per-vertex fractions land in a fixed-index array and are reduced in
  // order, so the result is identical for any thread count.
  std::vector<double> frac(vertices.size(), 0.0);
#ifdef _OPENMP
  const int nthreads = threads > 0 ? static_cast<int>(threads) : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 8) num_threads(nthreads)
#endif
  for (int64_t idx = 0; idx < static_cast<int64_t>(vertices.size()); ++idx) {
    const uint32_t u = vertices[idx];
    const std::vector<Neighbor> truth = exact_knn_of_vertex(s, u, k, g.distance_mode());
    std::vector<uint32_t> truth_ids(truth.size());
    for (size_t i = 0; i < truth.size(); ++i) truth_ids[i] = truth[i].id;
    std::sort(truth_ids.begin(), truth_ids.end());
    uint32_t hit = 0;
    for (uint32_t v : g.neighbors(u)) {
      if (std::binary_search(truth_ids.begin(), truth_ids.end(), v)) ++hit;
    }
    frac[idx] = static_cast<double>(hit) / static_cast<double>(k);
  }

  double sum = 0.0;
  for (double f : frac) sum += f;

  GraphQualityReport rep;
  rep.quality = vertices.empty() ? 0.0 : sum / static_cast<double>(vertices.size());
  rep.sampled_vertices = static_cast<uint32_t>(vertices.size());
  rep.k_used = k;
  return rep;
}

}  // namespace nhq
