#include "nhq/oracle.hpp"

#include <algorithm>

#include "nhq/detail/bounded_pool.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nhq {

GroundTruthEntry exact_topk_vector(const ObjectSet& s, const Query& q, uint32_t k) {
  if (s.size() == 0) throw UsageError("exact_topk_vector: empty object set");
  if (k == 0) throw UsageError("exact_topk_vector: k must be positive");
  s.check_query(q);
  detail::BoundedPool pool(std::min(k, s.size()));
  for (uint32_t v = 0; v < s.size(); ++v) {
    pool.insert({v, euclidean(q.vector, s.vector_of(v))});
  }
  return GroundTruthEntry{pool.take()};
}

GroundTruthEntry exact_topk_hybrid(const ObjectSet& s, const Query& q, uint32_t k) {
  if (s.size() == 0) throw UsageError("exact_topk_hybrid: empty object set");
  if (k == 0) throw UsageError("exact_topk_hybrid: k must be positive");
  s.check_query(q);
  detail::BoundedPool pool(std::min(k, s.size()));
  for (uint32_t v = 0; v < s.size(); ++v) {
    if (attribute_distance(q.attributes, s.attributes_of(v)) != 0) continue;
    pool.insert({v, euclidean(q.vector, s.vector_of(v))});
  }
  return GroundTruthEntry{pool.take()};
}

GroundTruth compute_ground_truth(const ObjectSet& s, std::span<const Query> queries, uint32_t k,
                                 TruthFlavor flavor, uint32_t threads) {
  GroundTruth gt;
  gt.flavor = flavor;
  gt.k = k;
  gt.entries.resize(queries.size());
#ifdef _OPENMP
  const int nthreads = threads > 0 ? static_cast<int>(threads) : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(nthreads)
#endif
  for (int64_t i = 0; i < static_cast<int64_t>(queries.size()); ++i) {
    gt.entries[i] = flavor == TruthFlavor::Vector ? exact_topk_vector(s, queries[i], k)
                                                  : exact_topk_hybrid(s, queries[i], k);
  }
  return gt;
}

bool attributes_match(const ObjectSet& s, const Query& q, uint32_t id) {
  return attribute_distance(q.attributes, s.attributes_of(id)) == 0;
}

SearchResult strategy_b_search(const CompositeGraph& vector_graph, const ObjectSet& s,
                               const Query& q, const SearchParams& p,
                               uint32_t candidate_multiplier, bool filter_during_search,
                               const EvalHook& hook) {
  if (vector_graph.distance_mode().metric != Metric::Euclidean)
    throw UsageError("strategy_b_search: needs a graph built on vector distance");
  if (candidate_multiplier == 0)
    throw UsageError("strategy_b_search: candidate_multiplier must be positive");

  if (filter_during_search) {
    detail::SearchConfig cfg;
    cfg.two_stage = true;
    cfg.admit = [&s, &q](uint32_t id) { return attributes_match(s, q, id); };
    return detail::run_search(vector_graph, s, q, p, cfg, hook);
  }

  SearchParams wide = p;
  wide.k_results =
      std::min<uint32_t>(s.size(), candidate_multiplier * p.k_results);
  wide.pool_size = std::max(p.pool_size, wide.k_results);
  SearchResult res = two_stage_search(vector_graph, s, q, wide, hook);

  std::vector<Neighbor> kept;
  kept.reserve(p.k_results);
  for (const Neighbor& c : res.hits) {
    ++res.attribute_checks;
    if (!attributes_match(s, q, c.id)) continue;
    kept.push_back(c);
    if (kept.size() == p.k_results) break;
  }
  res.hits = std::move(kept);
  res.truncated = res.hits.size() < p.k_results;
  return res;
}

}  // namespace nhq
