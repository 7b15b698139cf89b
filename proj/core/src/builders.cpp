#include "nhq/builders.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

#include "nhq/detail/bounded_pool.hpp"
#include "nhq/edge_select.hpp"
#include "nhq/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nhq {

namespace {

int resolve_threads(uint32_t threads) {
#ifdef _OPENMP
  return threads > 0 ? static_cast<int>(threads) : omp_get_max_threads();
#else
  (void)threads;
  return 1;
#endif
}

PairDistance pair_distance(const ObjectSet& s, const DistanceMode& mode) {
  return [&s, &mode](uint32_t a, uint32_t b) { return object_distance(s, a, b, mode); };
}

std::string mode_tag(const DistanceMode& mode) {
  return mode.metric == Metric::Fusion ? "fusion" : "euclidean";
}

}  // namespace

CompositeGraph build_threshold_graph(const ObjectSet& s, double theta_prime,
                                     const DistanceMode& mode, uint32_t n_cap) {
  const uint32_t n = s.size();
  if (n == 0) throw UsageError("build_threshold_graph: empty object set");
  if (!(theta_prime > 0.0)) throw UsageError("build_threshold_graph: theta_prime must be > 0");
  if (n > n_cap)
    throw UsageError("build_threshold_graph: n = " + std::to_string(n) + " exceeds cap " +
                     std::to_string(n_cap) + " (quadratic builder)");

  std::vector<std::vector<uint32_t>> adj(n);
  const int nthreads = resolve_threads(0);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16) num_threads(nthreads)
#endif
  for (int64_t i = 0; i < static_cast<int64_t>(n); ++i) {
    const uint32_t u = static_cast<uint32_t>(i);
    for (uint32_t v = 0; v < n; ++v) {
      if (v == u) continue;
      if (object_distance(s, u, v, mode) < theta_prime) adj[u].push_back(v);
    }
  }

  std::ostringstream params;
  params << "theta_prime=" << theta_prime << " mode=" << mode_tag(mode);
  return CompositeGraph(n, 0, mode, BuildMeta{"threshold", params.str(), 0}, std::move(adj));
}

namespace {

// Best-l greedy collection over a partial adjacency (vertices [0, n_partial)).
// Same discipline as the query-time loop: full expansion, stop when an
// iteration leaves the pool unchanged or the frontier drains.
std::vector<Neighbor> greedy_collect(const ObjectSet& s, const DistanceMode& mode,
                                     const std::vector<std::vector<uint32_t>>& adj,
                                     uint32_t n_partial, uint32_t target, uint32_t l,
                                     uint32_t entry) {
  detail::BoundedPool pool(l);
  detail::FrontierHeap frontier;
  std::vector<uint8_t> visited(n_partial, 0);
  visited[entry] = 1;
  const Neighbor first{entry, object_distance(s, target, entry, mode)};
  frontier.push(first);
  pool.insert(first);
  while (!frontier.empty()) {
    const Neighbor cur = frontier.top();
    frontier.pop();
    bool updated = false;
    for (uint32_t v : adj[cur.id]) {
      if (visited[v]) continue;
      visited[v] = 1;
      const Neighbor c{v, object_distance(s, target, v, mode)};
      frontier.push(c);
      if (pool.insert(c)) updated = true;
    }
    if (!updated) break;
  }
  return pool.take();
}

}  // namespace

CompositeGraph build_npg_nsw(const ObjectSet& s, const BuildParams& p, const DistanceMode& mode) {
  const uint32_t n = s.size();
  if (n == 0) throw UsageError("build_npg_nsw: empty object set");
  if (p.k == 0) throw UsageError("build_npg_nsw: k must be positive");
  if (p.l < p.k) throw UsageError("build_npg_nsw: l must be >= k");

  const PairDistance dist = pair_distance(s, mode);
  std::vector<std::vector<uint32_t>> adj(n);
  Rng rng = make_rng(p.seed, RngStream::NswEntry);

  for (uint32_t i = 1; i < n; ++i) {
    const uint32_t entry = uniform_u32(rng, i);
    CandidatePool cand{i, greedy_collect(s, mode, adj, i, i, p.l, entry)};
    const std::vector<Neighbor> chosen = select_neighbors(cand, p.k, dist);
    adj[i].reserve(chosen.size());
    for (const Neighbor& c : chosen) adj[i].push_back(c.id);

    // Back edges, nearest first. The endpoint's list is re-selected from
    // (old neighbors + new arrival) on every insertion — not just on degree
    // overflow — so the pairwise landing-zone property keeps holding on
    // every vertex at every step; a merely appended back edge could break it.
    for (const Neighbor& c : chosen) {
      std::vector<Neighbor> endpoint;
      endpoint.reserve(adj[c.id].size() + 1);
      for (uint32_t w : adj[c.id]) endpoint.push_back({w, dist(c.id, w)});
      endpoint.push_back({i, c.dist});
      std::sort(endpoint.begin(), endpoint.end(), neighbor_less);
      CandidatePool repool{c.id, std::move(endpoint)};
      const std::vector<Neighbor> kept = select_neighbors(repool, p.k, dist);
      adj[c.id].clear();
      for (const Neighbor& w : kept) adj[c.id].push_back(w.id);
    }
  }

  std::ostringstream params;
  params << "k=" << p.k << " l=" << p.l << " mode=" << mode_tag(mode);
  return CompositeGraph(n, p.k, mode, BuildMeta{"npg-nsw", params.str(), p.seed},
                        std::move(adj));
}

namespace detail {

uint64_t kgraph_refine_round(const ObjectSet& s, const DistanceMode& mode, const Pools& prev,
                             Pools& next, uint32_t threads) {
  const uint32_t n = static_cast<uint32_t>(prev.size());
  next.resize(n);
  std::vector<uint64_t> changed(n, 0);
  const int nthreads = resolve_threads(threads);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 8) num_threads(nthreads)
#endif
  for (int64_t ii = 0; ii < static_cast<int64_t>(n); ++ii) {
    const uint32_t u = static_cast<uint32_t>(ii);
    std::vector<Neighbor> pool = prev[u];
    std::unordered_set<uint32_t> members;
    members.reserve(pool.size() * 2);
    for (const Neighbor& c : pool) members.insert(c.id);
    uint64_t replaced = 0;
    for (const Neighbor& via : prev[u]) {
      for (const Neighbor& cand : prev[via.id]) {
        if (cand.id == u || members.count(cand.id)) continue;
        const Neighbor offer{cand.id, object_distance(s, u, cand.id, mode)};
        if (pool.empty() || !neighbor_less(offer, pool.back())) continue;
        members.erase(pool.back().id);
        pool.pop_back();
        auto it = std::lower_bound(pool.begin(), pool.end(), offer, neighbor_less);
        pool.insert(it, offer);
        members.insert(offer.id);
        ++replaced;
      }
    }
    next[u] = std::move(pool);
    changed[u] = replaced;
  }
  uint64_t total = 0;
  for (uint64_t c : changed) total += c;
  return total;
}

double pool_quality_estimate(const ObjectSet& s, const DistanceMode& mode, const Pools& pools,
                             uint32_t k, std::span<const uint32_t> sample_vertices,
                             uint32_t threads) {
  if (k == 0) throw UsageError("pool_quality_estimate: k must be positive");
  if (sample_vertices.empty()) throw UsageError("pool_quality_estimate: empty sample");
  std::vector<double> frac(sample_vertices.size(), 0.0);
  const int nthreads = resolve_threads(threads);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 4) num_threads(nthreads)
#endif
  for (int64_t i = 0; i < static_cast<int64_t>(sample_vertices.size()); ++i) {
    const uint32_t u = sample_vertices[i];
    const std::vector<Neighbor> truth = exact_knn_of_vertex(s, u, k, mode);
    std::vector<uint32_t> truth_ids(truth.size());
    for (size_t t = 0; t < truth.size(); ++t) truth_ids[t] = truth[t].id;
    std::sort(truth_ids.begin(), truth_ids.end());
    const size_t take = std::min<size_t>(k, pools[u].size());
    uint32_t hit = 0;
    for (size_t t = 0; t < take; ++t) {
      if (std::binary_search(truth_ids.begin(), truth_ids.end(), pools[u][t].id)) ++hit;
    }
    frac[i] = static_cast<double>(hit) / static_cast<double>(k);
  }
  double sum = 0.0;
  for (double f : frac) sum += f;
  return sum / static_cast<double>(sample_vertices.size());
}

}  // namespace detail

KgraphTrace build_npg_kgraph_traced(const ObjectSet& s, const BuildParams& p,
                                    const DistanceMode& mode) {
  const uint32_t n = s.size();
  if (n < 2) throw UsageError("build_npg_kgraph: need at least 2 objects");
  if (p.k == 0) throw UsageError("build_npg_kgraph: k must be positive");
  if (p.l < p.k) throw UsageError("build_npg_kgraph: l must be >= k");
  if (!(p.quality_threshold > 0.0 && p.quality_threshold <= 1.0))
    throw UsageError("build_npg_kgraph: quality_threshold must be in (0, 1]");

  const int nthreads = resolve_threads(p.threads);
  const bool exhaustive = n - 1 <= p.l;

  detail::Pools pools(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16) num_threads(nthreads)
#endif
  for (int64_t ii = 0; ii < static_cast<int64_t>(n); ++ii) {
    const uint32_t u = static_cast<uint32_t>(ii);
    std::vector<Neighbor> pool;
    if (exhaustive) {
      pool.reserve(n - 1);
      for (uint32_t v = 0; v < n; ++v) {
        if (v != u) pool.push_back({v, object_distance(s, u, v, mode)});
      }
    } else {
      Rng rng = make_rng(p.seed, RngStream::KgraphInit, u);
      pool.reserve(p.l);
      for (uint32_t x : sample_distinct(rng, p.l, n - 1)) {
        const uint32_t v = x >= u ? x + 1 : x;  // skip the owner
        pool.push_back({v, object_distance(s, u, v, mode)});
      }
    }
    std::sort(pool.begin(), pool.end(), neighbor_less);
    pools[u] = std::move(pool);
  }

  // Fixed quality sample for the whole build: all vertices when small,
  // otherwise 500 drawn from the build seed.
  std::vector<uint32_t> sample;
  if (n <= 500) {
    sample.resize(n);
    for (uint32_t u = 0; u < n; ++u) sample[u] = u;
  } else {
    Rng rng = make_rng(p.seed, RngStream::KgraphQualitySample);
    sample = sample_distinct(rng, 500, n);
  }

  uint32_t rounds = 0;
  double quality =
      detail::pool_quality_estimate(s, mode, pools, p.k, sample, p.threads);
  if (!exhaustive) {
    detail::Pools next;
    while (quality < p.quality_threshold && rounds < p.max_rounds) {
      const uint64_t replaced = detail::kgraph_refine_round(s, mode, pools, next, p.threads);
      pools.swap(next);
      ++rounds;
      quality = detail::pool_quality_estimate(s, mode, pools, p.k, sample, p.threads);
      if (replaced == 0) break;  // fixed point: further rounds change nothing
    }
  }

  const PairDistance dist = pair_distance(s, mode);
  std::vector<std::vector<uint32_t>> adj(n);
  std::vector<std::vector<uint32_t>> cand_adj(n);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16) num_threads(nthreads)
#endif
  for (int64_t ii = 0; ii < static_cast<int64_t>(n); ++ii) {
    const uint32_t u = static_cast<uint32_t>(ii);
    const size_t topk = std::min<size_t>(p.k, pools[u].size());
    cand_adj[u].reserve(topk);
    for (size_t t = 0; t < topk; ++t) cand_adj[u].push_back(pools[u][t].id);
    CandidatePool cand{u, pools[u]};
    const std::vector<Neighbor> chosen = select_neighbors(cand, p.k, dist);
    adj[u].reserve(chosen.size());
    for (const Neighbor& c : chosen) adj[u].push_back(c.id);
  }

  std::ostringstream params;
  params << "k=" << p.k << " l=" << p.l << " quality_threshold=" << p.quality_threshold
         << " max_rounds=" << p.max_rounds << " rounds=" << rounds << " quality=" << quality
         << " quality_sample=" << sample.size() << " mode=" << mode_tag(mode);

  KgraphTrace trace{
      CompositeGraph(n, p.k, mode, BuildMeta{"npg-kgraph", params.str(), p.seed},
                     std::move(adj)),
      CompositeGraph(n, p.k, mode, BuildMeta{"npg-kgraph-candidates", params.str(), p.seed},
                     std::move(cand_adj)),
      quality, rounds, static_cast<uint32_t>(sample.size())};
  return trace;
}

CompositeGraph build_npg_kgraph(const ObjectSet& s, const BuildParams& p,
                                const DistanceMode& mode) {
  return build_npg_kgraph_traced(s, p, mode).graph;
}

}  // namespace nhq
