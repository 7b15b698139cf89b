#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <vector>

#include "doctest.h"
#include "nhq/builders.hpp"
#include "nhq/search.hpp"
#include "test_util.hpp"

using namespace nhq;

namespace {

struct RefResult {
  std::vector<Neighbor> hits;
  uint64_t ndc = 0;
  std::vector<uint32_t> path;
};

// Independent re-implementation of the full-expansion search loop used as a
// semantic oracle: linear-scan frontier instead of a heap, resort-on-insert
// result pool instead of an insertion-sorted one. Entry points are explicit
// so no RNG is involved.
RefResult reference_greedy(const CompositeGraph& g, const ObjectSet& s, const Query& q,
                           const std::vector<uint32_t>& entries, uint32_t pool_size,
                           uint32_t k_results) {
  RefResult res;
  std::vector<char> visited(g.size(), 0);
  std::vector<Neighbor> R, C;
  const auto eval = [&](uint32_t v) {
    ++res.ndc;
    return query_distance(s, q, v, g.distance_mode());
  };
  const auto insert_R = [&](const Neighbor& c) {
    if (R.size() < pool_size) {
      R.push_back(c);
      std::sort(R.begin(), R.end(), neighbor_less);
      return true;
    }
    if (!neighbor_less(c, R.back())) return false;
    R.back() = c;
    std::sort(R.begin(), R.end(), neighbor_less);
    return true;
  };
  for (uint32_t e : entries) {
    if (visited[e]) continue;
    visited[e] = 1;
    const Neighbor c{e, eval(e)};
    C.push_back(c);
    insert_R(c);
  }
  while (!C.empty()) {
    size_t best = 0;
    for (size_t i = 1; i < C.size(); ++i)
      if (neighbor_less(C[i], C[best])) best = i;
    const Neighbor cur = C[best];
    C.erase(C.begin() + best);
    res.path.push_back(cur.id);
    bool updated = false;
    for (uint32_t v : g.neighbors(cur.id)) {
      if (visited[v]) continue;
      visited[v] = 1;
      const Neighbor c{v, eval(v)};
      C.push_back(c);
      if (insert_R(c)) updated = true;
    }
    if (!updated) break;
  }
  res.hits.assign(R.begin(), R.begin() + std::min<size_t>(k_results, R.size()));
  return res;
}

bool same_hits(const std::vector<Neighbor>& a, const std::vector<Neighbor>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i].id != b[i].id || a[i].dist != b[i].dist) return false;
  return true;
}

}  // namespace

TEST_CASE("greedy search matches an independent reference implementation") {
  const ObjectSet s = testutil::make_objects(150, 6, {2, 3}, 17);
  BuildParams bp;
  bp.k = 8;
  bp.l = 24;
  bp.seed = 2;
  for (const DistanceMode mode : {DistanceMode::euclidean(), DistanceMode::fusion()}) {
    const CompositeGraph g = build_npg_kgraph(s, bp, mode);
    const auto queries = testutil::make_queries(25, 6, {2, 3}, 33);
    for (size_t qi = 0; qi < queries.size(); ++qi) {
      SearchParams p;
      p.k_results = 5;
      p.pool_size = 20;
      p.entry_points = {static_cast<uint32_t>(qi * 6 % 150)};
      const SearchResult got = greedy_search(g, s, queries[qi], p);
      const RefResult want =
          reference_greedy(g, s, queries[qi], p.entry_points, p.pool_size, p.k_results);
      CHECK(same_hits(got.hits, want.hits));
      CHECK(got.ndc == want.ndc);
      CHECK(got.path == want.path);
    }
  }
}

TEST_CASE("two-stage with h=1 reproduces greedy bit for bit") {
  const ObjectSet s = testutil::make_objects(200, 6, {3}, 29);
  BuildParams bp;
  bp.k = 10;
  bp.l = 30;
  bp.seed = 4;
  const CompositeGraph g = build_npg_kgraph(s, bp, DistanceMode::fusion());
  const auto queries = testutil::make_queries(30, 6, {3}, 91);
  for (size_t qi = 0; qi < queries.size(); ++qi) {
    SearchParams p;
    p.k_results = 10;
    p.pool_size = 40;
    p.h = 1;
    p.rng_seed = 1000 + qi;
    const SearchResult ts = two_stage_search(g, s, queries[qi], p);
    const SearchResult gr = greedy_search(g, s, queries[qi], p);
    CHECK(same_hits(ts.hits, gr.hits));
    CHECK(ts.ndc == gr.ndc);
    CHECK(ts.path == gr.path);
    CHECK(ts.hops == gr.hops);
  }
}

TEST_CASE("two-stage with h=2 stays deterministic and samples stage 1") {
  const ObjectSet s = testutil::make_objects(200, 6, {3}, 29);
  BuildParams bp;
  bp.k = 10;
  bp.l = 30;
  bp.seed = 4;
  const CompositeGraph g = build_npg_kgraph(s, bp, DistanceMode::fusion());
  const auto queries = testutil::make_queries(10, 6, {3}, 92);
  bool saw_stage2 = false;
  for (const Query& q : queries) {
    SearchParams p;
    p.k_results = 10;
    p.pool_size = 40;
    p.h = 2;
    p.rng_seed = 77;
    const SearchResult a = two_stage_search(g, s, q, p);
    const SearchResult b = two_stage_search(g, s, q, p);
    CHECK(same_hits(a.hits, b.hits));
    CHECK(a.ndc == b.ndc);
    CHECK(a.path == b.path);
    CHECK(a.hops == a.stage1_hops + a.stage2_hops);
    saw_stage2 = saw_stage2 || a.stage2_hops > 0;
  }
  CHECK(saw_stage2);  // escalation actually happens on this corpus
}

TEST_CASE("the evaluation hook sees every distance computation exactly once") {
  const ObjectSet s = testutil::make_objects(120, 5, {2}, 3);
  BuildParams bp;
  bp.k = 6;
  bp.l = 18;
  const CompositeGraph g = build_npg_kgraph(s, bp, DistanceMode::fusion());
  const auto queries = testutil::make_queries(8, 5, {2}, 5);
  for (const Query& q : queries) {
    SearchParams p;
    p.k_results = 5;
    p.pool_size = 15;
    p.h = 2;
    p.rng_seed = 8;
    uint64_t calls = 0;
    std::vector<char> seen(s.size(), 0);
    const SearchResult r = two_stage_search(g, s, q, p, [&](uint32_t id, double dist) {
      ++calls;
      CHECK_FALSE(seen[id]);  // never evaluated twice
      seen[id] = 1;
      CHECK(dist == query_distance(s, q, id, g.distance_mode()));
    });
    CHECK(calls == r.ndc);
  }
}

TEST_CASE("fixed entry points steer the walk through the expected path") {
  // 1-D corpus: ids 0..5 at 1.0, 1.5, 2.0, 2.5, 0.5, 0.25; query at 0.
  // From 0 the walk must hop to 4, then 5, and stop with 5 as the answer.
  const ObjectSet s = testutil::line_objects({1.0f, 1.5f, 2.0f, 2.5f, 0.5f, 0.25f});
  const CompositeGraph g(6, 0, DistanceMode::fusion(), {},
                         {{1, 2, 3, 4}, {0}, {0}, {0}, {0, 5}, {4}});
  Query q;
  q.vector = {0.0f};
  q.attributes = {0};
  SearchParams p;
  p.k_results = 1;
  p.pool_size = 1;
  p.entry_points = {0};
  const SearchResult r = greedy_search(g, s, q, p);
  CHECK(r.path == std::vector<uint32_t>{0, 4, 5});
  REQUIRE(r.hits.size() == 1);
  CHECK(r.hits[0].id == 5);
  CHECK(r.hits[0].dist == doctest::Approx(0.25));
  CHECK(r.ndc == 6);  // all six vertices evaluated exactly once
}

TEST_CASE("results are sorted, bounded, and flag truncation") {
  const ObjectSet s = testutil::make_objects(30, 4, {}, 21);
  BuildParams bp;
  bp.k = 5;
  bp.l = 12;
  const CompositeGraph g = build_npg_kgraph(s, bp, DistanceMode::euclidean());
  Query q;
  q.vector = testutil::random_vectors(1, 4, 99)[0];
  SearchParams p;
  p.k_results = 50;  // more than n
  p.pool_size = 60;
  p.rng_seed = 5;
  const SearchResult r = greedy_search(g, s, q, p);
  CHECK(r.hits.size() <= 30);
  CHECK(r.truncated);
  for (size_t i = 1; i < r.hits.size(); ++i) CHECK(neighbor_less(r.hits[i - 1], r.hits[i]));
}

TEST_CASE("hybrid front door demands a fused graph and honors attributes") {
  // Two candidates: id 1 nearer in space but attribute-mismatched, id 2
  // farther but matching. The fused ranking must prefer id 2.
  std::vector<FeatureVector> vecs{{10.0f}, {0.8f}, {1.0f}};
  std::vector<AttributeVector> attrs{{0}, {1}, {0}};
  const ObjectSet s = ObjectSet::from_rows(vecs, attrs, {2});
  const CompositeGraph fused(3, 0, DistanceMode::fusion(), {}, {{1, 2}, {0, 2}, {0, 1}});
  Query q;
  q.vector = {0.0f};
  q.attributes = {0};
  SearchParams p;
  p.k_results = 1;
  p.pool_size = 3;
  p.entry_points = {1};
  const SearchResult r = hybrid_query(fused, s, q, p);
  REQUIRE(r.hits.size() == 1);
  CHECK(r.hits[0].id == 2);  // fused: 0.8*(1+1/1) = 1.6 vs 1.0*(1+0) = 1.0
  const CompositeGraph plain(3, 0, DistanceMode::euclidean(), {}, {{1, 2}, {0, 2}, {0, 1}});
  CHECK_THROWS_AS(hybrid_query(plain, s, q, p), UsageError);
}

TEST_CASE("parameter validation") {
  const ObjectSet s = testutil::make_objects(20, 3, {}, 1);
  const CompositeGraph g(20, 4, DistanceMode::euclidean(), {},
                         std::vector<std::vector<uint32_t>>(20));
  Query q;
  q.vector = testutil::random_vectors(1, 3, 2)[0];
  SearchParams p;

  SearchParams bad = p;
  bad.k_results = 0;
  CHECK_THROWS_AS(greedy_search(g, s, q, bad), UsageError);
  bad = p;
  bad.pool_size = 5;
  bad.k_results = 10;
  CHECK_THROWS_AS(greedy_search(g, s, q, bad), UsageError);
  bad = p;
  bad.h = 0;
  CHECK_THROWS_AS(two_stage_search(g, s, q, bad), UsageError);
  bad = p;
  bad.h = 5;  // exceeds the degree bound of 4
  CHECK_THROWS_AS(two_stage_search(g, s, q, bad), UsageError);
  bad = p;
  bad.entry_points = {25};
  CHECK_THROWS_AS(greedy_search(g, s, q, bad), UsageError);
  Query wrong = q;
  wrong.vector.push_back(0.0f);
  CHECK_THROWS_AS(greedy_search(g, s, wrong, p), UsageError);
}
