#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "nhq/builders.hpp"
#include "nhq/eval.hpp"
#include "test_util.hpp"

using namespace nhq;

namespace {

GroundTruthEntry truth_of(std::vector<Neighbor> hits) {
  GroundTruthEntry e;
  e.hits = std::move(hits);
  return e;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("recall divides by min(k, truth size) and ignores distances") {
  const GroundTruthEntry t = truth_of({{3, 0.1}, {7, 0.2}, {9, 0.3}});
  const std::vector<Neighbor> exact{{3, 0.1}, {7, 0.2}, {9, 0.3}};
  CHECK(recall_at_k(exact, t, 3) == 1.0);
  const std::vector<Neighbor> partial{{3, 0.5}, {8, 0.2}, {9, 0.9}};
  CHECK(recall_at_k(partial, t, 3) == doctest::Approx(2.0 / 3.0));
  // Truth smaller than k: denominator is |truth|.
  const GroundTruthEntry scarce = truth_of({{5, 0.4}});
  CHECK(recall_at_k({{{5, 0.4}, {6, 0.5}}}, scarce, 10) == 1.0);
  CHECK(recall_at_k({{{6, 0.5}}}, scarce, 10) == 0.0);
  // Empty truth: recall is 0 by convention.
  CHECK(recall_at_k(exact, truth_of({}), 3) == 0.0);
  // Only the first k hits count.
  const std::vector<Neighbor> padded{{1, 0.0}, {2, 0.0}, {3, 0.9}};
  CHECK(recall_at_k(padded, t, 2) == 0.0);
}

TEST_CASE("selectivity is the rejected fraction of the corpus") {
  std::vector<FeatureVector> vecs{{0.0f}, {1.0f}, {2.0f}, {3.0f}};
  std::vector<AttributeVector> attrs{{0}, {0}, {1}, {1}};
  const ObjectSet s = ObjectSet::from_rows(vecs, attrs, {2});
  Query q;
  q.vector = {0.0f};
  q.attributes = {0};
  CHECK(query_selectivity(s, q) == doctest::Approx(0.5));
  q.attributes = {1};
  CHECK(query_selectivity(s, q) == doctest::Approx(0.5));
  // A query whose attribute arity disagrees with the corpus is malformed.
  Query open = q;
  open.attributes.clear();
  CHECK_THROWS_AS(query_selectivity(s, open), UsageError);
  // An attribute-free corpus filters nothing.
  const ObjectSet bare = ObjectSet::from_rows(vecs, {}, {});
  CHECK(query_selectivity(bare, open) == 0.0);
}

TEST_CASE("oracle rows scan the whole corpus and score perfectly") {
  const ObjectSet s = testutil::make_objects(100, 4, {2}, 61);
  const auto queries = testutil::make_queries(10, 4, {2}, 67);
  const GroundTruth truth = compute_ground_truth(s, queries, 5, TruthFlavor::Hybrid);
  MethodSpec m;
  m.label = "oracle";
  m.kind = MethodSpec::Kind::Oracle;
  SearchParams p;
  p.k_results = 5;
  p.pool_size = 50;
  const EvalRow row = run_benchmark(m, s, queries, truth, p);
  CHECK(row.method == "oracle");
  CHECK(row.n == 100);
  CHECK(row.d == 4);
  CHECK(row.m == 1);
  CHECK(row.recall_at_k == 1.0);
  CHECK(row.mean_ndc == doctest::Approx(100.0));
  CHECK(row.speedup == doctest::Approx(1.0));
  REQUIRE(row.per_query.size() == 10);
  for (const QueryOutcome& o : row.per_query) CHECK(o.ndc == 100);
}

TEST_CASE("graph methods populate builder and search parameters in the row") {
  const ObjectSet s = testutil::make_objects(200, 5, {3}, 71);
  BuildParams bp;
  bp.k = 8;
  bp.l = 24;
  bp.seed = 9;
  const CompositeGraph g = build_npg_kgraph(s, bp, DistanceMode::fusion());
  const auto queries = testutil::make_queries(12, 5, {3}, 73);
  const GroundTruth truth = compute_ground_truth(s, queries, 10, TruthFlavor::Hybrid);
  MethodSpec m;
  m.label = "nhq-npg-kgraph";
  m.kind = MethodSpec::Kind::TwoStage;
  m.graph = &g;
  SearchParams p;
  p.pool_size = 80;
  p.h = 2;
  p.rng_seed = 21;
  const EvalRow row = run_benchmark(m, s, queries, truth, p);
  CHECK(row.k == 8);
  CHECK(row.l == 24);
  CHECK(row.pool_size == 80);
  CHECK(row.h == 2);
  CHECK(row.seed == 21);
  CHECK(row.recall_at_k > 0.5);
  CHECK(row.mean_ndc > 0.0);
  CHECK(row.mean_ndc < 200.0);
  CHECK(row.speedup == doctest::Approx(200.0 / row.mean_ndc));
  // Deterministic: the same call yields the same aggregates.
  const EvalRow again = run_benchmark(m, s, queries, truth, p);
  CHECK(again.recall_at_k == row.recall_at_k);
  CHECK(again.mean_ndc == row.mean_ndc);
}

TEST_CASE("truth flavor must match the method") {
  const ObjectSet s = testutil::make_objects(80, 4, {2}, 81);
  BuildParams bp;
  bp.k = 6;
  bp.l = 18;
  const CompositeGraph fused = build_npg_kgraph(s, bp, DistanceMode::fusion());
  const CompositeGraph plain = build_npg_kgraph(s, bp, DistanceMode::euclidean());
  const auto queries = testutil::make_queries(5, 4, {2}, 83);
  const GroundTruth vec_truth = compute_ground_truth(s, queries, 5, TruthFlavor::Vector);
  const GroundTruth hyb_truth = compute_ground_truth(s, queries, 5, TruthFlavor::Hybrid);
  SearchParams p;
  p.k_results = 5;
  p.pool_size = 40;

  MethodSpec two_stage{"nhq", MethodSpec::Kind::TwoStage, &fused};
  CHECK_THROWS_AS(run_benchmark(two_stage, s, queries, vec_truth, p), UsageError);
  CHECK_NOTHROW(run_benchmark(two_stage, s, queries, hyb_truth, p));

  MethodSpec greedy_plain{"greedy", MethodSpec::Kind::Greedy, &plain};
  CHECK_THROWS_AS(run_benchmark(greedy_plain, s, queries, hyb_truth, p), UsageError);
  CHECK_NOTHROW(run_benchmark(greedy_plain, s, queries, vec_truth, p));

  MethodSpec strat_b{"strategy-b", MethodSpec::Kind::StrategyB, &plain};
  CHECK_THROWS_AS(run_benchmark(strat_b, s, queries, vec_truth, p), UsageError);
  CHECK_NOTHROW(run_benchmark(strat_b, s, queries, hyb_truth, p));
  MethodSpec strat_b_fused = strat_b;
  strat_b_fused.graph = &fused;
  CHECK_THROWS_AS(run_benchmark(strat_b_fused, s, queries, hyb_truth, p), UsageError);

  MethodSpec no_graph{"nhq", MethodSpec::Kind::TwoStage, nullptr};
  CHECK_THROWS_AS(run_benchmark(no_graph, s, queries, hyb_truth, p), UsageError);
}

TEST_CASE("queries with empty truth are excluded from the recall mean") {
  // Attribute code 2 exists in the schema but no object carries it, so the
  // second query has empty hybrid truth.
  std::vector<FeatureVector> vecs{{0.0f}, {1.0f}, {2.0f}, {3.0f}};
  std::vector<AttributeVector> attrs{{0}, {0}, {1}, {1}};
  const ObjectSet s = ObjectSet::from_rows(vecs, attrs, {3});
  std::vector<Query> queries(2);
  queries[0].vector = {0.2f};
  queries[0].attributes = {0};
  queries[1].vector = {0.2f};
  queries[1].attributes = {2};
  const GroundTruth truth = compute_ground_truth(s, queries, 2, TruthFlavor::Hybrid);
  REQUIRE(truth.entries[1].hits.empty());
  MethodSpec m;
  m.label = "oracle";
  m.kind = MethodSpec::Kind::Oracle;
  SearchParams p;
  p.k_results = 2;
  p.pool_size = 4;
  const EvalRow row = run_benchmark(m, s, queries, truth, p);
  CHECK(row.empty_truth_queries == 1);
  CHECK(row.recall_at_k == 1.0);  // mean over the single scoreable query
  REQUIRE(row.per_query.size() == 2);
  CHECK(row.per_query[1].empty_truth);
  CHECK(row.mean_ndc == doctest::Approx(4.0));  // ndc still counts both
}

TEST_CASE("report writer emits the pinned column order and notes") {
  const ObjectSet s = testutil::make_objects(60, 4, {2}, 91);
  const auto queries = testutil::make_queries(6, 4, {2}, 93);
  const GroundTruth truth = compute_ground_truth(s, queries, 5, TruthFlavor::Hybrid);
  MethodSpec m;
  m.label = "oracle";
  m.kind = MethodSpec::Kind::Oracle;
  SearchParams p;
  p.k_results = 5;
  p.pool_size = 10;
  const EvalRow row = run_benchmark(m, s, queries, truth, p);
  std::ostringstream out;
  const std::vector<std::string> notes{"corpus: synthetic"};
  write_report(out, std::vector<EvalRow>{row}, notes);
  const auto lines = lines_of(out.str());
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "# corpus: synthetic");
  CHECK(lines[1] ==
        "method\tn\td\tm\tk\tl\tpool_size\th\trecall_at_k\tmean_ndc\tspeedup\tqps\t"
        "selectivity\tseed");
  // Row fields: method first, then n d m as integers.
  std::istringstream fields(lines[2]);
  std::string method;
  int n, d, mm;
  fields >> method >> n >> d >> mm;
  CHECK(method == "oracle");
  CHECK(n == 60);
  CHECK(d == 4);
  CHECK(mm == 1);
  const size_t tabs = static_cast<size_t>(std::count(lines[2].begin(), lines[2].end(), '\t'));
  CHECK(tabs == 13);  // 14 columns
}

TEST_CASE("report writer recomputes aggregates and rejects tampering") {
  const ObjectSet s = testutil::make_objects(50, 3, {2}, 95);
  const auto queries = testutil::make_queries(4, 3, {2}, 97);
  const GroundTruth truth = compute_ground_truth(s, queries, 3, TruthFlavor::Hybrid);
  MethodSpec m;
  m.label = "oracle";
  m.kind = MethodSpec::Kind::Oracle;
  SearchParams p;
  p.k_results = 3;
  p.pool_size = 6;
  EvalRow row = run_benchmark(m, s, queries, truth, p);
  std::ostringstream ok;
  CHECK_NOTHROW(write_report(ok, std::vector<EvalRow>{row}));
  row.mean_ndc += 1.0;  // no longer matches the per-query outcomes
  std::ostringstream bad;
  CHECK_THROWS_AS(write_report(bad, std::vector<EvalRow>{row}), InvariantError);
}

TEST_CASE("sweep yields one row per parameter setting") {
  const ObjectSet s = testutil::make_objects(120, 4, {2}, 99);
  BuildParams bp;
  bp.k = 6;
  bp.l = 18;
  const CompositeGraph g = build_npg_kgraph(s, bp, DistanceMode::fusion());
  const auto queries = testutil::make_queries(8, 4, {2}, 101);
  const GroundTruth truth = compute_ground_truth(s, queries, 5, TruthFlavor::Hybrid);
  MethodSpec m{"nhq", MethodSpec::Kind::TwoStage, &g};
  std::vector<SearchParams> sweep(3);
  sweep[0].pool_size = 10;
  sweep[1].pool_size = 30;
  sweep[2].pool_size = 90;
  for (auto& sp : sweep) {
    sp.k_results = 5;
    sp.h = 2;
  }
  const auto rows = run_benchmark_sweep(m, s, queries, truth, sweep);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].pool_size == 10);
  CHECK(rows[1].pool_size == 30);
  CHECK(rows[2].pool_size == 90);
  // A wider pool never reduces the number of distance evaluations to below
  // a narrower pool's recall at equal settings; assert the weak sanity that
  // recall does not degrade as the pool grows on this corpus.
  CHECK(rows[2].recall_at_k >= rows[0].recall_at_k);
}
