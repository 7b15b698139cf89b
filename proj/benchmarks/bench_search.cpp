#include <benchmark/benchmark.h>

#include <vector>

#include "nhq/builders.hpp"
#include "nhq/rng.hpp"
#include "nhq/search.hpp"

namespace {

// One shared corpus + fused graph, built lazily so the cost is paid once.
struct Fixture {
  nhq::ObjectSet objects;
  nhq::CompositeGraph graph;
  std::vector<nhq::Query> queries;

  static const Fixture& get() {
    static Fixture f = make();
    return f;
  }

  static Fixture make() {
    constexpr uint32_t n = 2000, d = 16, nq = 32;
    const std::vector<uint32_t> cards{3, 3, 3};
    nhq::Rng vec_rng = nhq::make_rng(11, nhq::RngStream::VectorGen);
    std::vector<nhq::FeatureVector> vecs(n, nhq::FeatureVector(d));
    for (auto& v : vecs)
      for (float& x : v) x = static_cast<float>(nhq::uniform_double(vec_rng));
    std::vector<nhq::AttributeVector> attrs(n, nhq::AttributeVector(cards.size()));
    nhq::Rng attr_rng = nhq::make_rng(11, nhq::RngStream::AttributeGen);
    for (auto& a : attrs)
      for (size_t c = 0; c < cards.size(); ++c) a[c] = nhq::uniform_u32(attr_rng, cards[c]);

    Fixture f;
    f.objects = nhq::ObjectSet::from_rows(vecs, attrs, cards);
    nhq::BuildParams bp;
    bp.k = 20;
    bp.l = 60;
    bp.seed = 11;
    f.graph = nhq::build_npg_kgraph(f.objects, bp, nhq::DistanceMode::fusion());

    f.queries.resize(nq);
    for (uint32_t i = 0; i < nq; ++i) {
      f.queries[i].vector.resize(d);
      for (float& x : f.queries[i].vector) x = static_cast<float>(nhq::uniform_double(vec_rng));
      f.queries[i].attributes.resize(cards.size());
      for (size_t c = 0; c < cards.size(); ++c)
        f.queries[i].attributes[c] = nhq::uniform_u32(attr_rng, cards[c]);
    }
    return f;
  }
};

void BM_HybridQuery(benchmark::State& state) {
  const Fixture& f = Fixture::get();
  nhq::SearchParams p;
  p.k_results = 10;
  p.pool_size = static_cast<uint32_t>(state.range(0));
  p.h = 2;
  p.rng_seed = 5;
  size_t qi = 0;
  uint64_t ndc = 0;
  for (auto _ : state) {
    const auto r = nhq::hybrid_query(f.graph, f.objects, f.queries[qi], p);
    ndc += r.ndc;
    benchmark::DoNotOptimize(r.hits.data());
    qi = (qi + 1) % f.queries.size();
  }
  state.counters["ndc/query"] =
      benchmark::Counter(static_cast<double>(ndc), benchmark::Counter::kAvgIterations);
}
BENCHMARK(BM_HybridQuery)->Arg(50)->Arg(100)->Arg(300);

void BM_GreedyBaseline(benchmark::State& state) {
  const Fixture& f = Fixture::get();
  nhq::SearchParams p;
  p.k_results = 10;
  p.pool_size = static_cast<uint32_t>(state.range(0));
  p.rng_seed = 5;
  size_t qi = 0;
  for (auto _ : state) {
    const auto r = nhq::greedy_search(f.graph, f.objects, f.queries[qi], p);
    benchmark::DoNotOptimize(r.hits.data());
    qi = (qi + 1) % f.queries.size();
  }
}
BENCHMARK(BM_GreedyBaseline)->Arg(50)->Arg(100)->Arg(300);

}  // namespace

BENCHMARK_MAIN();
