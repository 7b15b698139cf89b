#include <benchmark/benchmark.h>

#include <vector>

#include "nhq/core.hpp"
#include "nhq/rng.hpp"

namespace {

std::vector<float> random_vector(nhq::Rng& rng, size_t dim) {
  std::vector<float> v(dim);
  for (float& x : v) x = static_cast<float>(nhq::uniform_double(rng));
  return v;
}

void BM_Euclidean(benchmark::State& state) {
  nhq::Rng rng = nhq::make_rng(7, nhq::RngStream::VectorGen);
  const auto a = random_vector(rng, static_cast<size_t>(state.range(0)));
  const auto b = random_vector(rng, static_cast<size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(nhq::euclidean(a, b));
  }
}
BENCHMARK(BM_Euclidean)->Arg(16)->Arg(64)->Arg(256);

void BM_AttributeDistance(benchmark::State& state) {
  nhq::Rng rng = nhq::make_rng(7, nhq::RngStream::AttributeGen);
  std::vector<uint32_t> a(static_cast<size_t>(state.range(0)));
  std::vector<uint32_t> b(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    a[i] = nhq::uniform_u32(rng, 4);
    b[i] = nhq::uniform_u32(rng, 4);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(nhq::attribute_distance(a, b));
  }
}
BENCHMARK(BM_AttributeDistance)->Arg(3)->Arg(16)->Arg(64);

void BM_FusedDistance(benchmark::State& state) {
  nhq::Rng rng = nhq::make_rng(7, nhq::RngStream::VectorGen);
  const size_t dim = static_cast<size_t>(state.range(0));
  const auto va = random_vector(rng, dim);
  const auto vb = random_vector(rng, dim);
  std::vector<uint32_t> aa{1, 0, 2};
  std::vector<uint32_t> ab{1, 1, 2};
  const auto w = nhq::FusionWeights::recommended();
  for (auto _ : state) {
    const double vd = nhq::euclidean(va, vb);
    const uint32_t ad = nhq::attribute_distance(aa, ab);
    benchmark::DoNotOptimize(nhq::fuse(vd, ad, 3, w));
  }
}
BENCHMARK(BM_FusedDistance)->Arg(16)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
