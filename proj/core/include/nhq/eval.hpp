#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "nhq/oracle.hpp"

namespace nhq {

// |hits ∩ truth| / min(k, |truth|). A hybrid truth set can legitimately be
// smaller than k (scarce attribute combinations), so the denominator shrinks
// with it. Empty truth yields 0; aggregation excludes those queries.
double recall_at_k(std::span<const Neighbor> hits, const GroundTruthEntry& truth, uint32_t k);

// Fraction of objects the query's attribute filter rejects: 1 - |matches| / n.
double query_selectivity(const ObjectSet& s, const Query& q);

struct MethodSpec {
  enum class Kind : uint8_t { TwoStage, Greedy, StrategyB, Oracle };
  std::string label;
  Kind kind = Kind::TwoStage;
  const CompositeGraph* graph = nullptr;  // required for all but Oracle
  uint32_t multiplier = 10;               // StrategyB candidate over-fetch
  bool filter_during_search = false;      // StrategyB admission-gate variant
};

struct QueryOutcome {
  double recall = 0.0;
  uint64_t ndc = 0;
  double seconds = 0.0;
  bool empty_truth = false;
};

struct EvalRow {
  std::string method;
  uint32_t n = 0, d = 0, m = 0;
  uint32_t k = 0, l = 0;          // builder parameters of the graph used
  uint32_t pool_size = 0, h = 0;  // search parameters
  double recall_at_k = 0.0;       // mean over queries with non-empty truth
  double mean_ndc = 0.0;          // mean over all queries
  double speedup = 0.0;           // n / mean_ndc
  double qps = 0.0;               // wall-clock queries per second (not asserted)
  double mean_selectivity = 0.0;
  uint64_t seed = 0;
  uint32_t empty_truth_queries = 0;
  std::vector<QueryOutcome> per_query;
};

// Runs every query through the method at one SearchParams setting. The truth
// flavor must match the method: fused-distance graphs pair with hybrid truth,
// vector graphs with vector truth, the decoupled baseline with hybrid truth.
EvalRow run_benchmark(const MethodSpec& method, const ObjectSet& s,
                      std::span<const Query> queries, const GroundTruth& truth,
                      const SearchParams& p);

std::vector<EvalRow> run_benchmark_sweep(const MethodSpec& method, const ObjectSet& s,
                                         std::span<const Query> queries,
                                         const GroundTruth& truth,
                                         std::span<const SearchParams> sweep);

// Fixed column order:
//   method n d m k l pool_size h recall_at_k mean_ndc speedup qps selectivity seed
// `notes` become leading '#' comment lines. Each row's aggregates are
// recomputed from its per-query outcomes before writing; a mismatch beyond
// rounding is an InvariantError (qps is exempt: it is wall-clock).
void write_report(std::ostream& out, std::span<const EvalRow> rows,
                  std::span<const std::string> notes = {});

}  // namespace nhq
