#include "nhq/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <sstream>

namespace nhq {

double recall_at_k(std::span<const Neighbor> hits, const GroundTruthEntry& truth, uint32_t k) {
  if (k == 0) throw UsageError("recall_at_k: k must be positive");
  if (truth.hits.empty()) return 0.0;
  std::vector<uint32_t> truth_ids;
  truth_ids.reserve(truth.hits.size());
  for (const Neighbor& t : truth.hits) truth_ids.push_back(t.id);
  std::sort(truth_ids.begin(), truth_ids.end());
  uint32_t found = 0;
  const size_t ranked = std::min<size_t>(hits.size(), k);  // only the top k count
  for (size_t i = 0; i < ranked; ++i) {
    if (std::binary_search(truth_ids.begin(), truth_ids.end(), hits[i].id)) ++found;
  }
  const uint32_t denom = std::min<uint32_t>(k, static_cast<uint32_t>(truth.hits.size()));
  return static_cast<double>(found) / static_cast<double>(denom);
}

double query_selectivity(const ObjectSet& s, const Query& q) {
  if (s.size() == 0) throw UsageError("query_selectivity: empty object set");
  s.check_query(q);
  uint32_t matches = 0;
  for (uint32_t v = 0; v < s.size(); ++v) {
    if (attribute_distance(q.attributes, s.attributes_of(v)) == 0) ++matches;
  }
  return 1.0 - static_cast<double>(matches) / static_cast<double>(s.size());
}

namespace {

// Pull one numeric token ("key=value") out of a builder's meta echo.
uint32_t meta_u32(const std::string& params, const std::string& key) {
  const std::string needle = key + "=";
  size_t pos = 0;
  while ((pos = params.find(needle, pos)) != std::string::npos) {
    if (pos == 0 || params[pos - 1] == ' ') {
      return static_cast<uint32_t>(std::strtoul(params.c_str() + pos + needle.size(), nullptr, 10));
    }
    pos += needle.size();
  }
  return 0;
}

void check_flavor(const MethodSpec& method, const GroundTruth& truth) {
  switch (method.kind) {
    case MethodSpec::Kind::Oracle:
      return;  // the oracle serves either flavor
    case MethodSpec::Kind::StrategyB:
      if (!method.graph) throw UsageError("run_benchmark: method needs a graph");
      if (method.graph->distance_mode().metric != Metric::Euclidean)
        throw UsageError("run_benchmark: decoupled baseline needs a vector-distance graph");
      if (truth.flavor != TruthFlavor::Hybrid)
        throw UsageError("run_benchmark: decoupled baseline pairs with hybrid truth");
      return;
    case MethodSpec::Kind::TwoStage:
    case MethodSpec::Kind::Greedy: {
      if (!method.graph) throw UsageError("run_benchmark: method needs a graph");
      const bool fused = method.graph->distance_mode().metric == Metric::Fusion;
      const bool hybrid = truth.flavor == TruthFlavor::Hybrid;
      if (fused != hybrid)
        throw UsageError("run_benchmark: truth flavor does not match the graph's distance");
      return;
    }
  }
}

}  // namespace

EvalRow run_benchmark(const MethodSpec& method, const ObjectSet& s,
                      std::span<const Query> queries, const GroundTruth& truth,
                      const SearchParams& p) {
  if (queries.empty()) throw UsageError("run_benchmark: no queries");
  if (queries.size() != truth.entries.size())
    throw UsageError("run_benchmark: query and truth counts differ");
  check_flavor(method, truth);

  EvalRow row;
  row.method = method.label;
  row.n = s.size();
  row.d = s.dim_v();
  row.m = s.dim_a();
  row.pool_size = p.pool_size;
  row.h = p.h;
  row.seed = p.rng_seed;
  if (method.graph) {
    row.k = method.graph->degree_bound();
    row.l = meta_u32(method.graph->build_meta().params, "l");
  }
  row.per_query.resize(queries.size());

  double recall_sum = 0.0;
  uint32_t recall_count = 0;
  double ndc_sum = 0.0;
  double seconds_sum = 0.0;
  double selectivity_sum = 0.0;

  for (size_t i = 0; i < queries.size(); ++i) {
    const Query& q = queries[i];
    SearchParams pq = p;
    pq.k_results = truth.k;
    if (pq.pool_size < pq.k_results) pq.pool_size = pq.k_results;

    const auto t0 = std::chrono::steady_clock::now();
    SearchResult res;
    switch (method.kind) {
      case MethodSpec::Kind::TwoStage:
        res = method.graph->distance_mode().metric == Metric::Fusion
                  ? hybrid_query(*method.graph, s, q, pq)
                  : two_stage_search(*method.graph, s, q, pq);
        break;
      case MethodSpec::Kind::Greedy:
        res = greedy_search(*method.graph, s, q, pq);
        break;
      case MethodSpec::Kind::StrategyB:
        res = strategy_b_search(*method.graph, s, q, pq, method.multiplier,
                                method.filter_during_search);
        break;
      case MethodSpec::Kind::Oracle: {
        const GroundTruthEntry e = truth.flavor == TruthFlavor::Vector
                                       ? exact_topk_vector(s, q, truth.k)
                                       : exact_topk_hybrid(s, q, truth.k);
        res.hits = e.hits;
        res.ndc = s.size();  // the scan touches every object
        break;
      }
    }
    const auto t1 = std::chrono::steady_clock::now();

    QueryOutcome& out = row.per_query[i];
    out.seconds = std::chrono::duration<double>(t1 - t0).count();
    out.ndc = res.ndc;
    out.empty_truth = truth.entries[i].hits.empty();
    out.recall = recall_at_k(res.hits, truth.entries[i], truth.k);

    if (!out.empty_truth) {
      recall_sum += out.recall;
      ++recall_count;
    } else {
      ++row.empty_truth_queries;
    }
    ndc_sum += static_cast<double>(out.ndc);
    seconds_sum += out.seconds;
    selectivity_sum += query_selectivity(s, q);
  }

  row.recall_at_k = recall_count > 0 ? recall_sum / recall_count : 0.0;
  row.mean_ndc = ndc_sum / static_cast<double>(queries.size());
  row.speedup = row.mean_ndc > 0.0 ? static_cast<double>(s.size()) / row.mean_ndc : 0.0;
  row.qps = seconds_sum > 0.0 ? static_cast<double>(queries.size()) / seconds_sum : 0.0;
  row.mean_selectivity = selectivity_sum / static_cast<double>(queries.size());
  return row;
}

std::vector<EvalRow> run_benchmark_sweep(const MethodSpec& method, const ObjectSet& s,
                                         std::span<const Query> queries,
                                         const GroundTruth& truth,
                                         std::span<const SearchParams> sweep) {
  std::vector<EvalRow> rows;
  rows.reserve(sweep.size());
  for (const SearchParams& p : sweep) rows.push_back(run_benchmark(method, s, queries, truth, p));
  return rows;
}

void write_report(std::ostream& out, std::span<const EvalRow> rows,
                  std::span<const std::string> notes) {
  for (const std::string& note : notes) out << "# " << note << "\n";
  out << "method\tn\td\tm\tk\tl\tpool_size\th\trecall_at_k\tmean_ndc\tspeedup\tqps"
      << "\tselectivity\tseed\n";
  for (const EvalRow& row : rows) {
    if (!row.per_query.empty()) {
      // Trust nothing that claims to be an aggregate: recompute from the
      // per-query outcomes and refuse to write on a mismatch.
      double recall_sum = 0.0, ndc_sum = 0.0;
      uint32_t recall_count = 0, empties = 0;
      for (const QueryOutcome& q : row.per_query) {
        if (q.empty_truth) {
          ++empties;
        } else {
          recall_sum += q.recall;
          ++recall_count;
        }
        ndc_sum += static_cast<double>(q.ndc);
      }
      const double recall = recall_count > 0 ? recall_sum / recall_count : 0.0;
      const double mean_ndc = ndc_sum / static_cast<double>(row.per_query.size());
      if (std::abs(recall - row.recall_at_k) > 1e-9 || std::abs(mean_ndc - row.mean_ndc) > 1e-6 ||
          empties != row.empty_truth_queries)
        throw InvariantError("write_report: row aggregates do not match per-query outcomes");
    }
    std::ostringstream line;
    line.precision(6);
    line << std::fixed;
    line << row.method << '\t' << row.n << '\t' << row.d << '\t' << row.m << '\t' << row.k
         << '\t' << row.l << '\t' << row.pool_size << '\t' << row.h << '\t' << row.recall_at_k
         << '\t' << row.mean_ndc << '\t' << row.speedup << '\t' << row.qps << '\t'
         << row.mean_selectivity << '\t' << row.seed;
    out << line.str() << "\n";
  }
}

}  // namespace nhq
