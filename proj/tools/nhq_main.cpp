// nhq: build, query, and benchmark hybrid (vector + attribute) indexes.
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nhq/builders.hpp"
#include "nhq/eval.hpp"
#include "nhq/io.hpp"

namespace {

using namespace nhq;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Dataset {
  ObjectSet objects;
  AttributeSchema schema;  // empty when no attribute file was given
};

Dataset load_dataset(const std::string& vectors_path, const std::string& attributes_path) {
  Dataset d;
  const std::vector<FeatureVector> vecs = read_fvecs(vectors_path);
  if (vecs.empty()) throw FormatError(vectors_path + ": no vectors");
  std::vector<AttributeVector> attrs;
  std::vector<uint32_t> cards;
  if (!attributes_path.empty()) {
    AttributeTable table = read_attributes(attributes_path);
    if (table.rows.size() != vecs.size())
      throw FormatError(attributes_path + ": " + std::to_string(table.rows.size()) +
                        " rows for " + std::to_string(vecs.size()) + " vectors");
    d.schema = std::move(table.schema);
    attrs = std::move(table.rows);
    cards = d.schema.cardinalities();
  }
  d.objects = ObjectSet::from_rows(vecs, attrs, std::move(cards));
  return d;
}

std::vector<Query> load_queries(const std::string& queries_path,
                                const std::string& query_attributes_path,
                                const AttributeSchema& schema, uint32_t k_results) {
  const std::vector<FeatureVector> vecs = read_fvecs(queries_path);
  if (vecs.empty()) throw FormatError(queries_path + ": no query vectors");
  std::vector<AttributeVector> attrs;
  if (!query_attributes_path.empty()) {
    if (schema.attributes.empty())
      throw UsageError("--query-attributes given but the objects have no attributes");
    // Encode against the object schema so codes agree across both sides.
    AttributeTable table = read_attributes(query_attributes_path, &schema);
    if (table.rows.size() != vecs.size())
      throw FormatError(query_attributes_path + ": " + std::to_string(table.rows.size()) +
                        " rows for " + std::to_string(vecs.size()) + " query vectors");
    attrs = std::move(table.rows);
  } else if (!schema.attributes.empty()) {
    throw UsageError("objects carry attributes; pass --query-attributes");
  }
  std::vector<Query> queries(vecs.size());
  for (size_t i = 0; i < vecs.size(); ++i) {
    queries[i].vector = vecs[i];
    if (!attrs.empty()) queries[i].attributes = attrs[i];
    queries[i].k_results = k_results;
  }
  return queries;
}

// Ground-truth rows as ivecs: ids ascending by (dist, id), padded to k with
// -1 when a hybrid query matches fewer than k objects.
void write_truth_ivecs(const std::string& path, const GroundTruth& gt) {
  std::vector<std::vector<int32_t>> rows(gt.entries.size());
  for (size_t i = 0; i < gt.entries.size(); ++i) {
    rows[i].assign(gt.k, -1);
    for (size_t j = 0; j < gt.entries[i].hits.size() && j < gt.k; ++j)
      rows[i][j] = static_cast<int32_t>(gt.entries[i].hits[j].id);
  }
  write_ivecs(path, rows);
}

GroundTruth read_truth_ivecs(const std::string& path, TruthFlavor flavor) {
  GroundTruth gt;
  gt.flavor = flavor;
  const auto rows = read_ivecs(path);
  gt.k = rows.empty() ? 0 : static_cast<uint32_t>(rows[0].size());
  gt.entries.resize(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    for (int32_t id : rows[i]) {
      if (id < 0) break;  // padding
      gt.entries[i].hits.push_back({static_cast<uint32_t>(id), 0.0});
    }
  }
  return gt;
}

struct BuildFlags {
  std::string vectors, attributes, out;
  std::string graph = "npg-kgraph";
  std::string mode = "fusion";
  uint32_t k = 20, l = 100, threads = 0, max_rounds = 30, n_cap = 20000;
  double quality_threshold = 0.8, theta_prime = 0.0;
  uint64_t seed = 0;
};

int run_build(const BuildFlags& f) {
  const auto t0 = std::chrono::steady_clock::now();
  Dataset data = load_dataset(f.vectors, f.attributes);
  const DistanceMode mode =
      f.mode == "fusion" ? DistanceMode::fusion() : DistanceMode::euclidean();
  if (f.mode == "fusion" && data.schema.attributes.empty())
    std::cerr << "note: fusion mode without attributes degenerates to vector distance\n";

  BuildParams bp;
  bp.k = f.k;
  bp.l = f.l;
  bp.quality_threshold = f.quality_threshold;
  bp.max_rounds = f.max_rounds;
  bp.seed = f.seed;
  bp.threads = f.threads;

  CompositeGraph graph;
  if (f.graph == "npg-kgraph") {
    KgraphTrace trace = build_npg_kgraph_traced(data.objects, bp, mode);
    std::cout << "quality_estimate=" << trace.quality_estimate << " rounds=" << trace.rounds
              << " quality_sample=" << trace.quality_sample << "\n";
    graph = std::move(trace.graph);
  } else if (f.graph == "npg-nsw") {
    graph = build_npg_nsw(data.objects, bp, mode);
  } else if (f.graph == "threshold") {
    if (!(f.theta_prime > 0.0)) throw UsageError("threshold graph needs --theta-prime > 0");
    graph = build_threshold_graph(data.objects, f.theta_prime, mode, f.n_cap);
  } else {
    throw UsageError("unknown --graph '" + f.graph + "'");
  }

  const DegreeStats st = degree_stats(graph);
  save_index(f.out, IndexArchive{std::move(graph), std::move(data.schema)});
  std::cout << "built " << f.graph << " n=" << data.objects.size() << " d=" << data.objects.dim_v()
            << " m=" << data.objects.dim_a() << " degree[min=" << st.min_degree
            << " mean=" << st.mean_degree << " max=" << st.max_degree << "]"
            << " elapsed=" << seconds_since(t0) << "s -> " << f.out << "\n";
  return 0;
}

struct GtFlags {
  std::string vectors, attributes, queries, query_attributes, out;
  std::string mode = "fusion";
  uint32_t k_results = 10, threads = 0;
};

int run_gt(const GtFlags& f) {
  Dataset data = load_dataset(f.vectors, f.attributes);
  const std::vector<Query> queries =
      load_queries(f.queries, f.query_attributes, data.schema, f.k_results);
  const TruthFlavor flavor = f.mode == "fusion" ? TruthFlavor::Hybrid : TruthFlavor::Vector;
  const GroundTruth gt =
      compute_ground_truth(data.objects, queries, f.k_results, flavor, f.threads);
  uint32_t empties = 0;
  for (const auto& e : gt.entries)
    if (e.hits.empty()) ++empties;
  write_truth_ivecs(f.out, gt);
  std::cout << "ground truth: " << gt.entries.size() << " queries, k=" << gt.k
            << (flavor == TruthFlavor::Hybrid ? " (hybrid)" : " (vector)")
            << ", empty=" << empties << " -> " << f.out << "\n";
  return 0;
}

struct SearchFlags {
  std::string index, vectors, attributes, queries, query_attributes, out, gt;
  uint32_t k_results = 10, pool_size = 100, h = 2, seeds = 1;
  uint64_t seed = 0;
};

int run_search_cmd(const SearchFlags& f) {
  IndexArchive archive = load_index(f.index);
  Dataset data = load_dataset(f.vectors, f.attributes);
  if (archive.graph.size() != data.objects.size())
    throw FormatError("index has " + std::to_string(archive.graph.size()) + " vertices, data has " +
                      std::to_string(data.objects.size()) + " objects");
  if (!archive.schema.attributes.empty() && !(archive.schema == data.schema))
    throw FormatError("attribute schema in the index differs from " + f.attributes);

  const std::vector<Query> queries =
      load_queries(f.queries, f.query_attributes, data.schema, f.k_results);
  SearchParams p;
  p.k_results = f.k_results;
  p.pool_size = std::max(f.pool_size, f.k_results);
  p.h = f.h;
  p.seeds = f.seeds;
  p.rng_seed = f.seed;

  const bool fused = archive.graph.distance_mode().metric == Metric::Fusion;
  std::vector<std::vector<int32_t>> out_rows(queries.size());
  uint64_t ndc_total = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (size_t i = 0; i < queries.size(); ++i) {
    const SearchResult r = fused ? hybrid_query(archive.graph, data.objects, queries[i], p)
                                 : two_stage_search(archive.graph, data.objects, queries[i], p);
    ndc_total += r.ndc;
    out_rows[i].assign(f.k_results, -1);
    for (size_t j = 0; j < r.hits.size(); ++j) out_rows[i][j] = static_cast<int32_t>(r.hits[j].id);
  }
  const double elapsed = seconds_since(t0);

  if (!f.out.empty()) write_ivecs(f.out, out_rows);
  const double mean_ndc = static_cast<double>(ndc_total) / queries.size();
  std::cout << "searched " << queries.size() << " queries: mean_ndc=" << mean_ndc
            << " speedup=" << static_cast<double>(data.objects.size()) / mean_ndc
            << " qps=" << queries.size() / elapsed << "\n";

  if (!f.gt.empty()) {
    const GroundTruth gt =
        read_truth_ivecs(f.gt, fused ? TruthFlavor::Hybrid : TruthFlavor::Vector);
    if (gt.entries.size() != queries.size())
      throw FormatError(f.gt + ": ground truth rows do not match query count");
    double sum = 0.0;
    uint32_t counted = 0;
    for (size_t i = 0; i < queries.size(); ++i) {
      if (gt.entries[i].hits.empty()) continue;
      std::vector<Neighbor> hits;
      for (int32_t id : out_rows[i])
        if (id >= 0) hits.push_back({static_cast<uint32_t>(id), 0.0});
      sum += recall_at_k(hits, gt.entries[i], gt.k);
      ++counted;
    }
    std::cout << "recall@" << gt.k << "=" << (counted ? sum / counted : 0.0)
              << " (over " << counted << " queries with non-empty truth)\n";
  }
  return 0;
}

struct BenchFlags {
  std::string index, vector_index, vectors, attributes, queries, query_attributes, report;
  std::vector<std::string> methods;
  std::vector<uint32_t> pool_sizes;
  uint32_t k_results = 10, h = 2, seeds = 1, multiplier = 10, threads = 0;
  bool filter_during_search = false;
  uint64_t seed = 0;
};

int run_bench(const BenchFlags& f) {
  Dataset data = load_dataset(f.vectors, f.attributes);
  const std::vector<Query> queries =
      load_queries(f.queries, f.query_attributes, data.schema, f.k_results);

  std::optional<IndexArchive> fused_index;
  std::optional<IndexArchive> vec_index;
  const auto load_checked = [&](const std::string& path) {
    IndexArchive a = load_index(path);
    if (a.graph.size() != data.objects.size())
      throw FormatError(path + ": index size does not match the data");
    return a;
  };

  std::optional<GroundTruth> hybrid_truth, vector_truth;
  const auto truth_for = [&](TruthFlavor flavor) -> const GroundTruth& {
    auto& slot = flavor == TruthFlavor::Hybrid ? hybrid_truth : vector_truth;
    if (!slot)
      slot = compute_ground_truth(data.objects, queries, f.k_results, flavor, f.threads);
    return *slot;
  };

  std::vector<SearchParams> sweep;
  for (uint32_t ps : (f.pool_sizes.empty() ? std::vector<uint32_t>{100} : f.pool_sizes)) {
    SearchParams p;
    p.k_results = f.k_results;
    p.pool_size = std::max(ps, f.k_results);
    p.h = f.h;
    p.seeds = f.seeds;
    p.rng_seed = f.seed;
    sweep.push_back(p);
  }

  std::vector<EvalRow> rows;
  for (const std::string& method : f.methods) {
    MethodSpec spec;
    if (method == "nhq") {
      if (f.index.empty()) throw UsageError("--method nhq needs --index");
      if (!fused_index) fused_index = load_checked(f.index);
      spec.kind = MethodSpec::Kind::TwoStage;
      spec.graph = &fused_index->graph;
      spec.label = "nhq-" + fused_index->graph.build_meta().builder;
      const TruthFlavor flavor = fused_index->graph.distance_mode().metric == Metric::Fusion
                                     ? TruthFlavor::Hybrid
                                     : TruthFlavor::Vector;
      for (const EvalRow& r :
           run_benchmark_sweep(spec, data.objects, queries, truth_for(flavor), sweep))
        rows.push_back(r);
    } else if (method == "strategy-b") {
      if (f.vector_index.empty()) throw UsageError("--method strategy-b needs --vector-index");
      if (!vec_index) vec_index = load_checked(f.vector_index);
      spec.kind = MethodSpec::Kind::StrategyB;
      spec.graph = &vec_index->graph;
      spec.multiplier = f.multiplier;
      spec.filter_during_search = f.filter_during_search;
      spec.label = f.filter_during_search ? "strategy-b-filter" : "strategy-b";
      for (const EvalRow& r : run_benchmark_sweep(spec, data.objects, queries,
                                                  truth_for(TruthFlavor::Hybrid), sweep))
        rows.push_back(r);
    } else if (method == "oracle") {
      spec.kind = MethodSpec::Kind::Oracle;
      spec.label = "oracle";
      const TruthFlavor flavor =
          data.objects.dim_a() > 0 ? TruthFlavor::Hybrid : TruthFlavor::Vector;
      rows.push_back(
          run_benchmark(spec, data.objects, queries, truth_for(flavor), sweep.front()));
    } else {
      throw UsageError("unknown --method '" + method + "' (nhq|strategy-b|oracle)");
    }
  }

  std::ostringstream cfg;
  cfg << "config: k_results=" << f.k_results << " h=" << f.h << " seeds=" << f.seeds
      << " multiplier=" << f.multiplier << " seed=" << f.seed
      << " queries=" << queries.size();
  const std::vector<std::string> notes{cfg.str()};

  if (f.report.empty()) {
    write_report(std::cout, rows, notes);
  } else {
    std::ofstream out(f.report);
    if (!out) throw FormatError("cannot open " + f.report + " for writing");
    write_report(out, rows, notes);
    std::cout << "wrote " << rows.size() << " rows -> " << f.report << "\n";
  }
  return 0;
}

struct GenAttrsFlags {
  std::string out;
  uint32_t n = 0;
  std::vector<uint32_t> cardinalities;
  uint64_t seed = 0;
};

int run_gen_attrs(const GenAttrsFlags& f) {
  if (f.n == 0) throw UsageError("gen-attrs: --n must be positive");
  if (f.cardinalities.empty()) throw UsageError("gen-attrs: --cardinalities required");
  const AttributeTable table = generate_attributes(f.n, f.cardinalities, f.seed);
  write_attributes(f.out, table);
  std::cout << "generated " << f.n << " rows x " << f.cardinalities.size()
            << " attributes -> " << f.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hybrid vector+attribute nearest-neighbor engine"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read flags from an INI file");
  // `--h` is a real option below, so help must not claim the short -h.
  app.set_help_flag("--help", "print help and exit");

  BuildFlags bf;
  CLI::App* build = app.add_subcommand("build", "build a proximity graph index");
  build->set_help_flag("--help", "print help and exit");
  build->add_option("--vectors", bf.vectors, "base vectors (.fvecs)")->required();
  build->add_option("--attributes", bf.attributes, "attribute CSV for the base objects");
  build->add_option("--graph", bf.graph, "npg-kgraph|npg-nsw|threshold")
      ->check(CLI::IsMember({"npg-kgraph", "npg-nsw", "threshold"}));
  build->add_option("--mode", bf.mode, "euclidean|fusion")
      ->check(CLI::IsMember({"euclidean", "fusion"}));
  build->add_option("--k", bf.k, "degree bound");
  build->add_option("--l", bf.l, "candidate pool width (>= k)");
  build->add_option("--theta-prime", bf.theta_prime, "threshold-graph radius");
  build->add_option("--quality-threshold", bf.quality_threshold, "kgraph stop quality");
  build->add_option("--max-rounds", bf.max_rounds, "kgraph refinement cap");
  build->add_option("--n-cap", bf.n_cap, "threshold-builder size cap");
  build->add_option("--seed", bf.seed, "global RNG seed");
  build->add_option("--threads", bf.threads, "build threads (0 = all)");
  build->add_option("--out", bf.out, "output index archive")->required();
  build->callback([&] { run_build(bf); });

  GtFlags gf;
  CLI::App* gt = app.add_subcommand("gt", "compute exact ground truth");
  gt->set_help_flag("--help", "print help and exit");
  gt->add_option("--vectors", gf.vectors, "base vectors (.fvecs)")->required();
  gt->add_option("--attributes", gf.attributes, "attribute CSV for the base objects");
  gt->add_option("--queries", gf.queries, "query vectors (.fvecs)")->required();
  gt->add_option("--query-attributes", gf.query_attributes, "query attribute CSV");
  gt->add_option("--mode", gf.mode, "euclidean (vector truth) | fusion (hybrid truth)")
      ->check(CLI::IsMember({"euclidean", "fusion"}));
  gt->add_option("--k-results", gf.k_results, "truth depth k");
  gt->add_option("--threads", gf.threads, "threads (0 = all)");
  gt->add_option("--out", gf.out, "output .ivecs (rows padded with -1)")->required();
  gt->callback([&] { run_gt(gf); });

  SearchFlags sf;
  CLI::App* search = app.add_subcommand("search", "query a saved index");
  search->set_help_flag("--help", "print help and exit");
  search->add_option("--index", sf.index, "index archive from `build`")->required();
  search->add_option("--vectors", sf.vectors, "base vectors (.fvecs)")->required();
  search->add_option("--attributes", sf.attributes, "attribute CSV for the base objects");
  search->add_option("--queries", sf.queries, "query vectors (.fvecs)")->required();
  search->add_option("--query-attributes", sf.query_attributes, "query attribute CSV");
  search->add_option("--k-results", sf.k_results, "results per query");
  search->add_option("--pool-size", sf.pool_size, "result pool capacity");
  search->add_option("--h", sf.h, "stage-1 sampling divisor");
  search->add_option("--seeds", sf.seeds, "random entry points");
  search->add_option("--seed", sf.seed, "global RNG seed");
  search->add_option("--gt", sf.gt, "ground-truth .ivecs to score recall against");
  search->add_option("--out", sf.out, "write result ids (.ivecs, padded with -1)");
  search->callback([&] { run_search_cmd(sf); });

  BenchFlags ef;
  CLI::App* bench = app.add_subcommand("bench", "sweep methods and emit a TSV report");
  bench->set_help_flag("--help", "print help and exit");
  bench->add_option("--vectors", ef.vectors, "base vectors (.fvecs)")->required();
  bench->add_option("--attributes", ef.attributes, "attribute CSV for the base objects");
  bench->add_option("--queries", ef.queries, "query vectors (.fvecs)")->required();
  bench->add_option("--query-attributes", ef.query_attributes, "query attribute CSV");
  bench->add_option("--method", ef.methods, "nhq|strategy-b|oracle (repeatable)")->required();
  bench->add_option("--index", ef.index, "fused index archive (for nhq)");
  bench->add_option("--vector-index", ef.vector_index, "vector index archive (for strategy-b)");
  bench->add_option("--pool-size", ef.pool_sizes, "result pool capacities (repeatable sweep)");
  bench->add_option("--k-results", ef.k_results, "results per query");
  bench->add_option("--h", ef.h, "stage-1 sampling divisor");
  bench->add_option("--seeds", ef.seeds, "random entry points");
  bench->add_option("--multiplier", ef.multiplier, "strategy-b candidate over-fetch");
  bench->add_flag("--filter-during-search", ef.filter_during_search,
                  "strategy-b: gate pool admission instead of post-filtering");
  bench->add_option("--seed", ef.seed, "global RNG seed");
  bench->add_option("--threads", ef.threads, "ground-truth threads (0 = all)");
  bench->add_option("--report", ef.report, "output TSV (stdout when omitted)");
  bench->callback([&] { run_bench(ef); });

  GenAttrsFlags af;
  CLI::App* gen = app.add_subcommand("gen-attrs", "generate a synthetic attribute CSV");
  gen->set_help_flag("--help", "print help and exit");
  gen->add_option("--n", af.n, "row count")->required();
  gen->add_option("--cardinalities", af.cardinalities, "values per column, e.g. 3,3,3")
      ->required()
      ->delimiter(',');
  gen->add_option("--seed", af.seed, "global RNG seed");
  gen->add_option("--out", af.out, "output CSV")->required();
  gen->callback([&] { run_gen_attrs(af); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const nhq::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const nhq::FormatError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const nhq::InvariantError& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
