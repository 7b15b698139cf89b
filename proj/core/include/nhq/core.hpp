#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nhq/error.hpp"

namespace nhq {

// One object = a d-dimensional float vector plus m ordinal attribute codes.
using FeatureVector = std::vector<float>;
using AttributeVector = std::vector<uint32_t>;

struct Query {
  FeatureVector vector;
  AttributeVector attributes;  // same layout/cardinalities as the object set
  uint32_t k_results = 10;
};

// (id, distance) pair. Ordering is always lexicographic on (dist, id) so that
// ties resolve to the lower object id everywhere in the library.
struct Neighbor {
  uint32_t id = 0;
  double dist = 0.0;
};

inline bool neighbor_less(const Neighbor& a, const Neighbor& b) {
  return a.dist < b.dist || (a.dist == b.dist && a.id < b.id);
}

// Column-validated, contiguous storage for n objects. Vectors are kept as
// float32 (the on-disk format), attributes as ordinal codes checked against
// the declared per-attribute cardinalities.
class ObjectSet {
public:
  ObjectSet() = default;
  ObjectSet(uint32_t dim_v, std::vector<uint32_t> attr_cardinalities);

  void reserve(uint32_t n);
  // Validates dimensions, finiteness of every coordinate, and code ranges.
  void add(std::span<const float> vec, std::span<const uint32_t> attrs);

  static ObjectSet from_rows(const std::vector<FeatureVector>& vectors,
                             const std::vector<AttributeVector>& attributes,
                             std::vector<uint32_t> attr_cardinalities);

  uint32_t size() const { return n_; }
  uint32_t dim_v() const { return dim_v_; }
  uint32_t dim_a() const { return static_cast<uint32_t>(cardinalities_.size()); }
  const std::vector<uint32_t>& attr_cardinalities() const { return cardinalities_; }

  std::span<const float> vector_of(uint32_t i) const {
    return {vectors_.data() + static_cast<size_t>(i) * dim_v_, dim_v_};
  }
  std::span<const uint32_t> attributes_of(uint32_t i) const {
    return {attributes_.data() + static_cast<size_t>(i) * dim_a(), dim_a()};
  }

  // Validates a query against this set's vector dimension and cardinalities.
  void check_query(const Query& q) const;

private:
  uint32_t dim_v_ = 0;
  uint32_t n_ = 0;
  std::vector<uint32_t> cardinalities_;
  std::vector<float> vectors_;       // n * dim_v_, row-major
  std::vector<uint32_t> attributes_; // n * dim_a, row-major
};

// Weighting of the two distance channels when fusing. Recommended mode makes
// the attribute weight track the vector distance of the pair being compared
// (w_attribute = vector_dist / m), so the fused value lands in
// [vector_dist, 2 * vector_dist]. Fixed mode uses constant weights.
struct FusionWeights {
  enum class Mode : uint8_t { Fixed, Recommended };
  Mode mode = Mode::Recommended;
  double w_vector = 1.0;     // Fixed mode only
  double w_attribute = 0.0;  // Fixed mode only

  static FusionWeights recommended() { return {}; }
  static FusionWeights fixed(double w_vector, double w_attribute) {
    if (w_vector < 0.0 || w_attribute < 0.0)
      throw UsageError("FusionWeights: weights must be non-negative");
    return {Mode::Fixed, w_vector, w_attribute};
  }
};

inline bool operator==(const FusionWeights& a, const FusionWeights& b) {
  if (a.mode != b.mode) return false;
  if (a.mode == FusionWeights::Mode::Recommended) return true;
  return a.w_vector == b.w_vector && a.w_attribute == b.w_attribute;
}

// Euclidean distance, accumulated in double regardless of storage precision.
double euclidean(std::span<const float> a, std::span<const float> b);

// Number of positions whose ordinal codes differ.
uint32_t attribute_distance(std::span<const uint32_t> a, std::span<const uint32_t> b);

// Combine an already-computed vector distance and attribute distance.
// dim_a == 0 in Recommended mode degenerates to the vector distance alone.
double fuse(double vector_dist, uint32_t attr_dist, uint32_t dim_a, const FusionWeights& w);

double fusion_distance(const ObjectSet& s, uint32_t i, uint32_t j, const FusionWeights& w);
double fusion_distance(const ObjectSet& s, const Query& q, uint32_t j, const FusionWeights& w);

// Which distance a graph (or a search against it) runs on.
enum class Metric : uint8_t { Euclidean, Fusion };

struct DistanceMode {
  Metric metric = Metric::Euclidean;
  FusionWeights weights{};

  static DistanceMode euclidean() { return {Metric::Euclidean, {}}; }
  static DistanceMode fusion(FusionWeights w = FusionWeights::recommended()) {
    return {Metric::Fusion, w};
  }
};

inline bool operator==(const DistanceMode& a, const DistanceMode& b) {
  return a.metric == b.metric && (a.metric == Metric::Euclidean || a.weights == b.weights);
}

double object_distance(const ObjectSet& s, uint32_t i, uint32_t j, const DistanceMode& mode);
double query_distance(const ObjectSet& s, const Query& q, uint32_t j, const DistanceMode& mode);

}  // namespace nhq
