#include "nhq/core.hpp"

#include <cmath>
#include <string>

namespace nhq {

ObjectSet::ObjectSet(uint32_t dim_v, std::vector<uint32_t> attr_cardinalities)
    : dim_v_(dim_v), cardinalities_(std::move(attr_cardinalities)) {
  if (dim_v_ == 0) throw UsageError("ObjectSet: vector dimension must be >= 1");
  for (size_t i = 0; i < cardinalities_.size(); ++i) {
    if (cardinalities_[i] == 0)
      throw UsageError("ObjectSet: attribute " + std::to_string(i) + " has cardinality 0");
  }
}

void ObjectSet::reserve(uint32_t n) {
  vectors_.reserve(static_cast<size_t>(n) * dim_v_);
  attributes_.reserve(static_cast<size_t>(n) * dim_a());
}

void ObjectSet::add(std::span<const float> vec, std::span<const uint32_t> attrs) {
  if (dim_v_ == 0) throw UsageError("ObjectSet: not initialized");
  if (vec.size() != dim_v_)
    throw UsageError("ObjectSet::add: vector has " + std::to_string(vec.size()) +
                     " dims, expected " + std::to_string(dim_v_));
  if (attrs.size() != cardinalities_.size())
    throw UsageError("ObjectSet::add: " + std::to_string(attrs.size()) +
                     " attribute codes, expected " + std::to_string(cardinalities_.size()));
  for (float x : vec) {
    if (!std::isfinite(x)) throw UsageError("ObjectSet::add: non-finite coordinate");
  }
  for (size_t i = 0; i < attrs.size(); ++i) {
    if (attrs[i] >= cardinalities_[i])
      throw UsageError("ObjectSet::add: code " + std::to_string(attrs[i]) +
                       " out of range for attribute " + std::to_string(i) +
                       " (cardinality " + std::to_string(cardinalities_[i]) + ")");
  }
  vectors_.insert(vectors_.end(), vec.begin(), vec.end());
  attributes_.insert(attributes_.end(), attrs.begin(), attrs.end());
  ++n_;
}

ObjectSet ObjectSet::from_rows(const std::vector<FeatureVector>& vectors,
                               const std::vector<AttributeVector>& attributes,
                               std::vector<uint32_t> attr_cardinalities) {
  if (vectors.empty()) throw UsageError("ObjectSet::from_rows: no vectors");
  if (!attributes.empty() && attributes.size() != vectors.size())
    throw UsageError("ObjectSet::from_rows: vector/attribute row counts differ");
  ObjectSet s(static_cast<uint32_t>(vectors[0].size()), std::move(attr_cardinalities));
  s.reserve(static_cast<uint32_t>(vectors.size()));
  static const AttributeVector kNoAttrs;
  for (size_t i = 0; i < vectors.size(); ++i) {
    const AttributeVector& a = attributes.empty() ? kNoAttrs : attributes[i];
    s.add(vectors[i], a);
  }
  return s;
}

void ObjectSet::check_query(const Query& q) const {
  if (q.vector.size() != dim_v_)
    throw UsageError("query vector has " + std::to_string(q.vector.size()) +
                     " dims, object set has " + std::to_string(dim_v_));
  if (q.attributes.size() != cardinalities_.size())
    throw UsageError("query has " + std::to_string(q.attributes.size()) +
                     " attribute codes, object set has " + std::to_string(cardinalities_.size()));
  for (float x : q.vector) {
    if (!std::isfinite(x)) throw UsageError("query vector has a non-finite coordinate");
  }
  for (size_t i = 0; i < q.attributes.size(); ++i) {
    if (q.attributes[i] >= cardinalities_[i])
      throw UsageError("query attribute " + std::to_string(i) + " code out of range");
  }
}

double euclidean(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size() || a.empty())
    throw UsageError("euclidean: dimension mismatch or empty vector");
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    acc += d * d;
  }
  return std::sqrt(acc);
}

uint32_t attribute_distance(std::span<const uint32_t> a, std::span<const uint32_t> b) {
  if (a.size() != b.size()) throw UsageError("attribute_distance: dimension mismatch");
  uint32_t diff = 0;
  for (size_t i = 0; i < a.size(); ++i) diff += (a[i] != b[i]) ? 1u : 0u;
  return diff;
}

double fuse(double vector_dist, uint32_t attr_dist, uint32_t dim_a, const FusionWeights& w) {
  if (w.mode == FusionWeights::Mode::Fixed)
    return w.w_vector * vector_dist + w.w_attribute * static_cast<double>(attr_dist);
  if (dim_a == 0) return vector_dist;
  // Attribute channel scaled by vector_dist / m: identical attributes leave
  // the vector distance untouched, fully distinct ones double it.
  return vector_dist * (1.0 + static_cast<double>(attr_dist) / static_cast<double>(dim_a));
}

double fusion_distance(const ObjectSet& s, uint32_t i, uint32_t j, const FusionWeights& w) {
  const double vd = euclidean(s.vector_of(i), s.vector_of(j));
  const uint32_t ad = attribute_distance(s.attributes_of(i), s.attributes_of(j));
  return fuse(vd, ad, s.dim_a(), w);
}

double fusion_distance(const ObjectSet& s, const Query& q, uint32_t j, const FusionWeights& w) {
  const double vd = euclidean(q.vector, s.vector_of(j));
  const uint32_t ad = attribute_distance(q.attributes, s.attributes_of(j));
  return fuse(vd, ad, s.dim_a(), w);
}

double object_distance(const ObjectSet& s, uint32_t i, uint32_t j, const DistanceMode& mode) {
  if (mode.metric == Metric::Euclidean) return euclidean(s.vector_of(i), s.vector_of(j));
  return fusion_distance(s, i, j, mode.weights);
}

double query_distance(const ObjectSet& s, const Query& q, uint32_t j, const DistanceMode& mode) {
  if (mode.metric == Metric::Euclidean) return euclidean(q.vector, s.vector_of(j));
  return fusion_distance(s, q, j, mode.weights);
}

}  // namespace nhq
