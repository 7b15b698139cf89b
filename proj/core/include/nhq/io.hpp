#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nhq/graph.hpp"

namespace nhq {

// .fvecs / .ivecs: repeated records of [int32 dim][dim little-endian values],
// float32 or int32. Every record must have the same positive dim; violations
// raise FormatError with the byte offset.
std::vector<FeatureVector> read_fvecs(const std::filesystem::path& path);
void write_fvecs(const std::filesystem::path& path, std::span<const FeatureVector> rows);
std::vector<std::vector<int32_t>> read_ivecs(const std::filesystem::path& path);
void write_ivecs(const std::filesystem::path& path,
                 std::span<const std::vector<int32_t>> rows);

// Ordinal encoding of one attribute column: code = position in `values`.
struct AttributeSchema {
  struct Attribute {
    std::string name;
    std::vector<std::string> values;
  };
  std::vector<Attribute> attributes;

  size_t dim() const { return attributes.size(); }
  std::vector<uint32_t> cardinalities() const;
  // FormatError on unknown value / out-of-range code.
  uint32_t encode(size_t attr, const std::string& value) const;
  const std::string& decode(size_t attr, uint32_t code) const;
};

bool operator==(const AttributeSchema::Attribute& a, const AttributeSchema::Attribute& b);
bool operator==(const AttributeSchema& a, const AttributeSchema& b);

struct AttributeTable {
  AttributeSchema schema;
  std::vector<AttributeVector> rows;
};

// CSV with one header row naming the columns. Cells are uncooked strings:
// no quoting, so values must not contain commas or newlines. Codes are
// assigned in first-seen order per column; passing `fixed` pins an existing
// schema instead (unknown values then fail). CRLF endings are accepted.
AttributeTable read_attributes(const std::filesystem::path& path,
                               const AttributeSchema* fixed = nullptr);
void write_attributes(const std::filesystem::path& path, const AttributeTable& table);

// Synthetic table: columns named attr0.., values v0.. drawn uniformly per
// column from `seed`. Row-major draw order, so output is fully pinned.
AttributeTable generate_attributes(uint32_t n, std::span<const uint32_t> cardinalities,
                                   uint64_t seed);

// FNV-1a 64-bit, used as the archive checksum.
uint64_t fnv1a64(const void* data, size_t len);

struct IndexArchive {
  CompositeGraph graph;
  AttributeSchema schema;  // empty when the index carries no attributes
};

// Single-file binary archive; layout documented field-by-field in FORMATS.md.
// Loading verifies magic, version, and checksum before touching the payload
// and throws BadMagicError / VersionError / ChecksumError respectively.
void save_index(const std::filesystem::path& path, const IndexArchive& archive);
IndexArchive load_index(const std::filesystem::path& path);

inline constexpr uint32_t kIndexFormatVersion = 1;

}  // namespace nhq
