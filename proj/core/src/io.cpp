#include "nhq/io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>

#include "nhq/rng.hpp"

namespace nhq {

namespace {

std::vector<char> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<char> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw FormatError("read failure on " + path.string());
  return data;
}

void spill(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("write failure on " + path.string());
}

// Explicit little-endian codec so archives and vector files mean the same
// bytes on any host.
class Reader {
public:
  Reader(const char* data, size_t size, std::string origin)
      : p_(reinterpret_cast<const unsigned char*>(data)), size_(size),
        origin_(std::move(origin)) {}

  size_t offset() const { return off_; }
  size_t remaining() const { return size_ - off_; }

  void need(size_t k, const char* what) const {
    if (off_ + k > size_)
      throw FormatError(origin_ + ": truncated " + what + " at byte " + std::to_string(off_));
  }

  uint8_t u8(const char* what) {
    need(1, what);
    return p_[off_++];
  }
  uint32_t u32(const char* what) {
    need(4, what);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(p_[off_ + i]) << (8 * i);
    off_ += 4;
    return v;
  }
  uint64_t u64(const char* what) {
    need(8, what);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(p_[off_ + i]) << (8 * i);
    off_ += 8;
    return v;
  }
  int32_t i32(const char* what) { return std::bit_cast<int32_t>(u32(what)); }
  float f32(const char* what) { return std::bit_cast<float>(u32(what)); }
  double f64(const char* what) { return std::bit_cast<double>(u64(what)); }
  std::string str(const char* what) {
    const uint32_t len = u32(what);
    need(len, what);
    std::string s(reinterpret_cast<const char*>(p_ + off_), len);
    off_ += len;
    return s;
  }

private:
  const unsigned char* p_;
  size_t size_;
  size_t off_ = 0;
  std::string origin_;
};

class Writer {
public:
  void u8(uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u32(uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void u64(uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void i32(int32_t v) { u32(std::bit_cast<uint32_t>(v)); }
  void f32(float v) { u32(std::bit_cast<uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<uint32_t>(s.size()));
    buf_.append(s);
  }
  const std::string& bytes() const { return buf_; }

private:
  std::string buf_;
};

}  // namespace

std::vector<FeatureVector> read_fvecs(const std::filesystem::path& path) {
  const std::vector<char> data = slurp(path);
  Reader r(data.data(), data.size(), path.string());
  std::vector<FeatureVector> rows;
  int64_t dim = -1;
  while (r.remaining() > 0) {
    const size_t at = r.offset();
    const int32_t d = r.i32("record dim");
    if (d <= 0)
      throw FormatError(path.string() + ": non-positive dim " + std::to_string(d) +
                        " at byte " + std::to_string(at));
    if (dim < 0) dim = d;
    if (d != dim)
      throw FormatError(path.string() + ": dim changed from " + std::to_string(dim) + " to " +
                        std::to_string(d) + " at byte " + std::to_string(at));
    FeatureVector row(static_cast<size_t>(d));
    for (int32_t i = 0; i < d; ++i) row[static_cast<size_t>(i)] = r.f32("record values");
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_fvecs(const std::filesystem::path& path, std::span<const FeatureVector> rows) {
  Writer w;
  size_t dim = rows.empty() ? 0 : rows.front().size();
  for (const FeatureVector& row : rows) {
    if (row.empty() || row.size() != dim)
      throw UsageError("write_fvecs: rows must share one positive dim");
    w.i32(static_cast<int32_t>(row.size()));
    for (float v : row) w.f32(v);
  }
  spill(path, w.bytes());
}

std::vector<std::vector<int32_t>> read_ivecs(const std::filesystem::path& path) {
  const std::vector<char> data = slurp(path);
  Reader r(data.data(), data.size(), path.string());
  std::vector<std::vector<int32_t>> rows;
  int64_t dim = -1;
  while (r.remaining() > 0) {
    const size_t at = r.offset();
    const int32_t d = r.i32("record dim");
    if (d <= 0)
      throw FormatError(path.string() + ": non-positive dim " + std::to_string(d) +
                        " at byte " + std::to_string(at));
    if (dim < 0) dim = d;
    if (d != dim)
      throw FormatError(path.string() + ": dim changed from " + std::to_string(dim) + " to " +
                        std::to_string(d) + " at byte " + std::to_string(at));
    std::vector<int32_t> row(static_cast<size_t>(d));
    for (int32_t i = 0; i < d; ++i) row[static_cast<size_t>(i)] = r.i32("record values");
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_ivecs(const std::filesystem::path& path,
                 std::span<const std::vector<int32_t>> rows) {
  Writer w;
  size_t dim = rows.empty() ? 0 : rows.front().size();
  for (const auto& row : rows) {
    if (row.empty() || row.size() != dim)
      throw UsageError("write_ivecs: rows must share one positive dim");
    w.i32(static_cast<int32_t>(row.size()));
    for (int32_t v : row) w.i32(v);
  }
  spill(path, w.bytes());
}

std::vector<uint32_t> AttributeSchema::cardinalities() const {
  std::vector<uint32_t> out(attributes.size());
  for (size_t i = 0; i < attributes.size(); ++i)
    out[i] = static_cast<uint32_t>(attributes[i].values.size());
  return out;
}

uint32_t AttributeSchema::encode(size_t attr, const std::string& value) const {
  if (attr >= attributes.size()) throw UsageError("AttributeSchema::encode: column out of range");
  const auto& vals = attributes[attr].values;
  const auto it = std::find(vals.begin(), vals.end(), value);
  if (it == vals.end())
    throw FormatError("unknown value '" + value + "' for attribute '" + attributes[attr].name +
                      "'");
  return static_cast<uint32_t>(it - vals.begin());
}

const std::string& AttributeSchema::decode(size_t attr, uint32_t code) const {
  if (attr >= attributes.size()) throw UsageError("AttributeSchema::decode: column out of range");
  const auto& vals = attributes[attr].values;
  if (code >= vals.size())
    throw FormatError("code " + std::to_string(code) + " out of range for attribute '" +
                      attributes[attr].name + "'");
  return vals[code];
}

bool operator==(const AttributeSchema::Attribute& a, const AttributeSchema::Attribute& b) {
  return a.name == b.name && a.values == b.values;
}

bool operator==(const AttributeSchema& a, const AttributeSchema& b) {
  return a.attributes == b.attributes;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace

AttributeTable read_attributes(const std::filesystem::path& path, const AttributeSchema* fixed) {
  const std::vector<char> data = slurp(path);
  std::vector<std::string> lines;
  {
    std::string cur;
    for (char c : data) {
      if (c == '\n') {
        if (!cur.empty() && cur.back() == '\r') cur.pop_back();
        lines.push_back(std::move(cur));
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) {
      if (cur.back() == '\r') cur.pop_back();
      lines.push_back(std::move(cur));
    }
  }
  if (lines.empty()) throw FormatError(path.string() + ": empty attribute file");

  const std::vector<std::string> header = split_csv_line(lines[0]);
  AttributeTable table;
  if (fixed) {
    if (header.size() != fixed->attributes.size())
      throw FormatError(path.string() + ": header has " + std::to_string(header.size()) +
                        " columns, schema expects " +
                        std::to_string(fixed->attributes.size()));
    for (size_t i = 0; i < header.size(); ++i) {
      if (header[i] != fixed->attributes[i].name)
        throw FormatError(path.string() + ": column '" + header[i] +
                          "' does not match schema column '" + fixed->attributes[i].name + "'");
    }
    table.schema = *fixed;
  } else {
    table.schema.attributes.resize(header.size());
    for (size_t i = 0; i < header.size(); ++i) table.schema.attributes[i].name = header[i];
  }

  for (size_t li = 1; li < lines.size(); ++li) {
    if (li == lines.size() - 1 && lines[li].empty()) break;  // trailing newline
    const std::vector<std::string> cells = split_csv_line(lines[li]);
    if (cells.size() != header.size())
      throw FormatError(path.string() + ": line " + std::to_string(li + 1) + " has " +
                        std::to_string(cells.size()) + " cells, expected " +
                        std::to_string(header.size()));
    AttributeVector row(cells.size());
    for (size_t c = 0; c < cells.size(); ++c) {
      if (fixed) {
        row[c] = table.schema.encode(c, cells[c]);
      } else {
        auto& vals = table.schema.attributes[c].values;
        const auto it = std::find(vals.begin(), vals.end(), cells[c]);
        if (it == vals.end()) {
          row[c] = static_cast<uint32_t>(vals.size());
          vals.push_back(cells[c]);  // first-seen code assignment
        } else {
          row[c] = static_cast<uint32_t>(it - vals.begin());
        }
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_attributes(const std::filesystem::path& path, const AttributeTable& table) {
  std::string out;
  for (size_t i = 0; i < table.schema.attributes.size(); ++i) {
    if (i) out.push_back(',');
    out += table.schema.attributes[i].name;
  }
  out.push_back('\n');
  for (const AttributeVector& row : table.rows) {
    if (row.size() != table.schema.attributes.size())
      throw UsageError("write_attributes: row arity does not match schema");
    for (size_t c = 0; c < row.size(); ++c) {
      if (c) out.push_back(',');
      out += table.schema.decode(c, row[c]);
    }
    out.push_back('\n');
  }
  spill(path, out);
}

AttributeTable generate_attributes(uint32_t n, std::span<const uint32_t> cardinalities,
                                   uint64_t seed) {
  AttributeTable table;
  table.schema.attributes.resize(cardinalities.size());
  for (size_t i = 0; i < cardinalities.size(); ++i) {
    if (cardinalities[i] == 0)
      throw UsageError("generate_attributes: cardinality must be positive");
    auto& attr = table.schema.attributes[i];
    attr.name = "attr" + std::to_string(i);
    attr.values.resize(cardinalities[i]);
    for (uint32_t v = 0; v < cardinalities[i]; ++v) attr.values[v] = "v" + std::to_string(v);
  }
  Rng rng = make_rng(seed, RngStream::AttributeGen);
  table.rows.resize(n);
  for (uint32_t i = 0; i < n; ++i) {
    AttributeVector row(cardinalities.size());
    for (size_t c = 0; c < cardinalities.size(); ++c) row[c] = uniform_u32(rng, cardinalities[c]);
    table.rows[i] = std::move(row);
  }
  return table;
}

uint64_t fnv1a64(const void* data, size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  uint64_t h = 0xcbf29ce484222325ull;
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

namespace {

constexpr char kMagic[8] = {'N', 'H', 'Q', 'I', 'N', 'D', 'E', 'X'};

}  // namespace

void save_index(const std::filesystem::path& path, const IndexArchive& archive) {
  const CompositeGraph& g = archive.graph;
  Writer payload;
  payload.u8(g.distance_mode().metric == Metric::Fusion ? 1 : 0);
  payload.u8(g.distance_mode().weights.mode == FusionWeights::Mode::Recommended ? 1 : 0);
  payload.f64(g.distance_mode().weights.w_vector);
  payload.f64(g.distance_mode().weights.w_attribute);
  payload.u64(g.build_meta().seed);
  payload.str(g.build_meta().builder);
  payload.str(g.build_meta().params);
  payload.u32(g.degree_bound());
  payload.u32(g.size());
  payload.u32(static_cast<uint32_t>(archive.schema.attributes.size()));
  for (const auto& attr : archive.schema.attributes) {
    payload.str(attr.name);
    payload.u32(static_cast<uint32_t>(attr.values.size()));
    for (const auto& v : attr.values) payload.str(v);
  }
  for (uint32_t u = 0; u < g.size(); ++u) {
    const auto nbrs = g.neighbors(u);
    payload.u32(static_cast<uint32_t>(nbrs.size()));
    for (uint32_t v : nbrs) payload.u32(v);
  }

  std::string head;
  head.append(kMagic, sizeof(kMagic));
  Writer header;
  header.u32(kIndexFormatVersion);
  header.u64(payload.bytes().size());
  header.u64(fnv1a64(payload.bytes().data(), payload.bytes().size()));
  spill(path, head + header.bytes() + payload.bytes());
}

IndexArchive load_index(const std::filesystem::path& path) {
  const std::vector<char> data = slurp(path);
  Reader r(data.data(), data.size(), path.string());
  r.need(sizeof(kMagic), "magic");
  if (std::memcmp(data.data(), kMagic, sizeof(kMagic)) != 0)
    throw BadMagicError(path.string() + ": not an index archive");
  for (size_t i = 0; i < sizeof(kMagic); ++i) r.u8("magic");

  const uint32_t version = r.u32("version");
  if (version != kIndexFormatVersion)
    throw VersionError(path.string() + ": format version " + std::to_string(version) +
                       ", expected " + std::to_string(kIndexFormatVersion));
  const uint64_t payload_size = r.u64("payload size");
  const uint64_t checksum = r.u64("checksum");
  if (r.remaining() != payload_size)
    throw FormatError(path.string() + ": payload is " + std::to_string(r.remaining()) +
                      " bytes, header claims " + std::to_string(payload_size));
  const char* payload = data.data() + r.offset();
  if (fnv1a64(payload, payload_size) != checksum)
    throw ChecksumError(path.string() + ": checksum mismatch");

  Reader pr(payload, payload_size, path.string());
  const uint8_t metric = pr.u8("metric");
  if (metric > 1) throw FormatError(path.string() + ": bad metric byte");
  const uint8_t wmode = pr.u8("weights mode");
  if (wmode > 1) throw FormatError(path.string() + ": bad weights-mode byte");
  const double wv = pr.f64("w_vector");
  const double wa = pr.f64("w_attribute");
  BuildMeta meta;
  meta.seed = pr.u64("seed");
  meta.builder = pr.str("builder");
  meta.params = pr.str("params");
  const uint32_t degree_bound = pr.u32("degree bound");
  const uint32_t n = pr.u32("vertex count");

  AttributeSchema schema;
  const uint32_t m = pr.u32("attribute count");
  schema.attributes.resize(m);
  for (uint32_t a = 0; a < m; ++a) {
    schema.attributes[a].name = pr.str("attribute name");
    const uint32_t nv = pr.u32("value count");
    schema.attributes[a].values.resize(nv);
    for (uint32_t v = 0; v < nv; ++v) schema.attributes[a].values[v] = pr.str("value");
  }

  std::vector<std::vector<uint32_t>> adj(n);
  for (uint32_t u = 0; u < n; ++u) {
    const uint32_t deg = pr.u32("degree");
    adj[u].resize(deg);
    for (uint32_t i = 0; i < deg; ++i) adj[u][i] = pr.u32("neighbor id");
  }
  if (pr.remaining() != 0)
    throw FormatError(path.string() + ": " + std::to_string(pr.remaining()) +
                      " trailing payload bytes");

  DistanceMode mode;
  mode.metric = metric == 1 ? Metric::Fusion : Metric::Euclidean;
  mode.weights.mode = wmode == 1 ? FusionWeights::Mode::Recommended : FusionWeights::Mode::Fixed;
  mode.weights.w_vector = wv;
  mode.weights.w_attribute = wa;
  return IndexArchive{CompositeGraph(n, degree_bound, mode, std::move(meta), std::move(adj)),
                      std::move(schema)};
}

}  // namespace nhq
