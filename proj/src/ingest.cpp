#include "recipnet/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <numeric>
#include <sstream>

#include "recipnet/error.hpp"
#include "recipnet/hash.hpp"

namespace recipnet {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

bool is_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

// ---------------------------------------------------------------------------
// Text parsing

std::vector<EdgeRecord> parse_edge_stream(std::istream& in, const std::string& source) {
  std::vector<EdgeRecord> records;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto fields = split_whitespace(body);
    if (fields.size() != 2 && fields.size() != 3)
      throw ParseError(source, number, "expected `src dst [birth]`, got " +
                                           std::to_string(fields.size()) + " fields");
    EdgeRecord record{std::string(fields[0]), std::string(fields[1]), std::nullopt, number};
    if (record.src == record.dst) throw ParseError(source, number, "self-loop on " + record.src);
    if (fields.size() == 3) {
      SnapshotTime birth = 0;
      const auto f = fields[2];
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), birth);
      if (ec != std::errc{} || ptr != f.data() + f.size() || birth < 0)
        throw ParseError(source, number, "invalid birth time `" + std::string(f) + "`");
      record.birth = birth;
    }
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<EdgeRecord> parse_edge_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open edge file " + path.string());
  return parse_edge_stream(in, path.string());
}

std::vector<AttributeRecord> parse_attribute_stream(std::istream& in, const std::string& source) {
  std::vector<AttributeRecord> records;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 3)
      throw ParseError(source, number, "expected `node<TAB>kind<TAB>value`");
    const auto node = trim(fields[0]);
    const auto kind = parse_attribute_kind(trim(fields[1]));
    const auto value = trim(fields[2]);
    if (node.empty()) throw ParseError(source, number, "empty node id");
    if (!kind) throw ParseError(source, number, "unknown attribute kind `" + std::string(trim(fields[1])) + "`");
    if (value.empty()) throw ParseError(source, number, "empty attribute value");
    records.push_back({std::string(node), *kind, std::string(value), number});
  }
  return records;
}

bool raw_id_less(std::string_view a, std::string_view b) {
  const bool da = is_digits(a);
  const bool db = is_digits(b);
  if (da != db) return da;
  if (da) {
    const auto strip = [](std::string_view s) {
      const auto nz = s.find_first_not_of('0');
      return nz == std::string_view::npos ? std::string_view{} : s.substr(nz);
    };
    const auto sa = strip(a);
    const auto sb = strip(b);
    if (sa.size() != sb.size()) return sa.size() < sb.size();
    if (sa != sb) return sa < sb;
  }
  return a < b;
}

// ---------------------------------------------------------------------------
// IdMap

IdMap::IdMap(std::vector<std::string> raw_ids) : raw_(std::move(raw_ids)) {
  index_.reserve(raw_.size());
  for (NodeId i = 0; i < raw_.size(); ++i) {
    if (!index_.emplace(raw_[i], i).second) throw ArgumentError("duplicate raw id " + raw_[i]);
  }
  std::vector<NodeId> order(raw_.size());
  std::iota(order.begin(), order.end(), NodeId{0});
  std::sort(order.begin(), order.end(),
            [&](NodeId x, NodeId y) { return raw_id_less(raw_[x], raw_[y]); });
  auto rank = std::make_shared<std::vector<std::uint32_t>>(raw_.size());
  for (std::uint32_t r = 0; r < order.size(); ++r) (*rank)[order[r]] = r;
  rank_ = std::move(rank);
}

std::optional<NodeId> IdMap::find(std::string_view raw) const {
  const auto it = index_.find(std::string(raw));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------
// GraphSeries

std::string_view to_string(BirthSource source) {
  switch (source) {
    case BirthSource::kNone: return "none";
    case BirthSource::kFirstSighting: return "first_sighting";
    case BirthSource::kExplicit: return "explicit";
    case BirthSource::kMixed: return "mixed";
  }
  return "?";
}

GraphSeries GraphSeries::assemble(std::vector<std::string> raw_ids, std::vector<TemporalEdge> edges,
                                  std::vector<SnapshotTime> times, BirthSource source) {
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] < 0) throw ArgumentError("snapshot times must be non-negative");
    if (k > 0 && times[k] <= times[k - 1])
      throw ArgumentError("snapshot times must be strictly increasing");
  }
  const std::size_t n = raw_ids.size();
  constexpr auto kNever = std::numeric_limits<SnapshotTime>::max();
  std::vector<SnapshotTime> provisional_birth(n, kNever);
  for (const auto& e : edges) {
    if (e.src >= n || e.dst >= n) throw ArgumentError("edge references unknown node");
    if (e.src == e.dst) throw ArgumentError("self-loop in series");
    provisional_birth[e.src] = std::min(provisional_birth[e.src], e.birth);
    provisional_birth[e.dst] = std::min(provisional_birth[e.dst], e.birth);
  }
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  // Canonical: by birth, then raw id, independent of input order.
  std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
    if (provisional_birth[a] != provisional_birth[b]) return provisional_birth[a] < provisional_birth[b];
    return raw_id_less(raw_ids[a], raw_ids[b]);
  });
  std::vector<NodeId> dense(n);
  std::vector<std::string> ordered_raw(n);
  GraphSeries series;
  series.node_births_.resize(n);
  for (NodeId i = 0; i < n; ++i) {
    dense[order[i]] = i;
    ordered_raw[i] = std::move(raw_ids[order[i]]);
    series.node_births_[i] = provisional_birth[order[i]];
  }
  for (auto& e : edges) {
    e.src = dense[e.src];
    e.dst = dense[e.dst];
  }
  std::sort(edges.begin(), edges.end(), [](const TemporalEdge& a, const TemporalEdge& b) {
    return std::tie(a.src, a.dst, a.birth) < std::tie(b.src, b.dst, b.birth);
  });
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](const TemporalEdge& a, const TemporalEdge& b) {
                            return a.src == b.src && a.dst == b.dst;
                          }),
              edges.end());
  series.ids_ = IdMap(std::move(ordered_raw));
  series.times_ = std::move(times);
  series.edges_ = std::move(edges);
  series.birth_source_ = source;
  return series;
}

std::size_t GraphSeries::nodes_at(std::size_t index) const {
  if (index >= times_.size()) throw ArgumentError("snapshot index out of range");
  return static_cast<std::size_t>(
      std::upper_bound(node_births_.begin(), node_births_.end(), times_[index]) -
      node_births_.begin());
}

SnapshotGraph GraphSeries::snapshot(std::size_t index) const {
  const std::size_t n = nodes_at(index);
  const SnapshotTime t = times_[index];
  GraphBuilder builder(n);
  builder.set_raw_rank(ids_.raw_rank());
  for (const auto& e : edges_)
    if (e.birth <= t) builder.add_edge(e.src, e.dst, e.birth);
  return builder.build(t);
}

std::size_t GraphSeries::index_of(SnapshotTime time) const {
  const auto it = std::lower_bound(times_.begin(), times_.end(), time);
  if (it == times_.end() || *it != time)
    throw ArgumentError("no snapshot at time " + std::to_string(time));
  return static_cast<std::size_t>(it - times_.begin());
}

GraphSeries assemble_series(std::span<const std::vector<EdgeRecord>> files,
                            std::span<const SnapshotTime> times,
                            std::span<const std::string> sources) {
  if (files.size() != times.size())
    throw ArgumentError("need exactly one snapshot time per edge file");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (times[k] <= times[k - 1]) throw ArgumentError("snapshot times must be strictly increasing");

  std::vector<std::string> raw_ids;
  std::unordered_map<std::string, NodeId> provisional;
  const auto intern = [&](const std::string& raw) {
    const auto [it, inserted] = provisional.emplace(raw, static_cast<NodeId>(raw_ids.size()));
    if (inserted) raw_ids.push_back(raw);
    return it->second;
  };
  std::unordered_map<std::uint64_t, SnapshotTime> birth_of;
  std::size_t explicit_count = 0;
  std::size_t implicit_count = 0;
  for (std::size_t k = 0; k < files.size(); ++k) {
    const std::string source = k < sources.size() ? sources[k] : "file#" + std::to_string(k);
    for (const auto& record : files[k]) {
      if (record.src == record.dst) throw ParseError(source, record.line, "self-loop");
      SnapshotTime birth = times[k];
      if (record.birth) {
        if (*record.birth > times[k])
          throw ParseError(source, record.line, "birth " + std::to_string(*record.birth) +
                                                    " is later than the file's snapshot time " +
                                                    std::to_string(times[k]));
        birth = *record.birth;
        ++explicit_count;
      } else {
        ++implicit_count;
      }
      const NodeId u = intern(record.src);
      const NodeId v = intern(record.dst);
      const std::uint64_t key = (static_cast<std::uint64_t>(u) << 32) | v;
      const auto [it, inserted] = birth_of.emplace(key, birth);
      if (!inserted) it->second = std::min(it->second, birth);
    }
  }
  std::vector<TemporalEdge> edges;
  edges.reserve(birth_of.size());
  for (const auto& [key, birth] : birth_of)
    edges.push_back({static_cast<NodeId>(key >> 32), static_cast<NodeId>(key & 0xffffffffu), birth});

  BirthSource source = BirthSource::kNone;
  if (explicit_count > 0 && implicit_count > 0) source = BirthSource::kMixed;
  else if (explicit_count > 0) source = BirthSource::kExplicit;
  else if (implicit_count > 0) source = BirthSource::kFirstSighting;
  return GraphSeries::assemble(std::move(raw_ids), std::move(edges),
                               std::vector<SnapshotTime>(times.begin(), times.end()), source);
}

GraphSeries load_snapshot_series(std::span<const std::filesystem::path> edge_files,
                                 std::span<const SnapshotTime> times) {
  if (edge_files.size() != times.size())
    throw ArgumentError("need exactly one snapshot time per edge file");
  for (std::size_t k = 1; k < times.size(); ++k)
    if (times[k] <= times[k - 1]) throw ArgumentError("snapshot times must be strictly increasing");
  std::vector<std::vector<EdgeRecord>> files;
  std::vector<std::string> sources;
  for (const auto& path : edge_files) {
    files.push_back(parse_edge_file(path));
    sources.push_back(path.string());
  }
  return assemble_series(files, times, sources);
}

SeriesIndex parse_series_index(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open series index " + path.string());
  SeriesIndex index;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto fields = split_whitespace(body);
    if (fields.size() != 2) throw ParseError(path.string(), number, "expected `time edge_file`");
    SnapshotTime t = 0;
    const auto f = fields[0];
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), t);
    if (ec != std::errc{} || ptr != f.data() + f.size() || t < 0)
      throw ParseError(path.string(), number, "invalid snapshot time `" + std::string(f) + "`");
    std::filesystem::path file{std::string(fields[1])};
    if (file.is_relative()) file = path.parent_path() / file;
    index.times.push_back(t);
    index.edge_files.push_back(file);
  }
  if (index.times.empty()) throw ParseError(path.string() + ": series index lists no snapshots");
  return index;
}

GraphSeries load_series_index(const std::filesystem::path& path) {
  const auto index = parse_series_index(path);
  return load_snapshot_series(index.edge_files, index.times);
}

// ---------------------------------------------------------------------------
// Attributes

AttributeLoad build_attributes(std::span<const AttributeRecord> records, const IdMap& ids) {
  AttributeStoreBuilder builder;
  AttributeLoad result;
  for (const auto& record : records) {
    const auto node = ids.find(record.node);
    if (!node) {
      ++result.skipped_records;
      continue;
    }
    builder.add(*node, record.kind, record.value);
  }
  result.store = builder.build(ids.size());
  return result;
}

AttributeLoad load_attributes(const std::filesystem::path& path, const IdMap& ids) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open attribute file " + path.string());
  const auto records = parse_attribute_stream(in, path.string());
  return build_attributes(records, ids);
}

Subgraph filter_attributed_subgraph(const SnapshotGraph& g, const AttributeStore& attrs) {
  const auto n = static_cast<NodeId>(g.num_nodes());
  constexpr NodeId kDropped = std::numeric_limits<NodeId>::max();
  std::vector<NodeId> to_sub(n, kDropped);
  Subgraph result;
  for (NodeId u = 0; u < n; ++u) {
    if (attrs.attribute_degree(u) >= 1) {
      to_sub[u] = static_cast<NodeId>(result.to_parent.size());
      result.to_parent.push_back(u);
    }
  }
  GraphBuilder builder(result.to_parent.size());
  if (const auto& parent_rank = g.raw_rank()) {
    auto rank = std::make_shared<std::vector<std::uint32_t>>(result.to_parent.size());
    for (std::size_t i = 0; i < result.to_parent.size(); ++i)
      (*rank)[i] = (*parent_rank)[result.to_parent[i]];
    builder.set_raw_rank(std::move(rank));
  }
  for (NodeId u = 0; u < n; ++u) {
    if (to_sub[u] == kDropped) continue;
    const auto out = g.out_neighbors(u);
    const auto births = g.out_births(u);
    for (std::size_t k = 0; k < out.size(); ++k)
      if (to_sub[out[k]] != kDropped) builder.add_edge(to_sub[u], to_sub[out[k]], births[k]);
  }
  result.graph = builder.build(g.snapshot_time());
  return result;
}

// ---------------------------------------------------------------------------
// Binary image

namespace {

constexpr char kMagic[8] = {'R', 'C', 'P', 'N', 'G', 'R', 'P', 'H'};
constexpr std::uint16_t kMajorVersion = 1;
constexpr std::uint16_t kMinorVersion = 0;

class Writer {
 public:
  void bytes(const void* data, std::size_t n) { buf_.append(static_cast<const char*>(data), n); }
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u16(std::uint16_t v) {
    u8(static_cast<std::uint8_t>(v & 0xff));
    u8(static_cast<std::uint8_t>(v >> 8));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void varint(std::uint64_t v) {
    while (v >= 0x80) {
      u8(static_cast<std::uint8_t>(v | 0x80));
      v >>= 7;
    }
    u8(static_cast<std::uint8_t>(v));
  }
  void str(std::string_view s) {
    varint(s.size());
    bytes(s.data(), s.size());
  }
  std::string& buffer() { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(data_[pos_++]);
  }
  std::uint16_t u16() {
    const std::uint16_t lo = u8();
    return static_cast<std::uint16_t>(lo | (static_cast<std::uint16_t>(u8()) << 8));
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
    return v;
  }
  std::uint64_t varint() {
    std::uint64_t v = 0;
    for (int shift = 0; shift < 64; shift += 7) {
      const std::uint8_t b = u8();
      v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
      if ((b & 0x80) == 0) return v;
    }
    throw ParseError("graph image: malformed varint");
  }
  std::string str() {
    const auto n = varint();
    need(n);
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  std::string_view raw(std::size_t n) {
    need(n);
    const auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw ParseError("graph image: truncated");
  }
  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace

void write_image(std::ostream& out, const GraphSeries& series, const AttributeStore* attributes) {
  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.u16(kMajorVersion);
  w.u16(kMinorVersion);
  w.u8(static_cast<std::uint8_t>(series.birth_source()));

  const std::size_t n = series.ids().size();
  w.varint(n);
  for (NodeId u = 0; u < n; ++u) w.str(series.ids().raw(u));

  const auto times = series.times();
  w.varint(times.size());
  SnapshotTime previous = 0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    w.varint(static_cast<std::uint64_t>(k == 0 ? times[k] : times[k] - previous));
    previous = times[k];
  }

  const auto edges = series.edges();
  w.varint(edges.size());
  std::size_t cursor = 0;
  for (NodeId u = 0; u < n; ++u) {
    const std::size_t begin = cursor;
    while (cursor < edges.size() && edges[cursor].src == u) ++cursor;
    w.varint(cursor - begin);
    NodeId last = 0;
    for (std::size_t k = begin; k < cursor; ++k) {
      w.varint(k == begin ? edges[k].dst : edges[k].dst - last);
      last = edges[k].dst;
    }
    for (std::size_t k = begin; k < cursor; ++k) w.varint(static_cast<std::uint64_t>(edges[k].birth));
  }

  w.u8(attributes ? 1 : 0);
  if (attributes) {
    if (attributes->num_nodes() != n)
      throw ArgumentError("attribute store is not aligned with the series id map");
    w.varint(attributes->num_attributes());
    for (AttributeId a = 0; a < attributes->num_attributes(); ++a) {
      w.u8(static_cast<std::uint8_t>(attributes->kind(a)));
      w.str(attributes->value(a));
    }
    for (NodeId u = 0; u < n; ++u) {
      const auto list = attributes->attributes_of(u);
      w.varint(list.size());
      AttributeId last = 0;
      for (std::size_t k = 0; k < list.size(); ++k) {
        w.varint(k == 0 ? list[k] : list[k] - last);
        last = list[k];
      }
    }
  }
  const std::uint64_t checksum = fnv1a(w.buffer());
  w.u64(checksum);
  out.write(w.buffer().data(), static_cast<std::streamsize>(w.buffer().size()));
  if (!out) throw Error("failed writing graph image");
}

void save_image(const std::filesystem::path& path, const GraphSeries& series,
                const AttributeStore* attributes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_image(out, series, attributes);
}

GraphImage read_image(std::istream& in) {
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (data.size() < sizeof kMagic + 4 + 8) throw ParseError("graph image: truncated");
  const std::string_view body(data.data(), data.size() - 8);
  Reader trailer(std::string_view(data).substr(data.size() - 8));
  if (trailer.u64() != fnv1a(body)) throw ParseError("graph image: checksum mismatch");

  Reader r(body);
  if (r.raw(sizeof kMagic) != std::string_view(kMagic, sizeof kMagic))
    throw ParseError("graph image: bad magic");
  const auto major = r.u16();
  r.u16();
  if (major != kMajorVersion)
    throw ParseError("graph image: unsupported major version " + std::to_string(major));
  const auto source = static_cast<BirthSource>(r.u8());

  const auto n = r.varint();
  std::vector<std::string> raw(n);
  for (auto& s : raw) s = r.str();

  std::vector<SnapshotTime> times(r.varint());
  for (std::size_t k = 0; k < times.size(); ++k) {
    const auto delta = static_cast<SnapshotTime>(r.varint());
    times[k] = k == 0 ? delta : times[k - 1] + delta;
  }

  const auto m = r.varint();
  std::vector<TemporalEdge> edges;
  edges.reserve(m);
  for (NodeId u = 0; u < n; ++u) {
    const auto degree = r.varint();
    const std::size_t begin = edges.size();
    NodeId last = 0;
    for (std::size_t k = 0; k < degree; ++k) {
      const auto value = static_cast<NodeId>(r.varint());
      last = k == 0 ? value : last + value;
      if (last >= n) throw ParseError("graph image: neighbor id out of range");
      edges.push_back({u, last, 0});
    }
    for (std::size_t k = 0; k < degree; ++k)
      edges[begin + k].birth = static_cast<SnapshotTime>(r.varint());
  }
  if (edges.size() != m) throw ParseError("graph image: edge count mismatch");

  GraphImage image;
  const bool has_attributes = r.u8() != 0;
  std::vector<std::pair<AttributeKind, std::string>> table;
  std::vector<std::vector<AttributeId>> incidence;
  if (has_attributes) {
    table.resize(r.varint());
    for (auto& [kind, value] : table) {
      const auto k = r.u8();
      if (k > 3) throw ParseError("graph image: bad attribute kind");
      kind = static_cast<AttributeKind>(k);
      value = r.str();
    }
    incidence.resize(n);
    for (NodeId u = 0; u < n; ++u) {
      const auto count = r.varint();
      AttributeId last = 0;
      for (std::size_t k = 0; k < count; ++k) {
        const auto value = static_cast<AttributeId>(r.varint());
        last = k == 0 ? value : last + value;
        if (last >= table.size()) throw ParseError("graph image: attribute id out of range");
        incidence[u].push_back(last);
      }
    }
  }
  if (!r.done()) throw ParseError("graph image: trailing bytes");

  image.series = GraphSeries::assemble(std::move(raw), std::move(edges), std::move(times), source);
  if (has_attributes) {
    AttributeStoreBuilder builder;
    for (std::size_t a = 0; a < table.size(); ++a)
      if (builder.intern(table[a].first, table[a].second) != a)
        throw ParseError("graph image: duplicate attribute entry");
    for (NodeId u = 0; u < n; ++u)
      for (const AttributeId a : incidence[u]) builder.add(u, a);
    image.attributes = builder.build(n);
  }
  return image;
}

GraphImage load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open graph image " + path.string());
  return read_image(in);
}

void write_edge_records(std::ostream& out, std::span<const EdgeRecord> records) {
  for (const auto& r : records) {
    out << r.src << '\t' << r.dst;
    if (r.birth) out << '\t' << *r.birth;
    out << '\n';
  }
}

void write_attribute_records(std::ostream& out, std::span<const AttributeRecord> records) {
  for (const auto& r : records) out << r.node << '\t' << to_string(r.kind) << '\t' << r.value << '\n';
}

}  // namespace recipnet
