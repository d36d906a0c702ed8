#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "recipnet/attributes.hpp"
#include "recipnet/graph.hpp"

namespace recipnet {

/// One line of an edge file: `src <ws> dst [<ws> birth]`.
struct EdgeRecord {
  std::string src;
  std::string dst;
  std::optional<SnapshotTime> birth;
  std::size_t line = 0;
};

/// One line of an attribute file: `node <tab> kind <tab> value`.
struct AttributeRecord {
  std::string node;
  AttributeKind kind = AttributeKind::kSchool;
  std::string value;
  std::size_t line = 0;
};

std::vector<EdgeRecord> parse_edge_stream(std::istream& in, const std::string& source);
std::vector<EdgeRecord> parse_edge_file(const std::filesystem::path& path);
std::vector<AttributeRecord> parse_attribute_stream(std::istream& in, const std::string& source);

/// Total order on external ids: all-digit ids first, compared numerically,
/// then everything else compared bytewise.
bool raw_id_less(std::string_view a, std::string_view b);

/// Bidirectional map between external ids and dense node ids.
class IdMap {
 public:
  IdMap() = default;
  explicit IdMap(std::vector<std::string> raw_ids);

  std::size_t size() const noexcept { return raw_.size(); }
  const std::string& raw(NodeId id) const { return raw_.at(id); }
  std::optional<NodeId> find(std::string_view raw) const;
  /// Rank of each dense id under `raw_id_less`.
  const std::shared_ptr<const std::vector<std::uint32_t>>& raw_rank() const noexcept { return rank_; }

 private:
  std::vector<std::string> raw_;
  std::unordered_map<std::string, NodeId> index_;
  std::shared_ptr<const std::vector<std::uint32_t>> rank_;
};

/// Where edge birth times came from.
enum class BirthSource : std::uint8_t { kNone, kFirstSighting, kExplicit, kMixed };
std::string_view to_string(BirthSource source);

struct TemporalEdge {
  NodeId src = 0;
  NodeId dst = 0;
  SnapshotTime birth = 0;
};

/// A growth-only sequence of snapshots sharing one id map.
///
/// Dense ids are assigned in order of node birth (the earliest birth of an
/// incident edge, ties by raw id), so the node set of every snapshot is a prefix 0..N_t-1 of
/// the id space. Snapshot k holds every edge with birth ≤ times[k].
class GraphSeries {
 public:
  GraphSeries() = default;

  /// `edges` use provisional ids 0..raw_ids.size()-1; they are remapped.
  static GraphSeries assemble(std::vector<std::string> raw_ids, std::vector<TemporalEdge> edges,
                              std::vector<SnapshotTime> times, BirthSource source);

  const IdMap& ids() const noexcept { return ids_; }
  std::span<const SnapshotTime> times() const noexcept { return times_; }
  std::size_t num_snapshots() const noexcept { return times_.size(); }
  /// Every edge ever seen, sorted by (src, dst).
  std::span<const TemporalEdge> edges() const noexcept { return edges_; }
  std::span<const SnapshotTime> node_births() const noexcept { return node_births_; }
  BirthSource birth_source() const noexcept { return birth_source_; }

  std::size_t nodes_at(std::size_t index) const;
  SnapshotGraph snapshot(std::size_t index) const;
  /// Index of the snapshot taken at exactly `time`.
  std::size_t index_of(SnapshotTime time) const;

 private:
  IdMap ids_;
  std::vector<SnapshotTime> times_;
  std::vector<SnapshotTime> node_births_;
  std::vector<TemporalEdge> edges_;
  BirthSource birth_source_ = BirthSource::kNone;
};

/// Load one edge file per snapshot time. Times must be strictly increasing
/// (gaps allowed). A record without a birth column is born at the time of the
/// first file listing it; an explicit birth may not exceed its file's time.
GraphSeries load_snapshot_series(std::span<const std::filesystem::path> edge_files,
                                 std::span<const SnapshotTime> times);
/// Index file: one `time <ws> edge_file` per line, `#` comments; relative
/// paths resolve against the index file's directory.
struct SeriesIndex {
  std::vector<SnapshotTime> times;
  std::vector<std::filesystem::path> edge_files;
};
SeriesIndex parse_series_index(const std::filesystem::path& path);
GraphSeries load_series_index(const std::filesystem::path& path);

GraphSeries assemble_series(std::span<const std::vector<EdgeRecord>> files,
                            std::span<const SnapshotTime> times,
                            std::span<const std::string> sources = {});

struct AttributeLoad {
  AttributeStore store;
  std::size_t skipped_records = 0;  ///< records naming nodes absent from the graph
};

AttributeLoad load_attributes(const std::filesystem::path& path, const IdMap& ids);
AttributeLoad build_attributes(std::span<const AttributeRecord> records, const IdMap& ids);

/// Induced subgraph on nodes with at least one attribute, plus the mapping
/// from its dense ids back to the parent graph's ids.
struct Subgraph {
  SnapshotGraph graph;
  std::vector<NodeId> to_parent;
};

Subgraph filter_attributed_subgraph(const SnapshotGraph& g, const AttributeStore& attrs);

/// Binary image of a series and optional attributes (layout in docs/graph-image.md).
struct GraphImage {
  GraphSeries series;
  std::optional<AttributeStore> attributes;
};

void save_image(const std::filesystem::path& path, const GraphSeries& series,
                const AttributeStore* attributes);
void write_image(std::ostream& out, const GraphSeries& series, const AttributeStore* attributes);
GraphImage load_image(const std::filesystem::path& path);
GraphImage read_image(std::istream& in);

/// Text writers matching the parsers above.
void write_edge_records(std::ostream& out, std::span<const EdgeRecord> records);
void write_attribute_records(std::ostream& out, std::span<const AttributeRecord> records);

}  // namespace recipnet
