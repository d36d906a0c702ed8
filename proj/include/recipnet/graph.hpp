#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <tuple>
#include <vector>

namespace recipnet {

/// Dense node index, contiguous 0..N-1 within a graph.
using NodeId = std::uint32_t;

/// Normalized snapshot date in days.
using SnapshotTime = std::int64_t;

/// The four neighbor sets of a node in a directed graph.
enum class NeighborView : std::uint8_t {
  kIn,          ///< Γi(u) = {v | (v,u) ∈ E}
  kOut,         ///< Γo(u) = {v | (u,v) ∈ E}
  kParasocial,  ///< Γi(u) ∪ Γo(u)
  kReciprocal,  ///< Γi(u) ∩ Γo(u)
};

inline constexpr NeighborView kAllViews[] = {NeighborView::kIn, NeighborView::kOut,
                                             NeighborView::kParasocial,
                                             NeighborView::kReciprocal};

std::string_view view_code(NeighborView view);  // "i", "o", "p", "r"

enum class EdgeClass : std::uint8_t { kParasocial, kReciprocal };
enum class RequestClass : std::uint8_t { kRequest, kAcceptance };

/// Which undirected projection of a directed graph.
enum class Version : std::uint8_t { kParasocial, kReciprocal };

std::string_view to_string(Version version);

struct Edge {
  NodeId src = 0;
  NodeId dst = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Immutable directed graph at one snapshot time.
///
/// Out- and in-adjacency are stored as CSR arrays with sorted, duplicate-free
/// neighbor lists; the birth time of each edge is aligned with the out-array.
/// Safe for concurrent reads.
class SnapshotGraph {
 public:
  SnapshotGraph() = default;

  std::size_t num_nodes() const noexcept { return out_offsets_.empty() ? 0 : out_offsets_.size() - 1; }
  std::size_t num_edges() const noexcept { return out_targets_.size(); }
  SnapshotTime snapshot_time() const noexcept { return time_; }

  std::span<const NodeId> out_neighbors(NodeId u) const;
  std::span<const NodeId> in_neighbors(NodeId u) const;
  /// Birth times aligned with `out_neighbors(u)`.
  std::span<const SnapshotTime> out_births(NodeId u) const;

  /// Sorted neighbor ids for one of the four views.
  std::vector<NodeId> neighbors(NodeId u, NeighborView view) const;
  std::size_t degree(NodeId u, NeighborView view) const;

  bool has_edge(NodeId u, NodeId v) const noexcept;
  /// Birth time of (u,v); throws ArgumentError when the edge is absent.
  SnapshotTime edge_birth(NodeId u, NodeId v) const;

  /// Reciprocal iff the reverse edge exists.
  EdgeClass classify_edge(NodeId u, NodeId v) const;
  /// Acceptance iff the reverse edge was born strictly earlier, or at the
  /// same time with (v,u) the raw-id-smaller ordered pair.
  RequestClass classify_request(NodeId u, NodeId v) const;

  /// Order of the external (raw) ids; identity when no id map is attached.
  bool raw_less(NodeId a, NodeId b) const noexcept {
    return raw_rank_ ? (*raw_rank_)[a] < (*raw_rank_)[b] : a < b;
  }
  const std::shared_ptr<const std::vector<std::uint32_t>>& raw_rank() const noexcept {
    return raw_rank_;
  }

  std::vector<Edge> edges() const;

  template <class F>
  void for_each_edge(F&& f) const {
    const auto n = static_cast<NodeId>(num_nodes());
    for (NodeId u = 0; u < n; ++u)
      for (const NodeId v : out_neighbors(u)) f(u, v);
  }

 private:
  friend class GraphBuilder;
  void check_node(NodeId u) const;
  std::size_t find_out(NodeId u, NodeId v) const noexcept;

  SnapshotTime time_ = 0;
  std::vector<std::size_t> out_offsets_;
  std::vector<NodeId> out_targets_;
  std::vector<SnapshotTime> out_birth_;
  std::vector<std::size_t> in_offsets_;
  std::vector<NodeId> in_sources_;
  std::shared_ptr<const std::vector<std::uint32_t>> raw_rank_;
};

/// Single-writer constructor for SnapshotGraph.
class GraphBuilder {
 public:
  explicit GraphBuilder(std::size_t num_nodes) : num_nodes_(num_nodes) {}

  /// Self-loops and out-of-range ids raise ArgumentError. Duplicate records
  /// keep the earliest birth.
  void add_edge(NodeId u, NodeId v, SnapshotTime birth = 0);
  void reserve(std::size_t edges) { records_.reserve(edges); }

  /// Attach raw-id ranks used for birth-time tie-breaking.
  void set_raw_rank(std::shared_ptr<const std::vector<std::uint32_t>> rank) {
    raw_rank_ = std::move(rank);
  }

  /// Every birth must be ≤ `snapshot_time`.
  SnapshotGraph build(SnapshotTime snapshot_time) const;

 private:
  std::size_t num_nodes_;
  std::vector<std::tuple<NodeId, NodeId, SnapshotTime>> records_;
  std::shared_ptr<const std::vector<std::uint32_t>> raw_rank_;
};

/// Symmetric adjacency produced by `undirect`.
class UndirectedGraph {
 public:
  UndirectedGraph() = default;
  explicit UndirectedGraph(std::vector<std::vector<NodeId>> adjacency);

  std::size_t num_nodes() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  /// Number of undirected edges {u,v}.
  std::size_t num_edges() const noexcept { return targets_.size() / 2; }
  std::span<const NodeId> neighbors(NodeId u) const {
    return {targets_.data() + offsets_[u], targets_.data() + offsets_[u + 1]};
  }
  std::size_t degree(NodeId u) const { return offsets_[u + 1] - offsets_[u]; }
  bool has_edge(NodeId u, NodeId v) const;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> targets_;
};

/// Parasocial version: {u,v} iff (u,v) ∈ E or (v,u) ∈ E.
/// Reciprocal version: {u,v} iff both. The node set is unchanged.
UndirectedGraph undirect(const SnapshotGraph& g, Version version);

/// Sorted-range set operations on neighbor lists.
std::vector<NodeId> sorted_union(std::span<const NodeId> a, std::span<const NodeId> b);
std::vector<NodeId> sorted_intersection(std::span<const NodeId> a, std::span<const NodeId> b);
std::size_t intersection_size(std::span<const NodeId> a, std::span<const NodeId> b);

}  // namespace recipnet
