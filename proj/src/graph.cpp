#include "recipnet/graph.hpp"

#include <algorithm>
#include <string>

#include "recipnet/error.hpp"

namespace recipnet {

std::string_view view_code(NeighborView view) {
  switch (view) {
    case NeighborView::kIn: return "i";
    case NeighborView::kOut: return "o";
    case NeighborView::kParasocial: return "p";
    case NeighborView::kReciprocal: return "r";
  }
  return "?";
}

std::string_view to_string(Version version) {
  return version == Version::kParasocial ? "parasocial" : "reciprocal";
}

std::vector<NodeId> sorted_union(std::span<const NodeId> a, std::span<const NodeId> b) {
  std::vector<NodeId> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<NodeId> sorted_intersection(std::span<const NodeId> a, std::span<const NodeId> b) {
  std::vector<NodeId> out;
  out.reserve(std::min(a.size(), b.size()));
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::size_t intersection_size(std::span<const NodeId> a, std::span<const NodeId> b) {
  std::size_t count = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

// ---------------------------------------------------------------------------
// SnapshotGraph

void SnapshotGraph::check_node(NodeId u) const {
  if (u >= num_nodes())
    throw ArgumentError("node id " + std::to_string(u) + " out of range (N=" +
                        std::to_string(num_nodes()) + ")");
}

std::span<const NodeId> SnapshotGraph::out_neighbors(NodeId u) const {
  check_node(u);
  return {out_targets_.data() + out_offsets_[u], out_targets_.data() + out_offsets_[u + 1]};
}

std::span<const NodeId> SnapshotGraph::in_neighbors(NodeId u) const {
  check_node(u);
  return {in_sources_.data() + in_offsets_[u], in_sources_.data() + in_offsets_[u + 1]};
}

std::span<const SnapshotTime> SnapshotGraph::out_births(NodeId u) const {
  check_node(u);
  return {out_birth_.data() + out_offsets_[u], out_birth_.data() + out_offsets_[u + 1]};
}

std::vector<NodeId> SnapshotGraph::neighbors(NodeId u, NeighborView view) const {
  const auto in = in_neighbors(u);
  const auto out = out_neighbors(u);
  switch (view) {
    case NeighborView::kIn: return {in.begin(), in.end()};
    case NeighborView::kOut: return {out.begin(), out.end()};
    case NeighborView::kParasocial: return sorted_union(in, out);
    case NeighborView::kReciprocal: return sorted_intersection(in, out);
  }
  return {};
}

std::size_t SnapshotGraph::degree(NodeId u, NeighborView view) const {
  const auto in = in_neighbors(u);
  const auto out = out_neighbors(u);
  switch (view) {
    case NeighborView::kIn: return in.size();
    case NeighborView::kOut: return out.size();
    case NeighborView::kParasocial: return in.size() + out.size() - intersection_size(in, out);
    case NeighborView::kReciprocal: return intersection_size(in, out);
  }
  return 0;
}

std::size_t SnapshotGraph::find_out(NodeId u, NodeId v) const noexcept {
  const auto begin = out_targets_.begin() + static_cast<std::ptrdiff_t>(out_offsets_[u]);
  const auto end = out_targets_.begin() + static_cast<std::ptrdiff_t>(out_offsets_[u + 1]);
  const auto it = std::lower_bound(begin, end, v);
  if (it == end || *it != v) return static_cast<std::size_t>(-1);
  return static_cast<std::size_t>(it - out_targets_.begin());
}

bool SnapshotGraph::has_edge(NodeId u, NodeId v) const noexcept {
  if (u >= num_nodes() || v >= num_nodes()) return false;
  return find_out(u, v) != static_cast<std::size_t>(-1);
}

SnapshotTime SnapshotGraph::edge_birth(NodeId u, NodeId v) const {
  check_node(u);
  check_node(v);
  const std::size_t pos = find_out(u, v);
  if (pos == static_cast<std::size_t>(-1))
    throw ArgumentError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                        ") is not in the graph");
  return out_birth_[pos];
}

EdgeClass SnapshotGraph::classify_edge(NodeId u, NodeId v) const {
  if (!has_edge(u, v))
    throw ArgumentError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                        ") is not in the graph");
  return has_edge(v, u) ? EdgeClass::kReciprocal : EdgeClass::kParasocial;
}

RequestClass SnapshotGraph::classify_request(NodeId u, NodeId v) const {
  const SnapshotTime forward = edge_birth(u, v);
  const std::size_t pos = find_out(v, u);
  if (pos == static_cast<std::size_t>(-1)) return RequestClass::kRequest;
  const SnapshotTime backward = out_birth_[pos];
  if (backward < forward) return RequestClass::kAcceptance;
  if (forward < backward) return RequestClass::kRequest;
  // Same-snapshot births: the raw-id-smaller ordered pair is the request.
  return raw_less(u, v) ? RequestClass::kRequest : RequestClass::kAcceptance;
}

std::vector<Edge> SnapshotGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for_each_edge([&](NodeId u, NodeId v) { out.push_back({u, v}); });
  return out;
}

// ---------------------------------------------------------------------------
// GraphBuilder

void GraphBuilder::add_edge(NodeId u, NodeId v, SnapshotTime birth) {
  if (u >= num_nodes_ || v >= num_nodes_)
    throw ArgumentError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                        ") references a node outside 0.." + std::to_string(num_nodes_));
  if (u == v) throw ArgumentError("self-loop on node " + std::to_string(u));
  if (birth < 0) throw ArgumentError("negative birth time");
  records_.emplace_back(u, v, birth);
}

SnapshotGraph GraphBuilder::build(SnapshotTime snapshot_time) const {
  auto records = records_;
  std::sort(records.begin(), records.end());
  // Sorted by (u, v, birth): the first of each (u, v) run is the earliest.
  records.erase(std::unique(records.begin(), records.end(),
                            [](const auto& a, const auto& b) {
                              return std::get<0>(a) == std::get<0>(b) &&
                                     std::get<1>(a) == std::get<1>(b);
                            }),
                records.end());

  SnapshotGraph g;
  g.time_ = snapshot_time;
  g.raw_rank_ = raw_rank_;
  if (raw_rank_ && raw_rank_->size() < num_nodes_)
    throw ArgumentError("raw-id rank table smaller than the node count");

  g.out_offsets_.assign(num_nodes_ + 1, 0);
  g.in_offsets_.assign(num_nodes_ + 1, 0);
  g.out_targets_.reserve(records.size());
  g.out_birth_.reserve(records.size());
  for (const auto& [u, v, birth] : records) {
    if (birth > snapshot_time)
      throw ArgumentError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                          ") born after the snapshot time");
    ++g.out_offsets_[u + 1];
    ++g.in_offsets_[v + 1];
    g.out_targets_.push_back(v);
    g.out_birth_.push_back(birth);
  }
  for (std::size_t i = 0; i < num_nodes_; ++i) {
    g.out_offsets_[i + 1] += g.out_offsets_[i];
    g.in_offsets_[i + 1] += g.in_offsets_[i];
  }
  // Scanning sources in increasing order keeps each in-list sorted.
  g.in_sources_.resize(records.size());
  std::vector<std::size_t> cursor(g.in_offsets_.begin(), g.in_offsets_.end() - 1);
  for (const auto& [u, v, birth] : records) g.in_sources_[cursor[v]++] = u;
  return g;
}

// ---------------------------------------------------------------------------
// UndirectedGraph

UndirectedGraph::UndirectedGraph(std::vector<std::vector<NodeId>> adjacency) {
  offsets_.assign(adjacency.size() + 1, 0);
  for (std::size_t u = 0; u < adjacency.size(); ++u)
    offsets_[u + 1] = offsets_[u] + adjacency[u].size();
  targets_.reserve(offsets_.back());
  for (auto& list : adjacency) targets_.insert(targets_.end(), list.begin(), list.end());
}

bool UndirectedGraph::has_edge(NodeId u, NodeId v) const {
  const auto list = neighbors(u);
  return std::binary_search(list.begin(), list.end(), v);
}

UndirectedGraph undirect(const SnapshotGraph& g, Version version) {
  const auto n = static_cast<NodeId>(g.num_nodes());
  std::vector<std::vector<NodeId>> adjacency(n);
  for (NodeId u = 0; u < n; ++u) {
    adjacency[u] = g.neighbors(u, version == Version::kParasocial ? NeighborView::kParasocial
                                                                  : NeighborView::kReciprocal);
  }
  return UndirectedGraph(std::move(adjacency));
}

}  // namespace recipnet
