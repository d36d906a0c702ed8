#include "recipnet/linkback.hpp"

#include <numeric>

#include "recipnet/error.hpp"
#include "recipnet/parallel.hpp"

namespace recipnet {

std::size_t LinkbackCurve::total_support() const noexcept {
  return std::accumulate(support.begin(), support.end(), std::size_t{0});
}

namespace {

void check_pair(const SnapshotGraph& base, const SnapshotGraph& final_graph) {
  if (final_graph.snapshot_time() < base.snapshot_time())
    throw ArgumentError("final snapshot precedes the base snapshot");
  if (final_graph.num_nodes() < base.num_nodes())
    throw ArgumentError("final snapshot has fewer nodes than the base snapshot");
}

/// Folds every parasocial base edge into `bin_of(u, v)` (a bin index or
/// nullopt to skip), counting those reciprocal in the final snapshot.
template <class BinOf>
LinkbackCurve fold(const SnapshotGraph& base, const SnapshotGraph& final_graph,
                   std::vector<std::string> labels, BinOf&& bin_of) {
  const std::size_t bins = labels.size();
  const std::size_t n = base.num_nodes();
  const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(worker_count(), n));
  std::vector<std::vector<std::size_t>> support(chunks, std::vector<std::size_t>(bins, 0));
  std::vector<std::vector<std::size_t>> hits(chunks, std::vector<std::size_t>(bins, 0));
  const std::size_t step = n == 0 ? 0 : (n + chunks - 1) / chunks;
  parallel_for(
      chunks,
      [&](std::size_t first, std::size_t last) {
        for (std::size_t c = first; c < last; ++c) {
          const std::size_t begin = std::min(n, c * step);
          const std::size_t end = std::min(n, begin + step);
          for (auto u = static_cast<NodeId>(begin); u < end; ++u) {
            for (const NodeId v : base.out_neighbors(u)) {
              if (base.has_edge(v, u)) continue;
              const std::optional<std::size_t> b = bin_of(u, v);
              if (!b) continue;
              ++support[c][*b];
              if (final_graph.has_edge(u, v) && final_graph.has_edge(v, u)) ++hits[c][*b];
            }
          }
        }
      },
      1);

  LinkbackCurve curve;
  curve.bin_labels = std::move(labels);
  curve.support.assign(bins, 0);
  curve.reciprocated.assign(bins, 0);
  for (std::size_t c = 0; c < chunks; ++c) {
    for (std::size_t b = 0; b < bins; ++b) {
      curve.support[b] += support[c][b];
      curve.reciprocated[b] += hits[c][b];
    }
  }
  curve.probabilities.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    if (curve.support[b] > 0)
      curve.probabilities[b] =
          static_cast<double>(curve.reciprocated[b]) / static_cast<double>(curve.support[b]);
  }
  return curve;
}

std::string format_bin_edge(std::size_t k, std::size_t bins) {
  // Exact decimal for k/bins when it terminates within 6 digits.
  const double value = static_cast<double>(k) / static_cast<double>(bins);
  std::string s = std::to_string(value);
  while (s.size() > 1 && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

}  // namespace

LinkbackCurve linkback_vs_local_reciprocity(const SnapshotGraph& base, const SnapshotGraph& final_graph,
                                            ReciprocitySide side, std::size_t bins) {
  check_pair(base, final_graph);
  if (bins == 0) throw ArgumentError("bins must be at least 1");
  const auto n = static_cast<NodeId>(base.num_nodes());
  std::vector<std::size_t> numer(n), denom(n);
  for (NodeId u = 0; u < n; ++u) {
    numer[u] = base.degree(u, NeighborView::kReciprocal);
    denom[u] = base.degree(u, side == ReciprocitySide::kAcceptance ? NeighborView::kIn
                                                                   : NeighborView::kOut);
  }
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < bins; ++k) {
    labels.push_back("[" + format_bin_edge(k, bins) + "," + format_bin_edge(k + 1, bins) +
                     (k + 1 == bins ? "]" : ")"));
  }
  return fold(base, final_graph, std::move(labels),
              [&](NodeId u, NodeId v) -> std::optional<std::size_t> {
                const NodeId w = side == ReciprocitySide::kAcceptance ? v : u;
                if (denom[w] == 0) return std::nullopt;
                // floor(B * d_r / d) in exact integer arithmetic.
                return std::min(bins - 1, numer[w] * bins / denom[w]);
              });
}

LinkbackCurve linkback_vs_shared_attributes(const SnapshotGraph& base, const SnapshotGraph& final_graph,
                                            const AttributeStore& attrs, AttributeKind kind) {
  check_pair(base, final_graph);
  auto curve = fold(base, final_graph, {"share_0", "share_1+"},
                    [&](NodeId u, NodeId v) -> std::optional<std::size_t> {
                      const auto au = attrs.attributes_of(u);
                      const auto av = attrs.attributes_of(v);
                      if (au.empty() || av.empty()) return std::nullopt;
                      auto i = au.begin();
                      auto j = av.begin();
                      while (i != au.end() && j != av.end()) {
                        if (*i < *j) {
                          ++i;
                        } else if (*j < *i) {
                          ++j;
                        } else {
                          if (attrs.kind(*i) == kind) return std::size_t{1};
                          ++i;
                          ++j;
                        }
                      }
                      return std::size_t{0};
                    });
  if (curve.total_support() == 0) return {};
  return curve;
}

LinkbackCurve linkback_vs_edge_age(const SnapshotGraph& base, const SnapshotGraph& final_graph,
                                   SnapshotTime max_age) {
  check_pair(base, final_graph);
  if (max_age < 0) throw ArgumentError("max_age must be non-negative");
  std::vector<std::string> labels;
  for (SnapshotTime a = 0; a <= max_age; ++a)
    labels.push_back(std::to_string(a) + (a == max_age ? "+" : ""));
  const SnapshotTime now = base.snapshot_time();
  return fold(base, final_graph, std::move(labels),
              [&](NodeId u, NodeId v) -> std::optional<std::size_t> {
                const SnapshotTime age = now - base.edge_birth(u, v);
                return static_cast<std::size_t>(std::min(age, max_age));
              });
}

}  // namespace recipnet
