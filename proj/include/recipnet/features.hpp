#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "recipnet/attributes.hpp"
#include "recipnet/graph.hpp"
#include "recipnet/matrix.hpp"

namespace recipnet {

/// Column layout of an edge feature vector.
///
/// Blocks, in order: single-node (tail then head, 5 each), CN_xy (16),
/// JC_xy (16), AA_xyz (64), PA (2), CN-A/JC-A/AA-A per attribute kind
/// (12, only when attributes are present) and edge age (1).
class FeatureLayout {
 public:
  static constexpr int kVersion = 1;
  static constexpr std::size_t kSingleNode = 0;
  static constexpr std::size_t kCommonNeighbors = 10;
  static constexpr std::size_t kJaccard = 26;
  static constexpr std::size_t kAdamicAdar = 42;
  static constexpr std::size_t kPreferential = 106;
  static constexpr std::size_t kAttribute = 108;
  static constexpr std::size_t kStructuralWidth = 109;
  static constexpr std::size_t kAttributedWidth = 121;

  explicit FeatureLayout(bool with_attributes);

  bool with_attributes() const noexcept { return with_attributes_; }
  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::size_t edge_age_index() const noexcept { return names_.size() - 1; }
  /// Throws ArgumentError for an unknown name.
  std::size_t index_of(std::string_view name) const;
  /// Stable hex digest of the version, dataset tag and column names.
  const std::string& fingerprint() const noexcept { return fingerprint_; }

  friend bool operator==(const FeatureLayout& a, const FeatureLayout& b) {
    return a.fingerprint_ == b.fingerprint_;
  }

 private:
  bool with_attributes_;
  std::vector<std::string> names_;
  std::string fingerprint_;
};

/// Edge features computed on one snapshot.
///
/// Zero-denominator rules: d_o/d_i with d_i = 0 is d_o; R_a with d_i = 0 and
/// R_r with d_o = 0 are 0; Jaccard of an empty union is 0; Adamic-Adar terms
/// whose degree is ≤ 1 are skipped. Logarithms are natural.
class FeatureExtractor {
 public:
  /// `attrs` may be null (structural layout). `eval_time` defaults to the
  /// snapshot time and is used for the age of parasocial edges.
  FeatureExtractor(const SnapshotGraph& g, const AttributeStore* attrs);
  FeatureExtractor(const SnapshotGraph& g, const AttributeStore* attrs, SnapshotTime eval_time);

  const FeatureLayout& layout() const noexcept { return layout_; }
  const SnapshotGraph& graph() const noexcept { return *graph_; }

  /// (d_i, d_o, d_o/d_i, R_a, R_r)
  std::array<double, 5> single_node(NodeId u) const;
  /// |Γx(u) ∩ Γy(v)| with (x, y) over i,o,p,r × i,o,p,r.
  std::array<double, 16> common_neighbors(NodeId u, NodeId v) const;
  std::array<double, 16> jaccard(NodeId u, NodeId v) const;
  /// Σ_{w ∈ Γx(u) ∩ Γy(v)} 1/ln|Γz(w)| with (x, y, z) in lexicographic order.
  std::array<double, 64> adamic_adar(NodeId u, NodeId v) const;
  /// (d_o(u)·d_i(v), d_i(u)·d_o(v))
  std::array<double, 2> preferential_attachment(NodeId u, NodeId v) const;
  /// CN-A ×4, JC-A ×4, AA-A ×4 over school, major, employer, city.
  std::array<double, 12> attribute_features(NodeId u, NodeId v) const;
  /// Parasocial: eval_time - birth(u,v). Reciprocal: birth(v,u) - birth(u,v),
  /// which must be non-negative (ConsistencyError otherwise).
  double edge_age(NodeId u, NodeId v) const;

  void extract(NodeId u, NodeId v, std::span<double> row) const;

 private:
  using Views = std::array<std::vector<NodeId>, 4>;
  Views views_of(NodeId u) const;
  void pair_blocks(const Views& a, const Views& b, std::span<double, 16> cn, std::span<double, 16> jc,
                   std::span<double, 64> aa) const;

  const SnapshotGraph* graph_;
  const AttributeStore* attrs_;
  SnapshotTime eval_time_;
  FeatureLayout layout_;
  std::array<std::vector<std::uint32_t>, 4> degree_;     // by NeighborView
  std::array<std::vector<double>, 4> inverse_log_;       // 1/ln d, 0 when d ≤ 1
};

/// One row per edge in input order. Rows are extracted in parallel.
FeatureMatrix extract_matrix(const FeatureExtractor& extractor, std::span<const Edge> edges);

}  // namespace recipnet
