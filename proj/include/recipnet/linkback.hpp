#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "recipnet/attributes.hpp"
#include "recipnet/graph.hpp"

namespace recipnet {

/// Linking-back probability per bin: the fraction of a bin's parasocial base
/// edges that are reciprocal in the final snapshot.
struct LinkbackCurve {
  std::vector<std::string> bin_labels;
  std::vector<std::optional<double>> probabilities;  ///< nullopt where support == 0
  std::vector<std::size_t> support;
  std::vector<std::size_t> reciprocated;

  std::size_t size() const noexcept { return bin_labels.size(); }
  std::size_t total_support() const noexcept;
};

enum class ReciprocitySide : std::uint8_t {
  kAcceptance,  ///< bin by R_a(head) = d_r/d_i
  kRequest,     ///< bin by R_r(tail) = d_r/d_o
};

/// Bins are [k/B, (k+1)/B) with the last bin closed at 1. Nodes whose
/// denominator degree is 0 are excluded.
LinkbackCurve linkback_vs_local_reciprocity(const SnapshotGraph& base, const SnapshotGraph& final_graph,
                                            ReciprocitySide side, std::size_t bins);

/// Two bins ("share_0", "share_1+") over parasocial base edges whose endpoints
/// both hold at least one attribute. Empty curve when no such edge exists.
LinkbackCurve linkback_vs_shared_attributes(const SnapshotGraph& base, const SnapshotGraph& final_graph,
                                            const AttributeStore& attrs, AttributeKind kind);

/// One bin per age 0..max_age, where age = base time - birth; older edges are
/// pooled into the last bin.
LinkbackCurve linkback_vs_edge_age(const SnapshotGraph& base, const SnapshotGraph& final_graph,
                                   SnapshotTime max_age);

}  // namespace recipnet
