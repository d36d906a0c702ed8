#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "recipnet/graph.hpp"

namespace recipnet {

enum class AttributeKind : std::uint8_t { kSchool = 0, kMajor = 1, kEmployer = 2, kCity = 3 };

inline constexpr std::array<AttributeKind, 4> kAllKinds = {
    AttributeKind::kSchool, AttributeKind::kMajor, AttributeKind::kEmployer,
    AttributeKind::kCity};

std::string_view to_string(AttributeKind kind);  // "school", "major", ...
/// Case-insensitive.
std::optional<AttributeKind> parse_attribute_kind(std::string_view token);

using AttributeId = std::uint32_t;

/// Bipartite node ↔ attribute incidence.
///
/// `attributes_of(u)` is Γa(u) and `holders_of(a)` is Γs(a); both lists are
/// sorted and they are exact transposes of each other.
class AttributeStore {
 public:
  AttributeStore() = default;

  std::size_t num_nodes() const noexcept { return node_offsets_.empty() ? 0 : node_offsets_.size() - 1; }
  std::size_t num_attributes() const noexcept { return kinds_.size(); }
  std::size_t num_incidences() const noexcept { return node_attrs_.size(); }

  std::span<const AttributeId> attributes_of(NodeId u) const;
  std::span<const NodeId> holders_of(AttributeId a) const;
  std::size_t attribute_degree(NodeId u) const { return attributes_of(u).size(); }
  std::size_t social_degree(AttributeId a) const { return holders_of(a).size(); }

  AttributeKind kind(AttributeId a) const { return kinds_.at(a); }
  const std::string& value(AttributeId a) const { return values_.at(a); }
  std::optional<AttributeId> find(AttributeKind kind, std::string_view value) const;

  /// Same attributes, nodes ≥ `num_nodes` dropped (for an earlier snapshot
  /// whose node set is a prefix of this store's).
  AttributeStore restricted_to(std::size_t num_nodes) const;

 private:
  friend class AttributeStoreBuilder;

  std::vector<AttributeKind> kinds_;
  std::vector<std::string> values_;
  std::vector<std::size_t> node_offsets_;
  std::vector<AttributeId> node_attrs_;
  std::vector<std::size_t> attr_offsets_;
  std::vector<NodeId> attr_nodes_;
};

class AttributeStoreBuilder {
 public:
  /// Id of the (kind, value) pair, creating it on first use.
  AttributeId intern(AttributeKind kind, std::string_view value);
  void add(NodeId node, AttributeId attribute);
  void add(NodeId node, AttributeKind kind, std::string_view value) { add(node, intern(kind, value)); }

  AttributeStore build(std::size_t num_nodes) const;

 private:
  std::vector<AttributeKind> kinds_;
  std::vector<std::string> values_;
  std::map<std::pair<AttributeKind, std::string>, AttributeId, std::less<>> index_;
  std::vector<std::pair<NodeId, AttributeId>> incidences_;
};

}  // namespace recipnet
