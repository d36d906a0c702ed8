#include "recipnet/attributes.hpp"

#include <algorithm>
#include <cctype>

#include "recipnet/error.hpp"

namespace recipnet {

std::string_view to_string(AttributeKind kind) {
  switch (kind) {
    case AttributeKind::kSchool: return "school";
    case AttributeKind::kMajor: return "major";
    case AttributeKind::kEmployer: return "employer";
    case AttributeKind::kCity: return "city";
  }
  return "?";
}

std::optional<AttributeKind> parse_attribute_kind(std::string_view token) {
  std::string lower(token);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (const auto kind : kAllKinds)
    if (lower == to_string(kind)) return kind;
  return std::nullopt;
}

std::span<const AttributeId> AttributeStore::attributes_of(NodeId u) const {
  if (u >= num_nodes()) return {};
  return {node_attrs_.data() + node_offsets_[u], node_attrs_.data() + node_offsets_[u + 1]};
}

std::span<const NodeId> AttributeStore::holders_of(AttributeId a) const {
  if (a >= num_attributes()) throw ArgumentError("attribute id out of range");
  return {attr_nodes_.data() + attr_offsets_[a], attr_nodes_.data() + attr_offsets_[a + 1]};
}

std::optional<AttributeId> AttributeStore::find(AttributeKind kind, std::string_view value) const {
  for (AttributeId a = 0; a < kinds_.size(); ++a)
    if (kinds_[a] == kind && values_[a] == value) return a;
  return std::nullopt;
}

AttributeStore AttributeStore::restricted_to(std::size_t num_nodes) const {
  AttributeStoreBuilder builder;
  for (AttributeId a = 0; a < kinds_.size(); ++a) builder.intern(kinds_[a], values_[a]);
  const std::size_t limit = std::min(num_nodes, this->num_nodes());
  for (NodeId u = 0; u < limit; ++u)
    for (const AttributeId a : attributes_of(u)) builder.add(u, a);
  return builder.build(num_nodes);
}

AttributeId AttributeStoreBuilder::intern(AttributeKind kind, std::string_view value) {
  if (value.empty()) throw ArgumentError("empty attribute value");
  auto key = std::make_pair(kind, std::string(value));
  if (const auto it = index_.find(key); it != index_.end()) return it->second;
  const auto id = static_cast<AttributeId>(kinds_.size());
  kinds_.push_back(kind);
  values_.emplace_back(value);
  index_.emplace(std::move(key), id);
  return id;
}

void AttributeStoreBuilder::add(NodeId node, AttributeId attribute) {
  if (attribute >= kinds_.size()) throw ArgumentError("unknown attribute id");
  incidences_.emplace_back(node, attribute);
}

AttributeStore AttributeStoreBuilder::build(std::size_t num_nodes) const {
  // Ids follow (kind, value) order, so equal contents give equal stores
  // whatever the insertion order was.
  std::vector<AttributeId> canon(kinds_.size());
  AttributeStore store;
  for (const auto& [key, id] : index_) {
    canon[id] = static_cast<AttributeId>(store.kinds_.size());
    store.kinds_.push_back(key.first);
    store.values_.push_back(key.second);
  }
  auto pairs = incidences_;
  for (auto& p : pairs) p.second = canon[p.second];
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  store.node_offsets_.assign(num_nodes + 1, 0);
  store.attr_offsets_.assign(kinds_.size() + 1, 0);
  for (const auto& [u, a] : pairs) {
    if (u >= num_nodes) throw ArgumentError("attribute incidence for node outside the graph");
    ++store.node_offsets_[u + 1];
    ++store.attr_offsets_[a + 1];
  }
  for (std::size_t i = 0; i < num_nodes; ++i) store.node_offsets_[i + 1] += store.node_offsets_[i];
  for (std::size_t i = 0; i < kinds_.size(); ++i) store.attr_offsets_[i + 1] += store.attr_offsets_[i];

  store.node_attrs_.reserve(pairs.size());
  store.attr_nodes_.resize(pairs.size());
  std::vector<std::size_t> cursor(store.attr_offsets_.begin(), store.attr_offsets_.end() - 1);
  for (const auto& [u, a] : pairs) {
    store.node_attrs_.push_back(a);
    store.attr_nodes_[cursor[a]++] = u;
  }
  return store;
}

}  // namespace recipnet
