#include "recipnet/features.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

#include "recipnet/error.hpp"
#include "recipnet/hash.hpp"
#include "recipnet/parallel.hpp"

namespace recipnet {

namespace {

constexpr std::size_t kViews = 4;

std::size_t view_index(NeighborView v) { return static_cast<std::size_t>(v); }

double safe_ratio(std::size_t numer, std::size_t denom) {
  return denom == 0 ? 0.0 : static_cast<double>(numer) / static_cast<double>(denom);
}

double jaccard_of(std::size_t common, std::size_t a, std::size_t b) {
  const std::size_t uni = a + b - common;
  return uni == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);
}

double inverse_log(std::size_t degree) {
  return degree <= 1 ? 0.0 : 1.0 / std::log(static_cast<double>(degree));
}

}  // namespace

FeatureLayout::FeatureLayout(bool with_attributes) : with_attributes_(with_attributes) {
  for (const char* side : {"tail", "head"}) {
    for (const char* f : {"in_degree", "out_degree", "out_in_ratio", "acceptance_reciprocity",
                          "request_reciprocity"})
      names_.push_back(std::string(side) + "_" + f);
  }
  for (const char* block : {"cn", "jc"}) {
    for (const auto x : kAllViews)
      for (const auto y : kAllViews)
        names_.push_back(std::string(block) + "_" + std::string(view_code(x)) + std::string(view_code(y)));
  }
  for (const auto x : kAllViews)
    for (const auto y : kAllViews)
      for (const auto z : kAllViews)
        names_.push_back("aa_" + std::string(view_code(x)) + std::string(view_code(y)) +
                         std::string(view_code(z)));
  names_.emplace_back("pa_out_in");
  names_.emplace_back("pa_in_out");
  if (with_attributes_) {
    for (const char* block : {"cna", "jca", "aaa"})
      for (const auto kind : kAllKinds) names_.push_back(std::string(block) + "_" + std::string(to_string(kind)));
  }
  names_.emplace_back("edge_age");

  std::string key = "recipnet-features/v" + std::to_string(kVersion) + "/" +
                    (with_attributes_ ? "attributed" : "structural");
  for (const auto& name : names_) key += "," + name;
  fingerprint_ = to_hex(fnv1a(key));
}

std::size_t FeatureLayout::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  throw ArgumentError("unknown feature name: " + std::string(name));
}

FeatureExtractor::FeatureExtractor(const SnapshotGraph& g, const AttributeStore* attrs)
    : FeatureExtractor(g, attrs, g.snapshot_time()) {}

FeatureExtractor::FeatureExtractor(const SnapshotGraph& g, const AttributeStore* attrs,
                                   SnapshotTime eval_time)
    : graph_(&g), attrs_(attrs), eval_time_(eval_time), layout_(attrs != nullptr) {
  if (eval_time < g.snapshot_time())
    throw ArgumentError("evaluation time precedes the snapshot time");
  const auto n = static_cast<NodeId>(g.num_nodes());
  for (std::size_t z = 0; z < kViews; ++z) {
    degree_[z].resize(n);
    inverse_log_[z].resize(n);
  }
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (auto u = static_cast<NodeId>(begin); u < end; ++u) {
      const auto in = g.in_neighbors(u);
      const auto out = g.out_neighbors(u);
      const std::size_t r = intersection_size(in, out);
      const std::size_t d[kViews] = {in.size(), out.size(), in.size() + out.size() - r, r};
      for (std::size_t z = 0; z < kViews; ++z) {
        degree_[z][u] = static_cast<std::uint32_t>(d[z]);
        inverse_log_[z][u] = inverse_log(d[z]);
      }
    }
  });
}

FeatureExtractor::Views FeatureExtractor::views_of(NodeId u) const {
  Views out;
  for (std::size_t x = 0; x < kViews; ++x) out[x] = graph_->neighbors(u, kAllViews[x]);
  return out;
}

std::array<double, 5> FeatureExtractor::single_node(NodeId u) const {
  if (u >= graph_->num_nodes()) throw ArgumentError("node id out of range");
  const std::size_t in = degree_[view_index(NeighborView::kIn)][u];
  const std::size_t out = degree_[view_index(NeighborView::kOut)][u];
  const std::size_t rec = degree_[view_index(NeighborView::kReciprocal)][u];
  const double ratio = static_cast<double>(out) / static_cast<double>(std::max<std::size_t>(in, 1));
  return {static_cast<double>(in), static_cast<double>(out), ratio, safe_ratio(rec, in),
          safe_ratio(rec, out)};
}

void FeatureExtractor::pair_blocks(const Views& a, const Views& b, std::span<double, 16> cn,
                                   std::span<double, 16> jc, std::span<double, 64> aa) const {
  std::vector<NodeId> common;
  for (std::size_t x = 0; x < kViews; ++x) {
    for (std::size_t y = 0; y < kViews; ++y) {
      const std::size_t xy = x * kViews + y;
      common.clear();
      std::set_intersection(a[x].begin(), a[x].end(), b[y].begin(), b[y].end(),
                            std::back_inserter(common));
      cn[xy] = static_cast<double>(common.size());
      jc[xy] = jaccard_of(common.size(), a[x].size(), b[y].size());
      for (std::size_t z = 0; z < kViews; ++z) {
        double sum = 0.0;
        for (const NodeId w : common) sum += inverse_log_[z][w];
        aa[xy * kViews + z] = sum;
      }
    }
  }
}

std::array<double, 16> FeatureExtractor::common_neighbors(NodeId u, NodeId v) const {
  std::array<double, 16> cn{}, jc{};
  std::array<double, 64> aa{};
  pair_blocks(views_of(u), views_of(v), cn, jc, aa);
  return cn;
}

std::array<double, 16> FeatureExtractor::jaccard(NodeId u, NodeId v) const {
  std::array<double, 16> cn{}, jc{};
  std::array<double, 64> aa{};
  pair_blocks(views_of(u), views_of(v), cn, jc, aa);
  return jc;
}

std::array<double, 64> FeatureExtractor::adamic_adar(NodeId u, NodeId v) const {
  std::array<double, 16> cn{}, jc{};
  std::array<double, 64> aa{};
  pair_blocks(views_of(u), views_of(v), cn, jc, aa);
  return aa;
}

std::array<double, 2> FeatureExtractor::preferential_attachment(NodeId u, NodeId v) const {
  if (u >= graph_->num_nodes() || v >= graph_->num_nodes()) throw ArgumentError("node id out of range");
  const auto& in = degree_[view_index(NeighborView::kIn)];
  const auto& out = degree_[view_index(NeighborView::kOut)];
  return {static_cast<double>(out[u]) * static_cast<double>(in[v]),
          static_cast<double>(in[u]) * static_cast<double>(out[v])};
}

std::array<double, 12> FeatureExtractor::attribute_features(NodeId u, NodeId v) const {
  if (attrs_ == nullptr) throw ArgumentError("attribute features need an attribute store");
  std::array<std::vector<AttributeId>, 4> au, av;
  for (const AttributeId a : attrs_->attributes_of(u)) au[static_cast<std::size_t>(attrs_->kind(a))].push_back(a);
  for (const AttributeId a : attrs_->attributes_of(v)) av[static_cast<std::size_t>(attrs_->kind(a))].push_back(a);
  std::array<double, 12> out{};
  for (std::size_t k = 0; k < 4; ++k) {
    const auto common = sorted_intersection(au[k], av[k]);
    out[k] = static_cast<double>(common.size());
    out[4 + k] = jaccard_of(common.size(), au[k].size(), av[k].size());
    for (const AttributeId a : common) out[8 + k] += inverse_log(attrs_->social_degree(a));
  }
  return out;
}

double FeatureExtractor::edge_age(NodeId u, NodeId v) const {
  const SnapshotTime birth = graph_->edge_birth(u, v);
  if (!graph_->has_edge(v, u)) return static_cast<double>(eval_time_ - birth);
  const SnapshotTime reverse = graph_->edge_birth(v, u);
  if (reverse < birth)
    throw ConsistencyError("edge age requested for an acceptance edge (reverse edge is older)");
  return static_cast<double>(reverse - birth);
}

void FeatureExtractor::extract(NodeId u, NodeId v, std::span<double> row) const {
  if (row.size() != layout_.size()) throw ArgumentError("feature row has the wrong width");
  const auto put = [&](std::size_t offset, const auto& values) {
    std::copy(values.begin(), values.end(), row.begin() + static_cast<std::ptrdiff_t>(offset));
  };
  put(FeatureLayout::kSingleNode, single_node(u));
  put(FeatureLayout::kSingleNode + 5, single_node(v));
  pair_blocks(views_of(u), views_of(v), row.subspan<FeatureLayout::kCommonNeighbors, 16>(),
              row.subspan<FeatureLayout::kJaccard, 16>(), row.subspan<FeatureLayout::kAdamicAdar, 64>());
  put(FeatureLayout::kPreferential, preferential_attachment(u, v));
  if (attrs_ != nullptr) put(FeatureLayout::kAttribute, attribute_features(u, v));
  row[layout_.edge_age_index()] = edge_age(u, v);
}

FeatureMatrix extract_matrix(const FeatureExtractor& extractor, std::span<const Edge> edges) {
  FeatureMatrix m(edges.size(), extractor.layout().size());
  parallel_for(
      edges.size(),
      [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) extractor.extract(edges[i].src, edges[i].dst, m.row(i));
      },
      64);
  return m;
}

}  // namespace recipnet
