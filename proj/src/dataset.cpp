#include "recipnet/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "recipnet/error.hpp"
#include "recipnet/parallel.hpp"
#include "recipnet/rng.hpp"

namespace recipnet {

std::string_view to_string(SamplingStrategy strategy) {
  return strategy == SamplingStrategy::kRandom ? "random" : "edge_age";
}

SamplingStrategy parse_sampling_strategy(std::string_view token) {
  if (token == "random") return SamplingStrategy::kRandom;
  if (token == "edge_age" || token == "edge-age") return SamplingStrategy::kEdgeAge;
  throw ArgumentError("unknown sampling strategy: " + std::string(token));
}

std::string_view to_string(Normalization mode) {
  switch (mode) {
    case Normalization::kNone: return "none";
    case Normalization::kColumn: return "column";
    case Normalization::kRow: return "row";
    case Normalization::kColumnRow: return "column_row";
  }
  return "?";
}

Normalization parse_normalization(std::string_view token) {
  if (token == "none") return Normalization::kNone;
  if (token == "column") return Normalization::kColumn;
  if (token == "row") return Normalization::kRow;
  if (token == "column_row" || token == "column-row") return Normalization::kColumnRow;
  throw ArgumentError("unknown normalization: " + std::string(token));
}

std::string_view to_string(DatasetRole role) { return role == DatasetRole::kTrain ? "train" : "test"; }

DatasetRole parse_dataset_role(std::string_view token) {
  if (token == "train") return DatasetRole::kTrain;
  if (token == "test") return DatasetRole::kTest;
  throw ArgumentError("unknown dataset role: " + std::string(token));
}

std::size_t LabeledDataset::positives() const noexcept {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> indices) const {
  LabeledDataset out;
  out.matrix = matrix.select_rows(indices);
  out.labels.reserve(indices.size());
  out.edges.reserve(indices.size());
  for (const std::size_t i : indices) {
    out.labels.push_back(labels.at(i));
    out.edges.push_back(edges.at(i));
  }
  out.role = role;
  out.layout_fingerprint = layout_fingerprint;
  out.sampling = sampling;
  out.normalization = normalization;
  return out;
}

namespace {

bool admitted(const NodeMask& mask, NodeId u) { return mask.empty() || (u < mask.size() && mask[u]); }

LabeledDataset assemble(const FeatureExtractor& features, std::vector<Edge> edges, std::vector<int> labels,
                        DatasetRole role) {
  LabeledDataset ds;
  ds.matrix = extract_matrix(features, edges);
  ds.edges = std::move(edges);
  ds.labels = std::move(labels);
  ds.role = role;
  ds.layout_fingerprint = features.layout().fingerprint();
  return ds;
}

}  // namespace

NodeMask attributed_mask(const AttributeStore& attrs, std::size_t num_nodes) {
  NodeMask mask(num_nodes, false);
  for (NodeId u = 0; u < num_nodes; ++u) mask[u] = attrs.attribute_degree(u) > 0;
  return mask;
}

std::vector<Edge> orient_reciprocal_pairs(const SnapshotGraph& g, const NodeMask& mask) {
  std::vector<Edge> out;
  g.for_each_edge([&](NodeId u, NodeId v) {
    if (!admitted(mask, u) || !admitted(mask, v) || !g.has_edge(v, u)) return;
    if (g.classify_request(u, v) == RequestClass::kRequest) out.push_back({u, v});
  });
  return out;
}

std::vector<Edge> parasocial_edges(const SnapshotGraph& g, const NodeMask& mask) {
  std::vector<Edge> out;
  g.for_each_edge([&](NodeId u, NodeId v) {
    if (admitted(mask, u) && admitted(mask, v) && !g.has_edge(v, u)) out.push_back({u, v});
  });
  return out;
}

std::size_t negative_count(std::size_t positives, double alpha, std::size_t available) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ArgumentError("alpha must be a positive finite number");
  const double wanted = std::floor(alpha * static_cast<double>(positives));
  if (wanted >= static_cast<double>(available)) return available;
  return static_cast<std::size_t>(wanted);
}

std::vector<Edge> sample_negatives(const SnapshotGraph& g, std::span<const Edge> parasocial,
                                   const SamplingSpec& spec, std::size_t count) {
  count = std::min(count, parasocial.size());
  std::vector<Edge> pool(parasocial.begin(), parasocial.end());
  std::sort(pool.begin(), pool.end());
  if (spec.strategy == SamplingStrategy::kRandom) {
    Rng rng(derive_seed(spec.seed, "sampling"));
    rng.shuffle(pool);
  } else {
    std::vector<SnapshotTime> birth(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) birth[i] = g.edge_birth(pool[i].src, pool[i].dst);
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Oldest edge = smallest birth; the pool is already in edge-id order.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return birth[a] < birth[b]; });
    std::vector<Edge> sorted(pool.size());
    for (std::size_t i = 0; i < order.size(); ++i) sorted[i] = pool[order[i]];
    pool = std::move(sorted);
  }
  pool.resize(count);
  return pool;
}

LabeledDataset build_training(const FeatureExtractor& features, const SamplingSpec& spec, const NodeMask& mask) {
  const SnapshotGraph& g = features.graph();
  auto positives = orient_reciprocal_pairs(g, mask);
  if (positives.empty()) throw ArgumentError("base snapshot has no reciprocal edges to train on");
  const auto parasocial = parasocial_edges(g, mask);
  const std::size_t count = negative_count(positives.size(), spec.alpha, parasocial.size());
  const auto negatives = sample_negatives(g, parasocial, spec, count);

  std::vector<int> labels(positives.size(), 1);
  labels.resize(positives.size() + negatives.size(), -1);
  positives.insert(positives.end(), negatives.begin(), negatives.end());
  auto ds = assemble(features, std::move(positives), std::move(labels), DatasetRole::kTrain);
  ds.sampling = spec;
  return ds;
}

LabeledDataset build_positive_training(const FeatureExtractor& features, const NodeMask& mask) {
  auto positives = orient_reciprocal_pairs(features.graph(), mask);
  if (positives.empty()) throw ArgumentError("base snapshot has no reciprocal edges to train on");
  std::vector<int> labels(positives.size(), 1);
  return assemble(features, std::move(positives), std::move(labels), DatasetRole::kTrain);
}

LabeledDataset build_test(const FeatureExtractor& features, const SnapshotGraph& final_graph, const NodeMask& mask) {
  const SnapshotGraph& base = features.graph();
  if (final_graph.snapshot_time() < base.snapshot_time())
    throw ArgumentError("final snapshot precedes the base snapshot");
  auto edges = parasocial_edges(base, mask);
  std::vector<int> labels(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto [u, v] = edges[i];
    if (!final_graph.has_edge(u, v))
      throw ConsistencyError("final snapshot lacks base edge (" + std::to_string(u) + "," + std::to_string(v) +
                             "); snapshots must only grow");
    labels[i] = final_graph.has_edge(v, u) ? 1 : -1;
  }
  return assemble(features, std::move(edges), std::move(labels), DatasetRole::kTest);
}

std::size_t negative_overlap(const LabeledDataset& train, const LabeledDataset& test) {
  std::vector<Edge> test_pos;
  for (std::size_t i = 0; i < test.rows(); ++i)
    if (test.labels[i] == 1) test_pos.push_back(test.edges[i]);
  std::sort(test_pos.begin(), test_pos.end());
  std::size_t count = 0;
  for (std::size_t i = 0; i < train.rows(); ++i)
    if (train.labels[i] == -1 && std::binary_search(test_pos.begin(), test_pos.end(), train.edges[i])) ++count;
  return count;
}

Normalizer::Normalizer(Normalization mode, std::vector<double> means, std::vector<double> scales,
                       std::vector<bool> constant)
    : mode_(mode), means_(std::move(means)), scales_(std::move(scales)), constant_(std::move(constant)) {
  if (means_.size() != scales_.size() || means_.size() != constant_.size())
    throw ArgumentError("normalizer statistics have mismatched lengths");
}

Normalizer Normalizer::fit(const FeatureMatrix& train, Normalization mode) {
  Normalizer out;
  out.mode_ = mode;
  if (mode != Normalization::kColumn && mode != Normalization::kColumnRow) return out;
  if (train.rows() == 0) throw ArgumentError("cannot fit column statistics on an empty matrix");
  const std::size_t n = train.rows();
  const std::size_t d = train.cols();
  out.means_.assign(d, 0.0);
  out.scales_.assign(d, 1.0);
  std::vector<char> constant(d, 0);
  parallel_for(
      d,
      [&](std::size_t begin, std::size_t end) {
        std::vector<double> column(n);
        for (std::size_t j = begin; j < end; ++j) {
          bool same = true;
          for (std::size_t i = 0; i < n; ++i) {
            column[i] = train(i, j);
            same = same && column[i] == column[0];
          }
          if (same) {
            out.means_[j] = column[0];
            constant[j] = 1;
            continue;
          }
          const double mean = pairwise_sum(column) / static_cast<double>(n);
          for (double& x : column) x = (x - mean) * (x - mean);
          const double var = pairwise_sum(column) / static_cast<double>(n);
          out.means_[j] = mean;
          out.scales_[j] = std::sqrt(var);
        }
      },
      1);
  out.constant_.assign(constant.begin(), constant.end());
  return out;
}

void Normalizer::apply(FeatureMatrix& m) const {
  const bool column = mode_ == Normalization::kColumn || mode_ == Normalization::kColumnRow;
  const bool row = mode_ == Normalization::kRow || mode_ == Normalization::kColumnRow;
  if (column && m.cols() != means_.size())
    throw ArgumentError("matrix width does not match the normalizer statistics");
  parallel_for(m.rows(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto r = m.row(i);
      if (column) {
        for (std::size_t j = 0; j < r.size(); ++j) r[j] = constant_[j] ? 0.0 : (r[j] - means_[j]) / scales_[j];
      }
      if (row) {
        double sq = 0.0;
        for (const double x : r) sq += x * x;
        if (sq > 0.0) {
          const double norm = std::sqrt(sq);
          for (double& x : r) x /= norm;
        }
      }
    }
  });
}

NormalizedMatrix normalize(const FeatureMatrix& m, Normalization mode) {
  if (m.rows() == 0) throw ArgumentError("cannot normalize an empty matrix");
  auto normalizer = Normalizer::fit(m, mode);
  auto out = normalizer.transform(m);
  return {std::move(out), std::move(normalizer)};
}

DatasetSummary summarize(const LabeledDataset& train, const LabeledDataset& test) {
  DatasetSummary s;
  s.train_reciprocal = train.positives();
  s.sampled_negatives = train.negatives();
  s.train_parasocial = test.rows();
  s.test_reciprocal = test.positives();
  s.test_parasocial = test.negatives();
  s.negative_overlap = negative_overlap(train, test);
  return s;
}

}  // namespace recipnet
