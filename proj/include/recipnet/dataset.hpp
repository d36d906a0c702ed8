#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "recipnet/features.hpp"
#include "recipnet/graph.hpp"
#include "recipnet/matrix.hpp"

namespace recipnet {

enum class SamplingStrategy : std::uint8_t { kRandom, kEdgeAge };
std::string_view to_string(SamplingStrategy strategy);
SamplingStrategy parse_sampling_strategy(std::string_view token);  // "random" | "edge_age"

/// How training negatives are drawn from the parasocial edges.
struct SamplingSpec {
  SamplingStrategy strategy = SamplingStrategy::kRandom;
  double alpha = 1.0;  ///< negatives = min(floor(alpha * P), #parasocial)
  std::uint64_t seed = 0;
};

enum class Normalization : std::uint8_t { kNone, kColumn, kRow, kColumnRow };
std::string_view to_string(Normalization mode);
Normalization parse_normalization(std::string_view token);  // none|column|row|column_row

enum class DatasetRole : std::uint8_t { kTrain, kTest };
std::string_view to_string(DatasetRole role);
DatasetRole parse_dataset_role(std::string_view token);

struct LabeledDataset {
  FeatureMatrix matrix;
  std::vector<int> labels;  ///< +1 or -1 per row
  std::vector<Edge> edges;
  DatasetRole role = DatasetRole::kTrain;
  std::string layout_fingerprint;
  std::optional<SamplingSpec> sampling;  ///< set for training sets with negatives
  Normalization normalization = Normalization::kNone;

  std::size_t rows() const noexcept { return labels.size(); }
  std::size_t positives() const noexcept;
  std::size_t negatives() const noexcept { return rows() - positives(); }
  /// Rows picked by index, keeping provenance.
  LabeledDataset subset(std::span<const std::size_t> indices) const;
};

/// Nodes allowed to appear in a dataset. An empty mask admits every node.
using NodeMask = std::vector<bool>;

/// Nodes holding at least one attribute.
NodeMask attributed_mask(const AttributeStore& attrs, std::size_t num_nodes);

/// The request direction of every mutual pair, sorted by (src, dst).
std::vector<Edge> orient_reciprocal_pairs(const SnapshotGraph& g, const NodeMask& mask = {});

/// Every edge whose reverse is absent, sorted by (src, dst).
std::vector<Edge> parasocial_edges(const SnapshotGraph& g, const NodeMask& mask = {});

/// Number of negatives drawn for P positives out of `available` candidates.
std::size_t negative_count(std::size_t positives, double alpha, std::size_t available);

/// Training negatives. Random: a seeded permutation prefix, so samples for a
/// smaller alpha are nested in those for a larger one. Edge age: oldest first,
/// ties by (src, dst).
std::vector<Edge> sample_negatives(const SnapshotGraph& g, std::span<const Edge> parasocial,
                                   const SamplingSpec& spec, std::size_t count);

/// Positives are the oriented reciprocal edges of `features.graph()`;
/// negatives are sampled parasocial edges. Positive rows come first.
LabeledDataset build_training(const FeatureExtractor& features, const SamplingSpec& spec,
                              const NodeMask& mask = {});

/// Positives only (for the one-class trainer).
LabeledDataset build_positive_training(const FeatureExtractor& features, const NodeMask& mask = {});

/// One row per parasocial edge of `features.graph()`, labelled +1 iff the
/// reverse edge exists in `final_graph`. ConsistencyError when a base edge is
/// missing from the final snapshot.
LabeledDataset build_test(const FeatureExtractor& features, const SnapshotGraph& final_graph,
                          const NodeMask& mask = {});

/// Sampled training negatives that are positives of the test set.
std::size_t negative_overlap(const LabeledDataset& train, const LabeledDataset& test);

/// Column statistics fit on training rows and re-applied to any matrix.
///
/// Column mode: z-score with the population standard deviation; columns that
/// are constant on the training rows map to 0 and are flagged. Row mode:
/// unit L2 norm, all-zero rows stay zero. Column-row: column, then row.
class Normalizer {
 public:
  Normalizer() = default;
  static Normalizer fit(const FeatureMatrix& train, Normalization mode);
  /// Rebuild from stored statistics.
  Normalizer(Normalization mode, std::vector<double> means, std::vector<double> scales,
             std::vector<bool> constant);

  Normalization mode() const noexcept { return mode_; }
  const std::vector<double>& means() const noexcept { return means_; }
  const std::vector<double>& scales() const noexcept { return scales_; }
  const std::vector<bool>& constant_columns() const noexcept { return constant_; }

  void apply(FeatureMatrix& m) const;
  FeatureMatrix transform(FeatureMatrix m) const {
    apply(m);
    return m;
  }

 private:
  Normalization mode_ = Normalization::kNone;
  std::vector<double> means_;
  std::vector<double> scales_;
  std::vector<bool> constant_;
};

/// Fit on `m` and apply to it.
struct NormalizedMatrix {
  FeatureMatrix matrix;
  Normalizer normalizer;
};
NormalizedMatrix normalize(const FeatureMatrix& m, Normalization mode);

/// Dataset sizes in the training/test table layout. Training parasocial counts
/// the whole parasocial population of the base snapshot (the test rows), not
/// only the sampled negatives.
struct DatasetSummary {
  std::size_t train_reciprocal = 0;
  std::size_t train_parasocial = 0;
  std::size_t sampled_negatives = 0;
  std::size_t test_reciprocal = 0;
  std::size_t test_parasocial = 0;
  std::size_t negative_overlap = 0;
};
DatasetSummary summarize(const LabeledDataset& train, const LabeledDataset& test);

}  // namespace recipnet
