#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "recipnet/dataset.hpp"
#include "recipnet/evaluation.hpp"
#include "recipnet/ingest.hpp"
#include "recipnet/models.hpp"

namespace recipnet {

/// oc_svm: one-class on positives only. svm_random / svm_edge_age: binary
/// SVM with randomly or oldest-first sampled negatives.
enum class ExperimentModel : std::uint8_t { kOneClass, kSvmRandom, kSvmEdgeAge };
std::string_view to_string(ExperimentModel model);
ExperimentModel parse_experiment_model(std::string_view token);

struct ExperimentConfig {
  std::vector<ExperimentModel> models{ExperimentModel::kOneClass, ExperimentModel::kSvmRandom,
                                      ExperimentModel::kSvmEdgeAge};
  std::vector<double> alphas{0.25, 0.5, 1.0, 1.5};
  /// Snapshot times; defaults: base at index ⌊2(T−1)/3⌋, final = last.
  std::optional<SnapshotTime> base_time;
  std::optional<SnapshotTime> final_time;
  Normalization normalization = Normalization::kRow;
  /// Use the attribute columns when attributes are available.
  bool use_attributes = true;
  /// Draw examples only from nodes holding an attribute (features still use the whole graph).
  bool attributed_only = false;
  std::vector<double> c_grid = default_grid(ModelKind::kBinary);
  std::vector<double> nu_grid = default_grid(ModelKind::kOneClass);
  /// Skip cross-validation and use these values.
  std::optional<double> fixed_c;
  std::optional<double> fixed_nu;
  double subsample_fraction = 0.1;
  std::size_t folds = 2;
  SolverOptions solver;
  std::uint64_t seed = 1;
  bool write_datasets = true;
  bool write_sparse = false;
};

struct ExperimentRow {
  ExperimentModel model = ExperimentModel::kOneClass;
  double alpha = 0.0;
  double hyperparameter = 0.0;
  std::optional<CVResult> cv;
  EvalReport report;
  std::size_t train_positives = 0;
  std::size_t train_negatives = 0;
  std::size_t negative_overlap = 0;
  TrainingInfo training;
};

struct ExperimentResult {
  SnapshotTime base_time = 0;
  SnapshotTime final_time = 0;
  std::string layout_fingerprint;
  DatasetSummary summary;  ///< sampled_negatives/overlap left 0; per row instead
  std::vector<ExperimentRow> rows;
  EvalReport always_negative;
  /// Stored only for writing.
  LabeledDataset test;
  std::vector<LabeledDataset> training_sets;  ///< parallel to rows
  std::vector<LinearModel> models;            ///< parallel to rows
};

/// Runs every (model, α) point; one-class points train once and repeat the
/// report for each α.
ExperimentResult run_experiment(const GraphSeries& series, const AttributeStore* attributes,
                                const ExperimentConfig& config);

/// Writes manifest.json, datasets/, models/ and reports/ under `dir`.
/// `inputs` maps input names to content digests for the manifest.
void write_experiment(const std::filesystem::path& dir, const ExperimentConfig& config,
                      const ExperimentResult& result, const std::map<std::string, std::string>& inputs);

/// FNV-1a digest of a file's bytes, as 16 hex digits.
std::string digest_file(const std::filesystem::path& path);

}  // namespace recipnet
