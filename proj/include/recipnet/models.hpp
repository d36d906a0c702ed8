#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "recipnet/dataset.hpp"
#include "recipnet/matrix.hpp"

namespace recipnet {

enum class ModelKind : std::uint8_t { kOneClass, kBinary };
std::string_view to_string(ModelKind kind);  // "one_class" | "binary"
ModelKind parse_model_kind(std::string_view token);

struct SolverOptions {
  /// Stop when (primal - dual) ≤ tolerance · max(|primal|, |dual|).
  double tolerance = 1e-6;
  /// Outer iterations; each one refreshes every gradient and updates pairs.
  std::size_t max_iters = 10000;
  bool record_log = false;
  /// Allow the gradient refresh to use worker threads.
  bool parallel = true;
};

struct TrainingLogEntry {
  std::size_t iteration = 0;
  double dual_objective = 0.0;  ///< minimized dual value; non-increasing
  double primal_objective = 0.0;
  double relative_gap = 0.0;
};

struct TrainingInfo {
  std::size_t iterations = 0;
  bool converged = false;  ///< false when max_iters ended training
  double primal_objective = 0.0;
  double dual_objective = 0.0;  ///< minimized dual; primal + dual ≥ 0 is the duality gap
  double relative_gap = 0.0;
  std::vector<TrainingLogEntry> log;
};

/// Linear decision function score(x) = w·x + bias.
///
/// One-class: bias = -ρ and the trained objective is
///   ½‖w‖² − ρ + (1/(νn)) Σ max(0, ρ − w·x_i).
/// Binary: the objective is ½‖w‖² + C Σ max(0, 1 − y_i(w·x_i + b)).
struct LinearModel {
  static constexpr int kFormatVersion = 1;

  ModelKind kind = ModelKind::kOneClass;
  double hyperparameter = 0.0;  ///< ν for one-class, C for binary
  std::vector<double> weights;
  double bias = 0.0;
  std::string layout_fingerprint;
  /// Applied to raw feature rows before scoring.
  Normalizer normalizer;
  TrainingInfo info;

  double rho() const noexcept { return -bias; }
  double score(std::span<const double> x) const;
};

/// Throws ArgumentError on an empty matrix, non-finite values or ν ∉ (0, 1].
LinearModel train_one_class(const FeatureMatrix& x, double nu, const SolverOptions& options = {});

/// Labels must be +1/-1 with both classes present.
LinearModel train_binary(const FeatureMatrix& x, std::span<const int> y, double c,
                         const SolverOptions& options = {});

/// Objective values for given parameters, as minimized by the trainers.
double one_class_objective(const FeatureMatrix& x, std::span<const double> w, double rho, double nu);
double binary_objective(const FeatureMatrix& x, std::span<const int> y, std::span<const double> w, double b,
                        double c);

struct Prediction {
  std::vector<int> labels;  ///< sign of the score, 0 → +1
  std::vector<double> scores;
};

/// Scores rows that are already normalized.
Prediction predict(const LinearModel& model, const FeatureMatrix& x);

/// Applies the model's normalizer first. ConsistencyError when
/// `layout_fingerprint` differs from the model's.
Prediction predict_raw(const LinearModel& model, FeatureMatrix x, std::string_view layout_fingerprint);

struct CVOptions {
  double subsample_fraction = 0.1;
  std::size_t folds = 2;
  std::uint64_t seed = 0;
  SolverOptions solver;
};

struct CVResult {
  ModelKind kind = ModelKind::kOneClass;
  std::vector<double> grid;
  /// Mean validation F1 per grid point; nullopt where a fold was unusable.
  std::vector<std::optional<double>> mean_f1;
  double selected = 0.0;
};

/// Uniform subsample, split into folds, mean validation F1 per grid value.
/// One-class folds train on their positive rows only and validate on every
/// held-out row. The best mean F1 wins; ties go to the smallest value.
CVResult grid_search_cv(const LabeledDataset& data, ModelKind kind, std::span<const double> grid,
                        const CVOptions& options = {});

std::vector<double> default_grid(ModelKind kind);

/// Versioned JSON model file.
void write_model(std::ostream& out, const LinearModel& model);
LinearModel read_model(std::istream& in);
void save_model(const std::string& path, const LinearModel& model);
LinearModel load_model(const std::string& path);

/// CSV with header iteration,dual_objective,primal_objective,relative_gap.
void write_training_log(std::ostream& out, const TrainingInfo& info);

}  // namespace recipnet
