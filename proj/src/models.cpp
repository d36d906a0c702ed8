#include "recipnet/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "recipnet/error.hpp"
#include "recipnet/evaluation.hpp"
#include "recipnet/format.hpp"
#include "recipnet/parallel.hpp"
#include "recipnet/rng.hpp"

namespace recipnet {

std::string_view to_string(ModelKind kind) { return kind == ModelKind::kOneClass ? "one_class" : "binary"; }

ModelKind parse_model_kind(std::string_view token) {
  if (token == "one_class" || token == "oc_svm") return ModelKind::kOneClass;
  if (token == "binary" || token == "svm") return ModelKind::kBinary;
  throw ArgumentError("unknown model kind: " + std::string(token));
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

void check_finite(const FeatureMatrix& x) {
  if (x.rows() == 0) throw ArgumentError("training matrix is empty");
  for (const double v : x.values())
    if (!std::isfinite(v)) throw ArgumentError("training matrix contains a non-finite value");
}

/// ⌈t⌉ that ignores rounding noise in a product such as ν·n.
std::size_t ceil_count(double t) {
  const double r = std::round(t);
  if (std::abs(t - r) <= 1e-9 * std::max(1.0, t)) return static_cast<std::size_t>(r);
  return static_cast<std::size_t>(std::ceil(t));
}

/// ρ minimizing −ρ + (1/(νn)) Σ max(0, ρ − s_i): the ⌈νn⌉-th smallest score.
double optimal_rho(std::vector<double> scores, double nu) {
  const std::size_t n = scores.size();
  std::size_t k = ceil_count(nu * static_cast<double>(n));
  k = std::clamp<std::size_t>(k, 1, n);
  std::nth_element(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(k - 1), scores.end());
  return scores[k - 1];
}

/// b minimizing Σ max(0, 1 − y_i(s_i + b)), the midpoint of the optimal interval.
double optimal_bias(std::span<const double> scores, std::span<const int> y) {
  std::vector<double> breaks(scores.size());
  std::size_t positives = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    breaks[i] = static_cast<double>(y[i]) - scores[i];
    if (y[i] == 1) ++positives;
  }
  // The slope starts at −#positives and rises by one at every breakpoint.
  std::sort(breaks.begin(), breaks.end());
  return 0.5 * (breaks[positives - 1] + breaks[positives]);
}

double one_class_primal(std::span<const double> scores, double wnorm2, double rho, double nu) {
  double loss = 0.0;
  for (const double s : scores) loss += std::max(0.0, rho - s);
  return 0.5 * wnorm2 - rho + loss / (nu * static_cast<double>(scores.size()));
}

double binary_primal(std::span<const double> scores, std::span<const int> y, double wnorm2, double b, double c) {
  double loss = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) loss += std::max(0.0, 1.0 - y[i] * (scores[i] + b));
  return 0.5 * wnorm2 + c * loss;
}

/// min ½αᵀQα + pᵀα  s.t.  yᵀα = const, 0 ≤ α ≤ U,  Q_ij = y_i y_j x_i·x_j.
///
constexpr double kAbsoluteGap = 1e-12;

/// Each outer iteration refreshes every gradient, then updates pairs drawn
/// from the most violating candidates, each pair solved exactly with fresh
/// gradients.
class DualSolver {
 public:
  DualSolver(const FeatureMatrix& x, std::vector<double> y, std::vector<double> p, double upper,
             std::vector<double> alpha)
      : x_(x), y_(std::move(y)), p_(std::move(p)), upper_(upper), alpha_(std::move(alpha)),
        w_(x.cols(), 0.0), qd_(x.rows()) {
    for (std::size_t i = 0; i < x_.rows(); ++i) {
      qd_[i] = dot(x_.row(i), x_.row(i));
      if (alpha_[i] != 0.0) axpy(alpha_[i] * y_[i], i);
    }
  }

  const std::vector<double>& w() const noexcept { return w_; }
  const std::vector<double>& alpha() const noexcept { return alpha_; }

  /// ½‖w‖² + pᵀα
  double dual_value() const {
    double s = 0.5 * dot(w_, w_);
    for (std::size_t i = 0; i < alpha_.size(); ++i) s += p_[i] * alpha_[i];
    return s;
  }

  std::vector<double> scores(bool parallel) const {
    std::vector<double> s(x_.rows());
    const auto body = [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) s[i] = dot(w_, x_.row(i));
    };
    if (parallel) {
      parallel_for(s.size(), body, 512);
    } else {
      body(0, s.size());
    }
    return s;
  }

  /// `report(scores, dual)` maps w·x_i and the dual value to the caller's
  /// (primal, minimized dual) pair.
  template <class Report>
  TrainingInfo run(const SolverOptions& options, Report&& report) {
    TrainingInfo info;
    const std::size_t n = x_.rows();
    std::vector<std::size_t> up, low;
    std::vector<double> grad(n);
    for (std::size_t iter = 0;; ++iter) {
      const auto s = scores(options.parallel);
      const auto [primal, dual] = report(s, dual_value());
      const double scale = std::max({std::abs(primal), std::abs(dual), 1e-300});
      const double gap = std::max(0.0, primal + dual) / scale;
      info.iterations = iter;
      info.primal_objective = primal;
      info.dual_objective = dual;
      info.relative_gap = gap;
      if (options.record_log) info.log.push_back({iter, dual, primal, gap});
      // The absolute floor covers optima where both objectives vanish.
      if (primal + dual <= std::max(options.tolerance * scale, kAbsoluteGap)) {
        info.converged = true;
        break;
      }
      if (iter >= options.max_iters) break;

      up.clear();
      low.clear();
      for (std::size_t i = 0; i < n; ++i) {
        grad[i] = y_[i] * s[i] + p_[i];
        const bool below_upper = alpha_[i] < upper_;
        const bool above_zero = alpha_[i] > 0.0;
        if (y_[i] > 0 ? below_upper : above_zero) up.push_back(i);
        if (y_[i] > 0 ? above_zero : below_upper) low.push_back(i);
      }
      if (up.empty() || low.empty()) {
        info.converged = true;
        break;
      }
      const auto violation = [&](std::size_t i) { return -y_[i] * grad[i]; };
      const std::size_t k = std::max<std::size_t>(1, std::min(up.size(), low.size()) / 10);
      std::partial_sort(up.begin(), up.begin() + static_cast<std::ptrdiff_t>(k), up.end(),
                        [&](std::size_t a, std::size_t b) {
                          const double va = violation(a), vb = violation(b);
                          return va != vb ? va > vb : a < b;
                        });
      std::partial_sort(low.begin(), low.begin() + static_cast<std::ptrdiff_t>(k), low.end(),
                        [&](std::size_t a, std::size_t b) {
                          const double va = violation(a), vb = violation(b);
                          return va != vb ? va < vb : a < b;
                        });
      bool moved = false;
      for (std::size_t t = 0; t < k; ++t) moved = update_pair(up[t], low[t]) || moved;
      if (!moved) {
        // No pair can make progress in floating point; the gap is as small as it gets.
        info.converged = primal + dual <= std::max(options.tolerance * scale, kAbsoluteGap);
        break;
      }
    }
    return info;
  }

 private:
  void axpy(double a, std::size_t i) {
    const auto xi = x_.row(i);
    for (std::size_t k = 0; k < w_.size(); ++k) w_[k] += a * xi[k];
  }

  double gradient(std::size_t i) const { return y_[i] * dot(w_, x_.row(i)) + p_[i]; }

  bool update_pair(std::size_t i, std::size_t j) {
    if (i == j) return false;
    const double gi = gradient(i);
    const double gj = gradient(j);
    if (-y_[i] * gi <= -y_[j] * gj) return false;
    constexpr double kTau = 1e-12;
    const double qij = y_[i] * y_[j] * dot(x_.row(i), x_.row(j));
    const double old_i = alpha_[i];
    const double old_j = alpha_[j];
    double& ai = alpha_[i];
    double& aj = alpha_[j];
    const double c = upper_;
    if (y_[i] != y_[j]) {
      double quad = qd_[i] + qd_[j] + 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-gi - gj) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0.0) {
        if (aj < 0.0) {
          aj = 0.0;
          ai = diff;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = -diff;
      }
      if (diff > 0.0) {
        if (ai > c) {
          ai = c;
          aj = c - diff;
        }
      } else if (aj > c) {
        aj = c;
        ai = c + diff;
      }
    } else {
      double quad = qd_[i] + qd_[j] - 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (gi - gj) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > c) {
        if (ai > c) {
          ai = c;
          aj = sum - c;
        }
      } else if (aj < 0.0) {
        aj = 0.0;
        ai = sum;
      }
      if (sum > c) {
        if (aj > c) {
          aj = c;
          ai = sum - c;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = sum;
      }
    }
    const double di = ai - old_i;
    const double dj = aj - old_j;
    if (di == 0.0 && dj == 0.0) return false;
    axpy(di * y_[i], i);
    axpy(dj * y_[j], j);
    return true;
  }

  const FeatureMatrix& x_;
  std::vector<double> y_;
  std::vector<double> p_;
  double upper_;
  std::vector<double> alpha_;
  std::vector<double> w_;
  std::vector<double> qd_;
};

void check_model_finite(const LinearModel& m) {
  if (!std::isfinite(m.bias)) throw NumericalError("training produced a non-finite offset");
  for (const double v : m.weights)
    if (!std::isfinite(v)) throw NumericalError("training produced non-finite weights");
}

}  // namespace

double LinearModel::score(std::span<const double> x) const {
  if (x.size() != weights.size()) throw ArgumentError("feature row width does not match the model");
  return dot(weights, x) + bias;
}

LinearModel train_one_class(const FeatureMatrix& x, double nu, const SolverOptions& options) {
  check_finite(x);
  if (!(nu > 0.0 && nu <= 1.0)) throw ArgumentError("nu must lie in (0, 1]");
  const std::size_t n = x.rows();
  const double total = nu * static_cast<double>(n);  // Σα in the scaled dual, α ∈ [0, 1]
  std::vector<double> alpha(n, 0.0);
  const auto whole = std::min(n, static_cast<std::size_t>(std::floor(total)));
  std::fill_n(alpha.begin(), whole, 1.0);
  if (whole < n) alpha[whole] = total - static_cast<double>(whole);

  DualSolver solver(x, std::vector<double>(n, 1.0), std::vector<double>(n, 0.0), 1.0, std::move(alpha));
  const double inv = 1.0 / total;
  const auto report = [&](std::span<const double> lib_scores, double lib_dual) {
    // Unscaled weights are w/(νn).
    std::vector<double> s(lib_scores.begin(), lib_scores.end());
    for (double& v : s) v *= inv;
    const double dual = lib_dual * inv * inv;  // ½‖w‖²
    const double rho = optimal_rho(s, nu);
    return std::pair{one_class_primal(s, 2.0 * dual, rho, nu), dual};
  };
  auto info = solver.run(options, report);

  LinearModel model;
  model.kind = ModelKind::kOneClass;
  model.hyperparameter = nu;
  model.weights = solver.w();
  for (double& v : model.weights) v *= inv;
  // ρ from the same dot products used at prediction, so that fewer than
  // ⌈νn⌉ training rows score strictly below zero.
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = dot(model.weights, x.row(i));
  model.bias = -optimal_rho(s, nu);
  model.info = std::move(info);
  check_model_finite(model);
  return model;
}

LinearModel train_binary(const FeatureMatrix& x, std::span<const int> y, double c, const SolverOptions& options) {
  check_finite(x);
  if (y.size() != x.rows()) throw ArgumentError("label count does not match the matrix rows");
  if (!(c > 0.0) || !std::isfinite(c)) throw ArgumentError("C must be a positive finite number");
  std::size_t pos = 0, neg = 0;
  for (const int label : y) {
    if (label == 1) {
      ++pos;
    } else if (label == -1) {
      ++neg;
    } else {
      throw ArgumentError("labels must be +1 or -1");
    }
  }
  if (pos == 0 || neg == 0)
    throw ArgumentError("binary training needs both classes; use the one-class trainer for positive-only data");

  const std::size_t n = x.rows();
  std::vector<double> yd(y.begin(), y.end());
  DualSolver solver(x, yd, std::vector<double>(n, -1.0), c, std::vector<double>(n, 0.0));
  const auto report = [&](std::span<const double> s, double lib_dual) {
    const double wnorm2 = dot(solver.w(), solver.w());
    const double b = optimal_bias(s, y);
    return std::pair{binary_primal(s, y, wnorm2, b, c), lib_dual};
  };
  auto info = solver.run(options, report);

  LinearModel model;
  model.kind = ModelKind::kBinary;
  model.hyperparameter = c;
  model.weights = solver.w();
  model.bias = optimal_bias(solver.scores(options.parallel), y);
  model.info = std::move(info);
  check_model_finite(model);
  return model;
}

double one_class_objective(const FeatureMatrix& x, std::span<const double> w, double rho, double nu) {
  std::vector<double> s(x.rows());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = dot(w, x.row(i));
  return one_class_primal(s, dot(w, w), rho, nu);
}

double binary_objective(const FeatureMatrix& x, std::span<const int> y, std::span<const double> w, double b,
                        double c) {
  std::vector<double> s(x.rows());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = dot(w, x.row(i));
  return binary_primal(s, y, dot(w, w), b, c);
}

Prediction predict(const LinearModel& model, const FeatureMatrix& x) {
  if (x.rows() > 0 && x.cols() != model.weights.size())
    throw ArgumentError("feature width does not match the model");
  Prediction out;
  out.scores.resize(x.rows());
  out.labels.resize(x.rows());
  parallel_for(x.rows(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      out.scores[i] = model.score(x.row(i));
      out.labels[i] = out.scores[i] >= 0.0 ? 1 : -1;
    }
  });
  return out;
}

Prediction predict_raw(const LinearModel& model, FeatureMatrix x, std::string_view layout_fingerprint) {
  if (!model.layout_fingerprint.empty() && model.layout_fingerprint != layout_fingerprint)
    throw ConsistencyError("feature layout " + std::string(layout_fingerprint) + " does not match the model's " +
                           model.layout_fingerprint);
  model.normalizer.apply(x);
  return predict(model, x);
}

std::vector<double> default_grid(ModelKind kind) {
  if (kind == ModelKind::kOneClass) return {0.05, 0.1, 0.2, 0.3, 0.5};
  return {std::ldexp(1.0, -5), std::ldexp(1.0, -3), std::ldexp(1.0, -1),
          std::ldexp(1.0, 1),  std::ldexp(1.0, 3),  std::ldexp(1.0, 5)};
}

CVResult grid_search_cv(const LabeledDataset& data, ModelKind kind, std::span<const double> grid,
                        const CVOptions& options) {
  if (grid.empty()) throw ArgumentError("hyperparameter grid is empty");
  if (options.folds < 2) throw ArgumentError("cross-validation needs at least two folds");
  if (!(options.subsample_fraction > 0.0 && options.subsample_fraction <= 1.0))
    throw ArgumentError("subsample fraction must lie in (0, 1]");
  const std::size_t n = data.rows();
  if (n == 0) throw ArgumentError("cross-validation dataset is empty");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(options.seed, "cv"));
  rng.shuffle(order);
  std::size_t m = ceil_count(options.subsample_fraction * static_cast<double>(n));
  m = std::min(n, std::max(m, 2 * options.folds));
  order.resize(m);

  std::vector<std::vector<std::size_t>> fold_rows(options.folds);
  for (std::size_t k = 0; k < m; ++k) fold_rows[k % options.folds].push_back(order[k]);

  const std::size_t tasks = grid.size() * options.folds;
  std::vector<std::optional<double>> f1(tasks);
  SolverOptions solver = options.solver;
  solver.parallel = false;
  solver.record_log = false;
  parallel_for(
      tasks,
      [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
          const double value = grid[t / options.folds];
          const std::size_t fold = t % options.folds;
          std::vector<std::size_t> train_rows;
          for (std::size_t f = 0; f < options.folds; ++f) {
            if (f == fold) continue;
            for (const std::size_t r : fold_rows[f])
              if (kind == ModelKind::kBinary || data.labels[r] == 1) train_rows.push_back(r);
          }
          std::sort(train_rows.begin(), train_rows.end());
          const auto& valid_rows = fold_rows[fold];
          std::vector<int> truth;
          for (const std::size_t r : valid_rows) truth.push_back(data.labels[r]);
          if (std::count(truth.begin(), truth.end(), 1) == 0 || train_rows.empty()) continue;
          std::vector<int> train_y;
          for (const std::size_t r : train_rows) train_y.push_back(data.labels[r]);
          if (kind == ModelKind::kBinary &&
              (std::count(train_y.begin(), train_y.end(), 1) == 0 ||
               std::count(train_y.begin(), train_y.end(), -1) == 0))
            continue;
          const auto x = data.matrix.select_rows(train_rows);
          const LinearModel model =
              kind == ModelKind::kOneClass ? train_one_class(x, value, solver) : train_binary(x, train_y, value, solver);
          const auto pred = predict(model, data.matrix.select_rows(valid_rows));
          f1[t] = evaluate(pred.labels, truth).f1;
        }
      },
      1);

  CVResult result;
  result.kind = kind;
  result.grid.assign(grid.begin(), grid.end());
  std::optional<std::size_t> best;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::optional<double> mean = 0.0;
    for (std::size_t f = 0; f < options.folds; ++f) {
      const auto& v = f1[g * options.folds + f];
      if (!v) {
        mean.reset();
        break;
      }
      *mean += *v;
    }
    if (mean) *mean /= static_cast<double>(options.folds);
    result.mean_f1.push_back(mean);
    if (!mean) continue;
    if (!best || *mean > *result.mean_f1[*best] ||
        (*mean == *result.mean_f1[*best] && grid[g] < grid[*best]))
      best = g;
  }
  if (!best) throw ArgumentError("cross-validation found no usable grid point (folds lack a class)");
  result.selected = grid[*best];
  return result;
}

void write_model(std::ostream& out, const LinearModel& model) {
  nlohmann::ordered_json j;
  j["format"] = "recipnet-model";
  j["version"] = LinearModel::kFormatVersion;
  j["kind"] = std::string(to_string(model.kind));
  j["hyperparameters"] = {{model.kind == ModelKind::kOneClass ? "nu" : "C", model.hyperparameter}};
  j["layout_fingerprint"] = model.layout_fingerprint;
  j["weights"] = model.weights;
  j["bias"] = model.bias;
  if (model.kind == ModelKind::kOneClass) j["rho"] = model.rho();
  nlohmann::ordered_json norm;
  norm["mode"] = std::string(to_string(model.normalizer.mode()));
  norm["means"] = model.normalizer.means();
  norm["scales"] = model.normalizer.scales();
  std::vector<std::size_t> constant;
  for (std::size_t k = 0; k < model.normalizer.constant_columns().size(); ++k)
    if (model.normalizer.constant_columns()[k]) constant.push_back(k);
  norm["constant_columns"] = constant;
  j["normalization"] = norm;
  j["training"] = {{"iterations", model.info.iterations},
                   {"converged", model.info.converged},
                   {"primal_objective", model.info.primal_objective},
                   {"dual_objective", model.info.dual_objective},
                   {"relative_gap", model.info.relative_gap}};
  out << j.dump(2) << '\n';
}

LinearModel read_model(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model file: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "recipnet-model") throw ParseError("not a model file");
    const int version = j.at("version").get<int>();
    if (version != LinearModel::kFormatVersion)
      throw ParseError("unsupported model format version " + std::to_string(version));
    LinearModel m;
    m.kind = parse_model_kind(j.at("kind").get<std::string>());
    m.hyperparameter = j.at("hyperparameters").at(m.kind == ModelKind::kOneClass ? "nu" : "C").get<double>();
    m.layout_fingerprint = j.at("layout_fingerprint").get<std::string>();
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    const auto& norm = j.at("normalization");
    auto means = norm.at("means").get<std::vector<double>>();
    auto scales = norm.at("scales").get<std::vector<double>>();
    std::vector<bool> constant(means.size(), false);
    for (const auto k : norm.at("constant_columns").get<std::vector<std::size_t>>()) {
      if (k >= constant.size()) throw ParseError("model file: constant column index out of range");
      constant[k] = true;
    }
    m.normalizer = Normalizer(parse_normalization(norm.at("mode").get<std::string>()), std::move(means),
                              std::move(scales), std::move(constant));
    const auto& t = j.at("training");
    m.info.iterations = t.at("iterations").get<std::size_t>();
    m.info.converged = t.at("converged").get<bool>();
    m.info.primal_objective = t.at("primal_objective").get<double>();
    m.info.dual_objective = t.at("dual_objective").get<double>();
    m.info.relative_gap = t.at("relative_gap").get<double>();
    check_model_finite(m);
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model file: ") + e.what());
  } catch (const NumericalError& e) {
    throw ParseError(std::string("model file: ") + e.what());
  }
}

void save_model(const std::string& path, const LinearModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write " + path);
  write_model(out, model);
}

LinearModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open " + path);
  return read_model(in);
}

void write_training_log(std::ostream& out, const TrainingInfo& info) {
  out << "iteration,dual_objective,primal_objective,relative_gap\n";
  for (const auto& e : info.log)
    out << e.iteration << ',' << format_double(e.dual_objective) << ',' << format_double(e.primal_objective) << ','
        << format_double(e.relative_gap) << '\n';
}

}  // namespace recipnet
