#include "recipnet/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "recipnet/error.hpp"
#include "recipnet/format.hpp"
#include "recipnet/hash.hpp"
#include "recipnet/parallel.hpp"
#include "recipnet/rng.hpp"
#include "recipnet/tables.hpp"
#include "recipnet/version.hpp"

namespace recipnet {

std::string_view to_string(ExperimentModel model) {
  switch (model) {
    case ExperimentModel::kOneClass: return "oc_svm";
    case ExperimentModel::kSvmRandom: return "svm_random";
    case ExperimentModel::kSvmEdgeAge: return "svm_edge_age";
  }
  return "?";
}

ExperimentModel parse_experiment_model(std::string_view token) {
  if (token == "oc_svm") return ExperimentModel::kOneClass;
  if (token == "svm_random") return ExperimentModel::kSvmRandom;
  if (token == "svm_edge_age") return ExperimentModel::kSvmEdgeAge;
  throw ArgumentError("unknown experiment model: " + std::string(token));
}

namespace {

using Json = nlohmann::ordered_json;

/// Errors from a stage are re-raised with the stage name in front.
template <class F>
auto stage(const std::string& name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ArgumentError& e) {
    throw ArgumentError(name + ": " + e.what());
  } catch (const ConsistencyError& e) {
    throw ConsistencyError(name + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(name + ": " + e.what());
  } catch (const ParseError& e) {
    throw ParseError(name + ": " + e.what());
  }
}

struct Point {
  ExperimentModel model;
  double alpha;
};

std::size_t resolve_index(const GraphSeries& series, const std::optional<SnapshotTime>& time, std::size_t fallback) {
  return time ? series.index_of(*time) : fallback;
}

std::string alpha_token(double alpha) { return format_double(alpha); }

std::string point_stem(ExperimentModel model, double alpha) {
  if (model == ExperimentModel::kOneClass) return std::string(to_string(model));
  return std::string(to_string(model)) + "_a" + alpha_token(alpha);
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json report_json(const EvalReport& r) {
  return Json{{"tp", r.tp},
              {"fp", r.fp},
              {"tn", r.tn},
              {"fn", r.fn},
              {"precision", optional_json(r.precision)},
              {"recall", optional_json(r.recall)},
              {"f1", r.f1},
              {"accuracy", r.accuracy}};
}

Json config_json(const ExperimentConfig& c) {
  Json models = Json::array();
  for (const auto m : c.models) models.push_back(std::string(to_string(m)));
  return Json{{"models", models},
              {"alphas", c.alphas},
              {"base_time", c.base_time ? Json(*c.base_time) : Json(nullptr)},
              {"final_time", c.final_time ? Json(*c.final_time) : Json(nullptr)},
              {"normalization", std::string(to_string(c.normalization))},
              {"use_attributes", c.use_attributes},
              {"attributed_only", c.attributed_only},
              {"c_grid", c.c_grid},
              {"nu_grid", c.nu_grid},
              {"fixed_c", optional_json(c.fixed_c)},
              {"fixed_nu", optional_json(c.fixed_nu)},
              {"subsample_fraction", c.subsample_fraction},
              {"folds", c.folds},
              {"tolerance", c.solver.tolerance},
              {"max_iters", c.solver.max_iters},
              {"seed", c.seed}};
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write " + path.string());
  return out;
}

}  // namespace

ExperimentResult run_experiment(const GraphSeries& series, const AttributeStore* attributes,
                                const ExperimentConfig& config) {
  if (series.num_snapshots() < 2) throw ArgumentError("experiment needs at least two snapshots");
  if (config.models.empty()) throw ArgumentError("experiment lists no models");
  if (config.alphas.empty()) throw ArgumentError("experiment lists no alpha values");
  for (const double a : config.alphas)
    if (!(a > 0.0)) throw ArgumentError("alpha values must be positive");
  const std::size_t last = series.num_snapshots() - 1;
  const std::size_t bi = resolve_index(series, config.base_time, (2 * last) / 3);
  const std::size_t fi = resolve_index(series, config.final_time, last);
  if (bi >= fi) throw ArgumentError("base snapshot must precede the final snapshot");

  ExperimentResult result;
  const SnapshotGraph base = series.snapshot(bi);
  const SnapshotGraph final_graph = series.snapshot(fi);
  result.base_time = base.snapshot_time();
  result.final_time = final_graph.snapshot_time();

  std::optional<AttributeStore> base_attrs;
  if (attributes) base_attrs = attributes->restricted_to(base.num_nodes());
  if (config.attributed_only && !base_attrs) throw ArgumentError("attributed_only needs an attribute store");
  const AttributeStore* feature_attrs = config.use_attributes && base_attrs ? &*base_attrs : nullptr;
  const FeatureExtractor extractor(base, feature_attrs);
  result.layout_fingerprint = extractor.layout().fingerprint();
  const NodeMask mask = config.attributed_only ? attributed_mask(*base_attrs, base.num_nodes()) : NodeMask{};

  const auto positives = orient_reciprocal_pairs(base, mask);
  if (positives.empty()) throw ArgumentError("base snapshot has no reciprocal edges to train on");
  result.test = stage("build test set", [&] { return build_test(extractor, final_graph, mask); });
  const FeatureMatrix positive_matrix = stage("extract features", [&] { return extract_matrix(extractor, positives); });
  const auto& parasocial = result.test.edges;
  result.summary.train_reciprocal = positives.size();
  result.summary.train_parasocial = parasocial.size();
  result.summary.test_reciprocal = result.test.positives();
  result.summary.test_parasocial = result.test.negatives();
  result.always_negative = evaluate(std::vector<int>(result.test.rows(), -1), result.test.labels);

  const auto training_set = [&](const std::vector<Edge>& negatives, std::optional<SamplingSpec> spec) {
    LabeledDataset ds;
    ds.role = DatasetRole::kTrain;
    ds.layout_fingerprint = result.layout_fingerprint;
    ds.sampling = spec;
    ds.matrix = positive_matrix;
    ds.edges = positives;
    ds.labels.assign(positives.size(), 1);
    for (const auto& e : negatives) {
      const auto it = std::lower_bound(parasocial.begin(), parasocial.end(), e);
      ds.matrix.append_row(result.test.matrix.row(static_cast<std::size_t>(it - parasocial.begin())));
      ds.edges.push_back(e);
      ds.labels.push_back(-1);
    }
    return ds;
  };

  std::vector<Point> points;
  for (const auto m : config.models) {
    if (m == ExperimentModel::kOneClass) {
      points.push_back({m, config.alphas.front()});
    } else {
      for (const double a : config.alphas) points.push_back({m, a});
    }
  }

  std::vector<ExperimentRow> rows(points.size());
  std::vector<LabeledDataset> sets(points.size());
  std::vector<LinearModel> models(points.size());
  SolverOptions solver = config.solver;
  solver.record_log = true;

  parallel_for(
      points.size(),
      [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
          const auto [model, alpha] = points[p];
          const std::string name = point_stem(model, alpha);
          ExperimentRow row;
          row.model = model;
          row.alpha = alpha;
          const ModelKind kind = model == ExperimentModel::kOneClass ? ModelKind::kOneClass : ModelKind::kBinary;

          LabeledDataset train;
          LabeledDataset cv_data;
          if (kind == ModelKind::kOneClass) {
            train = training_set({}, std::nullopt);
            // Validation folds need negatives; they are drawn for cross-validation only.
            const SamplingSpec cv_spec{SamplingStrategy::kRandom, 1.0, derive_seed(config.seed, "oc_cv")};
            const auto cv_neg = sample_negatives(base, parasocial, cv_spec,
                                                 negative_count(positives.size(), 1.0, parasocial.size()));
            cv_data = training_set(cv_neg, cv_spec);
          } else {
            const SamplingSpec spec{model == ExperimentModel::kSvmRandom ? SamplingStrategy::kRandom
                                                                         : SamplingStrategy::kEdgeAge,
                                    alpha, config.seed};
            const auto negatives = stage(name + ": sampling", [&] {
              return sample_negatives(base, parasocial, spec, negative_count(positives.size(), alpha, parasocial.size()));
            });
            train = training_set(negatives, spec);
          }
          row.train_positives = train.positives();
          row.train_negatives = train.negatives();
          row.negative_overlap = negative_overlap(train, result.test);

          const Normalizer normalizer = Normalizer::fit(train.matrix, config.normalization);
          LabeledDataset train_n = train;
          normalizer.apply(train_n.matrix);
          train_n.normalization = config.normalization;

          const auto fixed = kind == ModelKind::kOneClass ? config.fixed_nu : config.fixed_c;
          if (fixed) {
            row.hyperparameter = *fixed;
          } else {
            const auto& grid = kind == ModelKind::kOneClass ? config.nu_grid : config.c_grid;
            LabeledDataset cv_set = kind == ModelKind::kOneClass ? cv_data : train_n;
            if (kind == ModelKind::kOneClass) normalizer.apply(cv_set.matrix);
            CVOptions cv{config.subsample_fraction, config.folds,
                         derive_seed(config.seed, "cv/" + name), solver};
            row.cv = stage(name + ": cross-validation", [&] { return grid_search_cv(cv_set, kind, grid, cv); });
            row.hyperparameter = row.cv->selected;
          }

          LinearModel fitted = stage(name + ": training", [&] {
            return kind == ModelKind::kOneClass ? train_one_class(train_n.matrix, row.hyperparameter, solver)
                                                : train_binary(train_n.matrix, train_n.labels, row.hyperparameter, solver);
          });
          fitted.layout_fingerprint = result.layout_fingerprint;
          fitted.normalizer = normalizer;
          row.training = fitted.info;
          const auto prediction = stage(name + ": prediction", [&] {
            return predict_raw(fitted, result.test.matrix, result.layout_fingerprint);
          });
          row.report = evaluate(prediction.labels, result.test.labels);

          rows[p] = std::move(row);
          sets[p] = std::move(train);
          models[p] = std::move(fitted);
        }
      },
      1);

  for (std::size_t p = 0; p < points.size(); ++p) {
    if (points[p].model == ExperimentModel::kOneClass) {
      for (const double a : config.alphas) {
        ExperimentRow row = rows[p];
        row.alpha = a;
        result.rows.push_back(std::move(row));
        result.training_sets.push_back(sets[p]);
        result.models.push_back(models[p]);
      }
    } else {
      result.rows.push_back(rows[p]);
      result.training_sets.push_back(sets[p]);
      result.models.push_back(models[p]);
    }
  }
  return result;
}

std::string digest_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot read " + path.string());
  std::uint64_t h = kFnvOffset;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    h = fnv1a(std::string_view(buf, static_cast<std::size_t>(in.gcount())), h);
  }
  return to_hex(h);
}

void write_experiment(const std::filesystem::path& dir, const ExperimentConfig& config,
                      const ExperimentResult& result, const std::map<std::string, std::string>& inputs) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> written;
  const auto track = [&](const std::string& rel) { written.push_back(rel); };
  const FeatureLayout layout(result.test.matrix.cols() == FeatureLayout::kAttributedWidth);

  if (config.write_datasets) {
    const auto save = [&](const std::string& stem, const LabeledDataset& ds) {
      const auto table = make_table(layout, ds, nullptr);
      {
        auto f = open_out(dir / "datasets" / (stem + ".csv"));
        write_table_csv(f, table);
      }
      {
        auto f = open_out(dir / "datasets" / (stem + ".json"));
        write_table_sidecar(f, table);
      }
      track("datasets/" + stem + ".csv");
      track("datasets/" + stem + ".json");
      if (config.write_sparse) {
        auto f = open_out(dir / "datasets" / (stem + ".svm"));
        write_table_sparse(f, table);
        track("datasets/" + stem + ".svm");
      }
    };
    save("test", result.test);
    for (std::size_t r = 0; r < result.rows.size(); ++r) {
      const auto& row = result.rows[r];
      if (row.model == ExperimentModel::kOneClass && row.alpha != config.alphas.front()) continue;
      save("train_" + point_stem(row.model, row.alpha), result.training_sets[r]);
    }
  }

  for (std::size_t r = 0; r < result.rows.size(); ++r) {
    const auto& row = result.rows[r];
    if (row.model == ExperimentModel::kOneClass && row.alpha != config.alphas.front()) continue;
    const std::string stem = point_stem(row.model, row.alpha);
    {
      auto f = open_out(dir / "models" / (stem + ".json"));
      write_model(f, result.models[r]);
    }
    {
      auto f = open_out(dir / "models" / (stem + ".log.csv"));
      write_training_log(f, result.models[r].info);
    }
    track("models/" + stem + ".json");
    track("models/" + stem + ".log.csv");
  }

  {
    auto f = open_out(dir / "reports" / "results.csv");
    f << "model,strategy,alpha,normalization,hyperparameter,tp,fp,tn,fn,precision,recall,f1,accuracy,"
         "train_positives,train_negatives,negative_overlap,iterations,converged\n";
    for (const auto& row : result.rows) {
      const char* strategy = row.model == ExperimentModel::kOneClass ? "none"
                             : row.model == ExperimentModel::kSvmRandom ? "random"
                                                                       : "edge_age";
      const auto& r = row.report;
      f << to_string(row.model) << ',' << strategy << ',' << format_double(row.alpha) << ','
        << to_string(config.normalization) << ',' << format_double(row.hyperparameter) << ',' << r.tp << ',' << r.fp
        << ',' << r.tn << ',' << r.fn << ',' << format_optional(r.precision) << ',' << format_optional(r.recall) << ','
        << format_double(r.f1) << ',' << format_double(r.accuracy) << ',' << row.train_positives << ','
        << row.train_negatives << ',' << row.negative_overlap << ',' << row.training.iterations << ','
        << (row.training.converged ? 1 : 0) << '\n';
    }
    track("reports/results.csv");
  }
  {
    auto f = open_out(dir / "reports" / "alpha_sweep.csv");
    f << "model,alpha,metric,value\n";
    for (const auto& row : result.rows) {
      const auto put = [&](const char* metric, const std::optional<double>& v) {
        f << to_string(row.model) << ',' << format_double(row.alpha) << ',' << metric << ',' << format_optional(v)
          << '\n';
      };
      put("precision", row.report.precision);
      put("recall", row.report.recall);
      put("f1", row.report.f1);
    }
    track("reports/alpha_sweep.csv");
  }
  {
    Json rows = Json::array();
    for (const auto& row : result.rows) {
      Json j{{"model", std::string(to_string(row.model))},
             {"alpha", row.alpha},
             {"normalization", std::string(to_string(config.normalization))},
             {"hyperparameter", row.hyperparameter},
             {"metrics", report_json(row.report)},
             {"train_positives", row.train_positives},
             {"train_negatives", row.train_negatives},
             {"negative_overlap", row.negative_overlap},
             {"iterations", row.training.iterations},
             {"converged", row.training.converged}};
      if (row.cv) {
        Json grid = Json::array();
        for (std::size_t g = 0; g < row.cv->grid.size(); ++g)
          grid.push_back({{"value", row.cv->grid[g]}, {"mean_f1", optional_json(row.cv->mean_f1[g])}});
        j["cross_validation"] = {{"grid", grid}, {"selected", row.cv->selected}};
      }
      rows.push_back(std::move(j));
    }
    Json report{{"base_time", result.base_time},
                {"final_time", result.final_time},
                {"rows", rows},
                {"always_negative", report_json(result.always_negative)}};
    auto f = open_out(dir / "reports" / "results.json");
    f << report.dump(2) << '\n';
    track("reports/results.json");
  }

  std::sort(written.begin(), written.end());
  Json outputs = Json::object();
  for (const auto& rel : written) outputs[rel] = digest_file(dir / rel);
  Json in = Json::object();
  for (const auto& [k, v] : inputs) in[k] = v;
  const auto& s = result.summary;
  Json manifest{{"tool", "recipnet"},
                {"version", kToolVersion},
                {"feature_layout_version", FeatureLayout::kVersion},
                {"model_format_version", LinearModel::kFormatVersion},
                {"seed", config.seed},
                {"streams",
                 {{"sampling", derive_seed(config.seed, "sampling")},
                  {"oc_cv_sampling", derive_seed(derive_seed(config.seed, "oc_cv"), "sampling")}}},
                {"config", config_json(config)},
                {"inputs", in},
                {"base_time", result.base_time},
                {"final_time", result.final_time},
                {"layout_fingerprint", result.layout_fingerprint},
                {"datasets",
                 {{"train_reciprocal", s.train_reciprocal},
                  {"train_parasocial", s.train_parasocial},
                  {"test_reciprocal", s.test_reciprocal},
                  {"test_parasocial", s.test_parasocial}}},
                {"outputs", outputs}};
  auto f = open_out(dir / "manifest.json");
  f << manifest.dump(2) << '\n';
}

}  // namespace recipnet
