#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "recipnet/dataset.hpp"
#include "recipnet/error.hpp"
#include "recipnet/evaluation.hpp"
#include "recipnet/experiment.hpp"
#include "recipnet/features.hpp"
#include "recipnet/format.hpp"
#include "recipnet/ingest.hpp"
#include "recipnet/linkback.hpp"
#include "recipnet/metrics.hpp"
#include "recipnet/models.hpp"
#include "recipnet/rng.hpp"
#include "recipnet/synth.hpp"
#include "recipnet/tables.hpp"
#include "recipnet/version.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;
using namespace recipnet;

namespace {

/// Graph input: a binary image, a series index, or a list of edge files.
struct GraphInput {
  std::string image;
  std::string index;
  std::vector<std::string> edges;
  std::vector<SnapshotTime> times;
  std::string attrs;

  void add_to(CLI::App* app) {
    app->add_option("--graph", image, "Binary graph image written by `ingest`");
    app->add_option("--series", index, "Series index file (lines: time <tab> edge file)");
    app->add_option("--edges", edges, "Edge files, one per snapshot, in time order");
    app->add_option("--times", times, "Snapshot times for --edges (default 0, 1, ...)");
    app->add_option("--attrs", attrs, "Attribute file (node <tab> kind <tab> value)");
  }
};

struct LoadedInput {
  GraphSeries series;
  std::optional<AttributeStore> attributes;
  std::size_t skipped_attributes = 0;
  std::map<std::string, std::string> digests;
};

LoadedInput load_input(const GraphInput& in) {
  const int sources = !in.image.empty() + !in.index.empty() + !in.edges.empty();
  if (sources != 1) throw ArgumentError("give exactly one of --graph, --series or --edges");
  LoadedInput out;
  if (!in.image.empty()) {
    auto image = load_image(in.image);
    out.series = std::move(image.series);
    out.attributes = std::move(image.attributes);
    out.digests[in.image] = digest_file(in.image);
  } else if (!in.index.empty()) {
    out.series = load_series_index(in.index);
    out.digests[in.index] = digest_file(in.index);
    for (const auto& f : parse_series_index(in.index).edge_files) out.digests[f.string()] = digest_file(f);
  } else {
    std::vector<fs::path> files(in.edges.begin(), in.edges.end());
    std::vector<SnapshotTime> times = in.times;
    if (times.empty())
      for (std::size_t i = 0; i < files.size(); ++i) times.push_back(static_cast<SnapshotTime>(i));
    if (times.size() != files.size()) throw ArgumentError("--times must match --edges in length");
    out.series = load_snapshot_series(files, times);
    for (const auto& f : files) out.digests[f.string()] = digest_file(f);
  }
  if (!in.attrs.empty()) {
    auto load = load_attributes(in.attrs, out.series.ids());
    out.attributes = std::move(load.store);
    out.skipped_attributes = load.skipped_records;
    out.digests[in.attrs] = digest_file(in.attrs);
  }
  return out;
}

std::size_t snapshot_index(const GraphSeries& series, const std::optional<SnapshotTime>& time) {
  if (series.num_snapshots() == 0) throw ArgumentError("the series has no snapshots");
  return time ? series.index_of(*time) : series.num_snapshots() - 1;
}

/// Base and final snapshot indices; defaults are the experiment defaults.
std::pair<std::size_t, std::size_t> base_final(const GraphSeries& series, const std::optional<SnapshotTime>& base,
                                               const std::optional<SnapshotTime>& final_time) {
  if (series.num_snapshots() < 2) throw ArgumentError("need at least two snapshots");
  const std::size_t last = series.num_snapshots() - 1;
  const std::size_t bi = base ? series.index_of(*base) : (2 * last) / 3;
  const std::size_t fi = final_time ? series.index_of(*final_time) : last;
  if (bi >= fi) throw ArgumentError("base snapshot must precede the final snapshot");
  return {bi, fi};
}

bool is_stdout(const std::string& path) { return path.empty() || path == "-"; }

bool wants_json(const std::string& path) { return fs::path(path).extension() == ".json"; }

void emit(const std::string& path, const std::string& text) {
  if (is_stdout(path)) {
    std::cout << text;
    return;
  }
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write " + path);
  out << text;
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

/// Options as given (or defaulted) on a subcommand, for the run manifest.
Json echo_options(const CLI::App* app) {
  Json j = Json::object();
  for (const CLI::Option* opt : app->get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config") continue;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      j[name] = res.size() == 1 ? Json(res.front()) : Json(res);
    } else if (!opt->get_default_str().empty()) {
      j[name] = opt->get_default_str();
    }
  }
  return j;
}

/// Writes `<output>.manifest.json` (or `<dir>/manifest.json`).
void write_manifest(const fs::path& path, const std::string& command, const CLI::App* app,
                    const std::map<std::string, std::string>& inputs, const std::vector<fs::path>& outputs,
                    Json extra = Json::object()) {
  Json in = Json::object();
  for (const auto& [k, v] : inputs) in[k] = v;
  Json out = Json::object();
  for (const auto& p : outputs) out[p.filename().string()] = digest_file(p);
  Json m{{"tool", "recipnet"},
         {"version", kToolVersion},
         {"command", command},
         {"options", echo_options(app)},
         {"inputs", in},
         {"outputs", out}};
  for (auto& [k, v] : extra.items()) m[k] = v;
  emit(path.string(), m.dump(2) + "\n");
}

fs::path manifest_for(const std::string& output) { return fs::path(output + ".manifest.json"); }

// ---------------------------------------------------------------- ingest

void run_ingest(const GraphInput& in, const std::string& out_path, const CLI::App* app) {
  const auto loaded = load_input(in);
  const AttributeStore* attrs = loaded.attributes ? &*loaded.attributes : nullptr;
  save_image(out_path, loaded.series, attrs);
  const auto& s = loaded.series;
  std::cout << "nodes\t" << s.ids().size() << "\nedges\t" << s.edges().size() << "\nsnapshots\t"
            << s.num_snapshots() << "\nbirth_source\t" << to_string(s.birth_source()) << '\n';
  if (attrs)
    std::cout << "attribute_incidences\t" << attrs->num_incidences() << "\nattribute_records_skipped\t"
              << loaded.skipped_attributes << '\n';
  write_manifest(manifest_for(out_path), "ingest", app, loaded.digests, {out_path},
                 Json{{"birth_source", std::string(to_string(s.birth_source()))}});
}

// ---------------------------------------------------------------- metrics

Json summary_json(const SnapshotSummary& s) {
  return Json{{"time", s.time},
              {"nodes", s.nodes},
              {"edges", s.edges},
              {"reciprocity", optional_json(s.reciprocity)},
              {"assortativity_parasocial", optional_json(s.assortativity_parasocial)},
              {"assortativity_reciprocal", optional_json(s.assortativity_reciprocal)},
              {"clustering_parasocial", s.clustering_parasocial},
              {"clustering_reciprocal", s.clustering_reciprocal}};
}

void run_metrics(const GraphInput& in, std::optional<SnapshotTime> time, bool all, const std::string& out_path,
                 const CLI::App* app) {
  const auto loaded = load_input(in);
  std::vector<std::size_t> indices;
  if (all) {
    for (std::size_t i = 0; i < loaded.series.num_snapshots(); ++i) indices.push_back(i);
  } else {
    indices.push_back(snapshot_index(loaded.series, time));
  }
  std::vector<SnapshotSummary> rows;
  for (const auto i : indices) rows.push_back(summarize(loaded.series.snapshot(i)));
  std::string text;
  if (wants_json(out_path)) {
    Json j = Json::array();
    for (const auto& r : rows) j.push_back(summary_json(r));
    text = j.dump(2) + "\n";
  } else {
    std::ostringstream o;
    o << "time,nodes,edges,reciprocity,assortativity_parasocial,assortativity_reciprocal,"
         "clustering_parasocial,clustering_reciprocal\n";
    for (const auto& r : rows)
      o << r.time << ',' << r.nodes << ',' << r.edges << ',' << format_optional(r.reciprocity) << ','
        << format_optional(r.assortativity_parasocial) << ',' << format_optional(r.assortativity_reciprocal) << ','
        << format_double(r.clustering_parasocial) << ',' << format_double(r.clustering_reciprocal) << '\n';
    text = o.str();
  }
  emit(out_path, text);
  if (!is_stdout(out_path)) write_manifest(manifest_for(out_path), "metrics", app, loaded.digests, {out_path});
}

// ---------------------------------------------------------------- evolve

void run_evolve(const GraphInput& in, const std::vector<std::string>& metric_names, const std::string& out_path,
                const CLI::App* app) {
  const auto loaded = load_input(in);
  std::vector<std::pair<Metric, MetricVersion>> wanted;
  for (const auto& name : metric_names) {
    if (name == "reciprocity") {
      wanted.emplace_back(Metric::kReciprocity, MetricVersion::kDirected);
    } else if (name == "assortativity") {
      wanted.emplace_back(Metric::kAssortativity, MetricVersion::kParasocial);
      wanted.emplace_back(Metric::kAssortativity, MetricVersion::kReciprocal);
    } else if (name == "clustering") {
      wanted.emplace_back(Metric::kClustering, MetricVersion::kParasocial);
      wanted.emplace_back(Metric::kClustering, MetricVersion::kReciprocal);
    } else {
      throw ArgumentError("unknown metric: " + name);
    }
  }
  std::ostringstream o;
  o << "metric,version,time,value\n";
  for (const auto& [metric, version] : wanted) {
    const auto series = evolution(loaded.series, metric, version);
    for (std::size_t k = 0; k < series.times.size(); ++k)
      o << to_string(metric) << ',' << to_string(version) << ',' << series.times[k] << ','
        << format_optional(series.values[k]) << '\n';
  }
  emit(out_path, o.str());
  if (!is_stdout(out_path)) write_manifest(manifest_for(out_path), "evolve", app, loaded.digests, {out_path});
}

// ---------------------------------------------------------------- linkback

struct LinkbackArgs {
  std::optional<SnapshotTime> base;
  std::optional<SnapshotTime> final_time;
  std::string by = "acceptance";
  std::size_t bins = 20;
  std::string kind = "school";
  SnapshotTime max_age = 10;
  std::string out;
};

void run_linkback(const GraphInput& in, const LinkbackArgs& a, const CLI::App* app) {
  const auto loaded = load_input(in);
  const auto [bi, fi] = base_final(loaded.series, a.base, a.final_time);
  const SnapshotGraph base = loaded.series.snapshot(bi);
  const SnapshotGraph final_graph = loaded.series.snapshot(fi);
  LinkbackCurve curve;
  if (a.by == "acceptance" || a.by == "request") {
    curve = linkback_vs_local_reciprocity(
        base, final_graph, a.by == "acceptance" ? ReciprocitySide::kAcceptance : ReciprocitySide::kRequest, a.bins);
  } else if (a.by == "attribute") {
    if (!loaded.attributes) throw ArgumentError("--by attribute needs attributes");
    const auto kind = parse_attribute_kind(a.kind);
    if (!kind) throw ArgumentError("unknown attribute kind: " + a.kind);
    curve = linkback_vs_shared_attributes(base, final_graph, loaded.attributes->restricted_to(base.num_nodes()),
                                          *kind);
  } else if (a.by == "edge_age") {
    curve = linkback_vs_edge_age(base, final_graph, a.max_age);
  } else {
    throw ArgumentError("unknown --by value: " + a.by);
  }
  std::ostringstream o;
  o << "bin,support,reciprocated,probability\n";
  for (std::size_t b = 0; b < curve.size(); ++b)
    o << curve.bin_labels[b] << ',' << curve.support[b] << ',' << curve.reciprocated[b] << ','
      << format_optional(curve.probabilities[b]) << '\n';
  emit(a.out, o.str());
  if (!is_stdout(a.out)) write_manifest(manifest_for(a.out), "linkback", app, loaded.digests, {a.out});
}

// ---------------------------------------------------------------- features

std::vector<Edge> read_pairs(const std::string& path, const GraphSeries& series, const SnapshotGraph& g) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot read " + path);
  std::vector<Edge> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string a, b;
    if (!(fields >> a >> b)) throw ParseError(path, lineno, "expected two node ids");
    const auto u = series.ids().find(a);
    const auto v = series.ids().find(b);
    if (!u || !v || *u >= g.num_nodes() || *v >= g.num_nodes())
      throw ParseError(path, lineno, "unknown node in the chosen snapshot");
    if (!g.has_edge(*u, *v)) throw ConsistencyError(path + ":" + std::to_string(lineno) + ": not an edge of the snapshot");
    edges.push_back({*u, *v});
  }
  return edges;
}

void write_table_files(const fs::path& dir, const std::string& stem, const FeatureTable& table, bool sparse,
                       std::vector<fs::path>& written) {
  fs::create_directories(dir);
  {
    std::ofstream f(dir / (stem + ".csv"), std::ios::binary);
    write_table_csv(f, table);
  }
  {
    std::ofstream f(dir / (stem + ".json"), std::ios::binary);
    write_table_sidecar(f, table);
  }
  written.push_back(dir / (stem + ".csv"));
  written.push_back(dir / (stem + ".json"));
  if (sparse) {
    std::ofstream f(dir / (stem + ".svm"), std::ios::binary);
    write_table_sparse(f, table);
    written.push_back(dir / (stem + ".svm"));
  }
}

struct FeaturesArgs {
  std::optional<SnapshotTime> time;
  std::optional<SnapshotTime> eval_time;
  std::string pairs;
  bool structural = false;
  bool sparse = false;
  std::string out_dir = ".";
  std::string stem = "features";
};

void run_features(const GraphInput& in, const FeaturesArgs& a, const CLI::App* app) {
  const auto loaded = load_input(in);
  const SnapshotGraph g = loaded.series.snapshot(snapshot_index(loaded.series, a.time));
  std::optional<AttributeStore> attrs;
  if (loaded.attributes && !a.structural) attrs = loaded.attributes->restricted_to(g.num_nodes());
  const FeatureExtractor extractor = a.eval_time ? FeatureExtractor(g, attrs ? &*attrs : nullptr, *a.eval_time)
                                                 : FeatureExtractor(g, attrs ? &*attrs : nullptr);
  std::vector<Edge> edges;
  if (a.pairs.empty()) {
    for (const auto& e : g.edges())
      if (g.classify_request(e.src, e.dst) == RequestClass::kRequest) edges.push_back(e);
  } else {
    edges = read_pairs(a.pairs, loaded.series, g);
  }
  const FeatureMatrix m = extract_matrix(extractor, edges);
  auto table = make_table(extractor.layout(), edges, m, nullptr, &loaded.series.ids());
  table.metadata["snapshot_time"] = std::to_string(g.snapshot_time());
  std::vector<fs::path> written;
  write_table_files(a.out_dir, a.stem, table, a.sparse, written);
  auto digests = loaded.digests;
  if (!a.pairs.empty()) digests[a.pairs] = digest_file(a.pairs);
  write_manifest(fs::path(a.out_dir) / (a.stem + ".manifest.json"), "features", app, digests, written);
}

// ---------------------------------------------------------------- build-dataset

struct DatasetArgs {
  std::optional<SnapshotTime> base;
  std::optional<SnapshotTime> final_time;
  std::string strategy = "random";
  double alpha = 1.0;
  std::uint64_t seed = 1;
  bool attributed_only = false;
  bool structural = false;
  bool sparse = false;
  std::string out_dir = ".";
};

void run_build_dataset(const GraphInput& in, const DatasetArgs& a, const CLI::App* app) {
  const auto loaded = load_input(in);
  const auto [bi, fi] = base_final(loaded.series, a.base, a.final_time);
  const SnapshotGraph base = loaded.series.snapshot(bi);
  const SnapshotGraph final_graph = loaded.series.snapshot(fi);
  std::optional<AttributeStore> attrs;
  if (loaded.attributes) attrs = loaded.attributes->restricted_to(base.num_nodes());
  if (a.attributed_only && !attrs) throw ArgumentError("--attributed-only needs attributes");
  const FeatureExtractor extractor(base, attrs && !a.structural ? &*attrs : nullptr);
  const NodeMask mask = a.attributed_only ? attributed_mask(*attrs, base.num_nodes()) : NodeMask{};

  LabeledDataset train;
  if (a.strategy == "none") {
    train = build_positive_training(extractor, mask);
  } else {
    const SamplingSpec spec{parse_sampling_strategy(a.strategy), a.alpha, a.seed};
    train = build_training(extractor, spec, mask);
  }
  const LabeledDataset test = build_test(extractor, final_graph, mask);
  const DatasetSummary s = summarize(train, test);

  std::vector<fs::path> written;
  for (const LabeledDataset* ds : {static_cast<const LabeledDataset*>(&train), &test}) {
    auto table = make_table(extractor.layout(), *ds, &loaded.series.ids());
    table.metadata["base_time"] = std::to_string(base.snapshot_time());
    table.metadata["final_time"] = std::to_string(final_graph.snapshot_time());
    write_table_files(a.out_dir, ds == &train ? "train" : "test", table, a.sparse, written);
  }
  Json summary{{"base_time", base.snapshot_time()},
               {"final_time", final_graph.snapshot_time()},
               {"train_reciprocal", s.train_reciprocal},
               {"train_parasocial", s.train_parasocial},
               {"sampled_negatives", s.sampled_negatives},
               {"test_reciprocal", s.test_reciprocal},
               {"test_parasocial", s.test_parasocial},
               {"negative_overlap", s.negative_overlap}};
  std::cout << summary.dump(2) << '\n';
  write_manifest(fs::path(a.out_dir) / "manifest.json", "build-dataset", app, loaded.digests, written,
                 Json{{"seed", a.seed},
                      {"streams", {{"sampling", derive_seed(a.seed, "sampling")}}},
                      {"summary", summary}});
}

// ---------------------------------------------------------------- train / predict / evaluate

LabeledDataset dataset_from_table(const FeatureTable& table, const std::string& source) {
  if (!table.labels) throw ArgumentError(source + ": table has no label column");
  LabeledDataset ds;
  ds.matrix = table.matrix;
  ds.labels = *table.labels;
  ds.layout_fingerprint = table.layout_fingerprint;
  ds.edges.resize(table.matrix.rows());
  return ds;
}

struct TrainArgs {
  std::string table;
  std::string kind = "one_class";
  std::optional<double> value;
  std::vector<double> grid;
  std::size_t folds = 2;
  double subsample = 0.1;
  std::uint64_t seed = 1;
  std::string normalization = "row";
  double tolerance = 1e-6;
  std::size_t max_iters = 10000;
  std::string out = "model.json";
  std::string log;
};

void run_train(const TrainArgs& a, const CLI::App* app) {
  const FeatureTable table = load_table_csv(a.table);
  const LabeledDataset all = dataset_from_table(table, a.table);
  const ModelKind kind = parse_model_kind(a.kind);
  SolverOptions solver;
  solver.tolerance = a.tolerance;
  solver.max_iters = a.max_iters;
  solver.record_log = true;

  LabeledDataset train = all;
  if (kind == ModelKind::kOneClass) {
    std::vector<std::size_t> pos;
    for (std::size_t i = 0; i < all.rows(); ++i)
      if (all.labels[i] == 1) pos.push_back(i);
    train = all.subset(pos);
  }
  if (train.rows() == 0) throw ArgumentError(a.table + ": no training rows");
  const Normalization mode = parse_normalization(a.normalization);
  const Normalizer normalizer = Normalizer::fit(train.matrix, mode);
  normalizer.apply(train.matrix);

  Json cv_json = nullptr;
  double value = 0.0;
  if (a.value) {
    value = *a.value;
  } else {
    LabeledDataset cv_set = all;
    normalizer.apply(cv_set.matrix);
    const auto grid = a.grid.empty() ? default_grid(kind) : a.grid;
    const CVResult cv = grid_search_cv(cv_set, kind, grid, {a.subsample, a.folds, a.seed, solver});
    value = cv.selected;
    cv_json = Json::array();
    for (std::size_t g = 0; g < cv.grid.size(); ++g)
      cv_json.push_back({{"value", cv.grid[g]}, {"mean_f1", optional_json(cv.mean_f1[g])}});
  }
  LinearModel model = kind == ModelKind::kOneClass ? train_one_class(train.matrix, value, solver)
                                                   : train_binary(train.matrix, train.labels, value, solver);
  model.layout_fingerprint = table.layout_fingerprint;
  model.normalizer = normalizer;
  save_model(a.out, model);
  std::vector<fs::path> written{a.out};
  if (!a.log.empty()) {
    std::ofstream f(a.log, std::ios::binary);
    write_training_log(f, model.info);
    written.emplace_back(a.log);
  }
  std::cout << "hyperparameter\t" << format_double(value) << "\niterations\t" << model.info.iterations
            << "\nconverged\t" << (model.info.converged ? "yes" : "no") << "\nrelative_gap\t"
            << format_double(model.info.relative_gap) << '\n';
  write_manifest(manifest_for(a.out), "train", app, {{a.table, digest_file(a.table)}}, written,
                 Json{{"seed", a.seed}, {"streams", {{"cv", derive_seed(a.seed, "cv")}}}, {"cross_validation", cv_json}});
}

void run_predict(const std::string& model_path, const std::string& table_path, const std::string& out_path,
                 const CLI::App* app) {
  const LinearModel model = load_model(model_path);
  const FeatureTable table = load_table_csv(table_path);
  const Prediction p = predict_raw(model, table.matrix, table.layout_fingerprint);
  std::ostringstream o;
  o << "src,dst,score,predicted" << (table.labels ? ",truth" : "") << '\n';
  for (std::size_t i = 0; i < p.labels.size(); ++i) {
    o << table.edges[i].first << ',' << table.edges[i].second << ',' << format_double(p.scores[i]) << ','
      << p.labels[i];
    if (table.labels) o << ',' << (*table.labels)[i];
    o << '\n';
  }
  emit(out_path, o.str());
  if (!is_stdout(out_path))
    write_manifest(manifest_for(out_path), "predict", app,
                   {{model_path, digest_file(model_path)}, {table_path, digest_file(table_path)}}, {out_path});
}

int parse_label(const std::string& token, const std::string& source, std::size_t line) {
  if (token == "1" || token == "+1") return 1;
  if (token == "-1") return -1;
  throw ParseError(source, line, "label must be +1 or -1");
}

void run_evaluate(const std::string& pred_path, const std::string& truth_path, const std::string& out_path,
                  const CLI::App* app) {
  std::ifstream in(pred_path);
  if (!in) throw ArgumentError("cannot read " + pred_path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(pred_path, 1, "empty predictions file");
  std::vector<std::string> header;
  {
    std::istringstream h(line);
    for (std::string c; std::getline(h, c, ',');) header.push_back(c);
  }
  const auto col = [&](const std::string& name) -> std::optional<std::size_t> {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };
  const auto pred_col = col("predicted");
  const auto truth_col = col("truth");
  if (!pred_col) throw ParseError(pred_path, 1, "missing `predicted` column");
  std::vector<int> predicted, truth;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream s(line);
    for (std::string c; std::getline(s, c, ',');) f.push_back(c);
    if (f.size() != header.size()) throw ParseError(pred_path, lineno, "wrong number of fields");
    predicted.push_back(parse_label(f[*pred_col], pred_path, lineno));
    if (truth_col) truth.push_back(parse_label(f[*truth_col], pred_path, lineno));
  }
  std::map<std::string, std::string> digests{{pred_path, digest_file(pred_path)}};
  if (!truth_path.empty()) {
    const FeatureTable t = load_table_csv(truth_path);
    if (!t.labels) throw ArgumentError(truth_path + ": table has no label column");
    truth = *t.labels;
    digests[truth_path] = digest_file(truth_path);
  }
  if (truth.empty() && !predicted.empty()) throw ArgumentError("no true labels: give --truth or a `truth` column");
  const EvalReport r = evaluate(predicted, truth);
  const Json j{{"tp", r.tp},
               {"fp", r.fp},
               {"tn", r.tn},
               {"fn", r.fn},
               {"precision", optional_json(r.precision)},
               {"recall", optional_json(r.recall)},
               {"f1", r.f1},
               {"accuracy", r.accuracy}};
  emit(out_path, j.dump(2) + "\n");
  if (!is_stdout(out_path)) write_manifest(manifest_for(out_path), "evaluate", app, digests, {out_path});
}

// ---------------------------------------------------------------- experiment

struct ExperimentArgs {
  std::vector<std::string> models{"oc_svm", "svm_random", "svm_edge_age"};
  std::optional<SnapshotTime> base;
  std::optional<SnapshotTime> final_time;
  std::string normalization = "row";
  bool structural = false;
  std::string out_dir = "experiment";
  double tolerance = 1e-6;
  std::size_t max_iters = 10000;
  ExperimentConfig config;
};

void run_experiment_cmd(const GraphInput& in, ExperimentArgs a) {
  const auto loaded = load_input(in);
  auto& c = a.config;
  c.models.clear();
  for (const auto& m : a.models) c.models.push_back(parse_experiment_model(m));
  c.base_time = a.base;
  c.final_time = a.final_time;
  c.normalization = parse_normalization(a.normalization);
  c.use_attributes = !a.structural;
  c.solver.tolerance = a.tolerance;
  c.solver.max_iters = a.max_iters;
  const auto result = run_experiment(loaded.series, loaded.attributes ? &*loaded.attributes : nullptr, c);
  write_experiment(a.out_dir, c, result, loaded.digests);
  std::cout << "model,alpha,hyperparameter,precision,recall,f1\n";
  for (const auto& row : result.rows)
    std::cout << to_string(row.model) << ',' << format_double(row.alpha) << ',' << format_double(row.hyperparameter)
              << ',' << format_optional(row.report.precision) << ',' << format_optional(row.report.recall) << ','
              << format_double(row.report.f1) << '\n';
}

// ---------------------------------------------------------------- synth

Json synth_json(const SynthConfig& c) {
  const auto& l = c.law;
  const auto& g = c.attributes;
  return Json{{"nodes", c.nodes},
              {"snapshots", c.snapshots},
              {"new_edges", c.new_edges},
              {"popular_fraction", c.popular_fraction},
              {"popular_fitness", c.popular_fitness},
              {"degree_bias", c.degree_bias},
              {"law",
               {{"base", l.base},
                {"acceptance", l.acceptance},
                {"shared", {{"school", l.shared[0]}, {"major", l.shared[1]}, {"employer", l.shared[2]}, {"city", l.shared[3]}}},
                {"decay", l.decay}}},
              {"attributes",
               {{"pool_sizes", {{"school", g.pool_sizes[0]}, {"major", g.pool_sizes[1]}, {"employer", g.pool_sizes[2]}, {"city", g.pool_sizes[3]}}},
                {"assign_probability", g.assign_probability}}},
              {"seed", c.seed}};
}

void run_synth(SynthConfig config, const std::string& out_dir, bool trace, const std::string& image,
               const CLI::App* app) {
  config.record_trace = trace;
  const SynthOutput out = generate(config);
  write_synth_files(out_dir, out, trace);
  const fs::path dir(out_dir);
  std::vector<fs::path> written{dir / "series.tsv", dir / "attributes.tsv"};
  for (const SnapshotTime t : out.series.times()) written.push_back(dir / ("edges_" + std::to_string(t) + ".txt"));
  if (trace) written.push_back(dir / "trace.csv");
  if (!image.empty()) {
    save_image(image, out.series, &out.attributes);
    written.emplace_back(image);
  }
  write_manifest(fs::path(out_dir) / "manifest.json", "synth", app, {}, written,
                 Json{{"parameters", synth_json(config)},
                      {"streams",
                       {{"synth", derive_seed(config.seed, "synth")},
                        {"synth/popular", derive_seed(config.seed, "synth/popular")},
                        {"synth/attributes", derive_seed(config.seed, "synth/attributes")}}},
                      {"nodes_generated", out.series.ids().size()},
                      {"edges_generated", out.series.edges().size()}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reciprocity analysis and prediction on temporal directed graphs"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.set_config("--config", "", "TOML-style key = value file; flags override it");
  app.require_subcommand(1);

  GraphInput input;

  auto* ingest = app.add_subcommand("ingest", "Parse edge/attribute files into a binary graph image");
  input.add_to(ingest);
  std::string ingest_out;
  ingest->add_option("--out", ingest_out, "Output image")->required();

  auto* metrics = app.add_subcommand("metrics", "Structure metrics of one snapshot (or all)");
  input.add_to(metrics);
  std::optional<SnapshotTime> metrics_time;
  bool metrics_all = false;
  std::string metrics_out;
  metrics->add_option("--time", metrics_time, "Snapshot time (default: last)");
  metrics->add_flag("--all", metrics_all, "Every snapshot");
  metrics->add_option("--out", metrics_out, "Output file (.json or CSV; default stdout)");

  auto* evolve = app.add_subcommand("evolve", "Metric series over all snapshots (long CSV)");
  input.add_to(evolve);
  std::vector<std::string> evolve_metrics{"reciprocity", "assortativity", "clustering"};
  std::string evolve_out;
  evolve->add_option("--metric", evolve_metrics, "reciprocity, assortativity, clustering")->capture_default_str();
  evolve->add_option("--out", evolve_out, "Output CSV (default stdout)");

  auto* linkback = app.add_subcommand("linkback", "Linking-back probability curves");
  input.add_to(linkback);
  LinkbackArgs lb;
  linkback->add_option("--base", lb.base, "Base snapshot time");
  linkback->add_option("--final", lb.final_time, "Final snapshot time");
  linkback->add_option("--by", lb.by, "acceptance | request | attribute | edge_age")->capture_default_str();
  linkback->add_option("--bins", lb.bins, "Bins for local reciprocity")->capture_default_str();
  linkback->add_option("--kind", lb.kind, "Attribute kind for --by attribute")->capture_default_str();
  linkback->add_option("--max-age", lb.max_age, "Last (open) age bin")->capture_default_str();
  linkback->add_option("--out", lb.out, "Output CSV (default stdout)");

  auto* features = app.add_subcommand("features", "Edge feature table for one snapshot");
  input.add_to(features);
  FeaturesArgs fa;
  features->add_option("--time", fa.time, "Snapshot time (default: last)");
  features->add_option("--eval-time", fa.eval_time, "Reference time for edge age");
  features->add_option("--pairs", fa.pairs, "File of `src dst` raw id pairs (default: every friend request)");
  features->add_flag("--structural", fa.structural, "Omit attribute columns");
  features->add_flag("--sparse", fa.sparse, "Also write the sparse text form");
  features->add_option("--out-dir", fa.out_dir)->capture_default_str();
  features->add_option("--stem", fa.stem)->capture_default_str();

  auto* build = app.add_subcommand("build-dataset", "Training and test tables for a base/final pair");
  input.add_to(build);
  DatasetArgs da;
  build->add_option("--base", da.base, "Base snapshot time");
  build->add_option("--final", da.final_time, "Final snapshot time");
  build->add_option("--strategy", da.strategy, "random | edge_age | none (positives only)")->capture_default_str();
  build->add_option("--alpha", da.alpha, "Negatives per positive")->capture_default_str();
  build->add_option("--seed", da.seed, "Root seed")->capture_default_str();
  build->add_flag("--attributed-only", da.attributed_only, "Only nodes holding an attribute");
  build->add_flag("--structural", da.structural, "Omit attribute columns");
  build->add_flag("--sparse", da.sparse, "Also write the sparse text form");
  build->add_option("--out-dir", da.out_dir)->capture_default_str();

  auto* train = app.add_subcommand("train", "Fit a linear one-class or binary model on a feature table");
  TrainArgs ta;
  train->add_option("--table", ta.table, "Labelled feature table (CSV)")->required();
  train->add_option("--kind", ta.kind, "one_class | binary")->capture_default_str();
  train->add_option("--value", ta.value, "Fixed nu (one_class) or C (binary); skips cross-validation");
  train->add_option("--grid", ta.grid, "Cross-validation grid");
  train->add_option("--folds", ta.folds)->capture_default_str();
  train->add_option("--subsample", ta.subsample, "Fraction of rows used for cross-validation")->capture_default_str();
  train->add_option("--seed", ta.seed)->capture_default_str();
  train->add_option("--normalization", ta.normalization, "none | column | row | column_row")->capture_default_str();
  train->add_option("--tolerance", ta.tolerance)->capture_default_str();
  train->add_option("--max-iters", ta.max_iters)->capture_default_str();
  train->add_option("--out", ta.out, "Model JSON")->capture_default_str();
  train->add_option("--log", ta.log, "Training log CSV");

  auto* predict_cmd = app.add_subcommand("predict", "Score a feature table with a model");
  std::string pred_model, pred_table, pred_out;
  predict_cmd->add_option("--model", pred_model)->required();
  predict_cmd->add_option("--table", pred_table)->required();
  predict_cmd->add_option("--out", pred_out, "Predictions CSV (default stdout)");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Precision, recall and F1 of predictions");
  std::string eval_pred, eval_truth, eval_out;
  evaluate_cmd->add_option("--predictions", eval_pred)->required();
  evaluate_cmd->add_option("--truth", eval_truth, "Labelled table row-aligned with the predictions");
  evaluate_cmd->add_option("--out", eval_out, "Report JSON (default stdout)");

  auto* experiment = app.add_subcommand("experiment", "Full comparison over models and sampling ratios");
  input.add_to(experiment);
  ExperimentArgs ea;
  experiment->add_option("--models", ea.models)->capture_default_str();
  experiment->add_option("--alphas", ea.config.alphas)->capture_default_str();
  experiment->add_option("--base", ea.base, "Base snapshot time");
  experiment->add_option("--final", ea.final_time, "Final snapshot time");
  experiment->add_option("--normalization", ea.normalization)->capture_default_str();
  experiment->add_flag("--structural", ea.structural, "Omit attribute columns");
  experiment->add_flag("--attributed-only", ea.config.attributed_only);
  experiment->add_option("--c-grid", ea.config.c_grid)->capture_default_str();
  experiment->add_option("--nu-grid", ea.config.nu_grid)->capture_default_str();
  experiment->add_option("--c", ea.config.fixed_c, "Fixed C (skips cross-validation)");
  experiment->add_option("--nu", ea.config.fixed_nu, "Fixed nu (skips cross-validation)");
  experiment->add_option("--subsample", ea.config.subsample_fraction)->capture_default_str();
  experiment->add_option("--folds", ea.config.folds)->capture_default_str();
  experiment->add_option("--tolerance", ea.tolerance)->capture_default_str();
  experiment->add_option("--max-iters", ea.max_iters)->capture_default_str();
  experiment->add_option("--seed", ea.config.seed)->capture_default_str();
  experiment->add_flag("--no-datasets", [&](std::int64_t) { ea.config.write_datasets = false; });
  experiment->add_flag("--sparse", ea.config.write_sparse);
  experiment->add_option("--out-dir", ea.out_dir)->capture_default_str();

  auto* synth = app.add_subcommand("synth", "Generate a synthetic temporal graph");
  SynthConfig sc;
  std::string synth_out = "synth";
  std::string synth_image;
  bool synth_trace = false;
  synth->add_option("--nodes", sc.nodes)->capture_default_str();
  synth->add_option("--snapshots", sc.snapshots)->capture_default_str();
  synth->add_option("--new-edges", sc.new_edges)->capture_default_str();
  synth->add_option("--popular-fraction", sc.popular_fraction)->capture_default_str();
  synth->add_option("--popular-fitness", sc.popular_fitness)->capture_default_str();
  synth->add_option("--degree-bias", sc.degree_bias)->capture_default_str();
  synth->add_option("--base-rate", sc.law.base)->capture_default_str();
  synth->add_option("--acceptance-coef", sc.law.acceptance)->capture_default_str();
  synth->add_option("--shared-school", sc.law.shared[0])->capture_default_str();
  synth->add_option("--shared-major", sc.law.shared[1])->capture_default_str();
  synth->add_option("--shared-employer", sc.law.shared[2])->capture_default_str();
  synth->add_option("--shared-city", sc.law.shared[3])->capture_default_str();
  synth->add_option("--decay", sc.law.decay)->capture_default_str();
  synth->add_option("--pool-school", sc.attributes.pool_sizes[0])->capture_default_str();
  synth->add_option("--pool-major", sc.attributes.pool_sizes[1])->capture_default_str();
  synth->add_option("--pool-employer", sc.attributes.pool_sizes[2])->capture_default_str();
  synth->add_option("--pool-city", sc.attributes.pool_sizes[3])->capture_default_str();
  synth->add_option("--assign-probability", sc.attributes.assign_probability)->capture_default_str();
  synth->add_option("--seed", sc.seed)->capture_default_str();
  synth->add_flag("--trace", synth_trace, "Write trace.csv");
  synth->add_option("--image", synth_image, "Also write a binary image");
  synth->add_option("--out-dir", synth_out)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::kUsage);
  }

  try {
    if (*ingest) run_ingest(input, ingest_out, ingest);
    if (*metrics) run_metrics(input, metrics_time, metrics_all, metrics_out, metrics);
    if (*evolve) run_evolve(input, evolve_metrics, evolve_out, evolve);
    if (*linkback) run_linkback(input, lb, linkback);
    if (*features) run_features(input, fa, features);
    if (*build) run_build_dataset(input, da, build);
    if (*train) run_train(ta, train);
    if (*predict_cmd) run_predict(pred_model, pred_table, pred_out, predict_cmd);
    if (*evaluate_cmd) run_evaluate(eval_pred, eval_truth, eval_out, evaluate_cmd);
    if (*experiment) run_experiment_cmd(input, ea);
    if (*synth) run_synth(sc, synth_out, synth_trace, synth_image, synth);
  } catch (const Error& e) {
    std::cerr << "recipnet: " << e.what() << '\n';
    return static_cast<int>(e.exit_code());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "recipnet: " << e.what() << '\n';
    return static_cast<int>(ExitCode::kData);
  } catch (const std::exception& e) {
    std::cerr << "recipnet: " << e.what() << '\n';
    return static_cast<int>(ExitCode::kData);
  }
  return 0;
}
