#include "recipnet/tables.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "recipnet/error.hpp"
#include "recipnet/format.hpp"

namespace recipnet {

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::string edge_id(NodeId u, const IdMap* ids) { return ids ? ids->raw(u) : std::to_string(u); }

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write " + path.string());
  return out;
}

}  // namespace

FeatureTable make_table(const FeatureLayout& layout, std::span<const Edge> edges, const FeatureMatrix& matrix,
                        const std::vector<int>* labels, const IdMap* ids) {
  if (matrix.rows() != edges.size()) throw ArgumentError("edge count does not match the matrix rows");
  if (matrix.rows() > 0 && matrix.cols() != layout.size()) throw ArgumentError("matrix width does not match the layout");
  if (labels && labels->size() != edges.size()) throw ArgumentError("label count does not match the matrix rows");
  FeatureTable t;
  t.layout_fingerprint = layout.fingerprint();
  t.columns = layout.names();
  t.edges.reserve(edges.size());
  for (const auto& e : edges) t.edges.emplace_back(edge_id(e.src, ids), edge_id(e.dst, ids));
  if (labels) t.labels = *labels;
  t.matrix = matrix;
  if (t.matrix.rows() == 0) t.matrix = FeatureMatrix(0, layout.size());
  return t;
}

FeatureTable make_table(const FeatureLayout& layout, const LabeledDataset& data, const IdMap* ids) {
  auto t = make_table(layout, data.edges, data.matrix, &data.labels, ids);
  t.metadata["role"] = std::string(to_string(data.role));
  t.metadata["normalization"] = std::string(to_string(data.normalization));
  if (data.sampling) {
    t.metadata["sampling"] = std::string(to_string(data.sampling->strategy));
    t.metadata["alpha"] = format_double(data.sampling->alpha);
    t.metadata["seed"] = std::to_string(data.sampling->seed);
  }
  return t;
}

void write_table_csv(std::ostream& out, const FeatureTable& table) {
  out << "#layout=" << table.layout_fingerprint << '\n';
  for (const auto& [k, v] : table.metadata) out << '#' << k << '=' << v << '\n';
  out << "src,dst";
  if (table.labels) out << ",label";
  for (const auto& c : table.columns) out << ',' << c;
  out << '\n';
  std::string line;
  for (std::size_t i = 0; i < table.matrix.rows(); ++i) {
    line = table.edges[i].first + ',' + table.edges[i].second;
    if (table.labels) line += ',' + std::to_string((*table.labels)[i]);
    for (const double v : table.matrix.row(i)) {
      line += ',';
      line += format_double(v);
    }
    line += '\n';
    out << line;
  }
}

FeatureTable read_table_csv(std::istream& in, const std::string& source) {
  FeatureTable t;
  std::string line;
  std::size_t number = 0;
  bool header = false;
  std::vector<double> row;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header && line.front() == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ParseError(source, number, "metadata line lacks `=`");
      const auto k = line.substr(1, eq - 1);
      const auto v = line.substr(eq + 1);
      if (k == "layout") {
        t.layout_fingerprint = v;
      } else {
        t.metadata[k] = v;
      }
      continue;
    }
    const auto fields = split_commas(line);
    if (!header) {
      if (fields.size() < 2 || fields[0] != "src" || fields[1] != "dst")
        throw ParseError(source, number, "header must start with `src,dst`");
      std::size_t first = 2;
      if (fields.size() > 2 && fields[2] == "label") {
        t.labels.emplace();
        first = 3;
      }
      for (std::size_t k = first; k < fields.size(); ++k) t.columns.emplace_back(fields[k]);
      t.matrix = FeatureMatrix(0, t.columns.size());
      header = true;
      continue;
    }
    const std::size_t first = t.labels ? 3 : 2;
    if (fields.size() != first + t.columns.size())
      throw ParseError(source, number, "expected " + std::to_string(first + t.columns.size()) + " fields, got " +
                                           std::to_string(fields.size()));
    t.edges.emplace_back(std::string(fields[0]), std::string(fields[1]));
    if (t.labels) {
      if (fields[2] == "1") {
        t.labels->push_back(1);
      } else if (fields[2] == "-1") {
        t.labels->push_back(-1);
      } else {
        throw ParseError(source, number, "label must be 1 or -1");
      }
    }
    row.resize(t.columns.size());
    for (std::size_t k = 0; k < row.size(); ++k) {
      const auto f = fields[first + k];
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), row[k]);
      if (ec != std::errc{} || ptr != f.data() + f.size())
        throw ParseError(source, number, "invalid number `" + std::string(f) + "`");
    }
    t.matrix.append_row(row);
  }
  if (!header) throw ParseError(source + ": missing header row");
  if (t.layout_fingerprint.empty()) throw ParseError(source + ": missing #layout line");
  return t;
}

FeatureTable load_table_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  return read_table_csv(in, path.string());
}

void write_table_sparse(std::ostream& out, const FeatureTable& table) {
  std::string line;
  for (std::size_t i = 0; i < table.matrix.rows(); ++i) {
    line = table.labels ? std::to_string((*table.labels)[i]) : "0";
    const auto r = table.matrix.row(i);
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (r[k] == 0.0) continue;
      line += ' ';
      line += std::to_string(k);
      line += ':';
      line += format_double(r[k]);
    }
    line += '\n';
    out << line;
  }
}

void write_table_sidecar(std::ostream& out, const FeatureTable& table) {
  nlohmann::ordered_json j;
  j["format"] = "recipnet-features";
  j["layout_version"] = FeatureLayout::kVersion;
  j["layout_fingerprint"] = table.layout_fingerprint;
  j["columns"] = table.columns;
  j["rows"] = table.matrix.rows();
  j["labelled"] = table.labels.has_value();
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [k, v] : table.metadata) meta[k] = v;
  j["metadata"] = meta;
  out << j.dump(2) << '\n';
}

void save_table(const std::filesystem::path& dir, const std::string& stem, const FeatureTable& table) {
  std::filesystem::create_directories(dir);
  auto csv = open_out(dir / (stem + ".csv"));
  write_table_csv(csv, table);
  auto svm = open_out(dir / (stem + ".svm"));
  write_table_sparse(svm, table);
  auto json = open_out(dir / (stem + ".json"));
  write_table_sidecar(json, table);
}

}  // namespace recipnet
