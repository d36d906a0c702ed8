#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "recipnet/dataset.hpp"
#include "recipnet/features.hpp"
#include "recipnet/ingest.hpp"
#include "recipnet/matrix.hpp"

namespace recipnet {

/// A feature matrix as stored on disk: edge ids as text, optional labels.
///
/// Dense CSV layout:
///   #layout=<fingerprint>
///   #<key>=<value>            (zero or more metadata lines)
///   src,dst[,label],<feature names...>
///   <rows>
struct FeatureTable {
  std::string layout_fingerprint;
  std::map<std::string, std::string> metadata;
  std::vector<std::string> columns;
  std::vector<std::pair<std::string, std::string>> edges;
  std::optional<std::vector<int>> labels;
  FeatureMatrix matrix;
};

/// Edge ids are written as raw ids when `ids` is given, dense ids otherwise.
FeatureTable make_table(const FeatureLayout& layout, std::span<const Edge> edges, const FeatureMatrix& matrix,
                        const std::vector<int>* labels, const IdMap* ids);
FeatureTable make_table(const FeatureLayout& layout, const LabeledDataset& data, const IdMap* ids);

void write_table_csv(std::ostream& out, const FeatureTable& table);
FeatureTable read_table_csv(std::istream& in, const std::string& source);
FeatureTable load_table_csv(const std::filesystem::path& path);

/// `label idx:value ...` with 0-based indices and zeros omitted; unlabeled rows use 0.
void write_table_sparse(std::ostream& out, const FeatureTable& table);

/// JSON description of the layout and the table.
void write_table_sidecar(std::ostream& out, const FeatureTable& table);

/// `<stem>.csv`, `<stem>.svm` and `<stem>.json` in `dir`.
void save_table(const std::filesystem::path& dir, const std::string& stem, const FeatureTable& table);

}  // namespace recipnet
