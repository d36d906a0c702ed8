#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "recipnet/graph.hpp"

namespace recipnet {

class GraphSeries;

/// Fraction of friend requests whose reverse edge exists.
/// Throws UndefinedMetricError on an edgeless graph.
double reciprocity(const SnapshotGraph& g);

/// Degree assortativity: Pearson correlation of (d(u), d(v)) over both
/// orientations of every undirected edge. Accumulated as exact integer moment
/// sums, so the result does not depend on traversal order.
/// Throws UndefinedMetricError when there are no edges or all endpoint
/// degrees are equal.
double assortativity(const UndirectedGraph& h);

/// c(u) = 2L(u) / (d(u)(d(u)-1)); nodes with degree < 2 get 0.
std::vector<double> local_clustering(const UndirectedGraph& h);
/// Mean of `local_clustering` over every node (0 for an empty node set).
double average_clustering(const UndirectedGraph& h);

enum class Metric : std::uint8_t { kReciprocity, kAssortativity, kClustering };
enum class MetricVersion : std::uint8_t { kParasocial, kReciprocal, kDirected };

std::string_view to_string(Metric metric);
std::string_view to_string(MetricVersion version);

struct MetricSeries {
  Metric metric = Metric::kReciprocity;
  MetricVersion version = MetricVersion::kDirected;
  std::vector<SnapshotTime> times;
  /// nullopt where the metric is undefined on that snapshot.
  std::vector<std::optional<double>> values;
};

/// Reciprocity requires kDirected; the other metrics require an undirected version.
std::optional<double> evaluate_metric(const SnapshotGraph& g, Metric metric, MetricVersion version);
MetricSeries evolution(std::span<const SnapshotGraph> snapshots, Metric metric, MetricVersion version);
MetricSeries evolution(const GraphSeries& series, Metric metric, MetricVersion version);

/// The per-snapshot network statistics row.
struct SnapshotSummary {
  SnapshotTime time = 0;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::optional<double> reciprocity;
  std::optional<double> assortativity_parasocial;
  std::optional<double> assortativity_reciprocal;
  double clustering_parasocial = 0.0;
  double clustering_reciprocal = 0.0;
};

SnapshotSummary summarize(const SnapshotGraph& g);

}  // namespace recipnet
