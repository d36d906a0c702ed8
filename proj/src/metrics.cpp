#include "recipnet/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>

#include "recipnet/error.hpp"
#include "recipnet/ingest.hpp"
#include "recipnet/parallel.hpp"

namespace recipnet {

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::kReciprocity: return "reciprocity";
    case Metric::kAssortativity: return "assortativity";
    case Metric::kClustering: return "clustering";
  }
  return "?";
}

std::string_view to_string(MetricVersion version) {
  switch (version) {
    case MetricVersion::kParasocial: return "parasocial";
    case MetricVersion::kReciprocal: return "reciprocal";
    case MetricVersion::kDirected: return "directed";
  }
  return "?";
}

double reciprocity(const SnapshotGraph& g) {
  if (g.num_edges() == 0) throw UndefinedMetricError("reciprocity of an edgeless graph");
  std::size_t requests = 0;
  std::size_t accepted = 0;
  g.for_each_edge([&](NodeId u, NodeId v) {
    if (g.classify_request(u, v) != RequestClass::kRequest) return;
    ++requests;
    if (g.has_edge(v, u)) ++accepted;
  });
  return static_cast<double>(accepted) / static_cast<double>(requests);
}

double assortativity(const UndirectedGraph& h) {
  __extension__ using Wide = __int128;
  const std::size_t n = h.num_nodes();
  // Over ordered endpoint pairs (u,v): M = 2|E|, S1 = Σ d(u), S2 = Σ d(u)², Sxy = Σ d(u)d(v).
  std::vector<Wide> cross(n, 0);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t u = begin; u < end; ++u) {
      Wide sum = 0;
      for (const NodeId v : h.neighbors(static_cast<NodeId>(u))) sum += h.degree(v);
      cross[u] = sum * static_cast<Wide>(h.degree(static_cast<NodeId>(u)));
    }
  });
  Wide m = 0, s1 = 0, s2 = 0, sxy = 0;
  for (std::size_t u = 0; u < n; ++u) {
    const Wide d = h.degree(static_cast<NodeId>(u));
    m += d;
    s1 += d * d;
    s2 += d * d * d;
    sxy += cross[u];
  }
  if (m == 0) throw UndefinedMetricError("assortativity of an edgeless graph");
  const Wide numerator = m * sxy - s1 * s1;
  const Wide denominator = m * s2 - s1 * s1;
  if (denominator == 0)
    throw UndefinedMetricError("assortativity undefined: all endpoint degrees are equal");
  const auto r = static_cast<long double>(numerator) / static_cast<long double>(denominator);
  return static_cast<double>(std::clamp(r, -1.0L, 1.0L));
}

std::vector<double> local_clustering(const UndirectedGraph& h) {
  const auto n = static_cast<NodeId>(h.num_nodes());
  // Orient each edge from lower to higher (degree, id) rank; every triangle is
  // then found exactly once from its lowest-ranked vertex.
  const auto before = [&](NodeId a, NodeId b) {
    const auto da = h.degree(a), db = h.degree(b);
    return da != db ? da < db : a < b;
  };
  std::vector<std::size_t> offsets(n + 1, 0);
  for (NodeId u = 0; u < n; ++u)
    for (const NodeId v : h.neighbors(u))
      if (before(u, v)) ++offsets[u + 1];
  for (NodeId u = 0; u < n; ++u) offsets[u + 1] += offsets[u];
  std::vector<NodeId> forward(offsets.back());
  for (NodeId u = 0; u < n; ++u) {
    std::size_t k = offsets[u];
    for (const NodeId v : h.neighbors(u))
      if (before(u, v)) forward[k++] = v;
  }
  const auto fwd = [&](NodeId u) {
    return std::span<const NodeId>(forward.data() + offsets[u], forward.data() + offsets[u + 1]);
  };

  std::vector<std::uint64_t> triangles(n, 0);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (auto u = static_cast<NodeId>(begin); u < end; ++u) {
      const auto fu = fwd(u);
      for (const NodeId v : fu) {
        const auto fv = fwd(v);
        auto i = fu.begin();
        auto j = fv.begin();
        while (i != fu.end() && j != fv.end()) {
          if (*i < *j) {
            ++i;
          } else if (*j < *i) {
            ++j;
          } else {
            std::atomic_ref<std::uint64_t>(triangles[u]).fetch_add(1, std::memory_order_relaxed);
            std::atomic_ref<std::uint64_t>(triangles[v]).fetch_add(1, std::memory_order_relaxed);
            std::atomic_ref<std::uint64_t>(triangles[*i]).fetch_add(1, std::memory_order_relaxed);
            ++i;
            ++j;
          }
        }
      }
    }
  });

  std::vector<double> c(n, 0.0);
  for (NodeId u = 0; u < n; ++u) {
    const auto d = static_cast<double>(h.degree(u));
    if (d >= 2) c[u] = 2.0 * static_cast<double>(triangles[u]) / (d * (d - 1.0));
  }
  return c;
}

double average_clustering(const UndirectedGraph& h) {
  if (h.num_nodes() == 0) return 0.0;
  const auto c = local_clustering(h);
  return pairwise_sum(c) / static_cast<double>(c.size());
}

std::optional<double> evaluate_metric(const SnapshotGraph& g, Metric metric, MetricVersion version) {
  if ((metric == Metric::kReciprocity) != (version == MetricVersion::kDirected))
    throw ArgumentError(std::string("metric ") + std::string(to_string(metric)) +
                        " is not defined on the " + std::string(to_string(version)) + " version");
  try {
    if (metric == Metric::kReciprocity) return reciprocity(g);
    const auto h = undirect(g, version == MetricVersion::kParasocial ? Version::kParasocial
                                                                     : Version::kReciprocal);
    if (metric == Metric::kAssortativity) return assortativity(h);
    return average_clustering(h);
  } catch (const UndefinedMetricError&) {
    return std::nullopt;
  }
}

MetricSeries evolution(std::span<const SnapshotGraph> snapshots, Metric metric, MetricVersion version) {
  MetricSeries series{metric, version, {}, {}};
  for (const auto& g : snapshots) {
    if (!series.times.empty() && g.snapshot_time() <= series.times.back())
      throw ArgumentError("snapshots must be in strictly increasing time order");
    series.times.push_back(g.snapshot_time());
    series.values.push_back(evaluate_metric(g, metric, version));
  }
  return series;
}

MetricSeries evolution(const GraphSeries& series, Metric metric, MetricVersion version) {
  MetricSeries out{metric, version, {}, {}};
  for (std::size_t k = 0; k < series.num_snapshots(); ++k) {
    const auto g = series.snapshot(k);
    out.times.push_back(g.snapshot_time());
    out.values.push_back(evaluate_metric(g, metric, version));
  }
  return out;
}

SnapshotSummary summarize(const SnapshotGraph& g) {
  SnapshotSummary s;
  s.time = g.snapshot_time();
  s.nodes = g.num_nodes();
  s.edges = g.num_edges();
  s.reciprocity = evaluate_metric(g, Metric::kReciprocity, MetricVersion::kDirected);
  const auto hp = undirect(g, Version::kParasocial);
  const auto hr = undirect(g, Version::kReciprocal);
  const auto assort = [](const UndirectedGraph& h) -> std::optional<double> {
    try {
      return assortativity(h);
    } catch (const UndefinedMetricError&) {
      return std::nullopt;
    }
  };
  s.assortativity_parasocial = assort(hp);
  s.assortativity_reciprocal = assort(hr);
  s.clustering_parasocial = average_clustering(hp);
  s.clustering_reciprocal = average_clustering(hr);
  return s;
}

}  // namespace recipnet
