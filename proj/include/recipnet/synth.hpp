#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "recipnet/attributes.hpp"
#include "recipnet/graph.hpp"
#include "recipnet/ingest.hpp"

namespace recipnet {

/// p = clamp(base + acceptance·R_a(head) + Σ_k shared[k]·[u,v share a kind-k value], 0, 1) · decay^age
struct ReciprocationLaw {
  double base = 0.1;
  double acceptance = 0.0;
  std::array<double, 4> shared{};  ///< school, major, employer, city
  double decay = 1.0;              ///< in (0, 1]
};

struct AttributeGenerator {
  std::array<std::size_t, 4> pool_sizes{20, 20, 20, 20};
  double assign_probability = 0.0;  ///< per node and kind
};

struct SynthConfig {
  std::size_t nodes = 1000;
  std::size_t snapshots = 10;        ///< taken at times 0..snapshots-1
  std::size_t new_edges = 1000;      ///< requests created per step
  double popular_fraction = 0.05;    ///< share of nodes that are popular
  double popular_fitness = 10.0;     ///< target weight of a popular node (ordinary = 1)
  double degree_bias = 0.5;          ///< weight of in-degree-preferential target choice
  ReciprocationLaw law;
  AttributeGenerator attributes;
  std::uint64_t seed = 1;
  bool record_trace = true;

  /// Throws ArgumentError when a parameter is out of range.
  void validate() const;
};

/// One Bernoulli reciprocation trial of a pending request (u,v).
struct TraceRecord {
  SnapshotTime time = 0;
  NodeId u = 0;  ///< dense ids of the generated series
  NodeId v = 0;
  std::uint32_t age = 0;
  double probability = 0.0;
  bool accepted = false;
};

struct SynthOutput {
  GraphSeries series;
  AttributeStore attributes;
  std::vector<TraceRecord> trace;
};

/// Every step first adds `new_edges` requests born at that time (source
/// uniform; target preferential by in-degree + 1 with weight `degree_bias`,
/// fitness-weighted otherwise; pairs already linked in either direction are
/// skipped), then gives every pending request one trial against the law,
/// evaluated on the state right after growth. Accepted requests gain their
/// reverse edge at the same time. Same seed, same output.
SynthOutput generate(const SynthConfig& config);

/// Writes `edges_<time>.txt` (cumulative, explicit birth column),
/// `attributes.tsv`, `series.tsv` (time <tab> file) and optionally `trace.csv`.
void write_synth_files(const std::filesystem::path& dir, const SynthOutput& out, bool with_trace);

}  // namespace recipnet
