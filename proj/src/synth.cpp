#include "recipnet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include "recipnet/error.hpp"
#include "recipnet/format.hpp"
#include "recipnet/rng.hpp"

namespace recipnet {

void SynthConfig::validate() const {
  const auto unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (nodes < 2) throw ArgumentError("synth: nodes must be at least 2");
  if (nodes > 0xffffffffULL) throw ArgumentError("synth: too many nodes");
  if (snapshots < 1) throw ArgumentError("synth: snapshots must be at least 1");
  if (!unit(popular_fraction)) throw ArgumentError("synth: popular_fraction must lie in [0, 1]");
  if (!(popular_fitness > 0.0) || !std::isfinite(popular_fitness))
    throw ArgumentError("synth: popular_fitness must be positive");
  if (!unit(degree_bias)) throw ArgumentError("synth: degree_bias must lie in [0, 1]");
  if (!std::isfinite(law.base) || !std::isfinite(law.acceptance))
    throw ArgumentError("synth: law coefficients must be finite");
  for (const double c : law.shared)
    if (!std::isfinite(c)) throw ArgumentError("synth: law coefficients must be finite");
  if (!(law.decay > 0.0 && law.decay <= 1.0)) throw ArgumentError("synth: decay must lie in (0, 1]");
  if (!unit(attributes.assign_probability)) throw ArgumentError("synth: assign_probability must lie in [0, 1]");
  if (attributes.assign_probability > 0.0)
    for (const auto size : attributes.pool_sizes)
      if (size == 0) throw ArgumentError("synth: attribute pools must be non-empty");
}

namespace {

constexpr std::int32_t kNoValue = -1;

std::uint64_t key(std::uint32_t u, std::uint32_t v) { return (static_cast<std::uint64_t>(u) << 32) | v; }

struct Pending {
  std::uint32_t u;
  std::uint32_t v;
  SnapshotTime birth;
};

class Generator {
 public:
  explicit Generator(const SynthConfig& c)
      : c_(c), rng_(derive_seed(c.seed, "synth")), in_degree_(c.nodes, 0), mutual_(c.nodes, 0),
        values_(c.nodes) {
    const auto n = c_.nodes;
    // Popular nodes are a random subset so that their ids carry no signal.
    std::vector<std::uint32_t> order(n);
    for (std::uint32_t i = 0; i < n; ++i) order[i] = i;
    Rng pick(derive_seed(c.seed, "synth/popular"));
    pick.shuffle(order);
    const auto popular = static_cast<std::size_t>(std::llround(c_.popular_fraction * static_cast<double>(n)));
    std::vector<double> fitness(n, 1.0);
    for (std::size_t k = 0; k < popular; ++k) fitness[order[k]] = c_.popular_fitness;
    cumulative_.resize(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) cumulative_[i] = total += fitness[i];

    Rng attr(derive_seed(c.seed, "synth/attributes"));
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t k = 0; k < 4; ++k) {
        values_[u][k] = kNoValue;
        if (c_.attributes.assign_probability > 0.0 && attr.bernoulli(c_.attributes.assign_probability))
          values_[u][k] = static_cast<std::int32_t>(attr.below(c_.attributes.pool_sizes[k]));
      }
    }
  }

  void run() {
    for (std::size_t step = 0; step < c_.snapshots; ++step) {
      const auto t = static_cast<SnapshotTime>(step);
      grow(t);
      reciprocate(t);
    }
  }

  const std::vector<TemporalEdge>& edges() const { return edges_; }
  const std::vector<TraceRecord>& trace() const { return trace_; }
  std::int32_t value(std::size_t u, std::size_t k) const { return values_[u][k]; }

 private:
  std::uint32_t pick_target() {
    const std::size_t n = c_.nodes;
    if (rng_.uniform() < c_.degree_bias) {
      // Weight in-degree + 1: a uniform node, or the head of a uniform edge.
      const std::size_t total = heads_.size() + n;
      const auto r = rng_.below(total);
      return r < n ? static_cast<std::uint32_t>(r) : heads_[r - n];
    }
    const double r = rng_.uniform() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
    return static_cast<std::uint32_t>(std::min<std::size_t>(it - cumulative_.begin(), n - 1));
  }

  void add_edge(std::uint32_t u, std::uint32_t v, SnapshotTime t) {
    present_.insert(key(u, v));
    ++in_degree_[v];
    heads_.push_back(v);
    edges_.push_back({u, v, t});
  }

  void grow(SnapshotTime t) {
    std::size_t added = 0;
    const std::size_t max_attempts = 20 * c_.new_edges + 100;
    for (std::size_t attempt = 0; added < c_.new_edges && attempt < max_attempts; ++attempt) {
      const auto u = static_cast<std::uint32_t>(rng_.below(c_.nodes));
      const auto v = pick_target();
      if (u == v || present_.count(key(u, v)) || present_.count(key(v, u))) continue;
      add_edge(u, v, t);
      pending_.push_back({u, v, t});
      ++added;
    }
  }

  double probability(const Pending& e, SnapshotTime t) const {
    const auto& law = c_.law;
    const double acceptance = static_cast<double>(mutual_[e.v]) / static_cast<double>(in_degree_[e.v]);
    double p = law.base + law.acceptance * acceptance;
    for (std::size_t k = 0; k < 4; ++k)
      if (values_[e.u][k] != kNoValue && values_[e.u][k] == values_[e.v][k]) p += law.shared[k];
    p = std::clamp(p, 0.0, 1.0);
    if (law.decay < 1.0) p *= std::pow(law.decay, static_cast<double>(t - e.birth));
    return p;
  }

  void reciprocate(SnapshotTime t) {
    std::vector<char> accepted(pending_.size(), 0);
    for (std::size_t i = 0; i < pending_.size(); ++i) {
      const double p = probability(pending_[i], t);
      accepted[i] = rng_.uniform() < p ? 1 : 0;
      if (c_.record_trace)
        trace_.push_back({t, pending_[i].u, pending_[i].v, static_cast<std::uint32_t>(t - pending_[i].birth), p,
                          accepted[i] != 0});
    }
    std::vector<Pending> still;
    still.reserve(pending_.size());
    for (std::size_t i = 0; i < pending_.size(); ++i) {
      const auto& e = pending_[i];
      if (!accepted[i]) {
        still.push_back(e);
        continue;
      }
      add_edge(e.v, e.u, t);
      ++mutual_[e.u];
      ++mutual_[e.v];
    }
    pending_ = std::move(still);
  }

  const SynthConfig& c_;
  Rng rng_;
  std::vector<double> cumulative_;
  std::vector<std::uint32_t> in_degree_;
  std::vector<std::uint32_t> mutual_;
  std::vector<std::array<std::int32_t, 4>> values_;
  std::vector<std::uint32_t> heads_;
  std::unordered_set<std::uint64_t> present_;
  std::vector<Pending> pending_;
  std::vector<TemporalEdge> edges_;
  std::vector<TraceRecord> trace_;
};

}  // namespace

SynthOutput generate(const SynthConfig& config) {
  config.validate();
  Generator gen(config);
  gen.run();

  // Keep only nodes that appear in some edge; raw ids are generator indices.
  std::vector<std::int64_t> compact(config.nodes, -1);
  std::vector<std::string> raw;
  std::vector<std::uint32_t> original;
  for (const auto& e : gen.edges()) {
    for (const std::uint32_t x : {e.src, e.dst}) {
      if (compact[x] >= 0) continue;
      compact[x] = static_cast<std::int64_t>(raw.size());
      raw.push_back(std::to_string(x));
      original.push_back(x);
    }
  }
  std::vector<TemporalEdge> edges = gen.edges();
  for (auto& e : edges) {
    e.src = static_cast<NodeId>(compact[e.src]);
    e.dst = static_cast<NodeId>(compact[e.dst]);
  }
  std::vector<SnapshotTime> times(config.snapshots);
  for (std::size_t k = 0; k < times.size(); ++k) times[k] = static_cast<SnapshotTime>(k);

  SynthOutput out;
  out.series = GraphSeries::assemble(raw, std::move(edges), std::move(times), BirthSource::kExplicit);
  const auto& ids = out.series.ids();
  std::vector<NodeId> dense(config.nodes, 0);
  for (std::size_t i = 0; i < original.size(); ++i) dense[original[i]] = *ids.find(raw[i]);

  AttributeStoreBuilder builder;
  for (std::size_t i = 0; i < original.size(); ++i) {
    for (std::size_t k = 0; k < 4; ++k) {
      const auto v = gen.value(original[i], k);
      if (v == kNoValue) continue;
      const auto kind = kAllKinds[k];
      builder.add(dense[original[i]], kind, std::string(to_string(kind)) + "_" + std::to_string(v));
    }
  }
  out.attributes = builder.build(ids.size());

  out.trace = gen.trace();
  for (auto& r : out.trace) {
    r.u = dense[r.u];
    r.v = dense[r.v];
  }
  return out;
}

void write_synth_files(const std::filesystem::path& dir, const SynthOutput& out, bool with_trace) {
  std::filesystem::create_directories(dir);
  const auto open = [&](const std::string& name) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw ArgumentError("cannot write " + (dir / name).string());
    return f;
  };
  const auto& series = out.series;
  const auto& ids = series.ids();
  auto index = open("series.tsv");
  index << "# time\tedge_file\n";
  for (std::size_t k = 0; k < series.num_snapshots(); ++k) {
    const SnapshotTime t = series.times()[k];
    const std::string name = "edges_" + std::to_string(t) + ".txt";
    index << t << '\t' << name << '\n';
    std::vector<EdgeRecord> records;
    for (const auto& e : series.edges())
      if (e.birth <= t) records.push_back({ids.raw(e.src), ids.raw(e.dst), e.birth, 0});
    auto f = open(name);
    write_edge_records(f, records);
  }
  std::vector<AttributeRecord> attrs;
  for (NodeId u = 0; u < out.attributes.num_nodes(); ++u)
    for (const AttributeId a : out.attributes.attributes_of(u))
      attrs.push_back({ids.raw(u), out.attributes.kind(a), out.attributes.value(a), 0});
  auto af = open("attributes.tsv");
  write_attribute_records(af, attrs);
  if (with_trace) {
    auto tf = open("trace.csv");
    tf << "time,src,dst,age,probability,accepted\n";
    for (const auto& r : out.trace)
      tf << r.time << ',' << ids.raw(r.u) << ',' << ids.raw(r.v) << ',' << r.age << ',' << format_double(r.probability)
         << ',' << (r.accepted ? 1 : 0) << '\n';
  }
}

}  // namespace recipnet
