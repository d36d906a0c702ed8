#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "graph_oracle.hpp"
#include "recipnet/dataset.hpp"
#include "recipnet/error.hpp"
#include "recipnet/synth.hpp"

using namespace recipnet;

namespace {

constexpr NodeId W = 0, U = 1, V = 2;

SnapshotGraph figure_one(SnapshotTime time, bool reciprocate_vu) {
  GraphBuilder b(3);
  b.add_edge(W, U, 0);
  b.add_edge(W, V, 0);
  b.add_edge(V, U, 0);
  b.add_edge(U, W, 1);
  if (reciprocate_vu) b.add_edge(U, V, 2);
  return b.build(time);
}

/// 100 mutual pairs and 300 one-way edges.
SnapshotGraph hundred_pairs() {
  GraphBuilder b(500);
  for (NodeId i = 0; i < 100; ++i) {
    b.add_edge(2 * i, 2 * i + 1, 0);
    b.add_edge(2 * i + 1, 2 * i, 1);
  }
  for (NodeId j = 0; j < 300; ++j) b.add_edge(200 + j, j % 200, j % 4);
  return b.build(4);
}

FeatureMatrix matrix_of(std::size_t rows, std::size_t cols, std::mt19937_64& gen) {
  std::normal_distribution<double> d(2.0, 3.0);
  FeatureMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = d(gen);
  return m;
}

}  // namespace

TEST_CASE("reciprocal pairs are oriented by the earlier direction") {
  const auto g = figure_one(1, false);
  CHECK(orient_reciprocal_pairs(g) == std::vector<Edge>{{W, U}});
  GraphBuilder b(3);
  b.add_edge(0, 1, 0);
  b.add_edge(1, 2, 0);
  CHECK(orient_reciprocal_pairs(b.build(0)).empty());
}

TEST_CASE("orientation on random graphs, and under time reversal") {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 100; ++trial) {
    auto raw = oracle::random_graph(gen, 30, 150, 9);
    const auto oriented = orient_reciprocal_pairs(oracle::build(raw));
    std::size_t pairs = 0;
    for (const auto& [e, t] : raw.births)
      if (e.first < e.second && raw.has(e.second, e.first)) ++pairs;
    CHECK(oriented.size() == pairs);
    CHECK(std::is_sorted(oriented.begin(), oriented.end()));
    for (const auto& e : oriented) CHECK(oracle::is_request(raw, e.src, e.dst));

    auto reversed = raw;
    for (auto& [e, t] : reversed.births) t = raw.time - t;
    const auto flipped = orient_reciprocal_pairs(oracle::build(reversed));
    REQUIRE(flipped.size() == oriented.size());
    for (const auto& e : oriented) {
      const bool tie = raw.births.at({e.src, e.dst}) == raw.births.at({e.dst, e.src});
      const Edge expected = tie ? e : Edge{e.dst, e.src};
      CHECK(std::binary_search(flipped.begin(), flipped.end(), expected));
    }
  }
}

TEST_CASE("negative counts and the cap") {
  const auto g = hundred_pairs();
  const FeatureExtractor fx(g, nullptr);
  const auto half = build_training(fx, {SamplingStrategy::kRandom, 0.5, 1});
  CHECK(half.positives() == 100);
  CHECK(half.negatives() == 50);
  CHECK(half.rows() == 150);
  CHECK(half.matrix.rows() == 150);
  CHECK(half.edges.size() == 150);
  for (std::size_t i = 0; i < 100; ++i) CHECK(half.labels[i] == 1);
  const auto capped = build_training(fx, {SamplingStrategy::kEdgeAge, 10.0, 1});
  CHECK(capped.negatives() == 300);
  CHECK_THROWS_AS(build_training(fx, {SamplingStrategy::kRandom, 0.0, 1}), ArgumentError);
  CHECK_THROWS_AS(build_training(fx, {SamplingStrategy::kRandom, -1.0, 1}), ArgumentError);
  CHECK(negative_count(100, 0.25, 300) == 25);
  CHECK(negative_count(3, 0.5, 300) == 1);
  CHECK(negative_count(100, 1.5, 120) == 120);
}

TEST_CASE("edge-age sampling takes the oldest edges, ties by edge id") {
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 50; ++trial) {
    const auto raw = oracle::random_graph(gen, 40, 200, 12);
    const auto g = oracle::build(raw);
    const auto para = parasocial_edges(g);
    std::vector<std::tuple<std::int64_t, NodeId, NodeId>> by_age;
    for (const auto& [e, t] : raw.births)
      if (!raw.has(e.second, e.first)) by_age.emplace_back(t, e.first, e.second);
    std::sort(by_age.begin(), by_age.end());
    REQUIRE(by_age.size() == para.size());
    const std::size_t count = para.size() / 3;
    const auto picked = sample_negatives(g, para, {SamplingStrategy::kEdgeAge, 1.0, 0}, count);
    REQUIRE(picked.size() == count);
    for (std::size_t i = 0; i < count; ++i) {
      CHECK(picked[i].src == std::get<1>(by_age[i]));
      CHECK(picked[i].dst == std::get<2>(by_age[i]));
    }
  }
}

TEST_CASE("random sampling: seeded, without replacement, nested across alpha") {
  const auto g = hundred_pairs();
  const auto para = parasocial_edges(g);
  const auto a = sample_negatives(g, para, {SamplingStrategy::kRandom, 1.0, 7}, 120);
  const auto b = sample_negatives(g, para, {SamplingStrategy::kRandom, 1.0, 7}, 120);
  const auto c = sample_negatives(g, para, {SamplingStrategy::kRandom, 1.0, 8}, 120);
  const auto small = sample_negatives(g, para, {SamplingStrategy::kRandom, 1.0, 7}, 40);
  CHECK(a == b);
  CHECK(a != c);
  CHECK(std::equal(small.begin(), small.end(), a.begin()));
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
  for (const auto& e : a) CHECK(std::binary_search(para.begin(), para.end(), e));

  // Every edge is about equally likely to be drawn.
  std::vector<int> hits(para.size(), 0);
  for (std::uint64_t seed = 0; seed < 600; ++seed)
    for (const auto& e : sample_negatives(g, para, {SamplingStrategy::kRandom, 1.0, seed}, 30))
      ++hits[static_cast<std::size_t>(std::lower_bound(para.begin(), para.end(), e) - para.begin())];
  // Each count is Binomial(600, 0.1): mean 60, sd ≈ 7.3.
  for (const int h : hits) {
    CHECK(h > 60 - 5 * 7.35);
    CHECK(h < 60 + 5 * 7.35);
  }
}

TEST_CASE("test set labels") {
  SUBCASE("three-node example") {
    const auto base = figure_one(1, false);
    const FeatureExtractor fx(base, nullptr);
    const auto test = build_test(fx, figure_one(2, true));
    CHECK(test.edges == std::vector<Edge>{{W, V}, {V, U}});
    CHECK(test.labels == std::vector<int>{-1, 1});
    CHECK(test.role == DatasetRole::kTest);
    const auto same = build_test(fx, base);
    CHECK(same.labels == std::vector<int>{-1, -1});
  }
  SUBCASE("final snapshot must contain the base edges") {
    const auto base = figure_one(1, false);
    GraphBuilder b(3);
    b.add_edge(W, U, 0);
    const FeatureExtractor fx(base, nullptr);
    CHECK_THROWS_AS(build_test(fx, b.build(3)), ConsistencyError);
    CHECK_THROWS_AS(build_test(fx, GraphBuilder(3).build(0)), ArgumentError);
  }
  SUBCASE("synthetic series: labels equal a reverse lookup") {
    SynthConfig c;
    c.nodes = 300;
    c.snapshots = 6;
    c.new_edges = 300;
    c.seed = 3;
    const auto out = generate(c);
    const auto base = out.series.snapshot(3);
    const auto fin = out.series.snapshot(5);
    const FeatureExtractor fx(base, nullptr);
    const auto test = build_test(fx, fin);
    CHECK(test.rows() == parasocial_edges(base).size());
    for (std::size_t i = 0; i < test.rows(); ++i) {
      const auto [u, v] = test.edges[i];
      CHECK(!base.has_edge(v, u));
      CHECK(test.labels[i] == (fin.has_edge(v, u) ? 1 : -1));
    }
    const auto train = build_training(fx, {SamplingStrategy::kRandom, 1.0, 2});
    const auto s = summarize(train, test);
    CHECK(s.train_reciprocal == train.positives());
    CHECK(s.train_parasocial == test.rows());
    CHECK(s.sampled_negatives == train.negatives());
    CHECK(s.test_reciprocal + s.test_parasocial == test.rows());
    std::size_t overlap = 0;
    for (std::size_t i = train.positives(); i < train.rows(); ++i)
      overlap += fin.has_edge(train.edges[i].dst, train.edges[i].src);
    CHECK(s.negative_overlap == overlap);
    // Same inputs, same dataset.
    const auto again = build_training(fx, {SamplingStrategy::kRandom, 1.0, 2});
    CHECK(again.matrix == train.matrix);
    CHECK(again.edges == train.edges);
  }
}

TEST_CASE("attributed-only datasets keep full-graph features") {
  SynthConfig c;
  c.nodes = 400;
  c.snapshots = 5;
  c.new_edges = 500;
  c.attributes.assign_probability = 0.3;
  c.law.base = 0.3;
  c.seed = 6;
  const auto out = generate(c);
  const auto base = out.series.snapshot(3);
  const auto fin = out.series.snapshot(4);
  const auto attrs = out.attributes.restricted_to(base.num_nodes());
  const auto mask = attributed_mask(attrs, base.num_nodes());
  const FeatureExtractor fx(base, &attrs);
  const auto train = build_training(fx, {SamplingStrategy::kRandom, 1.0, 1}, mask);
  const auto test = build_test(fx, fin, mask);
  REQUIRE(train.rows() > 0);
  REQUIRE(test.rows() > 0);
  std::vector<double> row(fx.layout().size());
  for (const auto* ds : {&train, &test}) {
    for (std::size_t i = 0; i < ds->rows(); ++i) {
      const auto [u, v] = ds->edges[i];
      CHECK(attrs.attribute_degree(u) > 0);
      CHECK(attrs.attribute_degree(v) > 0);
      fx.extract(u, v, row);
      const auto got = ds->matrix.row(i);
      CHECK(std::equal(got.begin(), got.end(), row.begin()));
    }
  }
  const auto full_test = build_test(fx, fin);
  CHECK(full_test.rows() > test.rows());
}

TEST_CASE("edge-age negatives overlap future positives less on age-decaying data") {
  SynthConfig c;
  c.nodes = 2000;
  c.snapshots = 10;
  c.new_edges = 2500;
  c.law.base = 0.4;
  c.law.decay = 0.6;
  c.seed = 10;
  const auto out = generate(c);
  const auto base = out.series.snapshot(6);
  const auto fin = out.series.snapshot(9);
  const FeatureExtractor fx(base, nullptr);
  const auto test = build_test(fx, fin);
  const auto by_age = build_training(fx, {SamplingStrategy::kEdgeAge, 0.5, 1});
  double random_mean = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed)
    random_mean += static_cast<double>(negative_overlap(build_training(fx, {SamplingStrategy::kRandom, 0.5, seed}), test));
  random_mean /= 20.0;
  CHECK(static_cast<double>(negative_overlap(by_age, test)) <= random_mean);
}

TEST_CASE("normalization by hand") {
  FeatureMatrix col(2, 1);
  col(0, 0) = 1;
  col(1, 0) = 3;
  const auto c = normalize(col, Normalization::kColumn);
  CHECK(c.matrix(0, 0) == -1.0);
  CHECK(c.matrix(1, 0) == 1.0);
  CHECK(c.normalizer.means() == std::vector<double>{2.0});
  CHECK(c.normalizer.scales() == std::vector<double>{1.0});

  FeatureMatrix row(2, 2);
  row(0, 0) = 3;
  row(0, 1) = 4;
  const auto r = normalize(row, Normalization::kRow);
  CHECK(r.matrix(0, 0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(r.matrix(0, 1) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(r.matrix(1, 0) == 0.0);
  CHECK(r.matrix(1, 1) == 0.0);

  FeatureMatrix constant(3, 2);
  for (std::size_t i = 0; i < 3; ++i) {
    constant(i, 0) = 5.0;
    constant(i, 1) = static_cast<double>(i);
  }
  const auto k = normalize(constant, Normalization::kColumn);
  CHECK(k.normalizer.constant_columns() == std::vector<bool>{true, false});
  for (std::size_t i = 0; i < 3; ++i) CHECK(k.matrix(i, 0) == 0.0);
  const auto none = normalize(constant, Normalization::kNone);
  CHECK(none.matrix == constant);
  CHECK_THROWS_AS(normalize(FeatureMatrix(0, 2), Normalization::kColumn), ArgumentError);
}

TEST_CASE("normalization properties on random matrices") {
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t rows = 2 + gen() % 60, cols = 1 + gen() % 8;
    const auto m = matrix_of(rows, cols, gen);
    const auto c = normalize(m, Normalization::kColumn);
    for (std::size_t j = 0; j < cols; ++j) {
      double mean = 0.0, var = 0.0;
      for (std::size_t i = 0; i < rows; ++i) mean += c.matrix(i, j);
      mean /= static_cast<double>(rows);
      for (std::size_t i = 0; i < rows; ++i) var += (c.matrix(i, j) - mean) * (c.matrix(i, j) - mean);
      var /= static_cast<double>(rows);
      CHECK(std::abs(mean) <= 1e-9);
      CHECK(std::abs(var - 1.0) <= 1e-9);
    }
    const auto both = normalize(m, Normalization::kColumnRow);
    const auto composed = normalize(c.matrix, Normalization::kRow);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) CHECK(std::abs(both.matrix(i, j) - composed.matrix(i, j)) <= 1e-12);
    const auto r = normalize(m, Normalization::kRow);
    for (std::size_t i = 0; i < rows; ++i) {
      double norm = 0.0;
      for (std::size_t j = 0; j < cols; ++j) norm += r.matrix(i, j) * r.matrix(i, j);
      CHECK(std::abs(norm - 1.0) <= 1e-12);
    }
    // Test rows reuse the training statistics.
    const auto test = matrix_of(5, cols, gen);
    const auto applied = c.normalizer.transform(test);
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < cols; ++j)
        CHECK(applied(i, j) == doctest::Approx((test(i, j) - c.normalizer.means()[j]) / c.normalizer.scales()[j]).epsilon(1e-14));
  }
}

TEST_CASE("token round trips") {
  for (const auto s : {SamplingStrategy::kRandom, SamplingStrategy::kEdgeAge})
    CHECK(parse_sampling_strategy(to_string(s)) == s);
  for (const auto n : {Normalization::kNone, Normalization::kColumn, Normalization::kRow, Normalization::kColumnRow})
    CHECK(parse_normalization(to_string(n)) == n);
  CHECK_THROWS_AS(parse_sampling_strategy("oldest"), ArgumentError);
  CHECK_THROWS_AS(parse_normalization("l1"), ArgumentError);
}
