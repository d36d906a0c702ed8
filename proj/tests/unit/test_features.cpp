#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <random>
#include <set>

#include "graph_oracle.hpp"
#include "recipnet/error.hpp"
#include "recipnet/features.hpp"

using namespace recipnet;

namespace {

constexpr NodeId W = 0, U = 1, V = 2;

SnapshotGraph figure_one() {
  GraphBuilder b(3);
  b.add_edge(W, U, 0);
  b.add_edge(W, V, 0);
  b.add_edge(V, U, 0);
  b.add_edge(U, W, 1);
  return b.build(1);
}

std::size_t cn_index(int x, int y) { return FeatureLayout::kCommonNeighbors + 4 * x + y; }

}  // namespace

TEST_CASE("layout widths, names and fingerprints") {
  const FeatureLayout plain(false), attributed(true);
  CHECK(plain.size() == 109);
  CHECK(attributed.size() == 121);
  CHECK(plain.edge_age_index() == 108);
  CHECK(attributed.edge_age_index() == 120);
  for (const auto* l : {&plain, &attributed}) {
    const std::set<std::string> unique(l->names().begin(), l->names().end());
    CHECK(unique.size() == l->size());
    CHECK(l->fingerprint().size() == 16);
  }
  CHECK(plain.fingerprint() != attributed.fingerprint());
  CHECK(FeatureLayout(true).fingerprint() == attributed.fingerprint());
  CHECK(plain.index_of("tail_in_degree") == 0);
  CHECK(plain.index_of("head_request_reciprocity") == 9);
  CHECK(plain.index_of("cn_ii") == 10);
  CHECK(plain.index_of("cn_oi") == 14);
  CHECK(plain.index_of("jc_ii") == 26);
  CHECK(plain.index_of("aa_iii") == 42);
  CHECK(plain.index_of("aa_rrr") == 105);
  CHECK(plain.index_of("pa_out_in") == 106);
  CHECK(plain.index_of("pa_in_out") == 107);
  CHECK(attributed.index_of("cna_school") == 108);
  CHECK(attributed.index_of("jca_major") == 113);
  CHECK(attributed.index_of("aaa_city") == 119);
  CHECK(attributed.index_of("edge_age") == 120);
  CHECK_THROWS_AS(plain.index_of("cna_school"), ArgumentError);
}

TEST_CASE("single-node features") {
  const auto g = figure_one();
  const FeatureExtractor fx(g, nullptr);
  const auto w = fx.single_node(W);
  CHECK(w == std::array<double, 5>{1, 2, 2.0, 1.0, 0.5});
  GraphBuilder b(3);
  b.add_edge(0, 1, 0);
  const auto h = b.build(0);
  const FeatureExtractor fh(h, nullptr);
  CHECK(fh.single_node(2) == std::array<double, 5>{0, 0, 0, 0, 0});
  // No in-edges: the ratio falls back to d_o.
  CHECK(fh.single_node(0) == std::array<double, 5>{0, 1, 1.0, 0, 0});
}

TEST_CASE("pairwise structural features by hand") {
  SUBCASE("two-step path") {
    GraphBuilder b(3);
    b.add_edge(0, 2, 0);  // u -> w
    b.add_edge(2, 1, 0);  // w -> v
    const auto g = b.build(0);
    const FeatureExtractor fx(g, nullptr);
    CHECK(fx.common_neighbors(0, 1)[4 * 1 + 0] == 1.0);
    double total = 0;
    for (const double x : fx.common_neighbors(0, 1)) total += x;
    CHECK(total == 1.0 + 1.0 + 1.0 + 1.0);  // oi, op, pi, pp
  }
  SUBCASE("disconnected pair") {
    GraphBuilder b(4);
    b.add_edge(0, 1, 0);
    b.add_edge(2, 3, 0);
    const auto g = b.build(0);
    const FeatureExtractor fx(g, nullptr);
    for (const double x : fx.common_neighbors(0, 2)) CHECK(x == 0.0);
    for (const double x : fx.jaccard(0, 2)) CHECK(x == 0.0);
    for (const double x : fx.adamic_adar(0, 2)) CHECK(x == 0.0);
  }
  SUBCASE("identical neighbor sets and the log weight") {
    // 0 and 1 both follow 2..4; node 2 is followed by 0, 1 and 5..9.
    GraphBuilder b(10);
    for (NodeId t = 2; t <= 4; ++t) {
      b.add_edge(0, t, 0);
      b.add_edge(1, t, 0);
    }
    for (NodeId s = 5; s <= 9; ++s) b.add_edge(s, 2, 0);
    const auto g = b.build(0);
    const FeatureExtractor fx(g, nullptr);
    CHECK(fx.jaccard(0, 1)[4 * 1 + 1] == 1.0);
    CHECK(fx.jaccard(0, 1)[0] == 0.0);  // empty union
    // aa_ooi: common out-neighbors 2 (in-degree 7), 3 and 4 (in-degree 2).
    const double expected = 1.0 / std::log(7.0) + 2.0 / std::log(2.0);
    CHECK(fx.adamic_adar(0, 1)[16 * 1 + 4 * 1 + 0] == doctest::Approx(expected).epsilon(1e-15));
    // aa_ooo: every common neighbor has out-degree 0 and is skipped.
    CHECK(fx.adamic_adar(0, 1)[16 * 1 + 4 * 1 + 1] == 0.0);
  }
  SUBCASE("preferential attachment") {
    GraphBuilder b(9);
    for (NodeId t = 2; t <= 4; ++t) b.add_edge(0, t, 0);
    for (NodeId s = 5; s <= 8; ++s) b.add_edge(s, 1, 0);
    const auto g = b.build(0);
    const FeatureExtractor fx(g, nullptr);
    CHECK(fx.preferential_attachment(0, 1) == std::array<double, 2>{12.0, 0.0});
    CHECK(fx.preferential_attachment(0, 2) == std::array<double, 2>{3.0, 0.0});
  }
}

TEST_CASE("attribute features by hand") {
  GraphBuilder gb(3);
  gb.add_edge(0, 1, 0);
  const auto g = gb.build(0);
  AttributeStoreBuilder ab;
  ab.add(0, AttributeKind::kSchool, "X");
  ab.add(1, AttributeKind::kSchool, "X");
  ab.add(2, AttributeKind::kSchool, "X");
  ab.add(0, AttributeKind::kCity, "A");
  ab.add(1, AttributeKind::kCity, "B");
  const auto attrs = ab.build(3);
  const FeatureExtractor fx(g, &attrs);
  const auto f = fx.attribute_features(0, 1);
  CHECK(f[0] == 1.0);
  CHECK(f[4] == 1.0);
  CHECK(f[8] == doctest::Approx(1.0 / std::log(3.0)).epsilon(1e-15));
  CHECK(f[3] == 0.0);
  CHECK(f[7] == 0.0);  // city: union {A, B}, no overlap
  CHECK(f[11] == 0.0);
  CHECK(f[1] == 0.0);
  CHECK(f[5] == 0.0);  // major: empty union
  const FeatureExtractor plain(g, nullptr);
  CHECK_THROWS_AS(plain.attribute_features(0, 1), ArgumentError);
}

TEST_CASE("edge age") {
  GraphBuilder b(4);
  b.add_edge(0, 1, 5);
  b.add_edge(2, 3, 3);
  b.add_edge(3, 2, 7);
  b.add_edge(1, 2, 20);
  const auto g = b.build(20);
  const FeatureExtractor fx(g, nullptr);
  CHECK(fx.edge_age(0, 1) == 15.0);
  CHECK(fx.edge_age(2, 3) == 4.0);
  CHECK(fx.edge_age(1, 2) == 0.0);
  CHECK_THROWS_AS(fx.edge_age(3, 2), ConsistencyError);
  const FeatureExtractor later(g, nullptr, 25);
  CHECK(later.edge_age(0, 1) == 20.0);
  CHECK(later.edge_age(2, 3) == 4.0);
  CHECK_THROWS_AS(FeatureExtractor(g, nullptr, 19), ArgumentError);
}

TEST_CASE("matrix extraction shapes") {
  GraphBuilder b(2);
  b.add_edge(0, 1, 0);
  const auto g = b.build(0);
  const FeatureExtractor fx(g, nullptr);
  const auto empty = extract_matrix(fx, {});
  CHECK(empty.rows() == 0);
  const std::vector<Edge> one{{0, 1}};
  const auto m = extract_matrix(fx, one);
  CHECK(m.rows() == 1);
  CHECK(m.cols() == 109);
}

TEST_CASE("random graphs: every feature matches the set oracle") {
  std::mt19937_64 gen(1234);
  for (int trial = 0; trial < 150; ++trial) {
    const auto raw = oracle::random_graph(gen, 30, 200, 5);
    const auto rattrs = oracle::random_attributes(gen, raw.n, 5, 0.4);
    const auto g = oracle::build(raw);
    const auto attrs = oracle::build(rattrs);
    const FeatureExtractor fx(g, &attrs);
    std::vector<Edge> edges;
    for (const auto& [e, t] : raw.births)
      if (oracle::is_request(raw, e.first, e.second)) edges.push_back({e.first, e.second});
    const auto m = extract_matrix(fx, edges);
    for (std::size_t r = 0; r < edges.size(); ++r) {
      const auto expected = oracle::feature_row(raw, &rattrs, edges[r].src, edges[r].dst);
      REQUIRE(expected.size() == m.cols());
      for (std::size_t c = 0; c < m.cols(); ++c) {
        // Ratios, Jaccard and Adamic-Adar columns; everything else is a count.
        const bool real_valued = (c % 5 >= 2 && c < FeatureLayout::kCommonNeighbors) ||
                                 (c >= FeatureLayout::kJaccard && c < FeatureLayout::kPreferential) ||
                                 (c >= FeatureLayout::kAttribute + 4 && c < FeatureLayout::kAttribute + 12);
        if (real_valued) {
          CHECK(std::abs(m(r, c) - expected[c]) <= 1e-9);
        } else {
          CHECK(m(r, c) == expected[c]);
        }
      }
    }
    for (const auto& [e, t] : raw.births) {
      if (oracle::is_request(raw, e.first, e.second)) continue;
      std::vector<double> row(fx.layout().size());
      if (raw.births.at({e.second, e.first}) < t) {
        CHECK_THROWS_AS(fx.extract(e.first, e.second, row), ConsistencyError);
      } else {
        // Same-time pair: the acceptance side still has age 0.
        fx.extract(e.first, e.second, row);
        CHECK(row.back() == 0.0);
      }
    }
  }
}

TEST_CASE("pairwise invariants on random graphs") {
  std::mt19937_64 gen(55);
  for (int trial = 0; trial < 100; ++trial) {
    const auto raw = oracle::random_graph(gen, 25, 150, 3);
    const auto g = oracle::build(raw);
    const FeatureExtractor fx(g, nullptr);
    for (NodeId u = 0; u < raw.n; ++u) {
      const auto s = fx.single_node(u);
      CHECK(s[3] >= 0.0);
      CHECK(s[3] <= 1.0);
      CHECK(s[4] >= 0.0);
      CHECK(s[4] <= 1.0);
      for (NodeId v = 0; v < raw.n; ++v) {
        const auto cn = fx.common_neighbors(u, v);
        const auto cn_swapped = fx.common_neighbors(v, u);
        const auto jc = fx.jaccard(u, v);
        const auto aa = fx.adamic_adar(u, v);
        for (int x = 0; x < 4; ++x)
          for (int y = 0; y < 4; ++y) {
            CHECK(cn[4 * x + y] == cn_swapped[4 * y + x]);
            const auto sx = oracle::view_set(raw, u, kAllViews[x]);
            const auto sy = oracle::view_set(raw, v, kAllViews[y]);
            CHECK(jc[4 * x + y] <= 1.0);
            CHECK((jc[4 * x + y] == 1.0) == (!sx.empty() && sx == sy));
            for (int z = 0; z < 4; ++z) {
              std::size_t heavy = 0;
              for (const auto w : oracle::set_intersection(sx, sy))
                heavy += oracle::view_set(raw, w, kAllViews[z]).size() >= 2;
              CHECK((aa[16 * x + 4 * y + z] == 0.0) == (heavy == 0));
            }
          }
        CHECK(cn[cn_index(3, 3) - FeatureLayout::kCommonNeighbors] <= cn[cn_index(2, 2) - FeatureLayout::kCommonNeighbors]);
      }
    }
  }
}

TEST_CASE("matrices are bitwise identical across worker counts") {
  std::mt19937_64 gen(8);
  const auto raw = oracle::random_graph(gen, 400, 4000, 5);
  const auto rattrs = oracle::random_attributes(gen, raw.n, 8, 0.5);
  const auto g = oracle::build(raw);
  const auto attrs = oracle::build(rattrs);
  const FeatureExtractor fx(g, &attrs);
  std::vector<Edge> edges;
  for (const auto& [e, t] : raw.births)
    if (oracle::is_request(raw, e.first, e.second)) edges.push_back({e.first, e.second});
  setenv("RECIPNET_WORKERS", "1", 1);
  const auto a = extract_matrix(fx, edges);
  setenv("RECIPNET_WORKERS", "5", 1);
  const auto b = extract_matrix(fx, edges);
  unsetenv("RECIPNET_WORKERS");
  REQUIRE(a.values().size() == b.values().size());
  CHECK(std::memcmp(a.values().data(), b.values().data(), a.values().size() * sizeof(double)) == 0);
  for (const double x : a.values()) CHECK(std::isfinite(x));
}
