#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "graph_oracle.hpp"
#include "recipnet/error.hpp"
#include "recipnet/ingest.hpp"

using namespace recipnet;
namespace fs = std::filesystem;

namespace {

std::vector<EdgeRecord> records(const std::string& text) {
  std::istringstream in(text);
  return parse_edge_stream(in, "test");
}

GraphSeries series_of(const std::vector<std::string>& files, std::vector<SnapshotTime> times) {
  std::vector<std::vector<EdgeRecord>> parsed;
  for (const auto& f : files) parsed.push_back(records(f));
  return assemble_series(parsed, times);
}

NodeId id(const GraphSeries& s, const std::string& raw) {
  const auto found = s.ids().find(raw);
  REQUIRE(found.has_value());
  return *found;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("recipnet_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace

TEST_CASE("births come from the first file that lists an edge") {
  const auto s = series_of({"a\tb\n", "a\tb\nb\ta\n"}, {0, 1});
  const auto g1 = s.snapshot(1);
  CHECK(g1.edge_birth(id(s, "a"), id(s, "b")) == 0);
  CHECK(g1.edge_birth(id(s, "b"), id(s, "a")) == 1);
  CHECK(s.birth_source() == BirthSource::kFirstSighting);
  const auto g0 = s.snapshot(0);
  CHECK(g0.num_edges() == 1);
}

TEST_CASE("empty file gives an edgeless snapshot") {
  const auto s = series_of({"# nothing here\n"}, {0});
  CHECK(s.num_snapshots() == 1);
  CHECK(s.snapshot(0).num_edges() == 0);
  CHECK(s.snapshot(0).num_nodes() == 0);
}

TEST_CASE("explicit birth column wins and is reported") {
  const auto s = series_of({"x y 0\n", "x y 0\ny x 3\n"}, {2, 5});
  CHECK(s.birth_source() == BirthSource::kExplicit);
  const auto g = s.snapshot(1);
  CHECK(g.edge_birth(id(s, "y"), id(s, "x")) == 3);
  // Snapshot at time 2 holds the edge born at 0 only.
  CHECK(s.snapshot(0).num_edges() == 1);
  CHECK_THROWS_AS(series_of({"x y 7\n"}, {2}), ParseError);
  CHECK(series_of({"x y 1\n", "y x\n"}, {1, 2}).birth_source() == BirthSource::kMixed);
}

TEST_CASE("malformed input reports the line number") {
  try {
    records("a b\nonly_one_field\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(records("a a\n"), ParseError);
  CHECK_THROWS_AS(records("a b -1\n"), ParseError);
  CHECK_THROWS_AS(records("a b x\n"), ParseError);
  CHECK_THROWS_AS(series_of({"a b\n", "a b\n"}, {1, 1}), ArgumentError);
  CHECK_THROWS_AS(series_of({"a b\n", "a b\n"}, {2, 1}), ArgumentError);
}

TEST_CASE("raw id order: numeric ids first, numerically") {
  CHECK(raw_id_less("9", "10"));
  CHECK(raw_id_less("10", "a"));
  CHECK(raw_id_less("a", "b"));
  CHECK_FALSE(raw_id_less("10", "10"));
  CHECK(raw_id_less("007", "8"));
  CHECK(raw_id_less("123456789012345678901", "123456789012345678902"));
  CHECK(raw_id_less("99999999999999999999", "123456789012345678901"));
}

TEST_CASE("dense ids follow node birth then raw id, whatever the line order") {
  const auto a = series_of({"20 3\n", "3 20\n5 3\n"}, {0, 1});
  const auto b = series_of({"20 3\n", "5 3\n3 20\n"}, {0, 1});
  CHECK(id(a, "3") == 0);
  CHECK(id(a, "20") == 1);
  CHECK(id(a, "5") == 2);
  for (const auto& raw : {"3", "20", "5"}) CHECK(id(a, raw) == id(b, raw));
  CHECK(a.nodes_at(0) == 2);
  CHECK(a.nodes_at(1) == 3);
}

TEST_CASE("re-listing old edges never changes their births (random series)") {
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t steps = 2 + gen() % 4;
    std::vector<std::pair<std::string, std::string>> listed;
    std::map<std::pair<std::string, std::string>, SnapshotTime> first;
    std::vector<std::string> files;
    std::vector<SnapshotTime> times;
    SnapshotTime t = 0;
    for (std::size_t k = 0; k < steps; ++k) {
      t += 1 + static_cast<SnapshotTime>(gen() % 3);
      for (int e = 0; e < 6; ++e) {
        const auto u = std::to_string(gen() % 12);
        const auto v = std::to_string(gen() % 12);
        if (u == v) continue;
        listed.emplace_back(u, v);
        first.emplace(std::make_pair(u, v), t);
      }
      auto shuffled = listed;
      std::shuffle(shuffled.begin(), shuffled.end(), gen);
      std::string text;
      for (const auto& [u, v] : shuffled) text += u + "\t" + v + "\n";
      files.push_back(text);
      times.push_back(t);
    }
    const auto s = series_of(files, times);
    const auto last = s.snapshot(s.num_snapshots() - 1);
    CHECK(last.num_edges() == first.size());
    for (const auto& [e, birth] : first) CHECK(last.edge_birth(id(s, e.first), id(s, e.second)) == birth);
    for (std::size_t k = 0; k + 1 < s.num_snapshots(); ++k) {
      const auto g = s.snapshot(k);
      const auto h = s.snapshot(k + 1);
      g.for_each_edge([&](NodeId u, NodeId v) { CHECK(h.has_edge(u, v)); });
    }
  }
}

TEST_CASE("attribute loading") {
  const auto s = series_of({"alice bob\ncarol bob\n"}, {0});
  std::istringstream in(
      "alice\tSchool\tMIT\nbob\tschool\tMIT\nbob\tCITY\tBoston\nghost\tcity\tNowhere\n# comment\n");
  const auto load = build_attributes(parse_attribute_stream(in, "attrs"), s.ids());
  const auto& store = load.store;
  CHECK(load.skipped_records == 1);
  const auto mit = store.find(AttributeKind::kSchool, "MIT");
  REQUIRE(mit.has_value());
  CHECK(store.social_degree(*mit) == 2);
  CHECK(store.attribute_degree(id(s, "carol")) == 0);
  CHECK(store.attribute_degree(id(s, "bob")) == 2);
  std::istringstream bad("alice\thobby\tchess\n");
  CHECK_THROWS_AS(parse_attribute_stream(bad, "attrs"), ParseError);
  std::istringstream blank("alice\tschool\t   \n");
  CHECK_THROWS_AS(parse_attribute_stream(blank, "attrs"), ParseError);
}

TEST_CASE("attribute store is an exact transpose (random tables)") {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto raw = oracle::random_attributes(gen, 1 + gen() % 40, 6, 0.5);
    const auto store = oracle::build(raw);
    std::size_t incidences = 0;
    for (NodeId u = 0; u < store.num_nodes(); ++u) {
      const auto list = store.attributes_of(u);
      CHECK(std::is_sorted(list.begin(), list.end()));
      for (const auto a : list) {
        const auto holders = store.holders_of(a);
        CHECK(std::binary_search(holders.begin(), holders.end(), u));
      }
      std::size_t expected = 0;
      for (int k = 0; k < 4; ++k) expected += raw.attrs[u][k].size();
      CHECK(list.size() == expected);
      incidences += list.size();
    }
    std::size_t transposed = 0;
    for (AttributeId a = 0; a < store.num_attributes(); ++a) {
      const auto holders = store.holders_of(a);
      CHECK(std::is_sorted(holders.begin(), holders.end()));
      for (const auto u : holders) {
        const auto list = store.attributes_of(u);
        CHECK(std::binary_search(list.begin(), list.end(), a));
      }
      transposed += holders.size();
    }
    CHECK(incidences == transposed);
    CHECK(incidences == store.num_incidences());
  }
}

TEST_CASE("attributed subgraph") {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto raw = oracle::random_graph(gen, 25, 80, 3);
    const auto g = oracle::build(raw);
    SUBCASE("random attributes") {
      const auto attrs = oracle::build(oracle::random_attributes(gen, raw.n, 4, 0.3));
      const auto sub = filter_attributed_subgraph(g, attrs);
      std::size_t expected_edges = 0;
      g.for_each_edge([&](NodeId u, NodeId v) {
        if (attrs.attribute_degree(u) > 0 && attrs.attribute_degree(v) > 0) ++expected_edges;
      });
      CHECK(sub.graph.num_edges() == expected_edges);
      sub.graph.for_each_edge([&](NodeId a, NodeId b) {
        const NodeId u = sub.to_parent[a], v = sub.to_parent[b];
        CHECK(attrs.attribute_degree(u) > 0);
        CHECK(attrs.attribute_degree(v) > 0);
        CHECK(g.has_edge(u, v));
        CHECK(sub.graph.edge_birth(a, b) == g.edge_birth(u, v));
      });
    }
    SUBCASE("all nodes attributed") {
      AttributeStoreBuilder b;
      for (NodeId u = 0; u < raw.n; ++u) b.add(u, AttributeKind::kCity, "c");
      const auto sub = filter_attributed_subgraph(g, b.build(raw.n));
      CHECK(sub.graph.num_nodes() == g.num_nodes());
      CHECK(sub.graph.edges() == g.edges());
    }
    SUBCASE("no node attributed") {
      const auto sub = filter_attributed_subgraph(g, AttributeStoreBuilder().build(raw.n));
      CHECK(sub.graph.num_nodes() == 0);
      CHECK(sub.graph.num_edges() == 0);
    }
  }
}

TEST_CASE("binary image round trip") {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::string> files;
    std::string acc;
    for (int k = 0; k < 4; ++k) {
      for (int e = 0; e < 10; ++e) {
        const auto u = "n" + std::to_string(gen() % 15);
        const auto v = std::to_string(gen() % 15);
        acc += u + "\t" + v + "\n";
      }
      files.push_back(acc);
    }
    const auto s = series_of(files, {0, 3, 4, 9});
    AttributeStoreBuilder ab;
    for (NodeId u = 0; u < s.ids().size(); u += 2) ab.add(u, AttributeKind::kMajor, "m" + std::to_string(u % 3));
    const auto attrs = ab.build(s.ids().size());

    std::stringstream buf;
    write_image(buf, s, &attrs);
    const auto image = read_image(buf);
    REQUIRE(image.attributes.has_value());
    CHECK(image.series.times().size() == s.times().size());
    CHECK(std::equal(s.times().begin(), s.times().end(), image.series.times().begin()));
    CHECK(image.series.birth_source() == s.birth_source());
    for (NodeId u = 0; u < s.ids().size(); ++u) CHECK(image.series.ids().raw(u) == s.ids().raw(u));
    for (std::size_t k = 0; k < s.num_snapshots(); ++k) {
      const auto a = s.snapshot(k);
      const auto b = image.series.snapshot(k);
      REQUIRE(a.edges() == b.edges());
      a.for_each_edge([&](NodeId u, NodeId v) { CHECK(a.edge_birth(u, v) == b.edge_birth(u, v)); });
    }
    for (NodeId u = 0; u < s.ids().size(); ++u) {
      const auto x = attrs.attributes_of(u);
      const auto y = image.attributes->attributes_of(u);
      CHECK(std::vector<AttributeId>(x.begin(), x.end()) == std::vector<AttributeId>(y.begin(), y.end()));
    }
    std::stringstream again;
    write_image(again, image.series, &*image.attributes);
    CHECK(again.str() == buf.str());
  }
}

TEST_CASE("corrupted images are rejected") {
  const auto s = series_of({"a b\n", "b a\n"}, {0, 1});
  std::stringstream buf;
  write_image(buf, s, nullptr);
  std::string bytes = buf.str();
  SUBCASE("flipped byte") {
    bytes[bytes.size() / 2] ^= 0x5a;
    std::istringstream in(bytes);
    CHECK_THROWS_AS(read_image(in), ParseError);
  }
  SUBCASE("truncated") {
    std::istringstream in(bytes.substr(0, bytes.size() - 3));
    CHECK_THROWS_AS(read_image(in), ParseError);
  }
  SUBCASE("no attributes stored") {
    std::istringstream in(bytes);
    CHECK_FALSE(read_image(in).attributes.has_value());
  }
}

TEST_CASE("series index files") {
  TempDir dir("index");
  write_file(dir.path / "e0.txt", "a b\n");
  write_file(dir.path / "e1.txt", "a b\nb a\nc a\n");
  write_file(dir.path / "series.tsv", "# time\tfile\n0\te0.txt\n5\te1.txt\n");
  const auto s = load_series_index(dir.path / "series.tsv");
  CHECK(s.num_snapshots() == 2);
  CHECK(s.index_of(5) == 1);
  CHECK_THROWS_AS(s.index_of(3), ArgumentError);
  CHECK(s.snapshot(1).num_edges() == 3);
  write_file(dir.path / "bad.tsv", "0 e0.txt extra\n");
  CHECK_THROWS_AS(parse_series_index(dir.path / "bad.tsv"), ParseError);
  CHECK_THROWS_AS(load_snapshot_series(std::vector<fs::path>{dir.path / "missing.txt"}, std::vector<SnapshotTime>{0}),
                  ParseError);
}
