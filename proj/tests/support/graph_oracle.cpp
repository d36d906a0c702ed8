#include "graph_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

namespace oracle {

using recipnet::NeighborView;

RawGraph random_graph(std::mt19937_64& gen, std::size_t max_nodes, std::size_t max_edges, std::int64_t time) {
  RawGraph g;
  g.n = std::uniform_int_distribution<std::size_t>(1, max_nodes)(gen);
  g.time = time;
  if (g.n < 2) return g;
  const std::size_t cap = std::min(max_edges, g.n * (g.n - 1));
  const std::size_t m = std::uniform_int_distribution<std::size_t>(0, cap)(gen);
  std::uniform_int_distribution<Node> node(0, static_cast<Node>(g.n - 1));
  std::uniform_int_distribution<std::int64_t> birth(0, time);
  // Denser mutual structure than uniform pairs: sometimes add the reverse.
  std::bernoulli_distribution mutual(0.4);
  while (g.births.size() < m) {
    const Node u = node(gen);
    const Node v = node(gen);
    if (u == v) continue;
    g.births.emplace(std::make_pair(u, v), birth(gen));
    if (g.births.size() < m && mutual(gen)) g.births.emplace(std::make_pair(v, u), birth(gen));
  }
  return g;
}

recipnet::SnapshotGraph build(const RawGraph& g) {
  recipnet::GraphBuilder b(g.n);
  for (const auto& [e, t] : g.births) b.add_edge(e.first, e.second, t);
  return b.build(g.time);
}

NodeSet in_set(const RawGraph& g, Node u) {
  NodeSet s;
  for (const auto& [e, t] : g.births)
    if (e.second == u) s.insert(e.first);
  return s;
}

NodeSet out_set(const RawGraph& g, Node u) {
  NodeSet s;
  for (const auto& [e, t] : g.births)
    if (e.first == u) s.insert(e.second);
  return s;
}

NodeSet set_union(const NodeSet& a, const NodeSet& b) {
  NodeSet s;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::inserter(s, s.end()));
  return s;
}

NodeSet set_intersection(const NodeSet& a, const NodeSet& b) {
  NodeSet s;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(s, s.end()));
  return s;
}

NodeSet view_set(const RawGraph& g, Node u, NeighborView view) {
  switch (view) {
    case NeighborView::kIn: return in_set(g, u);
    case NeighborView::kOut: return out_set(g, u);
    case NeighborView::kParasocial: return set_union(in_set(g, u), out_set(g, u));
    case NeighborView::kReciprocal: return set_intersection(in_set(g, u), out_set(g, u));
  }
  return {};
}

bool is_request(const RawGraph& g, Node u, Node v) {
  const auto rev = g.births.find({v, u});
  if (rev == g.births.end()) return true;
  const std::int64_t fwd = g.births.at({u, v});
  if (fwd != rev->second) return fwd < rev->second;
  return u < v;
}

RawAttributes random_attributes(std::mt19937_64& gen, std::size_t n, int pool, double probability) {
  RawAttributes a;
  a.attrs.resize(n);
  std::bernoulli_distribution take(probability);
  std::uniform_int_distribution<int> value(0, pool - 1);
  std::uniform_int_distribution<int> count(1, 2);
  for (std::size_t u = 0; u < n; ++u)
    for (int k = 0; k < 4; ++k)
      if (take(gen))
        for (int c = count(gen); c > 0; --c) a.attrs[u][k].insert(value(gen));
  for (std::size_t u = 0; u < n; ++u)
    for (int k = 0; k < 4; ++k)
      for (const int v : a.attrs[u][k]) ++a.holders[k][v];
  return a;
}

recipnet::AttributeStore build(const RawAttributes& a) {
  recipnet::AttributeStoreBuilder b;
  for (std::size_t u = 0; u < a.attrs.size(); ++u)
    for (int k = 0; k < 4; ++k)
      for (const int v : a.attrs[u][k])
        b.add(static_cast<recipnet::NodeId>(u), static_cast<recipnet::AttributeKind>(k), "v" + std::to_string(v));
  return b.build(a.attrs.size());
}

namespace {

double ratio(std::size_t a, std::size_t b) { return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b); }

constexpr NeighborView kViews[4] = {NeighborView::kIn, NeighborView::kOut, NeighborView::kParasocial,
                                    NeighborView::kReciprocal};

void single_node(const RawGraph& g, Node u, std::vector<double>& row) {
  const std::size_t di = in_set(g, u).size();
  const std::size_t d_o = out_set(g, u).size();
  const std::size_t dr = view_set(g, u, NeighborView::kReciprocal).size();
  row.push_back(static_cast<double>(di));
  row.push_back(static_cast<double>(d_o));
  row.push_back(static_cast<double>(d_o) / static_cast<double>(std::max<std::size_t>(di, 1)));
  row.push_back(ratio(dr, di));
  row.push_back(ratio(dr, d_o));
}

}  // namespace

std::vector<double> feature_row(const RawGraph& g, const RawAttributes* a, Node u, Node v) {
  std::vector<double> row;
  single_node(g, u, row);
  single_node(g, v, row);
  // Every node's four views, from one pass over the edges.
  std::vector<NodeSet> ins(g.n), outs(g.n);
  for (const auto& [e, t] : g.births) {
    outs[e.first].insert(e.second);
    ins[e.second].insert(e.first);
  }
  std::vector<std::array<NodeSet, 4>> views(g.n);
  for (Node w = 0; w < g.n; ++w)
    views[w] = {ins[w], outs[w], set_union(ins[w], outs[w]), set_intersection(ins[w], outs[w])};
  const auto& su = views[u];
  const auto& sv = views[v];

  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y) row.push_back(static_cast<double>(set_intersection(su[x], sv[y]).size()));
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y)
      row.push_back(ratio(set_intersection(su[x], sv[y]).size(), set_union(su[x], sv[y]).size()));
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y)
      for (int z = 0; z < 4; ++z) {
        double s = 0.0;
        for (const Node w : set_intersection(su[x], sv[y])) {
          const std::size_t d = views[w][z].size();
          if (d > 1) s += 1.0 / std::log(static_cast<double>(d));
        }
        row.push_back(s);
      }
  row.push_back(static_cast<double>(su[1].size() * sv[0].size()));
  row.push_back(static_cast<double>(su[0].size() * sv[1].size()));
  if (a) {
    double cn[4], jc[4], aa[4];
    for (int k = 0; k < 4; ++k) {
      const auto& au = a->attrs[u][k];
      const auto& av = a->attrs[v][k];
      std::set<int> common, all;
      std::set_intersection(au.begin(), au.end(), av.begin(), av.end(), std::inserter(common, common.end()));
      std::set_union(au.begin(), au.end(), av.begin(), av.end(), std::inserter(all, all.end()));
      cn[k] = static_cast<double>(common.size());
      jc[k] = ratio(common.size(), all.size());
      aa[k] = 0.0;
      for (const int b : common) {
        const std::size_t d = a->holders[k].at(b);
        if (d > 1) aa[k] += 1.0 / std::log(static_cast<double>(d));
      }
    }
    row.insert(row.end(), cn, cn + 4);
    row.insert(row.end(), jc, jc + 4);
    row.insert(row.end(), aa, aa + 4);
  }
  const auto rev = g.births.find({v, u});
  const std::int64_t fwd = g.births.at({u, v});
  row.push_back(static_cast<double>(rev == g.births.end() ? g.time - fwd : rev->second - fwd));
  return row;
}

double pearson_assortativity(const std::vector<NodeSet>& adj) {
  std::vector<double> xs, ys;
  for (std::size_t u = 0; u < adj.size(); ++u)
    for (const Node v : adj[u]) {
      xs.push_back(static_cast<double>(adj[u].size()));
      ys.push_back(static_cast<double>(adj[v].size()));
    }
  const double n = static_cast<double>(xs.size());
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

double naive_average_clustering(const std::vector<NodeSet>& adj) {
  if (adj.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t u = 0; u < adj.size(); ++u) {
    const std::vector<Node> nb(adj[u].begin(), adj[u].end());
    if (nb.size() < 2) continue;
    std::size_t links = 0;
    for (std::size_t i = 0; i < nb.size(); ++i)
      for (std::size_t j = i + 1; j < nb.size(); ++j)
        if (adj[nb[i]].count(nb[j])) ++links;
    total += 2.0 * static_cast<double>(links) / (static_cast<double>(nb.size()) * static_cast<double>(nb.size() - 1));
  }
  return total / static_cast<double>(adj.size());
}

std::vector<NodeSet> undirected(const RawGraph& g, bool reciprocal) {
  std::vector<NodeSet> adj(g.n);
  for (const auto& [e, t] : g.births) {
    if (reciprocal && !g.has(e.second, e.first)) continue;
    adj[e.first].insert(e.second);
    adj[e.second].insert(e.first);
  }
  return adj;
}

}  // namespace oracle
