#include "core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <set>

#include "json.hpp"

namespace npce {

using ojson = nlohmann::ordered_json;

void Graph::validate() const {
  if (n == 0) fail_usage("graph: vertex count must be positive");
  std::set<std::pair<uint32_t, uint32_t>> seen;
  for (const Edge& e : edges) {
    if (e.u >= n || e.v >= n) fail_usage("graph: edge endpoint out of range");
    if (e.u == e.v) fail_usage("graph: self loop at vertex " + std::to_string(e.u));
    if (e.len < 0) fail_usage("graph: negative edge length");
    if (unweighted && e.len != 1.0) fail_usage("graph: unweighted graph with non-unit edge");
    auto key = std::minmax(e.u, e.v);
    if (!seen.insert(key).second)
      fail_usage("graph: duplicate edge {" + std::to_string(e.u) + "," + std::to_string(e.v) + "}");
  }
}

std::vector<std::vector<std::pair<uint32_t, double>>> Graph::adjacency() const {
  std::vector<std::vector<std::pair<uint32_t, double>>> adj(n);
  for (const Edge& e : edges) {
    adj[e.u].push_back({e.v, e.len});
    adj[e.v].push_back({e.u, e.len});
  }
  return adj;
}

void FiniteMetric::validate(double tol) const {
  if (n == 0 || d.size() != n) fail_check("metric: bad dimension");
  for (uint32_t i = 0; i < n; ++i) {
    if (d[i].size() != n) fail_check("metric: ragged matrix");
    if (d[i][i] != 0.0) fail_check("metric: nonzero diagonal at " + std::to_string(i));
    for (uint32_t j = 0; j < n; ++j) {
      if (std::abs(d[i][j] - d[j][i]) > tol) fail_check("metric: asymmetric entry");
      if (i != j && !(d[i][j] > 0)) fail_check("metric: non-positive distance between distinct points");
    }
  }
  for (uint32_t i = 0; i < n; ++i)
    for (uint32_t j = 0; j < n; ++j)
      for (uint32_t k = 0; k < n; ++k)
        if (d[i][j] > d[i][k] + d[k][j] + tol) fail_check("metric: triangle inequality violated");
}

void CutMeasure::canonicalize() {
  std::map<Bits, double> acc;
  for (auto& [side, w] : cuts) {
    if (side.size() != n) fail_usage("cut measure: side dimension mismatch");
    if (w < 0) fail_usage("cut measure: negative weight");
    if (w == 0) continue;
    Bits s = side.test(0) ? side.flipped() : side;
    if (s.none() || s.all()) continue;
    acc[s] += w;
  }
  cuts.assign(acc.begin(), acc.end());
}

void CutMeasure::validate() const {
  for (const auto& [side, w] : cuts) {
    if (side.size() != n) fail_check("cut measure: side dimension mismatch");
    if (side.test(0)) fail_check("cut measure: side contains vertex 0 (not canonical)");
    if (side.none() || side.all()) fail_check("cut measure: trivial side");
    if (!(w > 0)) fail_check("cut measure: non-positive weight");
  }
}

std::vector<double> sssp(const Graph& g, uint32_t src) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(g.n, inf);
  auto adj = g.adjacency();
  if (g.unweighted) {
    std::queue<uint32_t> q;
    dist[src] = 0;
    q.push(src);
    while (!q.empty()) {
      uint32_t u = q.front();
      q.pop();
      for (auto [v, len] : adj[u]) {
        (void)len;
        if (dist[v] == inf) {
          dist[v] = dist[u] + 1;
          q.push(v);
        }
      }
    }
    return dist;
  }
  using Item = std::pair<double, uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  dist[src] = 0;
  pq.push({0, src});
  while (!pq.empty()) {
    auto [du, u] = pq.top();
    pq.pop();
    if (du > dist[u]) continue;
    for (auto [v, len] : adj[u]) {
      double nd = du + len;
      if (nd < dist[v]) {
        dist[v] = nd;
        pq.push({nd, v});
      }
    }
  }
  return dist;
}

FiniteMetric apsp(const Graph& g) {
  g.validate();
  FiniteMetric m;
  m.n = g.n;
  m.d.resize(g.n);
  for (uint32_t s = 0; s < g.n; ++s) {
    m.d[s] = sssp(g, s);
    for (uint32_t t = 0; t < g.n; ++t) {
      if (std::isinf(m.d[s][t]))
        fail_usage("graph is disconnected: no path between vertex " + std::to_string(s) +
                   " and vertex " + std::to_string(t));
    }
  }
  return m;
}

double cut_measure_distance(const CutMeasure& m, uint32_t x, uint32_t y) {
  double total = 0;
  for (const auto& [side, w] : m.cuts)
    if (side.test(x) != side.test(y)) total += w;
  return total;
}

EmbeddingReport distortion(const FiniteMetric& source,
                           const std::vector<std::vector<double>>& target) {
  if (target.size() != source.n) fail_usage("distortion: dimension mismatch");
  EmbeddingReport rep;
  if (source.n < 2) {
    rep.worst.clear();
    return rep;
  }
  double best_exp = 0, best_con = 0;
  WorstPair exp_pair, con_pair;
  bool any = false, inf_flag = false;
  for (uint32_t x = 0; x < source.n; ++x) {
    if (target[x].size() != source.n) fail_usage("distortion: ragged target matrix");
    for (uint32_t y = x + 1; y < source.n; ++y) {
      double s = source.at(x, y);
      double t = target[x][y];
      if (t <= 0) {
        inf_flag = true;
        con_pair = {x, y, 0.0};
        continue;
      }
      any = true;
      double r = t / s;
      if (r > best_exp) {
        best_exp = r;
        exp_pair = {x, y, r};
      }
      if (1.0 / r > best_con) {
        best_con = 1.0 / r;
        con_pair = {x, y, r};
      }
    }
  }
  rep.infinite = inf_flag;
  if (inf_flag) {
    rep.expansion = any ? best_exp : 1.0;
    rep.contraction = std::numeric_limits<double>::infinity();
    rep.distortion = std::numeric_limits<double>::infinity();
    rep.worst = {con_pair};
    if (any) rep.worst.push_back(exp_pair);
    return rep;
  }
  rep.expansion = best_exp;
  rep.contraction = best_con;
  rep.distortion = best_exp * best_con;
  rep.worst = {exp_pair, con_pair};
  return rep;
}

namespace {

struct TreeEdge {
  uint32_t a, b;       // block indices
  uint32_t attach;     // shared glued vertex
};

}  // namespace

CutMeasure one_sum_glue(const std::vector<GluedBlock>& blocks, uint32_t n_glued) {
  if (blocks.empty()) fail_usage("one_sum_glue: no blocks");
  // Validate relabelings and find shared vertices.
  std::vector<std::vector<uint32_t>> owners(n_glued);
  std::vector<Bits> block_verts;
  for (uint32_t b = 0; b < blocks.size(); ++b) {
    const auto& blk = blocks[b];
    if (blk.measure.n != blk.to_glued.size())
      fail_usage("one_sum_glue: relabeling size mismatch");
    Bits verts(n_glued);
    for (uint32_t gid : blk.to_glued) {
      if (gid >= n_glued) fail_usage("one_sum_glue: glued id out of range");
      if (verts.test(gid)) fail_usage("one_sum_glue: relabeling not injective");
      verts.set(gid);
      owners[gid].push_back(b);
    }
    block_verts.push_back(verts);
  }
  for (uint32_t b = 0; b < blocks.size(); ++b)
    for (uint32_t c = b + 1; c < blocks.size(); ++c)
      if ((block_verts[b] & block_verts[c]).count() > 1)
        fail_usage("one_sum_glue: blocks share more than one vertex");

  std::vector<TreeEdge> tree;
  for (uint32_t v = 0; v < n_glued; ++v)
    for (size_t i = 1; i < owners[v].size(); ++i)
      tree.push_back({owners[v][0], owners[v][i], v});
  if (tree.size() != blocks.size() - 1)
    fail_usage("one_sum_glue: sharing structure is not a tree");
  // Connectivity of the block tree.
  std::vector<std::vector<uint32_t>> adj(blocks.size());
  for (uint32_t e = 0; e < tree.size(); ++e) {
    adj[tree[e].a].push_back(e);
    adj[tree[e].b].push_back(e);
  }
  {
    std::vector<bool> seen(blocks.size(), false);
    std::queue<uint32_t> q;
    q.push(0);
    seen[0] = true;
    uint32_t reached = 1;
    while (!q.empty()) {
      uint32_t b = q.front();
      q.pop();
      for (uint32_t e : adj[b]) {
        uint32_t o = tree[e].a == b ? tree[e].b : tree[e].a;
        if (!seen[o]) {
          seen[o] = true;
          ++reached;
          q.push(o);
        }
      }
    }
    if (reached != blocks.size()) fail_usage("one_sum_glue: block tree is disconnected");
  }

  // For each (block, incident edge): union of glued vertices on the far side.
  auto far_side = [&](uint32_t block, uint32_t edge) {
    Bits side(n_glued);
    std::vector<bool> seen(blocks.size(), false);
    seen[block] = true;
    uint32_t start = tree[edge].a == block ? tree[edge].b : tree[edge].a;
    std::queue<uint32_t> q;
    q.push(start);
    seen[start] = true;
    while (!q.empty()) {
      uint32_t b = q.front();
      q.pop();
      side = side | block_verts[b];
      for (uint32_t e : adj[b]) {
        uint32_t o = tree[e].a == b ? tree[e].b : tree[e].a;
        if (!seen[o]) {
          seen[o] = true;
          q.push(o);
        }
      }
    }
    return side;
  };

  CutMeasure out;
  out.n = n_glued;
  for (uint32_t b = 0; b < blocks.size(); ++b) {
    std::vector<std::pair<uint32_t, Bits>> hanging;  // (attach vertex, far side)
    for (uint32_t e : adj[b]) hanging.push_back({tree[e].attach, far_side(b, e)});
    for (const auto& [side_local, w] : blocks[b].measure.cuts) {
      Bits side(n_glued);
      for (uint32_t i = 0; i < blocks[b].measure.n; ++i)
        if (side_local.test(i)) side.set(blocks[b].to_glued[i]);
      for (const auto& [attach, far] : hanging)
        if (side.test(attach)) side = side | far;
      out.cuts.push_back({side, w});
    }
  }
  out.canonicalize();
  return out;
}

// --- JSON ---

namespace {

ojson parse_json(const std::string& text, const char* what) {
  ojson j = ojson::parse(text, nullptr, false);
  if (j.is_discarded()) fail_usage(std::string(what) + ": invalid JSON");
  return j;
}

}  // namespace

std::string graph_to_json(const Graph& g) {
  ojson j;
  j["n"] = g.n;
  j["unweighted"] = g.unweighted;
  ojson edges = ojson::array();
  for (const Edge& e : g.edges) edges.push_back({e.u, e.v, e.len});
  j["edges"] = edges;
  return j.dump();
}

Graph graph_from_json(const std::string& text) {
  ojson j = parse_json(text, "graph");
  Graph g;
  if (!j.contains("n") || !j.contains("edges")) fail_usage("graph: missing n or edges");
  g.n = j["n"].get<uint32_t>();
  g.unweighted = j.value("unweighted", true);
  for (const auto& e : j["edges"]) {
    if (!e.is_array() || e.size() < 2 || e.size() > 3) fail_usage("graph: malformed edge entry");
    Edge edge;
    edge.u = e[0].get<uint32_t>();
    edge.v = e[1].get<uint32_t>();
    edge.len = e.size() == 3 ? e[2].get<double>() : 1.0;
    g.edges.push_back(edge);
  }
  g.validate();
  return g;
}

std::string cut_measure_to_json(const CutMeasure& m) {
  ojson j;
  j["n"] = m.n;
  ojson cuts = ojson::array();
  for (const auto& [side, w] : m.cuts) {
    ojson c;
    c["side"] = side.members();
    c["w"] = w;
    cuts.push_back(c);
  }
  j["cuts"] = cuts;
  return j.dump();
}

CutMeasure cut_measure_from_json(const std::string& text) {
  ojson j = parse_json(text, "cut measure");
  CutMeasure m;
  if (!j.contains("n") || !j.contains("cuts")) fail_usage("cut measure: missing n or cuts");
  m.n = j["n"].get<uint32_t>();
  for (const auto& c : j["cuts"]) {
    Bits side(m.n);
    for (const auto& id : c.at("side")) {
      uint32_t v = id.get<uint32_t>();
      if (v >= m.n) fail_usage("cut measure: vertex id out of range");
      side.set(v);
    }
    m.cuts.push_back({side, c.at("w").get<double>()});
  }
  m.canonicalize();
  return m;
}

std::string metric_to_json(const FiniteMetric& m) {
  ojson j;
  j["n"] = m.n;
  j["d"] = m.d;
  return j.dump();
}

FiniteMetric metric_from_json(const std::string& text) {
  ojson j = parse_json(text, "metric");
  FiniteMetric m;
  if (!j.contains("n") || !j.contains("d")) fail_usage("metric: missing n or d");
  m.n = j["n"].get<uint32_t>();
  m.d = j["d"].get<std::vector<std::vector<double>>>();
  m.validate();
  return m;
}

}  // namespace npce
