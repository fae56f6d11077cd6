#include "pyramid.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

#include "json.hpp"

namespace npce {

using ojson = nlohmann::ordered_json;

namespace {

// Structural sanity shared by pyramids and funnels: layer shapes, id
// coverage, parent table consistency. Returns messages; empty means sound.
std::vector<std::string> structural_violations(uint32_t n,
                                               const std::vector<std::vector<uint32_t>>& layers,
                                               const std::vector<int64_t>& parent) {
  std::vector<std::string> out;
  if (layers.empty()) {
    out.push_back("structure: no layers");
    return out;
  }
  if (layers[0].size() != 1) out.push_back("structure: first layer must be the single basepoint");
  uint32_t total = 0;
  std::vector<int> layer_of(n, -1);
  for (size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].empty()) out.push_back("structure: empty layer " + std::to_string(i + 1));
    for (uint32_t v : layers[i]) {
      ++total;
      if (v >= n) {
        out.push_back("structure: vertex id out of range");
        return out;
      }
      if (layer_of[v] != -1) {
        out.push_back("structure: vertex " + std::to_string(v) + " appears twice");
        return out;
      }
      layer_of[v] = static_cast<int>(i);
    }
  }
  if (total != n) {
    out.push_back("structure: layers do not cover all vertices");
    return out;
  }
  if (parent.size() != n) {
    out.push_back("structure: parent table size mismatch");
    return out;
  }
  for (uint32_t v = 0; v < n; ++v) {
    if (layer_of[v] == 0) {
      if (parent[v] != -1) out.push_back("structure: basepoint must have no parent");
      continue;
    }
    if (parent[v] < 0 || parent[v] >= n) {
      out.push_back("condition 3: vertex " + std::to_string(v) + " has no parent");
      continue;
    }
    if (layer_of[static_cast<uint32_t>(parent[v])] != layer_of[v] - 1)
      out.push_back("condition 3: parent of " + std::to_string(v) + " is not in the previous layer");
  }
  return out;
}

// Positions within layers, used by the order conditions.
std::vector<uint32_t> positions(uint32_t n, const std::vector<std::vector<uint32_t>>& layers) {
  std::vector<uint32_t> pos(n, 0);
  for (const auto& layer : layers)
    for (uint32_t i = 0; i < layer.size(); ++i) pos[layer[i]] = i;
  return pos;
}

std::vector<uint32_t> layer_index(uint32_t n, const std::vector<std::vector<uint32_t>>& layers) {
  std::vector<uint32_t> li(n, 0);
  for (uint32_t i = 0; i < layers.size(); ++i)
    for (uint32_t v : layers[i]) li[v] = i;
  return li;
}

// Removing an interior layer must leave exactly the shallower layers as one
// component and the deeper layers as the other.
void check_two_components(const Graph& g, const std::vector<std::vector<uint32_t>>& layers,
                          std::vector<std::string>& out) {
  if (layers.size() < 3) return;
  auto adj = g.adjacency();
  uint32_t n = g.n;
  std::vector<char> removed(n, 0), seen(n, 0);
  for (uint32_t cut = 1; cut + 1 < layers.size(); ++cut) {
    std::fill(removed.begin(), removed.end(), 0);
    std::fill(seen.begin(), seen.end(), 0);
    for (uint32_t v : layers[cut]) removed[v] = 1;
    auto flood = [&](uint32_t start) {
      std::queue<uint32_t> q;
      q.push(start);
      seen[start] = 1;
      uint32_t count = 1;
      while (!q.empty()) {
        uint32_t u = q.front();
        q.pop();
        for (auto [w, len] : adj[u]) {
          (void)len;
          if (!removed[w] && !seen[w]) {
            seen[w] = 1;
            ++count;
            q.push(w);
          }
        }
      }
      return count;
    };
    uint32_t prefix_size = 0, suffix_size = 0;
    for (uint32_t i = 0; i < layers.size(); ++i) {
      if (i < cut) prefix_size += layers[i].size();
      if (i > cut) suffix_size += layers[i].size();
    }
    uint32_t reached_prefix = flood(layers[0][0]);
    uint32_t reached_suffix = flood(layers[cut + 1][0]);
    bool ok = reached_prefix == prefix_size && reached_suffix == suffix_size;
    for (uint32_t v = 0; v < n && ok; ++v)
      if (!removed[v] && !seen[v]) ok = false;
    if (!ok)
      out.push_back("condition 2: removing layer " + std::to_string(cut + 1) +
                    " does not leave exactly the prefix and suffix components");
  }
}

void check_children_exist(uint32_t n, const std::vector<std::vector<uint32_t>>& layers,
                          const std::vector<int64_t>& parent, std::vector<std::string>& out) {
  std::vector<char> has_child(n, 0);
  for (uint32_t v = 0; v < n; ++v)
    if (parent[v] >= 0) has_child[parent[v]] = 1;
  for (uint32_t i = 0; i + 1 < layers.size(); ++i)
    for (uint32_t v : layers[i])
      if (!has_child[v])
        out.push_back("condition 4: vertex " + std::to_string(v) + " has no child");
}

}  // namespace

std::vector<std::string> validate_pyramid(const Pyramid& p) {
  std::vector<std::string> out = structural_violations(p.n, p.layers, p.parent);
  if (!out.empty()) return out;
  check_two_components(pyramid_to_graph(p), p.layers, out);
  check_children_exist(p.n, p.layers, p.parent, out);
  auto pos = positions(p.n, p.layers);
  for (uint32_t i = 1; i < p.layers.size(); ++i) {
    const auto& layer = p.layers[i];
    for (uint32_t j = 1; j < layer.size(); ++j) {
      uint32_t pa = pos[static_cast<uint32_t>(p.parent[layer[j - 1]])];
      uint32_t pb = pos[static_cast<uint32_t>(p.parent[layer[j]])];
      if (pa > pb) {
        out.push_back("condition 5: parents cross between layer positions " +
                      std::to_string(j - 1) + " and " + std::to_string(j) + " of layer " +
                      std::to_string(i + 1));
        break;
      }
    }
  }
  return out;
}

std::vector<std::string> validate_funnel(const Funnel& f) {
  std::vector<std::string> out = structural_violations(f.n, f.layers, f.parent);
  if (!out.empty()) return out;
  check_two_components(funnel_to_graph(f), f.layers, out);
  check_children_exist(f.n, f.layers, f.parent, out);
  auto pos = positions(f.n, f.layers);
  for (uint32_t i = 1; i < f.layers.size(); ++i) {
    const auto& layer = f.layers[i];
    // Collapse runs of equal parent positions around the cycle.
    std::vector<uint32_t> runs;
    for (uint32_t v : layer) {
      uint32_t pp = pos[static_cast<uint32_t>(f.parent[v])];
      if (runs.empty() || runs.back() != pp) runs.push_back(pp);
    }
    if (runs.size() > 1 && runs.front() == runs.back()) runs.pop_back();
    std::set<uint32_t> distinct(runs.begin(), runs.end());
    uint32_t descents = 0;
    for (uint32_t j = 0; j < runs.size(); ++j)
      if (runs[(j + 1) % runs.size()] < runs[j]) ++descents;
    if (distinct.size() != runs.size() || (runs.size() > 1 && descents != 1)) {
      out.push_back("condition 5: parents are not cyclically order-preserving into layer " +
                    std::to_string(i + 1));
    }
  }
  return out;
}

Skeleton skeleton(const Pyramid& p) {
  Skeleton s;
  s.parent = p.parent;
  s.depth.assign(p.n, 0);
  s.pos = positions(p.n, p.layers);
  s.children.assign(p.n, {});
  auto li = layer_index(p.n, p.layers);
  for (uint32_t v = 0; v < p.n; ++v) s.depth[v] = li[v] + 1;
  // Children inherit layer order when layers are walked left to right.
  for (uint32_t i = 1; i < p.layers.size(); ++i)
    for (uint32_t v : p.layers[i]) s.children[static_cast<uint32_t>(p.parent[v])].push_back(v);
  s.preorder.assign(p.n, 0);
  std::vector<uint32_t> stack = {p.basepoint()};
  uint32_t visit = 0;
  while (!stack.empty()) {
    uint32_t u = stack.back();
    stack.pop_back();
    s.preorder[u] = visit++;
    const auto& ch = s.children[u];
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
  }
  return s;
}

uint32_t Skeleton::ancestor_at_depth(uint32_t x, uint32_t target_depth) const {
  while (depth[x] > target_depth) x = static_cast<uint32_t>(parent[x]);
  return x;
}

uint32_t Skeleton::nca(uint32_t x, uint32_t y) const {
  if (depth[x] > depth[y]) x = ancestor_at_depth(x, depth[y]);
  if (depth[y] > depth[x]) y = ancestor_at_depth(y, depth[x]);
  while (x != y) {
    x = static_cast<uint32_t>(parent[x]);
    y = static_cast<uint32_t>(parent[y]);
  }
  return x;
}

bool Skeleton::same_ray(uint32_t x, uint32_t y) const {
  if (depth[x] > depth[y]) std::swap(x, y);
  return ancestor_at_depth(y, depth[x]) == x;
}

Order order_compare(const Skeleton& s, uint32_t x, uint32_t y) {
  if (x == y || s.same_ray(x, y)) return Order::SameRay;
  return s.preorder[x] < s.preorder[y] ? Order::Before : Order::After;
}

Bits descendant_ball(const Pyramid& p, const Skeleton& s, uint32_t u, double r) {
  if (r < 0) fail_usage("descendant_ball: negative radius");
  uint32_t reach = static_cast<uint32_t>(std::floor(r));
  Bits ball(p.n);
  ball.set(u);
  std::vector<uint32_t> frontier = {u};
  for (uint32_t step = 0; step < reach && !frontier.empty(); ++step) {
    std::vector<uint32_t> next;
    for (uint32_t v : frontier)
      for (uint32_t c : s.children[v]) {
        ball.set(c);
        next.push_back(c);
      }
    frontier = std::move(next);
  }
  return ball;
}

bool is_monotone(const Pyramid& p, const Skeleton& s, const Bits& cut) {
  if (cut.size() != p.n) fail_usage("monotone check: dimension mismatch");
  if (!cut.test(p.basepoint())) return false;
  for (uint32_t v = 0; v < p.n; ++v)
    if (cut.test(v) && s.parent[v] >= 0 && !cut.test(static_cast<uint32_t>(s.parent[v])))
      return false;
  return true;
}

std::vector<std::vector<uint32_t>> all_rays(const Pyramid& p, const Skeleton& s) {
  std::vector<std::vector<uint32_t>> rays;
  for (uint32_t v : p.layers.back()) {
    std::vector<uint32_t> ray;
    int64_t cur = v;
    while (cur >= 0) {
      ray.push_back(static_cast<uint32_t>(cur));
      cur = s.parent[static_cast<uint32_t>(cur)];
    }
    std::reverse(ray.begin(), ray.end());
    rays.push_back(std::move(ray));
  }
  return rays;
}

std::vector<uint32_t> ray_through(const Pyramid& p, const Skeleton& s, uint32_t u) {
  std::vector<uint32_t> ray;
  int64_t cur = u;
  while (cur >= 0) {
    ray.push_back(static_cast<uint32_t>(cur));
    cur = s.parent[static_cast<uint32_t>(cur)];
  }
  std::reverse(ray.begin(), ray.end());
  uint32_t tail = u;
  while (s.depth[tail] < p.depth()) {
    tail = s.children[tail].front();
    ray.push_back(tail);
  }
  return ray;
}

CutBoundary boundary(const Pyramid& p, const Skeleton& s, const Bits& cut) {
  if (!is_monotone(p, s, cut)) fail_check("boundary: cut is not monotone");
  CutBoundary b;
  for (uint32_t v = 0; v < p.n; ++v) {
    if (!cut.test(v)) continue;
    bool child_in = false;
    for (uint32_t c : s.children[v])
      if (cut.test(c)) {
        child_in = true;
        break;
      }
    if (!child_in) b.verts.push_back(v);
  }
  std::sort(b.verts.begin(), b.verts.end(),
            [&](uint32_t a, uint32_t c) { return s.preorder[a] < s.preorder[c]; });
  for (size_t i = 0; i + 1 < b.verts.size(); ++i) {
    uint32_t x = b.verts[i], y = b.verts[i + 1];
    if (s.depth[x] == s.depth[y] && s.pos[y] == s.pos[x] + 1) b.edges.push_back({x, y});
  }
  return b;
}

Bits shift(const Pyramid& p, const Skeleton& s, const Bits& cut, double r,
           const std::vector<std::pair<uint32_t, uint32_t>>& z, bool odd) {
  if (!(r > 0)) fail_usage("shift: radius must be positive");
  CutBoundary b = boundary(p, s, cut);
  // Locate each Z edge along the boundary; accept either orientation.
  std::vector<size_t> cut_positions;
  for (const auto& [u, v] : z) {
    bool found = false;
    for (size_t i = 0; i < b.edges.size(); ++i) {
      if ((b.edges[i].first == u && b.edges[i].second == v) ||
          (b.edges[i].first == v && b.edges[i].second == u)) {
        // Boundary edges join consecutive boundary vertices, so the edge at
        // list index i sits between verts positions; recover that index.
        found = true;
        for (size_t j = 0; j + 1 < b.verts.size(); ++j)
          if (b.verts[j] == b.edges[i].first && b.verts[j + 1] == b.edges[i].second)
            cut_positions.push_back(j);
        break;
      }
    }
    if (!found) fail_usage("shift: Z edge is not a boundary edge");
  }
  std::sort(cut_positions.begin(), cut_positions.end());
  cut_positions.erase(std::unique(cut_positions.begin(), cut_positions.end()),
                      cut_positions.end());
  if (cut_positions.size() != z.size()) fail_usage("shift: duplicate Z edge");

  Bits result = cut;
  size_t piece_start = 0;
  uint32_t piece_index = 1;  // 1-based; odd pieces selected by the odd shift
  auto advance_piece = [&](size_t from, size_t to) {
    bool selected = odd ? (piece_index % 2 == 1) : (piece_index % 2 == 0);
    if (selected)
      for (size_t i = from; i <= to; ++i) result = result | descendant_ball(p, s, b.verts[i], r);
    ++piece_index;
  };
  for (size_t cp : cut_positions) {
    advance_piece(piece_start, cp);
    piece_start = cp + 1;
  }
  if (!b.verts.empty()) advance_piece(piece_start, b.verts.size() - 1);
  return result;
}

EvolutionSpace evolution_space(const Pyramid& p, const Skeleton& s, const Bits& cut, double r) {
  if (!(r > 0)) fail_usage("evolve: radius must be positive");
  CutBoundary b = boundary(p, s, cut);
  EvolutionSpace space;
  auto in_window = [&](uint32_t fold) {
    double f = static_cast<double>(fold);
    return f >= r && f < 6 * r;
  };
  for (size_t i = 0; i < b.verts.size(); ++i) {
    uint32_t u = b.verts[i];
    if (i > 0) {
      // Junction between the previous vertex's last slot and u's first one:
      // tearable only across an actual boundary edge.
      uint32_t w = b.verts[i - 1];
      EvolutionSpace::Junction j;
      if (s.depth[w] == s.depth[u] && s.pos[u] == s.pos[w] + 1) {
        j.a = w;
        j.b = u;
        j.fold = s.depth[u] - s.depth[s.nca(w, u)];
        j.qualifies = in_window(j.fold);
      }
      space.junctions.push_back(j);
    }
    const auto& ch = s.children[u];
    if (ch.empty()) {
      space.slots.push_back({u, -1});
      continue;
    }
    for (size_t k = 0; k < ch.size(); ++k) {
      if (k > 0) {
        EvolutionSpace::Junction j;
        j.a = ch[k - 1];
        j.b = ch[k];
        j.fold = 1;
        j.qualifies = in_window(1);
        space.junctions.push_back(j);
      }
      space.slots.push_back({u, static_cast<int64_t>(ch[k])});
    }
  }
  return space;
}

Bits apply_evolution(const Pyramid& p, const Skeleton& s, const Bits& cut, double r,
                     const EvolutionSpace& space, const std::vector<char>& splits,
                     const std::vector<char>& coins) {
  if (!(r > 0)) fail_usage("evolve: radius must be positive");
  if (splits.size() != space.junctions.size()) fail_usage("evolve: split flags mismatch");
  size_t pieces = space.slots.empty() ? 0 : 1;
  for (size_t t = 0; t < splits.size(); ++t) {
    if (!splits[t]) continue;
    if (space.junctions[t].fold == 0) fail_usage("evolve: tear at a junction with no edge");
    ++pieces;
  }
  if (coins.size() != pieces) fail_usage("evolve: coin count does not match pieces");
  Bits result = cut;
  uint32_t reach = static_cast<uint32_t>(std::floor(r));
  size_t piece = 0;
  for (size_t t = 0; t < space.slots.size(); ++t) {
    if (t > 0 && splits[t - 1]) ++piece;
    if (!coins[piece]) continue;
    const auto& slot = space.slots[t];
    if (slot.child >= 0 && reach >= 1)
      result = result |
               descendant_ball(p, s, static_cast<uint32_t>(slot.child), double(reach - 1));
  }
  return result;
}

EvolutionStep evolve(const Pyramid& p, const Skeleton& s, const Bits& cut, double r, Rng& rng) {
  EvolutionSpace space = evolution_space(p, s, cut, r);
  double q = std::min(1.0, 1.0 / r);
  EvolutionStep step;
  std::vector<char> splits(space.junctions.size(), 0);
  size_t pieces = space.slots.empty() ? 0 : 1;
  for (size_t t = 0; t < space.junctions.size(); ++t) {
    if (!space.junctions[t].qualifies) continue;
    if (rng.bernoulli(q)) {
      splits[t] = 1;
      step.sampled.push_back({space.junctions[t].a, space.junctions[t].b});
      ++pieces;
    }
  }
  step.coins.assign(pieces, 0);
  for (auto& c : step.coins) c = rng.bernoulli(0.5) ? 1 : 0;
  step.next = apply_evolution(p, s, cut, r, space, splits, step.coins);
  return step;
}

Graph pyramid_to_graph(const Pyramid& p) {
  Graph g;
  g.n = p.n;
  g.unweighted = true;
  for (const auto& layer : p.layers)
    for (size_t i = 0; i + 1 < layer.size(); ++i) g.edges.push_back({layer[i], layer[i + 1], 1.0});
  for (uint32_t v = 0; v < p.n; ++v)
    if (p.parent[v] >= 0) g.edges.push_back({v, static_cast<uint32_t>(p.parent[v]), 1.0});
  return g;
}

Graph funnel_to_graph(const Funnel& f) {
  Graph g;
  g.n = f.n;
  g.unweighted = true;
  for (const auto& layer : f.layers) {
    for (size_t i = 0; i + 1 < layer.size(); ++i) g.edges.push_back({layer[i], layer[i + 1], 1.0});
    if (layer.size() >= 3) g.edges.push_back({layer.back(), layer.front(), 1.0});
  }
  for (uint32_t v = 0; v < f.n; ++v)
    if (f.parent[v] >= 0) g.edges.push_back({v, static_cast<uint32_t>(f.parent[v]), 1.0});
  return g;
}

Pyramid gen_grid_pyramid(uint32_t delta) {
  if (delta == 0) fail_usage("gen: depth must be positive");
  Pyramid p;
  p.layers.push_back({0});
  uint32_t next = 1;
  for (uint32_t i = 1; i < delta; ++i) {
    p.layers.push_back({next, next + 1});
    next += 2;
  }
  p.n = next;
  p.parent.assign(p.n, -1);
  for (uint32_t i = 1; i < delta; ++i) {
    const auto& layer = p.layers[i];
    const auto& prev = p.layers[i - 1];
    p.parent[layer[0]] = prev[0];
    p.parent[layer[1]] = prev.size() == 1 ? prev[0] : prev[1];
  }
  return p;
}

Pyramid gen_path_pyramid(uint32_t delta) {
  if (delta == 0) fail_usage("gen: depth must be positive");
  Pyramid p;
  p.n = delta;
  for (uint32_t i = 0; i < delta; ++i) p.layers.push_back({i});
  p.parent.assign(p.n, -1);
  for (uint32_t i = 1; i < delta; ++i) p.parent[i] = i - 1;
  return p;
}

namespace {

// Random composition of child-layer size into parent-layer-size positive
// parts: the fiber sizes of an order-preserving surjection.
std::vector<uint32_t> random_composition(uint32_t total, uint32_t parts, Rng& rng) {
  // Choose parts-1 distinct gap positions among total-1.
  std::vector<uint32_t> gaps(total - 1);
  for (uint32_t i = 0; i < total - 1; ++i) gaps[i] = i;
  for (uint32_t i = 0; i + 1 < parts; ++i) {
    uint32_t j = i + static_cast<uint32_t>(rng.next_below(gaps.size() - i));
    std::swap(gaps[i], gaps[j]);
  }
  std::vector<uint32_t> chosen(gaps.begin(), gaps.begin() + (parts - 1));
  std::sort(chosen.begin(), chosen.end());
  std::vector<uint32_t> sizes;
  uint32_t prev = 0;
  for (uint32_t c : chosen) {
    sizes.push_back(c + 1 - prev);
    prev = c + 1;
  }
  sizes.push_back(total - prev);
  return sizes;
}

std::vector<uint32_t> random_widths(uint32_t delta, uint32_t max_width, Rng& rng) {
  std::vector<uint32_t> w = {1};
  for (uint32_t i = 1; i < delta; ++i) {
    uint32_t inc = static_cast<uint32_t>(rng.next_below(3));  // widths never shrink
    w.push_back(std::min(max_width, w.back() + inc));
  }
  return w;
}

}  // namespace

Pyramid gen_random_pyramid(uint32_t delta, uint32_t max_width, Rng& rng) {
  if (delta == 0 || max_width == 0) fail_usage("gen: depth and width must be positive");
  auto widths = random_widths(delta, max_width, rng);
  Pyramid p;
  uint32_t next = 0;
  for (uint32_t i = 0; i < delta; ++i) {
    std::vector<uint32_t> layer(widths[i]);
    for (auto& v : layer) v = next++;
    p.layers.push_back(std::move(layer));
  }
  p.n = next;
  p.parent.assign(p.n, -1);
  for (uint32_t i = 1; i < delta; ++i) {
    auto fibers = random_composition(widths[i], widths[i - 1], rng);
    uint32_t child = 0;
    for (uint32_t f = 0; f < fibers.size(); ++f)
      for (uint32_t k = 0; k < fibers[f]; ++k)
        p.parent[p.layers[i][child++]] = p.layers[i - 1][f];
  }
  return p;
}

Funnel gen_random_funnel(uint32_t delta, uint32_t max_width, Rng& rng) {
  if (delta == 0 || max_width == 0) fail_usage("gen: depth and width must be positive");
  auto widths = random_widths(delta, max_width, rng);
  Funnel f;
  uint32_t next = 0;
  for (uint32_t i = 0; i < delta; ++i) {
    std::vector<uint32_t> layer(widths[i]);
    for (auto& v : layer) v = next++;
    f.layers.push_back(std::move(layer));
  }
  f.n = next;
  f.parent.assign(f.n, -1);
  for (uint32_t i = 1; i < delta; ++i) {
    auto fibers = random_composition(widths[i], widths[i - 1], rng);
    uint32_t offset = widths[i] > 1 ? static_cast<uint32_t>(rng.next_below(widths[i])) : 0;
    uint32_t child = 0;
    for (uint32_t fi = 0; fi < fibers.size(); ++fi)
      for (uint32_t k = 0; k < fibers[fi]; ++k) {
        uint32_t slot = (offset + child) % widths[i];
        f.parent[f.layers[i][slot]] = f.layers[i - 1][fi];
        ++child;
      }
  }
  return f;
}

namespace {

ojson layered_to_json(const std::vector<std::vector<uint32_t>>& layers,
                      const std::vector<int64_t>& parent, bool cyclic) {
  ojson j;
  j["layers"] = layers;
  ojson par = ojson::object();
  for (uint32_t v = 0; v < parent.size(); ++v)
    if (parent[v] >= 0) par[std::to_string(v)] = parent[v];
  j["parent"] = par;
  if (cyclic) j["cyclic"] = true;
  return j;
}

void layered_from_json(const ojson& j, uint32_t& n, std::vector<std::vector<uint32_t>>& layers,
                       std::vector<int64_t>& parent) {
  if (!j.contains("layers") || !j.contains("parent"))
    fail_usage("layered graph: missing layers or parent");
  layers = j["layers"].get<std::vector<std::vector<uint32_t>>>();
  n = 0;
  for (const auto& layer : layers) n += static_cast<uint32_t>(layer.size());
  parent.assign(n, -1);
  for (const auto& [key, value] : j["parent"].items()) {
    uint32_t v = static_cast<uint32_t>(std::stoul(key));
    if (v >= n) fail_usage("layered graph: parent key out of range");
    parent[v] = value.get<int64_t>();
    if (parent[v] < 0 || parent[v] >= n) fail_usage("layered graph: parent value out of range");
  }
  auto structural = structural_violations(n, layers, parent);
  if (!structural.empty()) fail_usage("layered graph: " + structural.front());
}

}  // namespace

std::string pyramid_to_json(const Pyramid& p) {
  return layered_to_json(p.layers, p.parent, false).dump();
}

Pyramid pyramid_from_json(const std::string& text) {
  ojson j = ojson::parse(text, nullptr, false);
  if (j.is_discarded()) fail_usage("pyramid: invalid JSON");
  if (j.value("cyclic", false)) fail_usage("pyramid: input is marked cyclic (a funnel)");
  Pyramid p;
  layered_from_json(j, p.n, p.layers, p.parent);
  return p;
}

std::string funnel_to_json(const Funnel& f) {
  return layered_to_json(f.layers, f.parent, true).dump();
}

Funnel funnel_from_json(const std::string& text) {
  ojson j = ojson::parse(text, nullptr, false);
  if (j.is_discarded()) fail_usage("funnel: invalid JSON");
  if (!j.value("cyclic", false)) fail_usage("funnel: input lacks the cyclic flag");
  Funnel f;
  layered_from_json(j, f.n, f.layers, f.parent);
  return f;
}

}  // namespace npce
