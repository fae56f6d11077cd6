// reduce.cpp
#include "reduce.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "json.hpp"

namespace npce {

using ordered_json = nlohmann::ordered_json;

RandomPartition lipschitz_partition(const Graph& g, double scale, Rng& rng) {
  g.validate();
  if (g.n == 0) fail_check("lipschitz_partition: empty graph");
  if (!(scale > 0)) fail_check("lipschitz_partition: scale must be positive");
  RandomPartition part;
  part.scale = scale;
  part.cluster.assign(g.n, UINT32_MAX);
  for (uint32_t v = 0; v < g.n; ++v) {
    if (part.cluster[v] != UINT32_MAX) continue;
    double radius = scale / 4 + rng.next_unit() * (scale / 4);
    std::vector<double> dist = sssp(g, v);
    if (part.centers.empty())
      for (uint32_t u = 0; u < g.n; ++u)
        if (!(dist[u] < 1e300))
          fail_check("lipschitz_partition: graph is disconnected (vertex " + std::to_string(u) +
                     " unreachable)");
    uint32_t id = static_cast<uint32_t>(part.centers.size());
    for (uint32_t u = 0; u < g.n; ++u)
      if (part.cluster[u] == UINT32_MAX && dist[u] <= radius) part.cluster[u] = id;
    part.centers.push_back(v);
    part.radii.push_back(radius);
  }
  return part;
}

BetaEstimate estimate_beta(const Graph& g, double scale, uint32_t partitions, uint64_t seed,
                           uint32_t threads) {
  if (partitions == 0) fail_usage("estimate_beta: need at least one partition");
  if (threads == 0) threads = 1;
  FiniteMetric m = apsp(g);
  uint32_t n = g.n;
  size_t npairs = static_cast<size_t>(n) * (n - 1) / 2;
  SeedSequence seq(seed);
  // Lane c handles partitions c, c+threads, ...; integer counts make the
  // final sums independent of the thread count.
  std::vector<std::vector<uint32_t>> lane_sep(threads, std::vector<uint32_t>(npairs, 0));
  std::vector<double> lane_diam(threads, 0);
  parallel_chunks(threads, threads, [&](uint32_t lane) {
    for (uint32_t k = lane; k < partitions; k += threads) {
      Rng rng = seq.stream(k);
      RandomPartition part = lipschitz_partition(g, scale, rng);
      size_t idx = 0;
      for (uint32_t x = 0; x < n; ++x)
        for (uint32_t y = x + 1; y < n; ++y, ++idx) {
          if (part.cluster[x] != part.cluster[y])
            ++lane_sep[lane][idx];
          else
            lane_diam[lane] = std::max(lane_diam[lane], m.at(x, y));
        }
    }
  });
  BetaEstimate out;
  out.scale = scale;
  out.partitions = partitions;
  for (uint32_t lane = 0; lane < threads; ++lane)
    out.max_diam = std::max(out.max_diam, lane_diam[lane]);
  size_t idx = 0;
  for (uint32_t x = 0; x < n; ++x)
    for (uint32_t y = x + 1; y < n; ++y, ++idx) {
      uint64_t sep = 0;
      for (uint32_t lane = 0; lane < threads; ++lane) sep += lane_sep[lane][idx];
      double p = static_cast<double>(sep) / partitions;
      out.beta = std::max(out.beta, p * scale / m.at(x, y));
    }
  return out;
}

RaySurgery ray_surgery(const Funnel& f, int64_t ray_index, Rng& rng) {
  std::vector<std::string> errs = validate_funnel(f);
  if (!errs.empty()) fail_check("ray_surgery: invalid funnel: " + errs.front());
  uint32_t depth = static_cast<uint32_t>(f.layers.size()) - 1;
  if (depth == 0) fail_check("ray_surgery: single-layer funnel has no ray to widen");
  const std::vector<uint32_t>& bottom = f.layers.back();
  uint32_t pick;
  if (ray_index < 0) {
    pick = static_cast<uint32_t>(rng.next_below(bottom.size()));
  } else {
    if (ray_index >= static_cast<int64_t>(bottom.size()))
      fail_usage("ray_surgery: ray_index " + std::to_string(ray_index) +
                 " out of range for bottom layer of size " + std::to_string(bottom.size()));
    pick = static_cast<uint32_t>(ray_index);
  }

  RaySurgery s;
  s.funnel = f;
  std::vector<uint32_t> chain;
  for (int64_t v = bottom[pick]; v >= 0; v = f.parent[v]) chain.push_back(static_cast<uint32_t>(v));
  std::reverse(chain.begin(), chain.end());
  s.ray = chain;
  std::vector<char> on_ray(f.n, 0);
  for (uint32_t v : chain) on_ray[v] = 1;

  // Widened layers: each ray vertex becomes a 4-vertex grid row placed first,
  // followed by the rest of its cycle in rotated order.
  Funnel& w = s.widened;
  w.layers.resize(depth + 1);
  uint32_t next = 0;
  w.layers[0].push_back(next++);
  std::vector<int64_t> image(f.n, -1);
  image[f.basepoint()] = 0;
  s.grid.resize(depth);
  for (uint32_t i = 1; i <= depth; ++i) {
    const std::vector<uint32_t>& layer = f.layers[i];
    size_t k = layer.size();
    size_t at = 0;
    while (layer[at] != chain[i]) ++at;
    for (uint32_t c = 0; c < 4; ++c) {
      s.grid[i - 1][c] = next;
      w.layers[i].push_back(next++);
    }
    for (size_t j = 1; j < k; ++j) {
      uint32_t v = layer[(at + j) % k];
      image[v] = next;
      w.layers[i].push_back(next++);
    }
  }
  w.n = next;
  w.parent.assign(w.n, -1);
  for (uint32_t i = 1; i <= depth; ++i) {
    for (uint32_t c = 0; c < 4; ++c)
      w.parent[s.grid[i - 1][c]] = i == 1 ? 0 : static_cast<int64_t>(s.grid[i - 2][c]);
    const std::vector<uint32_t>& layer = f.layers[i];
    size_t k = layer.size();
    size_t at = 0;
    while (layer[at] != chain[i]) ++at;
    // Children of the previous ray vertex split around the removed one: the
    // run right after it joins column 3, the ones wrapping from the other
    // side join column 0.
    bool start_run = true;
    for (size_t j = 1; j < k; ++j) {
      uint32_t v = layer[(at + j) % k];
      int64_t fp = f.parent[v];
      if (!on_ray[static_cast<uint32_t>(fp)]) {
        w.parent[image[v]] = image[static_cast<uint32_t>(fp)];
        start_run = false;
      } else if (i == 1) {
        w.parent[image[v]] = 0;
      } else if (start_run) {
        w.parent[image[v]] = s.grid[i - 2][3];
      } else {
        w.parent[image[v]] = s.grid[i - 2][0];
      }
    }
  }
  errs = validate_funnel(w);
  if (!errs.empty()) throw Error(Err::Internal, "ray_surgery: widened funnel invalid: " + errs.front());

  s.peel_set.push_back(0);
  for (uint32_t i = 0; i < depth; ++i) {
    s.peel_set.push_back(s.grid[i][1]);
    s.peel_set.push_back(s.grid[i][2]);
  }
  s.wide_map.assign(f.n, 0);
  s.body_map.assign(f.n, 0);
  for (uint32_t v = 0; v < f.n; ++v)
    if (image[v] >= 0) {
      s.wide_map[v] = static_cast<uint32_t>(image[v]);
      s.body_map[v] = static_cast<uint32_t>(image[v]);
    }
  for (uint32_t i = 1; i <= depth; ++i) {
    s.wide_map[chain[i]] = s.grid[i - 1][1];
    s.body_map[chain[i]] = s.grid[i - 1][0];
  }

  s.widened_graph = funnel_to_graph(w);
  s.funnel_metric = apsp(funnel_to_graph(f));
  s.widened_metric = apsp(s.widened_graph);

  // dil(A) = 1: the induced grid realizes all widened distances on A.
  {
    Graph ga;
    ga.n = static_cast<uint32_t>(s.peel_set.size());
    std::vector<int64_t> local(w.n, -1);
    for (uint32_t j = 0; j < ga.n; ++j) local[s.peel_set[j]] = j;
    ga.edges.push_back({0, 1, 1.0});
    ga.edges.push_back({0, 2, 1.0});
    for (uint32_t i = 0; i < depth; ++i) {
      uint32_t c1 = static_cast<uint32_t>(local[s.grid[i][1]]);
      uint32_t c2 = static_cast<uint32_t>(local[s.grid[i][2]]);
      ga.edges.push_back({c1, c2, 1.0});
      if (i + 1 < depth) {
        ga.edges.push_back({c1, static_cast<uint32_t>(local[s.grid[i + 1][1]]), 1.0});
        ga.edges.push_back({c2, static_cast<uint32_t>(local[s.grid[i + 1][2]]), 1.0});
      }
    }
    FiniteMetric ma = apsp(ga);
    for (uint32_t x = 0; x < ga.n; ++x)
      for (uint32_t y = x + 1; y < ga.n; ++y)
        if (std::fabs(ma.at(x, y) - s.widened_metric.at(s.peel_set[x], s.peel_set[y])) > 1e-9)
          throw Error(Err::Internal, "ray_surgery: peel set is not isometrically embedded");
  }

  std::vector<std::vector<double>> target(f.n, std::vector<double>(f.n, 0));
  for (uint32_t x = 0; x < f.n; ++x)
    for (uint32_t y = 0; y < f.n; ++y)
      if (x != y) target[x][y] = s.widened_metric.at(s.wide_map[x], s.wide_map[y]);
  s.widening = distortion(s.funnel_metric, target);
  return s;
}

AttachmentSampler attach_basepoint() {
  return [](const RaySurgery& s, Rng&) { return s.peel_set.front(); };
}

AttachmentSampler attach_uniform() {
  return [](const RaySurgery& s, Rng& rng) {
    return s.peel_set[rng.next_below(s.peel_set.size())];
  };
}

AttachmentSampler attach_by_partition() {
  return [](const RaySurgery& s, Rng& rng) {
    double diam = 0;
    for (uint32_t x = 0; x < s.widened.n; ++x)
      for (uint32_t y = x + 1; y < s.widened.n; ++y)
        diam = std::max(diam, s.widened_metric.at(x, y));
    RandomPartition part = lipschitz_partition(s.widened_graph, diam > 0 ? diam / 2 : 1, rng);
    uint32_t center = part.centers[rng.next_below(part.centers.size())];
    uint32_t best = s.peel_set.front();
    double best_d = s.widened_metric.at(center, best);
    for (uint32_t a : s.peel_set) {
      double d = s.widened_metric.at(center, a);
      if (d < best_d || (d == best_d && a < best)) {
        best = a;
        best_d = d;
      }
    }
    return best;
  };
}

namespace {

// Normalized edge set of a graph restricted to a vertex subset.
std::set<std::pair<uint32_t, uint32_t>> induced_edges(const Graph& g,
                                                      const std::vector<char>& keep) {
  std::set<std::pair<uint32_t, uint32_t>> out;
  for (const Edge& e : g.edges)
    if (keep[e.u] && keep[e.v]) out.insert({std::min(e.u, e.v), std::max(e.u, e.v)});
  return out;
}

std::set<std::pair<uint32_t, uint32_t>> block_edges(const Pyramid& p,
                                                    const std::vector<uint32_t>& ids) {
  Graph g = pyramid_to_graph(p);
  std::set<std::pair<uint32_t, uint32_t>> out;
  for (const Edge& e : g.edges) {
    uint32_t a = ids[e.u], b = ids[e.v];
    out.insert({std::min(a, b), std::max(a, b)});
  }
  return out;
}

// The cut evolution only resolves same-depth sibling pairs on its last pass,
// whose radius reaches 1 exactly when the depth is a power of three. Peeled
// blocks inherit arbitrary depths from the funnel, so pad each block with
// full-width copies of its bottom layer (one child per bottom vertex, keeping
// every distance between original vertices intact) up to the next power of
// three before embedding. New ids sit past the original range, so restricting
// the resulting cuts to the first n coordinates recovers a measure on the
// unpadded block.
Pyramid pad_depth_pow3(const Pyramid& b) {
  size_t depth = b.layers.size();
  size_t target = 1;
  while (target < depth) target *= 3;
  if (target == depth) return b;
  Pyramid p = b;
  size_t width = b.layers.back().size();
  while (p.layers.size() < target) {
    const std::vector<uint32_t>& above = p.layers.back();
    std::vector<uint32_t> row(width);
    for (size_t j = 0; j < width; ++j) {
      row[j] = p.n++;
      p.parent.push_back(above[j]);
    }
    p.layers.push_back(std::move(row));
  }
  return p;
}

CutMeasure restrict_measure(const CutMeasure& m, uint32_t n) {
  if (m.n == n) return m;
  CutMeasure out;
  out.n = n;
  for (const auto& [bits, weight] : m.cuts) {
    Bits side(n);
    for (uint32_t v = 0; v < n; ++v)
      if (bits.test(v)) side.set(v);
    out.cuts.push_back({side, weight});
  }
  out.canonicalize();
  return out;
}

}  // namespace

ReductionSample peel(const RaySurgery& s, Rng& rng, const AttachmentSampler& sampler) {
  if (s.widened.n == 0 || s.grid.empty()) fail_check("peel: surgery carries no widened funnel");
  uint32_t depth = static_cast<uint32_t>(s.grid.size());
  ReductionSample out;
  out.attach = sampler(s, rng);

  // Central block: the two middle columns under the apex.
  Pyramid& pa = out.block_a;
  pa.n = 1 + 2 * depth;
  pa.layers.resize(depth + 1);
  pa.parent.assign(pa.n, -1);
  pa.layers[0].push_back(0);
  out.a_ids.push_back(0);
  uint32_t next = 1;
  for (uint32_t i = 0; i < depth; ++i) {
    for (uint32_t c : {1u, 2u}) {
      pa.layers[i + 1].push_back(next);
      pa.parent[next] = i == 0 ? 0 : static_cast<int64_t>(next - 2);
      out.a_ids.push_back(s.grid[i][c]);
      ++next;
    }
  }

  // Cut-open block: everything else, rows read from column 3 around to
  // column 0, inheriting parents from the widened funnel.
  Pyramid& pb = out.block_body;
  pb.n = s.widened.n - 2 * depth;
  pb.layers.resize(depth + 1);
  pb.parent.assign(pb.n, -1);
  std::vector<int64_t> local(s.widened.n, -1);
  pb.layers[0].push_back(0);
  out.body_ids.push_back(0);
  local[0] = 0;
  next = 1;
  for (uint32_t i = 1; i <= depth; ++i) {
    const std::vector<uint32_t>& row = s.widened.layers[i];
    std::vector<uint32_t> order;
    order.push_back(row[3]);
    for (size_t j = 4; j < row.size(); ++j) order.push_back(row[j]);
    order.push_back(row[0]);
    for (uint32_t gid : order) {
      pb.layers[i].push_back(next);
      local[gid] = next;
      out.body_ids.push_back(gid);
      ++next;
    }
  }
  for (uint32_t i = 1; i <= depth; ++i)
    for (uint32_t v : pb.layers[i]) {
      int64_t gp = s.widened.parent[out.body_ids[v]];
      pb.parent[v] = local[static_cast<uint32_t>(gp)];
    }

  for (const Pyramid* block : {&pa, &pb}) {
    std::vector<std::string> errs = validate_pyramid(*block);
    if (!errs.empty()) fail_check("peel: block fails pyramid validation: " + errs.front());
  }

  // Glue graph: the widened funnel without the per-row seam edges.
  std::set<std::pair<uint32_t, uint32_t>> seams;
  for (uint32_t i = 0; i < depth; ++i) {
    seams.insert({std::min(s.grid[i][0], s.grid[i][1]), std::max(s.grid[i][0], s.grid[i][1])});
    seams.insert({std::min(s.grid[i][2], s.grid[i][3]), std::max(s.grid[i][2], s.grid[i][3])});
  }
  out.glued.n = s.widened.n;
  out.glued.unweighted = s.widened_graph.unweighted;
  for (const Edge& e : s.widened_graph.edges)
    if (!seams.count({std::min(e.u, e.v), std::max(e.u, e.v)})) out.glued.edges.push_back(e);

  std::vector<char> in_a(s.widened.n, 0), in_body(s.widened.n, 0);
  for (uint32_t id : out.a_ids) in_a[id] = 1;
  for (uint32_t id : out.body_ids) in_body[id] = 1;
  out.blocks_match_induced = block_edges(pa, out.a_ids) == induced_edges(s.widened_graph, in_a) &&
                             block_edges(pb, out.body_ids) == induced_edges(s.widened_graph, in_body);
  return out;
}

std::string reduction_sample_to_json(const ReductionSample& sample) {
  ordered_json doc;
  doc["sampled_attachment"] = sample.attach;
  ordered_json blocks = ordered_json::array();
  ordered_json a;
  a["kind"] = "A-block";
  a["attach"] = sample.a_ids.front();
  a["pyramid"] = ordered_json::parse(pyramid_to_json(sample.block_a));
  a["ids"] = sample.a_ids;
  blocks.push_back(a);
  ordered_json b;
  b["kind"] = "cut-block";
  b["attach"] = sample.body_ids.front();
  b["pyramid"] = ordered_json::parse(pyramid_to_json(sample.block_body));
  b["ids"] = sample.body_ids;
  blocks.push_back(b);
  doc["blocks"] = blocks;
  doc["tree"] = ordered_json::array({ordered_json::array({0, 1, sample.a_ids.front()})});
  return doc.dump(2);
}

FunnelEmbedding embed_funnel(const Funnel& f, uint32_t peel_samples, uint64_t mc_samples,
                             uint64_t seed, uint32_t threads) {
  std::vector<std::string> errs = validate_funnel(f);
  if (!errs.empty()) fail_check("embed_funnel: invalid funnel: " + errs.front());
  if (threads == 0) threads = 1;
  FunnelEmbedding out;
  out.peel_samples = peel_samples;
  out.mc_samples = mc_samples;
  out.seed = seed;
  if (f.n == 1) {
    out.measure.n = 1;
    return out;
  }
  if (peel_samples == 0 || mc_samples == 0)
    fail_usage("embed_funnel: need positive peel_samples and mc_samples");

  FiniteMetric fm = apsp(funnel_to_graph(f));
  SeedSequence seq(seed);
  std::vector<CutMeasure> pulled(peel_samples);
  std::vector<std::vector<std::vector<double>>> glued_dist(peel_samples);
  parallel_chunks(peel_samples, threads, [&](uint32_t k) {
    Rng rk = seq.stream(2 * k);
    RaySurgery s = ray_surgery(f, -1, rk);
    ReductionSample ps = peel(s, rk);
    Rng sk = seq.stream(2 * k + 1);
    uint64_t seed_a = sk.next_u64(), seed_b = sk.next_u64();
    PyramidEmbedding ea = embed_pyramid(pad_depth_pow3(ps.block_a), mc_samples, seed_a, 1);
    PyramidEmbedding eb = embed_pyramid(pad_depth_pow3(ps.block_body), mc_samples, seed_b, 1);
    CutMeasure ma = restrict_measure(ea.measure, ps.block_a.n);
    CutMeasure mb = restrict_measure(eb.measure, ps.block_body.n);
    CutMeasure glued = one_sum_glue({{ma, ps.a_ids}, {mb, ps.body_ids}}, s.widened.n);
    CutMeasure& local = pulled[k];
    local.n = f.n;
    for (const auto& [bits, weight] : glued.cuts) {
      Bits side(f.n);
      for (uint32_t v = 0; v < f.n; ++v)
        if (bits.test(s.body_map[v])) side.set(v);
      local.cuts.push_back({side, weight});
    }
    local.canonicalize();
    FiniteMetric gm = apsp(ps.glued);
    auto& mat = glued_dist[k];
    mat.assign(f.n, std::vector<double>(f.n, 0));
    for (uint32_t x = 0; x < f.n; ++x)
      for (uint32_t y = 0; y < f.n; ++y)
        if (x != y) mat[x][y] = gm.at(s.body_map[x], s.body_map[y]);
  });

  for (uint32_t k = 0; k < peel_samples; ++k)
    for (const auto& [bits, weight] : pulled[k].cuts)
      out.measure.cuts.push_back({bits, weight / peel_samples});
  out.measure.n = f.n;
  out.measure.canonicalize();

  std::vector<std::vector<double>> target(f.n, std::vector<double>(f.n, 0));
  for (uint32_t x = 0; x < f.n; ++x)
    for (uint32_t y = x + 1; y < f.n; ++y)
      target[x][y] = target[y][x] = cut_measure_distance(out.measure, x, y);
  out.report = distortion(fm, target);

  out.min_pair_ratio = 1e300;
  out.max_mean_inflation = 0;
  for (uint32_t x = 0; x < f.n; ++x)
    for (uint32_t y = x + 1; y < f.n; ++y) {
      double sum = 0;
      for (uint32_t k = 0; k < peel_samples; ++k) {
        double ratio = glued_dist[k][x][y] / fm.at(x, y);
        out.min_pair_ratio = std::min(out.min_pair_ratio, ratio);
        sum += ratio;
      }
      out.max_mean_inflation = std::max(out.max_mean_inflation, sum / peel_samples);
    }
  if (!(out.min_pair_ratio < 1e300)) out.min_pair_ratio = 1;
  return out;
}

}  // namespace npce
