#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "core.hpp"
#include "pyramid.hpp"
#include "reduce.hpp"
#include "util.hpp"

using namespace npce;

namespace {

Graph path_graph(uint32_t n) {
  Graph g;
  g.n = n;
  for (uint32_t i = 0; i + 1 < n; ++i) g.edges.push_back({i, i + 1, 1.0});
  return g;
}

Funnel flat_funnel() {
  Funnel f;
  f.n = 4;
  f.layers = {{0}, {1, 2, 3}};
  f.parent = {-1, 0, 0, 0};
  return f;
}

Funnel path_funnel(uint32_t depth) {
  Funnel f;
  f.n = depth;
  for (uint32_t i = 0; i < depth; ++i) {
    f.layers.push_back({i});
    f.parent.push_back(i == 0 ? -1 : int64_t(i) - 1);
  }
  return f;
}

}  // namespace

TEST_CASE("lipschitz partition carves bounded clusters") {
  Graph g = path_graph(8);
  FiniteMetric m = apsp(g);

  Rng rng(3);
  RandomPartition part = lipschitz_partition(g, 4.0, rng);
  REQUIRE(part.cluster.size() == 8);
  for (uint32_t v = 0; v < 8; ++v) CHECK(part.cluster[v] < part.centers.size());
  for (size_t c = 0; c < part.centers.size(); ++c) {
    CHECK(part.cluster[part.centers[c]] == c);
    CHECK(part.radii[c] >= 1.0);
    CHECK(part.radii[c] < 2.0);
  }
  for (uint32_t x = 0; x < 8; ++x)
    for (uint32_t y = 0; y < 8; ++y)
      if (part.cluster[x] == part.cluster[y]) CHECK(m.at(x, y) <= 4.0);

  // A scale beyond four diameters always lands everything in one ball.
  Rng rng2(5);
  RandomPartition whole = lipschitz_partition(g, 4.0 * 7, rng2);
  CHECK(whole.centers.size() == 1);

  // A scale below the edge length isolates every vertex.
  Rng rng3(5);
  RandomPartition single = lipschitz_partition(g, 0.5, rng3);
  CHECK(single.centers.size() == 8);

  Rng a(11), b(11);
  CHECK(lipschitz_partition(g, 3.0, a).cluster == lipschitz_partition(g, 3.0, b).cluster);
}

TEST_CASE("beta estimates are thread independent") {
  Graph g = path_graph(6);
  BetaEstimate one = estimate_beta(g, 3.0, 200, 5, 1);
  BetaEstimate four = estimate_beta(g, 3.0, 200, 5, 4);
  CHECK(one.beta == four.beta);
  CHECK(one.max_diam == four.max_diam);
  CHECK(one.partitions == 200);
  CHECK(one.beta > 0);
  CHECK(one.max_diam <= 3.0);
}

TEST_CASE("ray surgery widens one ray into a grid") {
  Rng seedgen(42);
  Funnel f = gen_random_funnel(4, 4, seedgen);
  Rng rng(1);
  RaySurgery s = ray_surgery(f, 0, rng);

  CHECK(validate_funnel(s.widened).empty());
  REQUIRE(s.ray.size() == 4);
  CHECK(s.ray[0] == f.basepoint());
  REQUIRE(s.grid.size() == 3);
  REQUIRE(s.peel_set.size() == 1 + 2 * 3);

  // The peel set walks the two central columns below the apex.
  uint32_t apex = s.peel_set[0];
  CHECK(s.widened_metric.at(apex, s.grid.back()[1]) == 3.0);
  CHECK(s.widened_metric.at(apex, s.grid.back()[2]) == 3.0);

  // Widening stretches by at most the grid detour and never contracts.
  CHECK(s.widening.contraction == 1.0);
  CHECK(s.widening.expansion <= 3.0 + 1e-9);

  // Distances between off-ray vertices may only use longer routes in G'.
  for (uint32_t x = 0; x < f.n; ++x)
    for (uint32_t y = 0; y < f.n; ++y)
      CHECK(s.widened_metric.at(s.wide_map[x], s.wide_map[y]) >=
            s.funnel_metric.at(x, y) - 1e-9);
}

TEST_CASE("peel cuts the widened funnel into two valid blocks") {
  Rng seedgen(42);
  Funnel f = gen_random_funnel(4, 4, seedgen);
  Rng rng(1);
  RaySurgery s = ray_surgery(f, 0, rng);

  Rng prng(2);
  ReductionSample sample = peel(s, prng);
  CHECK(sample.blocks_match_induced);
  CHECK(validate_pyramid(sample.block_a).empty());
  CHECK(validate_pyramid(sample.block_body).empty());
  CHECK(sample.a_ids.size() == sample.block_a.n);
  CHECK(sample.body_ids.size() == sample.block_body.n);
  CHECK(sample.block_a.n + sample.block_body.n == s.widened.n + 1);
  CHECK(sample.glued.n == s.widened.n);
  CHECK(sample.glued.edges.size() < s.widened_graph.edges.size());

  // Both blocks contain the shared basepoint.
  uint32_t apex = s.peel_set[0];
  CHECK(sample.a_ids[sample.block_a.basepoint()] == apex);
  CHECK(sample.body_ids[sample.block_body.basepoint()] == apex);

  // Attachment samplers only ever pick from the peel set.
  auto in_peel = [&](uint32_t v) {
    for (uint32_t u : s.peel_set)
      if (u == v) return true;
    return false;
  };
  CHECK(in_peel(sample.attach));
  Rng pr2(3);
  CHECK(peel(s, pr2, attach_basepoint()).attach == apex);
  Rng pr3(4);
  CHECK(in_peel(peel(s, pr3, attach_uniform()).attach));

  std::string json = reduction_sample_to_json(sample);
  CHECK(json.find("\"A-block\"") != std::string::npos);
  CHECK(json.find("\"cut-block\"") != std::string::npos);
}

TEST_CASE("embed_funnel produces finite embeddings at every depth") {
  // Depths 2 and 4 exercise the depth padding; 3 skips it.
  for (uint32_t d : {2u, 3u, 4u}) {
    Rng seedgen(40 + d);
    Funnel f = gen_random_funnel(d, 4, seedgen);
    FunnelEmbedding fe = embed_funnel(f, 10, 2000, 5, 1);
    CAPTURE(d);
    CHECK_FALSE(fe.report.infinite);
    CHECK(fe.report.distortion >= 1.0 - 1e-12);
    CHECK(fe.report.distortion < 12.0);
    CHECK(fe.min_pair_ratio >= 1.0 - 1e-9);
    CHECK(fe.max_mean_inflation >= 1.0 - 1e-9);
    CHECK(fe.measure.n == f.n);
    CHECK_NOTHROW(fe.measure.validate());
    CHECK(fe.peel_samples == 10);
    CHECK(fe.mc_samples == 2000);
  }
}

TEST_CASE("embed_funnel replays exactly across thread counts") {
  Rng seedgen(42);
  Funnel f = gen_random_funnel(4, 4, seedgen);
  FunnelEmbedding a = embed_funnel(f, 5, 1000, 7, 1);
  FunnelEmbedding b = embed_funnel(f, 5, 1000, 7, 2);
  CHECK(a.measure.cuts == b.measure.cuts);
  CHECK(a.report.distortion == b.report.distortion);
  CHECK(a.min_pair_ratio == b.min_pair_ratio);
}

TEST_CASE("embed_funnel on degenerate shapes") {
  FunnelEmbedding flat = embed_funnel(flat_funnel(), 10, 2000, 11, 1);
  CHECK_FALSE(flat.report.infinite);
  CHECK(flat.report.distortion >= 1.0);

  // A path funnel is a path graph, and paths embed with almost no error.
  FunnelEmbedding path = embed_funnel(path_funnel(4), 10, 4000, 13, 1);
  CHECK_FALSE(path.report.infinite);
  CHECK(path.report.distortion <= 1.2);
}
