#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "core.hpp"
#include "util.hpp"

using namespace npce;

namespace {

Graph path_graph(uint32_t n) {
  Graph g;
  g.n = n;
  for (uint32_t i = 0; i + 1 < n; ++i) g.edges.push_back({i, i + 1, 1.0});
  return g;
}

}  // namespace

TEST_CASE("apsp on an unweighted path") {
  FiniteMetric m = apsp(path_graph(4));
  CHECK(m.n == 4);
  CHECK(m.at(0, 3) == 3.0);
  CHECK(m.at(1, 2) == 1.0);
  CHECK(m.at(2, 2) == 0.0);
  for (uint32_t x = 0; x < 4; ++x)
    for (uint32_t y = 0; y < 4; ++y) CHECK(m.at(x, y) == m.at(y, x));
}

TEST_CASE("apsp takes the cheaper multi-hop route") {
  Graph g;
  g.n = 3;
  g.unweighted = false;
  g.edges = {{0, 1, 1.0}, {1, 2, 2.0}, {0, 2, 5.0}};
  FiniteMetric m = apsp(g);
  CHECK(m.at(0, 2) == 3.0);
  CHECK(m.at(0, 1) == 1.0);
}

TEST_CASE("apsp rejects disconnected graphs") {
  Graph g;
  g.n = 2;
  CHECK_THROWS_AS(apsp(g), Error);
  try {
    apsp(g);
  } catch (const Error& e) {
    CHECK(e.kind() == Err::Usage);
  }
}

TEST_CASE("sssp marks unreachable vertices with infinity") {
  Graph g;
  g.n = 3;
  g.edges = {{0, 1, 1.0}};
  std::vector<double> d = sssp(g, 0);
  CHECK(d[1] == 1.0);
  CHECK(std::isinf(d[2]));
}

TEST_CASE("graph validation catches malformed input") {
  Graph g;
  g.n = 2;

  SUBCASE("endpoint out of range") { g.edges = {{0, 5, 1.0}}; }
  SUBCASE("self loop") { g.edges = {{1, 1, 1.0}}; }
  SUBCASE("negative length") {
    g.unweighted = false;
    g.edges = {{0, 1, -1.0}};
  }
  SUBCASE("non-unit edge while flagged unweighted") { g.edges = {{0, 1, 2.0}}; }
  SUBCASE("duplicate edge") { g.edges = {{0, 1, 1.0}, {1, 0, 1.0}}; }

  try {
    g.validate();
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == Err::Usage);
  }
}

TEST_CASE("cut measure distance counts weighted disagreements") {
  CutMeasure m;
  m.n = 3;
  m.cuts = {{Bits::of(3, {1, 2}), 2.5}};
  CHECK(cut_measure_distance(m, 0, 1) == 2.5);
  CHECK(cut_measure_distance(m, 1, 2) == 0.0);
  CHECK(cut_measure_distance(m, 0, 2) == 2.5);
  CHECK(cut_measure_distance(m, 1, 1) == 0.0);
}

TEST_CASE("canonicalize flips, merges, and drops trivial cuts") {
  CutMeasure m;
  m.n = 3;
  // {0} flips to {1,2} and merges with it; the full side and the
  // zero-weight cut both disappear.
  m.cuts = {{Bits::of(3, {0}), 1.0},
            {Bits::of(3, {1, 2}), 2.0},
            {Bits::of(3, {0, 1, 2}), 5.0},
            {Bits::of(3, {2}), 0.0}};
  m.canonicalize();
  REQUIRE(m.cuts.size() == 1);
  CHECK(m.cuts[0].first == Bits::of(3, {1, 2}));
  CHECK(m.cuts[0].second == 3.0);
  CHECK_NOTHROW(m.validate());
}

TEST_CASE("validate rejects non-canonical measures") {
  CutMeasure m;
  m.n = 3;
  m.cuts = {{Bits::of(3, {0, 1}), 1.0}};
  try {
    m.validate();
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == Err::Check);
  }
}

TEST_CASE("distortion of an exact embedding is one") {
  FiniteMetric src = apsp(path_graph(3));
  CutMeasure m;
  m.n = 3;
  m.cuts = {{Bits::of(3, {1, 2}), 1.0}, {Bits::of(3, {2}), 1.0}};
  std::vector<std::vector<double>> target(3, std::vector<double>(3, 0.0));
  for (uint32_t x = 0; x < 3; ++x)
    for (uint32_t y = 0; y < 3; ++y) target[x][y] = cut_measure_distance(m, x, y);
  EmbeddingReport r = distortion(src, target);
  CHECK(r.expansion == 1.0);
  CHECK(r.contraction == 1.0);
  CHECK(r.distortion == 1.0);
  CHECK_FALSE(r.infinite);
  REQUIRE(r.worst.size() == 2);
  CHECK(r.worst[0].ratio == 1.0);
  CHECK(r.worst[1].ratio == 1.0);
}

TEST_CASE("distortion flags collapsed pairs as infinite") {
  FiniteMetric src = apsp(path_graph(3));
  std::vector<std::vector<double>> target(3, std::vector<double>(3, 0.0));
  EmbeddingReport r = distortion(src, target);
  CHECK(r.infinite);
  CHECK(std::isinf(r.distortion));
}

TEST_CASE("one-sum glue of two edges through a shared vertex") {
  CutMeasure edge;
  edge.n = 2;
  edge.cuts = {{Bits::of(2, {1}), 1.0}};
  std::vector<GluedBlock> blocks = {{edge, {0, 1}}, {edge, {0, 2}}};
  CutMeasure glued = one_sum_glue(blocks, 3);
  CHECK(glued.n == 3);
  CHECK(glued.cuts.size() == 2);
  CHECK(cut_measure_distance(glued, 0, 1) == 1.0);
  CHECK(cut_measure_distance(glued, 0, 2) == 1.0);
  // Both glued cuts keep vertex 1 and vertex 2 on opposite sides, so the
  // glued distance is the sum of the two block distances through vertex 0.
  CHECK(cut_measure_distance(glued, 1, 2) == 2.0);
}

TEST_CASE("one-sum glue rejects non-tree sharing") {
  CutMeasure edge;
  edge.n = 2;
  edge.cuts = {{Bits::of(2, {1}), 1.0}};

  SUBCASE("two shared vertices") {
    std::vector<GluedBlock> blocks = {{edge, {0, 1}}, {edge, {0, 1}}};
    CHECK_THROWS_AS(one_sum_glue(blocks, 2), Error);
  }
  SUBCASE("disconnected block structure") {
    std::vector<GluedBlock> blocks = {{edge, {0, 1}}, {edge, {2, 3}}};
    CHECK_THROWS_AS(one_sum_glue(blocks, 4), Error);
  }
}

TEST_CASE("json round trips preserve graphs, metrics, and measures") {
  Graph g;
  g.n = 3;
  g.unweighted = false;
  g.edges = {{0, 1, 1.5}, {1, 2, 2.0}};
  Graph g2 = graph_from_json(graph_to_json(g));
  CHECK(g2.n == g.n);
  REQUIRE(g2.edges.size() == 2);
  CHECK(g2.edges[0].len == 1.5);

  FiniteMetric m = apsp(path_graph(4));
  FiniteMetric m2 = metric_from_json(metric_to_json(m));
  CHECK(m2.n == 4);
  CHECK(m2.at(0, 3) == 3.0);

  CutMeasure c;
  c.n = 3;
  c.cuts = {{Bits::of(3, {1, 2}), 0.25}, {Bits::of(3, {2}), 1.0}};
  CutMeasure c2 = cut_measure_from_json(cut_measure_to_json(c));
  CHECK(c2.n == 3);
  REQUIRE(c2.cuts.size() == 2);
  CHECK(cut_measure_distance(c2, 0, 2) == 1.25);
}

TEST_CASE("malformed json is a usage error") {
  for (const char* bad : {"{", "[1,2", "{\"n\": 3}"}) {
    try {
      graph_from_json(bad);
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.kind() == Err::Usage);
    }
  }
}

TEST_CASE("rationals normalize and do exact arithmetic") {
  CHECK(Rat(2, 4) == Rat(1, 2));
  CHECK(Rat(1, -2).str() == "-1/2");
  CHECK(Rat(3).str() == "3");
  CHECK(Rat(1, 3) + Rat(1, 6) == Rat(1, 2));
  CHECK(Rat(1, 2) * Rat(2, 3) == Rat(1, 3));
  CHECK(Rat(1, 2) - Rat(1, 2) == Rat(0));
  CHECK(Rat(3, 4) / Rat(3, 2) == Rat(1, 2));
  CHECK(Rat(1, 3) < Rat(1, 2));
  CHECK(Rat(1, 2).to_double() == 0.5);
  CHECK_THROWS_AS(Rat(1, 0), Error);
}

TEST_CASE("rng replay is exact and mappings stay in range") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  Rng r(7);
  for (int i = 0; i < 1000; ++i) {
    uint64_t v = r.next_below(10);
    CHECK(v < 10);
    double u = r.next_unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK_FALSE(Rng(1).bernoulli(0.0));
  CHECK(Rng(1).bernoulli(1.0));
  CHECK_THROWS_AS(Rng(1).next_below(0), Error);
}

TEST_CASE("seed sequence streams differ but replay identically") {
  SeedSequence s(123);
  CHECK(s.stream(0).next_u64() != s.stream(1).next_u64());
  CHECK(s.stream(5).next_u64() == SeedSequence(123).stream(5).next_u64());
}

TEST_CASE("bits behave like small vertex sets") {
  Bits b = Bits::of(70, {0, 64, 69});
  CHECK(b.count() == 3);
  CHECK(b.test(64));
  CHECK_FALSE(b.test(1));
  CHECK(b.members() == std::vector<uint32_t>{0, 64, 69});
  CHECK(b.is_subset_of(Bits::of(70, {0, 1, 64, 69})));
  CHECK_FALSE(Bits::of(70, {1}).is_subset_of(b));
  CHECK(b.flipped().count() == 67);
  CHECK((b & b.flipped()).none());
  CHECK((b | b.flipped()).all());
}

TEST_CASE("fnv1a64 matches the reference constants") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("parallel chunk results do not depend on worker count") {
  auto run = [](uint32_t threads) {
    std::vector<uint64_t> out(16, 0);
    parallel_chunks(16, threads, [&](uint32_t c) {
      Rng r(SeedSequence(9).stream(c).next_u64());
      out[c] = r.next_u64();
    });
    return out;
  };
  CHECK(run(1) == run(4));
  CHECK(run(1) == run(0));
}
