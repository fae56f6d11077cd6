#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "core.hpp"
#include "oracle.hpp"
#include "util.hpp"

using namespace npce;

namespace {

Graph path_graph(uint32_t n) {
  Graph g;
  g.n = n;
  for (uint32_t i = 0; i + 1 < n; ++i) g.edges.push_back({i, i + 1, 1.0});
  return g;
}

Graph cycle_graph(uint32_t n) {
  Graph g = path_graph(n);
  g.edges.push_back({n - 1, 0, 1.0});
  return g;
}

// Complete bipartite K_{2,3}: left {0,1}, right {2,3,4}.
Graph k23() {
  Graph g;
  g.n = 5;
  for (uint32_t l = 0; l < 2; ++l)
    for (uint32_t r = 2; r < 5; ++r) g.edges.push_back({l, r, 1.0});
  return g;
}

// Random labelled tree from a Prufer-like parent draw.
Graph random_tree(uint32_t n, Rng& rng) {
  Graph g;
  g.n = n;
  for (uint32_t v = 1; v < n; ++v)
    g.edges.push_back({static_cast<uint32_t>(rng.next_below(v)), v, 1.0});
  return g;
}

}  // namespace

TEST_CASE("simplex solves tiny programs") {
  SUBCASE("two-variable optimum") {
    // min -x - 2y s.t. x + y <= 4, y <= 3.
    LpResult r = solve_lp({{1, 1}, {0, 1}}, {Rel::Le, Rel::Le}, {4, 3}, {-1, -2});
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.value == doctest::Approx(-7.0));
    CHECK(r.x[0] == doctest::Approx(1.0));
    CHECK(r.x[1] == doctest::Approx(3.0));
  }
  SUBCASE("equality constraints") {
    LpResult r = solve_lp({{1, 1}}, {Rel::Eq}, {2}, {3, 1});
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.value == doctest::Approx(2.0));
  }
  SUBCASE("infeasible") {
    LpResult r = solve_lp({{1}, {1}}, {Rel::Le, Rel::Ge}, {1, 2}, {1});
    CHECK(r.status == LpStatus::Infeasible);
  }
  SUBCASE("unbounded") {
    LpResult r = solve_lp({{1}}, {Rel::Ge}, {1}, {-1});
    CHECK(r.status == LpStatus::Unbounded);
  }
}

TEST_CASE("cut cone optimum on graphs with known distortion") {
  SUBCASE("paths and cycles are isometric") {
    for (const Graph& g : {path_graph(5), cycle_graph(4), cycle_graph(5)}) {
      CutConeResult r = c1_lp(apsp(g));
      CHECK(r.c_star == doctest::Approx(1.0).epsilon(1e-7));
    }
  }
  SUBCASE("k23 needs four thirds") {
    CutConeResult r = c1_lp(apsp(k23()));
    CHECK(r.c_star == doctest::Approx(4.0 / 3.0).epsilon(1e-7));
  }
  SUBCASE("trees are isometric") {
    Rng rng(606);
    for (int rep = 0; rep < 5; ++rep) {
      Graph t = random_tree(7, rng);
      CutConeResult r = c1_lp(apsp(t));
      CHECK(r.c_star == doctest::Approx(1.0).epsilon(1e-7));
    }
  }
}

TEST_CASE("cut cone witness achieves its reported distortion") {
  FiniteMetric m = apsp(k23());
  CutConeResult r = c1_lp(m);
  CHECK_NOTHROW(r.witness.validate());
  std::vector<std::vector<double>> target(m.n, std::vector<double>(m.n, 0.0));
  for (uint32_t x = 0; x < m.n; ++x)
    for (uint32_t y = 0; y < m.n; ++y) target[x][y] = cut_measure_distance(r.witness, x, y);
  EmbeddingReport rep = distortion(m, target);
  CHECK(rep.distortion == doctest::Approx(r.c_star).epsilon(1e-6));
}

TEST_CASE("sparsity of explicit cuts") {
  FlowInstance inst;
  inst.graph = path_graph(3);
  inst.cap = {2.0, 1.0};
  inst.demands = {{{0, 2}, 1.0}, {{0, 1}, 3.0}};
  inst.validate();

  Bits s = Bits::of(3, {0});
  // Crossing capacity 2, crossing demand 1 + 3.
  CHECK(sparsity(inst, s) == doctest::Approx(0.5));

  Bits t = Bits::of(3, {0, 1});
  // Only the long demand crosses.
  CHECK(sparsity(inst, t) == doctest::Approx(1.0));

  FlowInstance no_demand = inst;
  no_demand.demands.clear();
  CHECK(std::isinf(sparsity(no_demand, s)));
}

TEST_CASE("concurrent flow on a shared bottleneck") {
  // Two demands forced through one capacity-1 edge.
  FlowInstance inst;
  inst.graph = path_graph(2);
  inst.cap = {1.0};
  inst.demands = {{{0, 1}, 1.0}, {{0, 1}, 1.0}};
  CHECK(maxflow_concurrent(inst) == doctest::Approx(0.5));
}

TEST_CASE("flow cut gap closes on trees and opens on k23") {
  SUBCASE("single edge") {
    FlowInstance inst;
    inst.graph = path_graph(2);
    inst.cap = {1.0};
    inst.demands = {{{0, 1}, 1.0}};
    GapResult r = flow_cut_gap(inst);
    CHECK(r.eps == doctest::Approx(1.0));
    CHECK(r.min_sparsity == doctest::Approx(1.0));
    CHECK(r.gap == doctest::Approx(1.0));
    CHECK(r.weak_duality_ok);
  }
  SUBCASE("path with mixed demands") {
    FlowInstance inst;
    inst.graph = path_graph(4);
    inst.cap = {1.0, 1.0, 1.0};
    inst.demands = {{{0, 3}, 1.0}, {{1, 2}, 1.0}};
    GapResult r = flow_cut_gap(inst);
    CHECK(r.gap == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.weak_duality_ok);
    CHECK(sparsity(inst, r.best_cut) == doctest::Approx(r.min_sparsity));
  }
  SUBCASE("k23 with all-pairs demands reproduces the L1 bound") {
    FlowInstance inst;
    inst.graph = k23();
    inst.cap.assign(inst.graph.edges.size(), 1.0);
    for (uint32_t x = 0; x < 5; ++x)
      for (uint32_t y = x + 1; y < 5; ++y) inst.demands.push_back({{x, y}, 1.0});
    GapResult r = flow_cut_gap(inst);
    CHECK(r.weak_duality_ok);
    CHECK(r.gap >= 1.0 - 1e-9);
    // The flow/cut gap never exceeds the optimal L1 distortion.
    CutConeResult lp = c1_lp(apsp(inst.graph));
    CHECK(r.gap <= lp.c_star + 1e-6);
  }
}

TEST_CASE("flow instance validation and json") {
  FlowInstance inst;
  inst.graph = path_graph(3);
  inst.cap = {1.0, 1.0};
  inst.demands = {{{0, 2}, 1.0}};
  FlowInstance back = flow_instance_from_json(flow_instance_to_json(inst));
  CHECK(back.graph.n == 3);
  REQUIRE(back.demands.size() == 1);
  CHECK(back.demands[0].second == 1.0);

  SUBCASE("capacity vector must align with edges") {
    inst.cap.pop_back();
    CHECK_THROWS_AS(inst.validate(), Error);
  }
  SUBCASE("demand endpoints must exist") {
    inst.demands[0].first.second = 9;
    CHECK_THROWS_AS(inst.validate(), Error);
  }
  SUBCASE("malformed json") {
    CHECK_THROWS_AS(flow_instance_from_json("{\"dem\": 1}"), Error);
  }
}

TEST_CASE("parity probability closed form") {
  CHECK(parity_prob(0.5, 10) == doctest::Approx(0.5));
  CHECK(parity_prob(0.3, 1) == doctest::Approx(0.3));
  CHECK(parity_prob(0.1, 2) == doctest::Approx(0.18));
  CHECK(parity_prob(0.0, 5) == 0.0);
  for (uint64_t k : {1ull, 2ull, 7ull, 40ull}) {
    double p = 0.2;
    double want = (1.0 - std::pow(1.0 - 2.0 * p, double(k))) / 2.0;
    CHECK(parity_prob(p, k) == doctest::Approx(want).epsilon(1e-12));
  }
}
