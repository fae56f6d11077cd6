// core.hpp - graphs, finite metrics, cut measures, distortion reports.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "util.hpp"

namespace npce {

struct Edge {
  uint32_t u = 0;
  uint32_t v = 0;
  double len = 1.0;
};

// Finite undirected graph with non-negative edge lengths. `unweighted` means
// every length is exactly 1 and distances are integers.
struct Graph {
  uint32_t n = 0;
  bool unweighted = true;
  std::vector<Edge> edges;

  void validate() const;
  std::vector<std::vector<std::pair<uint32_t, double>>> adjacency() const;
};

// Dense symmetric distance matrix with positive off-diagonal entries.
struct FiniteMetric {
  uint32_t n = 0;
  std::vector<std::vector<double>> d;

  double at(uint32_t x, uint32_t y) const { return d[x][y]; }
  void validate(double tol = 1e-9) const;
};

// Weighted family of vertex subsets. Cut sides are canonical: the side that
// does not contain vertex 0. Distances are sums of weighted disagreements.
struct CutMeasure {
  uint32_t n = 0;
  std::vector<std::pair<Bits, double>> cuts;

  // Flips sides containing vertex 0, drops empty/full sides and zero weights,
  // merges duplicate sides. Keeps cuts sorted for deterministic output.
  void canonicalize();
  void validate() const;
};

struct WorstPair {
  uint32_t x = 0;
  uint32_t y = 0;
  double ratio = 1.0;  // target/source
};

struct EmbeddingReport {
  double expansion = 1.0;    // max target/source
  double contraction = 1.0;  // max source/target
  double distortion = 1.0;   // expansion * contraction
  bool infinite = false;     // some pair collapsed to target distance 0
  std::vector<WorstPair> worst;
};

// Shortest paths from every vertex; errors on disconnected input naming one
// vertex from each of two components. BFS when unweighted, Dijkstra otherwise.
FiniteMetric apsp(const Graph& g);

// Single-source distances; +infinity entries for unreachable vertices.
std::vector<double> sssp(const Graph& g, uint32_t src);

double cut_measure_distance(const CutMeasure& m, uint32_t x, uint32_t y);

// Expansion/contraction of `target` distances against the source metric.
// A zero target distance between distinct points sets the infinite flag
// instead of throwing; `distortion` is then +infinity.
EmbeddingReport distortion(const FiniteMetric& source,
                           const std::vector<std::vector<double>>& target);

// One block of a 1-sum: a cut measure on local ids plus the injection of
// local ids into the glued vertex set.
struct GluedBlock {
  CutMeasure measure;
  std::vector<uint32_t> to_glued;  // local id -> glued id
};

// Glues block measures along a 1-sum tree (blocks pairwise share at most one
// glued vertex, and the sharing structure is a connected tree). Each cut is
// extended by the full vertex sets of the blocks hanging off its own side.
CutMeasure one_sum_glue(const std::vector<GluedBlock>& blocks, uint32_t n_glued);

// JSON round-trips (schemas documented in README).
std::string graph_to_json(const Graph& g);
Graph graph_from_json(const std::string& text);
std::string cut_measure_to_json(const CutMeasure& m);
CutMeasure cut_measure_from_json(const std::string& text);
std::string metric_to_json(const FiniteMetric& m);
FiniteMetric metric_from_json(const std::string& text);

}  // namespace npce
