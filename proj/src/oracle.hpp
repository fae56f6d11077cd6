// oracle.hpp - exact small-instance checks: cut-cone LP, flow/cut gap, parity.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core.hpp"
#include "util.hpp"

namespace npce {

enum class Rel { Le, Ge, Eq };

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Optimal;
  double value = 0;
  std::vector<double> x;
};

// Minimizes c.x subject to a x (rel) b, x >= 0. Dense two-phase simplex,
// Dantzig pricing with a Bland fallback when the objective stalls.
LpResult solve_lp(const std::vector<std::vector<double>>& a, const std::vector<Rel>& rel,
                  const std::vector<double>& b, const std::vector<double>& c);

struct CutConeResult {
  double c_star = 0;
  CutMeasure witness;
};

// Optimal L1 distortion of a finite metric via the cut-cone LP (n <= 12).
CutConeResult c1_lp(const FiniteMetric& m);

struct FlowInstance {
  Graph graph;
  std::vector<double> cap;  // aligned with graph.edges
  std::vector<std::pair<std::pair<uint32_t, uint32_t>, double>> demands;

  void validate() const;
};

// Capacity crossing S over demand crossing S; +infinity when no demand is cut.
double sparsity(const FlowInstance& inst, const Bits& s);

// Largest epsilon so that epsilon * dem can be routed simultaneously
// (n <= 20, at most 30 demand pairs).
double maxflow_concurrent(const FlowInstance& inst);

struct GapResult {
  double gap = 0;
  double eps = 0;            // concurrent max flow
  double min_sparsity = 0;
  Bits best_cut;
  bool weak_duality_ok = false;  // sparsity >= eps on every enumerated cut
};

GapResult flow_cut_gap(const FlowInstance& inst);

// Pr[Binomial(k, p) is odd], in closed form.
double parity_prob(double p, uint64_t k);

std::string flow_instance_to_json(const FlowInstance& inst);
FlowInstance flow_instance_from_json(const std::string& text);

}  // namespace npce
