#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "json.hpp"

namespace npce {

using ojson = nlohmann::ordered_json;

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-7;

// Full-tableau simplex on rows of `t` (last column is the rhs), objective in
// `obj` (last entry is the negated objective value). `allowed` masks columns
// eligible to enter. Returns false when unbounded.
bool run_simplex(std::vector<std::vector<double>>& t, std::vector<double>& obj,
                 std::vector<uint32_t>& basis, const std::vector<char>& allowed) {
  size_t rows = t.size();
  size_t cols = obj.size() - 1;
  uint32_t stalled = 0;
  double last_value = obj[cols];
  for (uint64_t iter = 0; iter < 200000; ++iter) {
    bool bland = stalled >= 50;
    size_t enter = cols;
    double best = -kPivotTol;
    for (size_t j = 0; j < cols; ++j) {
      if (!allowed[j]) continue;
      if (obj[j] < (bland ? -kPivotTol : best)) {
        enter = j;
        if (bland) break;
        best = obj[j];
      }
    }
    if (enter == cols) return true;  // optimal

    size_t leave = rows;
    double best_ratio = 0;
    for (size_t i = 0; i < rows; ++i) {
      if (t[i][enter] <= kPivotTol) continue;
      double ratio = t[i][cols] / t[i][enter];
      if (leave == rows || ratio < best_ratio - 1e-12 ||
          (ratio < best_ratio + 1e-12 && basis[i] < basis[leave])) {
        leave = i;
        best_ratio = ratio;
      }
    }
    if (leave == rows) return false;  // unbounded

    double piv = t[leave][enter];
    for (size_t j = 0; j <= cols; ++j) t[leave][j] /= piv;
    for (size_t i = 0; i < rows; ++i) {
      if (i == leave || std::abs(t[i][enter]) < 1e-14) continue;
      double factor = t[i][enter];
      for (size_t j = 0; j <= cols; ++j) t[i][j] -= factor * t[leave][j];
    }
    double factor = obj[enter];
    if (std::abs(factor) > 0) {
      for (size_t j = 0; j <= cols; ++j) obj[j] -= factor * t[leave][j];
    }
    basis[leave] = static_cast<uint32_t>(enter);

    if (obj[cols] > last_value + 1e-12) {
      stalled = 0;
      last_value = obj[cols];
    } else {
      ++stalled;
    }
  }
  throw Error(Err::Internal, "simplex: iteration limit reached");
}

}  // namespace

LpResult solve_lp(const std::vector<std::vector<double>>& a, const std::vector<Rel>& rel,
                  const std::vector<double>& b, const std::vector<double>& c) {
  size_t rows = a.size();
  size_t nv = c.size();
  if (rel.size() != rows || b.size() != rows)
    fail_usage("solve_lp: inconsistent constraint dimensions");
  for (const auto& row : a)
    if (row.size() != nv) fail_usage("solve_lp: inconsistent row width");

  // Normalize to b >= 0, then add one slack/surplus per inequality and one
  // artificial per row that lacks an identity column.
  std::vector<std::vector<double>> rn(rows);
  std::vector<Rel> rl(rows);
  std::vector<double> rb(rows);
  for (size_t i = 0; i < rows; ++i) {
    rn[i] = a[i];
    rl[i] = rel[i];
    rb[i] = b[i];
    if (rb[i] < 0) {
      for (double& v : rn[i]) v = -v;
      rb[i] = -rb[i];
      if (rl[i] == Rel::Le)
        rl[i] = Rel::Ge;
      else if (rl[i] == Rel::Ge)
        rl[i] = Rel::Le;
    }
  }
  size_t slacks = 0;
  for (Rel r : rl)
    if (r != Rel::Eq) ++slacks;
  size_t artificials = 0;
  for (Rel r : rl)
    if (r != Rel::Le) ++artificials;

  size_t cols = nv + slacks + artificials;
  std::vector<std::vector<double>> t(rows, std::vector<double>(cols + 1, 0.0));
  std::vector<uint32_t> basis(rows, 0);
  std::vector<char> artificial_col(cols, 0);
  size_t slack_at = nv;
  size_t art_at = nv + slacks;
  for (size_t i = 0; i < rows; ++i) {
    for (size_t j = 0; j < nv; ++j) t[i][j] = rn[i][j];
    t[i][cols] = rb[i];
    if (rl[i] == Rel::Le) {
      t[i][slack_at] = 1.0;
      basis[i] = static_cast<uint32_t>(slack_at++);
    } else {
      if (rl[i] == Rel::Ge) t[i][slack_at++] = -1.0;
      t[i][art_at] = 1.0;
      artificial_col[art_at] = 1;
      basis[i] = static_cast<uint32_t>(art_at++);
    }
  }

  auto reduced_objective = [&](const std::vector<double>& raw) {
    // obj[j] = raw_j - sum over basic rows of raw_basis * t[i][j]
    std::vector<double> obj(cols + 1, 0.0);
    for (size_t j = 0; j < cols; ++j) obj[j] = j < raw.size() ? raw[j] : 0.0;
    for (size_t i = 0; i < rows; ++i) {
      double cb = basis[i] < raw.size() ? raw[basis[i]] : 0.0;
      if (cb == 0.0) continue;
      for (size_t j = 0; j <= cols; ++j) obj[j] -= cb * t[i][j];
    }
    return obj;
  };

  LpResult out;
  std::vector<char> allowed(cols, 1);
  if (artificials > 0) {
    std::vector<double> phase1(cols, 0.0);
    for (size_t j = 0; j < cols; ++j)
      if (artificial_col[j]) phase1[j] = 1.0;
    std::vector<double> obj = reduced_objective(phase1);
    if (!run_simplex(t, obj, basis, allowed))
      throw Error(Err::Internal, "simplex: phase 1 unbounded");
    double infeas = -obj[cols];  // obj row carries -(current value)
    if (infeas > kFeasTol) {
      out.status = LpStatus::Infeasible;
      return out;
    }
    // Pivot leftover artificials out of the basis where possible.
    for (size_t i = 0; i < rows; ++i) {
      if (!artificial_col[basis[i]]) continue;
      size_t enter = cols;
      for (size_t j = 0; j < cols && enter == cols; ++j)
        if (!artificial_col[j] && std::abs(t[i][j]) > kPivotTol) enter = j;
      if (enter == cols) continue;  // redundant row
      double piv = t[i][enter];
      for (size_t j = 0; j <= cols; ++j) t[i][j] /= piv;
      for (size_t k = 0; k < rows; ++k) {
        if (k == i || std::abs(t[k][enter]) < 1e-14) continue;
        double factor = t[k][enter];
        for (size_t j = 0; j <= cols; ++j) t[k][j] -= factor * t[i][j];
      }
      basis[i] = static_cast<uint32_t>(enter);
    }
    for (size_t j = 0; j < cols; ++j)
      if (artificial_col[j]) allowed[j] = 0;
  }

  std::vector<double> phase2(cols, 0.0);
  for (size_t j = 0; j < nv; ++j) phase2[j] = c[j];
  std::vector<double> obj = reduced_objective(phase2);
  if (!run_simplex(t, obj, basis, allowed)) {
    out.status = LpStatus::Unbounded;
    return out;
  }
  out.status = LpStatus::Optimal;
  out.x.assign(nv, 0.0);
  for (size_t i = 0; i < rows; ++i)
    if (basis[i] < nv) out.x[basis[i]] = t[i][cols];
  out.value = 0;
  for (size_t j = 0; j < nv; ++j) out.value += c[j] * out.x[j];
  return out;
}

CutConeResult c1_lp(const FiniteMetric& m) {
  if (m.n > 12) fail_usage("c1_lp: metric too large (n <= 12)");
  if (m.n < 2) fail_usage("c1_lp: need at least two points");
  m.validate();
  uint32_t n = m.n;
  uint64_t cut_count = (uint64_t(1) << (n - 1)) - 1;

  std::vector<std::pair<uint32_t, uint32_t>> pairs;
  for (uint32_t x = 0; x < n; ++x)
    for (uint32_t y = x + 1; y < n; ++y) pairs.push_back({x, y});

  // delta_S(x, y) per cut: cuts indexed by masks over vertices 1..n-1, so the
  // canonical side never contains vertex 0.
  auto separates = [&](uint64_t mask, uint32_t x, uint32_t y) {
    bool in_x = x > 0 && (mask >> (x - 1)) & 1;
    bool in_y = y > 0 && (mask >> (y - 1)) & 1;
    return in_x != in_y;
  };

  size_t nv = cut_count + 1;  // cut weights then the distortion bound
  std::vector<std::vector<double>> a;
  std::vector<Rel> rel;
  std::vector<double> b;
  for (auto [x, y] : pairs) {
    std::vector<double> lower(nv, 0.0), upper(nv, 0.0);
    for (uint64_t mask = 1; mask <= cut_count; ++mask) {
      if (separates(mask, x, y)) {
        lower[mask - 1] = 1.0;
        upper[mask - 1] = 1.0;
      }
    }
    upper[cut_count] = -m.at(x, y);
    a.push_back(std::move(lower));
    rel.push_back(Rel::Ge);
    b.push_back(m.at(x, y));
    a.push_back(std::move(upper));
    rel.push_back(Rel::Le);
    b.push_back(0.0);
  }
  std::vector<double> c(nv, 0.0);
  c[cut_count] = 1.0;

  LpResult lp = solve_lp(a, rel, b, c);
  if (lp.status != LpStatus::Optimal)
    throw Error(Err::Internal, "c1_lp: solver did not reach an optimum");

  CutConeResult out;
  out.c_star = lp.value;
  out.witness.n = n;
  for (uint64_t mask = 1; mask <= cut_count; ++mask) {
    if (lp.x[mask - 1] <= 1e-12) continue;
    std::vector<uint32_t> side;
    for (uint32_t v = 1; v < n; ++v)
      if ((mask >> (v - 1)) & 1) side.push_back(v);
    out.witness.cuts.push_back({Bits::of(n, side), lp.x[mask - 1]});
  }
  out.witness.canonicalize();
  return out;
}

void FlowInstance::validate() const {
  graph.validate();
  if (cap.size() != graph.edges.size()) fail_usage("flow instance: capacity per edge required");
  for (double c : cap)
    if (c < 0) fail_usage("flow instance: negative capacity");
  double total = 0;
  for (const auto& [pair, d] : demands) {
    auto [u, v] = pair;
    if (u >= graph.n || v >= graph.n || u == v) fail_usage("flow instance: bad demand pair");
    if (d < 0) fail_usage("flow instance: negative demand");
    total += d;
  }
  if (total <= 0) fail_usage("flow instance: needs at least one positive demand");
}

double sparsity(const FlowInstance& inst, const Bits& s) {
  if (s.size() != inst.graph.n) fail_usage("sparsity: dimension mismatch");
  if (s.none() || s.all()) fail_usage("sparsity: cut must be nontrivial");
  double cut_cap = 0;
  for (size_t i = 0; i < inst.graph.edges.size(); ++i) {
    const Edge& e = inst.graph.edges[i];
    if (s.test(e.u) != s.test(e.v)) cut_cap += inst.cap[i];
  }
  double cut_dem = 0;
  for (const auto& [pair, d] : inst.demands)
    if (s.test(pair.first) != s.test(pair.second)) cut_dem += d;
  if (cut_dem <= 0) return std::numeric_limits<double>::infinity();
  return cut_cap / cut_dem;
}

double maxflow_concurrent(const FlowInstance& inst) {
  inst.validate();
  uint32_t n = inst.graph.n;
  if (n > 20) fail_usage("maxflow_concurrent: graph too large (n <= 20)");
  std::vector<std::pair<std::pair<uint32_t, uint32_t>, double>> dems;
  for (const auto& d : inst.demands)
    if (d.second > 0) dems.push_back(d);
  if (dems.size() > 30) fail_usage("maxflow_concurrent: too many demand pairs (<= 30)");
  size_t k = dems.size();
  size_t m = inst.graph.edges.size();

  // Variables: per commodity, a flow on each edge direction; epsilon last.
  // Conservation rows skip each commodity's sink (that row is redundant).
  size_t nv = 2 * m * k + 1;
  size_t eps_var = nv - 1;
  auto var = [&](size_t commodity, size_t edge, bool reversed) {
    return commodity * 2 * m + 2 * edge + (reversed ? 1 : 0);
  };

  std::vector<std::vector<double>> a;
  std::vector<Rel> rel;
  std::vector<double> b;
  for (size_t c = 0; c < k; ++c) {
    auto [s, t] = dems[c].first;
    for (uint32_t v = 0; v < n; ++v) {
      if (v == t) continue;
      std::vector<double> row(nv, 0.0);
      for (size_t e = 0; e < m; ++e) {
        const Edge& ed = inst.graph.edges[e];
        if (ed.u == v) {
          row[var(c, e, false)] += 1.0;  // out along u->v direction
          row[var(c, e, true)] -= 1.0;
        } else if (ed.v == v) {
          row[var(c, e, true)] += 1.0;
          row[var(c, e, false)] -= 1.0;
        }
      }
      if (v == s) row[eps_var] = -dems[c].second;
      a.push_back(std::move(row));
      rel.push_back(Rel::Eq);
      b.push_back(0.0);
    }
  }
  for (size_t e = 0; e < m; ++e) {
    std::vector<double> row(nv, 0.0);
    for (size_t c = 0; c < k; ++c) {
      row[var(c, e, false)] = 1.0;
      row[var(c, e, true)] = 1.0;
    }
    a.push_back(std::move(row));
    rel.push_back(Rel::Le);
    b.push_back(inst.cap[e]);
  }

  std::vector<double> obj(nv, 0.0);
  obj[eps_var] = -1.0;  // maximize epsilon
  LpResult lp = solve_lp(a, rel, b, obj);
  if (lp.status == LpStatus::Unbounded)
    throw Error(Err::Internal, "maxflow_concurrent: unbounded (capacity missing?)");
  if (lp.status != LpStatus::Optimal)
    throw Error(Err::Internal, "maxflow_concurrent: solver did not reach an optimum");
  return lp.x[eps_var];
}

GapResult flow_cut_gap(const FlowInstance& inst) {
  inst.validate();
  uint32_t n = inst.graph.n;
  if (n > 20) fail_usage("flow_cut_gap: graph too large (n <= 20)");
  GapResult out;
  out.eps = maxflow_concurrent(inst);
  out.min_sparsity = std::numeric_limits<double>::infinity();
  out.weak_duality_ok = true;
  uint64_t masks = (uint64_t(1) << (n - 1)) - 1;
  for (uint64_t mask = 1; mask <= masks; ++mask) {
    Bits s(n);
    for (uint32_t v = 1; v < n; ++v)
      if ((mask >> (v - 1)) & 1) s.set(v);
    double sp = sparsity(inst, s);
    if (sp < out.eps - 1e-7) out.weak_duality_ok = false;
    if (sp < out.min_sparsity) {
      out.min_sparsity = sp;
      out.best_cut = s;
    }
  }
  out.gap = out.min_sparsity / out.eps;
  return out;
}

double parity_prob(double p, uint64_t k) {
  if (p < 0 || p > 1) fail_usage("parity_prob: p must lie in [0, 1]");
  if (k < 1) fail_usage("parity_prob: k must be at least 1");
  double base = 1.0 - 2.0 * p;
  double pw = 1.0;
  for (uint64_t i = 0; i < k; ++i) pw *= base;
  return (1.0 - pw) / 2.0;
}

std::string flow_instance_to_json(const FlowInstance& inst) {
  ojson j;
  j["graph"] = ojson::parse(graph_to_json(inst.graph));
  ojson caps = ojson::array();
  for (size_t i = 0; i < inst.graph.edges.size(); ++i)
    caps.push_back({inst.graph.edges[i].u, inst.graph.edges[i].v, inst.cap[i]});
  j["cap"] = caps;
  ojson dems = ojson::array();
  for (const auto& [pair, d] : inst.demands) dems.push_back({pair.first, pair.second, d});
  j["dem"] = dems;
  return j.dump();
}

FlowInstance flow_instance_from_json(const std::string& text) {
  ojson j = ojson::parse(text, nullptr, false);
  if (j.is_discarded()) fail_usage("flow instance: invalid JSON");
  if (!j.contains("graph") || !j.contains("cap") || !j.contains("dem"))
    fail_usage("flow instance: missing graph, cap, or dem");
  FlowInstance inst;
  inst.graph = graph_from_json(j["graph"].dump());
  inst.cap.assign(inst.graph.edges.size(), -1.0);
  for (const auto& row : j["cap"]) {
    if (!row.is_array() || row.size() != 3) fail_usage("flow instance: cap rows are [u,v,c]");
    uint32_t u = row[0].get<uint32_t>(), v = row[1].get<uint32_t>();
    bool found = false;
    for (size_t i = 0; i < inst.graph.edges.size(); ++i) {
      const Edge& e = inst.graph.edges[i];
      if ((e.u == u && e.v == v) || (e.u == v && e.v == u)) {
        if (inst.cap[i] >= 0) fail_usage("flow instance: duplicate capacity entry");
        inst.cap[i] = row[2].get<double>();
        found = true;
        break;
      }
    }
    if (!found) fail_usage("flow instance: capacity on a missing edge");
  }
  for (double c : inst.cap)
    if (c < 0) fail_usage("flow instance: every edge needs a capacity");
  for (const auto& row : j["dem"]) {
    if (!row.is_array() || row.size() != 3) fail_usage("flow instance: dem rows are [u,v,D]");
    inst.demands.push_back(
        {{row[0].get<uint32_t>(), row[1].get<uint32_t>()}, row[2].get<double>()});
  }
  inst.validate();
  return inst;
}

}  // namespace npce
