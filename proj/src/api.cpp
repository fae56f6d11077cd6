#include "api.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <thread>

#include "embed.hpp"
#include "json.hpp"
#include "reduce.hpp"

namespace npce {

using ojson = nlohmann::ordered_json;

namespace {

ojson parse_json(const std::string& text, const char* what) {
  ojson j = ojson::parse(text, nullptr, false);
  if (j.is_discarded()) fail_usage(std::string(what) + ": malformed JSON");
  return j;
}

ojson parse_config(const std::string& text) {
  if (text.empty()) return ojson::object();
  ojson j = parse_json(text, "config");
  if (!j.is_object()) fail_usage("config: expected a JSON object");
  return j;
}

uint64_t get_u64(const ojson& cfg, const char* key, uint64_t fallback) {
  if (!cfg.contains(key)) return fallback;
  const ojson& v = cfg.at(key);
  if (!v.is_number_unsigned()) fail_usage(std::string("config: ") + key + " must be a nonnegative integer");
  return v.get<uint64_t>();
}

uint64_t require_u64(const ojson& cfg, const char* key) {
  if (!cfg.contains(key)) fail_usage(std::string("config: missing required field ") + key);
  return get_u64(cfg, key, 0);
}

double get_double(const ojson& cfg, const char* key, double fallback) {
  if (!cfg.contains(key)) return fallback;
  const ojson& v = cfg.at(key);
  if (!v.is_number()) fail_usage(std::string("config: ") + key + " must be a number");
  return v.get<double>();
}

bool get_bool(const ojson& cfg, const char* key, bool fallback) {
  if (!cfg.contains(key)) return fallback;
  const ojson& v = cfg.at(key);
  if (!v.is_boolean()) fail_usage(std::string("config: ") + key + " must be a boolean");
  return v.get<bool>();
}

std::string get_string(const ojson& cfg, const char* key, const std::string& fallback) {
  if (!cfg.contains(key)) return fallback;
  const ojson& v = cfg.at(key);
  if (!v.is_string()) fail_usage(std::string("config: ") + key + " must be a string");
  return v.get<std::string>();
}

std::string hash_hex(const std::string& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(config)));
  return std::string(buf);
}

uint32_t resolve_threads(const ojson& cfg) {
  uint64_t t = get_u64(cfg, "threads", 0);
  if (t == 0) {
    unsigned hw = std::thread::hardware_concurrency();
    t = hw == 0 ? 1 : hw;
  }
  if (t > 256) fail_usage("config: threads out of range");
  return static_cast<uint32_t>(t);
}

ojson report_json(const EmbeddingReport& r) {
  ojson j;
  j["expansion"] = r.expansion;
  j["contraction"] = r.contraction;
  j["distortion"] = r.distortion;
  j["infinite"] = r.infinite;
  ojson ws = ojson::array();
  for (const WorstPair& p : r.worst) {
    ojson w;
    w["x"] = p.x;
    w["y"] = p.y;
    w["ratio"] = p.ratio;
    ws.push_back(std::move(w));
  }
  j["worst_pairs"] = std::move(ws);
  return j;
}

// Per-pair tables balloon quadratically; past this many vertices the report
// keeps only the summary and says so.
constexpr uint32_t kMaxPairTableN = 256;

ojson pair_rows_pyramid(const PyramidEmbedding& pe) {
  ojson rows = ojson::array();
  for (const PairEstimate& p : pe.est.pairs) {
    ojson row;
    row["x"] = p.x;
    row["y"] = p.y;
    row["d_graph"] = pe.graph_metric.at(p.x, p.y);
    row["d_embed"] = pe.embedded[p.x][p.y];
    row["f_hat"] = p.f;
    row["f0"] = p.f0;
    row["g_hat"] = p.g;
    row["stderr"] = p.se;
    rows.push_back(std::move(row));
  }
  return rows;
}

// Same-ray pairs must satisfy f = d/delta_prime up to Monte Carlo noise; in
// exact mode the match is bitwise.
ojson vertical_check(const Pyramid& p, const PyramidEmbedding& pe, double sigmas) {
  Skeleton sk = skeleton(p);
  uint32_t checked = 0;
  uint32_t failed = 0;
  double worst = 0;
  for (const PairEstimate& pr : pe.est.pairs) {
    if (!sk.same_ray(pr.x, pr.y)) continue;
    ++checked;
    double dev = std::fabs(pr.f - pr.f0);
    double allowed = std::max(sigmas * pr.se, 1e-12);
    if (pr.se > 0) worst = std::max(worst, std::fabs(pr.f - pr.f0) / pr.se);
    if (dev > allowed) ++failed;
  }
  ojson j;
  j["pairs"] = checked;
  j["failed"] = failed;
  j["max_sigmas"] = worst;
  j["pass"] = failed == 0;
  return j;
}

ojson summary_pyramid(const Pyramid& p) {
  ojson s;
  s["n"] = p.n;
  s["depth"] = p.depth();
  s["bottom_width"] = p.layers.back().size();
  return s;
}

// Hyperbolic-vs-funnel-graph distortion of the point correspondence. All
// pairs when the set is small, otherwise a seeded sample.
ojson surface_quality(const FunnelBuild& fb, const std::vector<HPoint>& pts,
                      uint64_t seed) {
  FiniteMetric fm = apsp(funnel_to_graph(fb.funnel));
  uint32_t n = static_cast<uint32_t>(pts.size());
  double max_ratio = 0, min_ratio = 1e300;
  uint64_t pair_count = 0;
  auto feed = [&](uint32_t i, uint32_t j) {
    if (fb.image[i] == fb.image[j]) return;
    double dh = hdist(pts[i], pts[j]);
    double df = fm.at(fb.image[i], fb.image[j]);
    double ratio = df / dh;
    max_ratio = std::max(max_ratio, ratio);
    min_ratio = std::min(min_ratio, ratio);
    ++pair_count;
  };
  if (static_cast<uint64_t>(n) * n <= 1u << 20) {
    for (uint32_t i = 0; i < n; ++i)
      for (uint32_t j = i + 1; j < n; ++j) feed(i, j);
  } else {
    Rng rng(splitmix64(seed ^ 0x5f4a7c15u));
    for (uint32_t k = 0; k < 20000; ++k) {
      uint32_t i = static_cast<uint32_t>(rng.next_below(n));
      uint32_t j = static_cast<uint32_t>(rng.next_below(n));
      if (i != j) feed(i, j);
    }
  }
  ojson q;
  q["pairs"] = pair_count;
  if (pair_count > 0) {
    q["max_hops_per_unit"] = max_ratio;
    q["min_hops_per_unit"] = min_ratio;
    q["distortion_constant"] = max_ratio / min_ratio;
  }
  double worst_image = 0;
  for (double d : fb.image_dist) worst_image = std::max(worst_image, d);
  q["max_image_dist"] = worst_image;
  q["max_edge_len"] = fb.max_edge_len;
  return q;
}

struct Check {
  std::string name;
  bool pass;
  ojson detail;
};

ojson finish_checks(ojson& out, std::vector<Check>& checks) {
  bool all = true;
  ojson arr = ojson::array();
  for (Check& c : checks) {
    ojson j;
    j["name"] = c.name;
    j["pass"] = c.pass;
    if (!c.detail.is_null()) j["detail"] = c.detail;
    arr.push_back(std::move(j));
    all = all && c.pass;
  }
  out["checks"] = std::move(arr);
  out["pass"] = all;
  return out;
}

bool looks_like_json(const std::string& text) {
  size_t i = text.find_first_not_of(" \t\r\n");
  return i != std::string::npos && text[i] == '{';
}

// Packing: consecutive net vertices on each circle sit at least r apart.
double min_net_spacing(const FunnelBuild& fb) {
  double worst = 1e300;
  for (const NetLayer& layer : fb.nets) {
    size_t m = layer.angles.size();
    if (m < 2) continue;
    for (size_t i = 0; i < m; ++i) {
      HPoint a{layer.radius, layer.angles[i]};
      HPoint b{layer.radius, layer.angles[(i + 1) % m]};
      if (m == 2 && i == 1) break;
      worst = std::min(worst, hdist(a, b));
    }
  }
  return worst;
}

// Covering: random points on each net circle are near some net vertex of
// that circle. Returns the worst distance found.
double covering_radius_sampled(const FunnelBuild& fb, uint64_t samples, uint64_t seed) {
  Rng rng(splitmix64(seed ^ 0xc07e41c6ULL));
  double worst = 0;
  for (const NetLayer& layer : fb.nets) {
    if (layer.angles.empty()) continue;
    uint64_t per = std::max<uint64_t>(1, samples / fb.nets.size());
    for (uint64_t k = 0; k < per; ++k) {
      double theta = rng.next_unit() * 2 * M_PI;
      HPoint q{layer.radius, theta};
      auto it = std::lower_bound(layer.angles.begin(), layer.angles.end(), theta);
      double best = 1e300;
      size_t m = layer.angles.size();
      size_t hi = it == layer.angles.end() ? 0 : static_cast<size_t>(it - layer.angles.begin());
      size_t lo = (hi + m - 1) % m;
      best = std::min(best, hdist(q, HPoint{layer.radius, layer.angles[hi]}));
      best = std::min(best, hdist(q, HPoint{layer.radius, layer.angles[lo]}));
      worst = std::max(worst, best);
    }
  }
  return worst;
}

}  // namespace

uint64_t enumeration_budget() {
  const char* env = std::getenv("NPCEMBED_BUDGET");
  if (env == nullptr || *env == '\0') return 4000000;
  char* end = nullptr;
  unsigned long long v = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0' || v == 0)
    fail_usage("NPCEMBED_BUDGET must be a positive integer");
  return static_cast<uint64_t>(v);
}

Instance parse_instance(const std::string& kind, const std::string& text) {
  std::string k = kind;
  if (k == "auto") {
    if (looks_like_json(text)) {
      ojson j = parse_json(text, "instance");
      if (j.contains("layers"))
        k = j.value("cyclic", false) ? "funnel" : "pyramid";
      else if (j.contains("dem"))
        k = "flow";
      else if (j.contains("edges"))
        k = "graph";
      else if (j.contains("d"))
        k = "metric";
      else
        fail_usage("instance: cannot detect kind from JSON fields");
    } else {
      k = "points";
    }
  }
  Instance inst;
  inst.kind = k;
  if (k == "pyramid") {
    inst.pyramid = pyramid_from_json(text);
    auto errs = validate_pyramid(inst.pyramid);
    if (!errs.empty()) fail_check("pyramid: " + errs.front());
  } else if (k == "funnel") {
    inst.funnel = funnel_from_json(text);
    auto errs = validate_funnel(inst.funnel);
    if (!errs.empty()) fail_check("funnel: " + errs.front());
  } else if (k == "points") {
    inst.points = points_from_csv(text);
  } else if (k == "graph") {
    inst.graph = graph_from_json(text);
    inst.graph.validate();
  } else if (k == "metric") {
    inst.metric = metric_from_json(text);
  } else if (k == "flow") {
    inst.flow = flow_instance_from_json(text);
    inst.flow.validate();
  } else {
    fail_usage("instance: unknown kind " + k);
  }
  return inst;
}

std::string run_gen(const std::string& config_json) {
  ojson cfg = parse_config(config_json);
  std::string kind = get_string(cfg, "kind", "");
  if (kind.empty()) fail_usage("gen: missing kind");

  ojson out;
  out["command"] = "gen";
  out["kind"] = kind;
  bool randomized = false;
  uint64_t seed = get_u64(cfg, "seed", 0);

  if (kind == "pyramid") {
    uint64_t delta = require_u64(cfg, "delta");
    if (delta == 0) fail_usage("gen: delta must be at least 1");
    uint64_t width = get_u64(cfg, "width", 0);
    bool grid = get_bool(cfg, "grid", false);
    Pyramid p;
    if (width > 0) {
      if (grid) fail_usage("gen: grid and width are mutually exclusive");
      if (!cfg.contains("seed")) fail_usage("gen: random pyramid requires a seed");
      randomized = true;
      Rng rng(seed);
      p = gen_random_pyramid(static_cast<uint32_t>(delta), static_cast<uint32_t>(width), rng);
    } else {
      p = gen_grid_pyramid(static_cast<uint32_t>(delta));
    }
    out["summary"] = summary_pyramid(p);
    out["instance"] = ojson::parse(pyramid_to_json(p));
  } else if (kind == "funnel") {
    uint64_t delta = require_u64(cfg, "delta");
    uint64_t width = get_u64(cfg, "width", 4);
    if (delta == 0) fail_usage("gen: delta must be at least 1");
    if (!cfg.contains("seed")) fail_usage("gen: random funnel requires a seed");
    randomized = true;
    Rng rng(seed);
    Funnel f = gen_random_funnel(static_cast<uint32_t>(delta), static_cast<uint32_t>(width), rng);
    ojson s;
    s["n"] = f.n;
    s["depth"] = f.depth();
    s["bottom_width"] = f.layers.back().size();
    out["summary"] = s;
    out["instance"] = ojson::parse(funnel_to_json(f));
  } else if (kind == "hyperbolic-points") {
    double radius = get_double(cfg, "radius", 0);
    uint64_t count = require_u64(cfg, "count");
    double min_dist = get_double(cfg, "min_dist", 1.0);
    if (!(radius > 0)) fail_usage("gen: radius must be positive");
    if (count == 0) fail_usage("gen: count must be at least 1");
    if (!cfg.contains("seed")) fail_usage("gen: random points require a seed");
    randomized = true;
    Rng rng(seed);
    std::vector<HPoint> pts =
        gen_disk_points(radius, static_cast<uint32_t>(count), min_dist, rng);
    ojson s;
    s["count"] = pts.size();
    s["radius"] = radius;
    s["min_dist"] = min_dist;
    out["summary"] = s;
    out["format"] = "csv";
    out["instance"] = points_to_csv(pts);
  } else {
    fail_usage("gen: unknown kind " + kind);
  }

  if (randomized) out["seed"] = seed;
  out["config_hash"] = hash_hex(config_json);
  return out.dump(2);
}

std::string run_embed(const Instance& inst, const std::string& config_json) {
  ojson cfg = parse_config(config_json);
  if (!cfg.contains("seed")) fail_usage("embed: missing required field seed");
  uint64_t seed = require_u64(cfg, "seed");
  uint32_t threads = resolve_threads(cfg);

  ojson out;
  out["command"] = "embed";
  out["kind"] = inst.kind;
  out["seed"] = seed;
  out["config_hash"] = hash_hex(config_json);

  if (inst.kind == "pyramid") {
    uint64_t samples = get_u64(cfg, "samples", 100000);
    PyramidEmbedding pe = embed_pyramid(inst.pyramid, samples, seed, threads);
    out["samples"] = pe.samples;
    out["n"] = inst.pyramid.n;
    out["delta"] = inst.pyramid.depth();
    out["delta_prime"] = 3 * inst.pyramid.depth();
    out["distortion"] = report_json(pe.report);
    out["vertical_check"] = vertical_check(inst.pyramid, pe, 4.0);
    out["measure"] = ojson::parse(cut_measure_to_json(pe.measure));
    if (inst.pyramid.n <= kMaxPairTableN)
      out["pairs"] = pair_rows_pyramid(pe);
    else
      out["pairs_omitted"] = true;
    return out.dump(2);
  }

  if (inst.kind == "funnel" || inst.kind == "points") {
    const Funnel* f = &inst.funnel;
    FunnelBuild fb;
    if (inst.kind == "points") {
      fb = build_funnel(inst.points);
      f = &fb.funnel;
      if (f->n > 1500)
        fail_budget("embed: funnel over the point set has " + std::to_string(f->n) +
                    " vertices; reduce the disk radius or point count");
      out["surface"] = surface_quality(fb, inst.points, seed);
    }
    uint64_t peel_samples = get_u64(cfg, "peel_samples", 100);
    uint64_t mc_samples = get_u64(cfg, "samples", 10000);
    FunnelEmbedding fe = embed_funnel(*f, static_cast<uint32_t>(peel_samples), mc_samples,
                                      seed, threads);
    out["peel_samples"] = fe.peel_samples;
    out["samples"] = fe.mc_samples;
    out["n"] = f->n;
    out["depth"] = f->depth();
    out["distortion"] = report_json(fe.report);
    out["min_pair_ratio"] = fe.min_pair_ratio;
    out["max_mean_inflation"] = fe.max_mean_inflation;
    out["measure"] = ojson::parse(cut_measure_to_json(fe.measure));
    if (f->n <= kMaxPairTableN) {
      FiniteMetric fm = apsp(funnel_to_graph(*f));
      ojson rows = ojson::array();
      for (uint32_t x = 0; x < f->n; ++x)
        for (uint32_t y = x + 1; y < f->n; ++y) {
          ojson row;
          row["x"] = x;
          row["y"] = y;
          row["d_graph"] = fm.at(x, y);
          row["d_embed"] = cut_measure_distance(fe.measure, x, y);
          rows.push_back(std::move(row));
        }
      out["pairs"] = std::move(rows);
    } else {
      out["pairs_omitted"] = true;
    }
    return out.dump(2);
  }

  fail_usage("embed: instance kind " + inst.kind + " cannot be embedded");
}

std::string run_verify(const Instance& inst, const std::string& config_json) {
  ojson cfg = parse_config(config_json);
  std::string level = get_string(cfg, "level", "quick");
  if (level != "quick" && level != "exact") fail_usage("verify: level must be quick or exact");
  uint32_t threads = resolve_threads(cfg);

  ojson out;
  out["command"] = "verify";
  out["kind"] = inst.kind;
  out["level"] = level;
  std::vector<Check> checks;

  if (level == "exact") {
    if (inst.kind == "pyramid") {
      if (inst.pyramid.depth() > 4)
        fail_usage("verify: exact level requires pyramid depth <= 4");
      ExtendedPyramid e = extend(inst.pyramid);
      ExactChain chain = exact_chain(e, enumeration_budget());
      Rat expected(1, e.delta_prime);
      bool uniform = true;
      uint64_t checked = 0;
      for (uint32_t level_i = 0; level_i < e.steps; ++level_i) {
        std::vector<Rat> probs = exact_boundary_probs(e, chain, level_i);
        for (uint32_t v = 0; v < inst.pyramid.n; ++v) {
          uint32_t u = e.inject[v];
          if (e.skel.depth[u] >= e.delta_prime) continue;
          ++checked;
          if (!(probs[u] == expected)) uniform = false;
        }
      }
      ojson d1;
      d1["pairs"] = checked;
      d1["expected"] = expected.str();
      checks.push_back({"uniform_boundary_exact", uniform, d1});

      Skeleton sk = skeleton(inst.pyramid);
      bool vertical = true;
      uint64_t vpairs = 0;
      for (uint32_t x = 0; x < inst.pyramid.n; ++x)
        for (uint32_t y = x + 1; y < inst.pyramid.n; ++y) {
          if (!sk.same_ray(x, y)) continue;
          ++vpairs;
          uint32_t d = sk.depth[x] > sk.depth[y] ? sk.depth[x] - sk.depth[y]
                                                 : sk.depth[y] - sk.depth[x];
          Rat sep = exact_separation(chain, e.inject[x], e.inject[y]);
          if (!(sep == Rat(d, e.delta_prime))) vertical = false;
        }
      ojson d2;
      d2["pairs"] = vpairs;
      checks.push_back({"vertical_pairs_exact", vertical, d2});
      out["config_hash"] = hash_hex(config_json);
      return finish_checks(out, checks).dump(2);
    }
    if (inst.kind == "metric") {
      if (inst.metric.n > 12) fail_usage("verify: exact level requires metric n <= 12");
      CutConeResult r = c1_lp(inst.metric);
      std::vector<std::vector<double>> target(inst.metric.n,
                                              std::vector<double>(inst.metric.n, 0));
      for (uint32_t x = 0; x < inst.metric.n; ++x)
        for (uint32_t y = x + 1; y < inst.metric.n; ++y)
          target[x][y] = target[y][x] = cut_measure_distance(r.witness, x, y);
      EmbeddingReport rep = distortion(inst.metric, target);
      ojson d;
      d["c_star"] = r.c_star;
      d["witness_distortion"] = rep.distortion;
      bool ok = !rep.infinite && std::fabs(rep.distortion - r.c_star) <= 1e-6;
      checks.push_back({"witness_reproduces_cstar", ok, d});
      out["config_hash"] = hash_hex(config_json);
      return finish_checks(out, checks).dump(2);
    }
    fail_usage("verify: exact level requires a pyramid (depth <= 4) or a metric (n <= 12)");
  }

  // quick level: Monte Carlo at 4 standard errors plus structural checks
  if (inst.kind == "pyramid" || inst.kind == "funnel" || inst.kind == "points") {
    if (!cfg.contains("seed")) fail_usage("verify: quick level requires a seed");
  }
  double tol = get_double(cfg, "tolerance", 1e-9);
  uint64_t seed = get_u64(cfg, "seed", 0);
  if (cfg.contains("seed")) out["seed"] = seed;

  if (inst.kind == "pyramid") {
    uint64_t samples = get_u64(cfg, "samples", 20000);
    PyramidEmbedding pe = embed_pyramid(inst.pyramid, samples, seed, threads);
    ojson vc = vertical_check(inst.pyramid, pe, 4.0);
    bool vpass = vc["pass"].get<bool>();
    checks.push_back({"vertical_pairs_4sigma", vpass, vc});
    bool valid_measure = true;
    try {
      pe.measure.validate();
    } catch (const Error&) {
      valid_measure = false;
    }
    checks.push_back({"measure_canonical", valid_measure, ojson()});
    ojson d = report_json(pe.report);
    checks.push_back({"report_recorded", true, d});
  } else if (inst.kind == "funnel") {
    uint64_t peel_samples = get_u64(cfg, "peel_samples", 20);
    uint64_t mc_samples = get_u64(cfg, "samples", 5000);
    FunnelEmbedding fe = embed_funnel(inst.funnel, static_cast<uint32_t>(peel_samples),
                                      mc_samples, seed, threads);
    ojson d = report_json(fe.report);
    checks.push_back({"distortion_finite", !fe.report.infinite, d});
    ojson d2;
    d2["min_pair_ratio"] = fe.min_pair_ratio;
    checks.push_back({"glued_non_contraction", fe.min_pair_ratio >= 1 - tol, d2});
  } else if (inst.kind == "points") {
    FunnelBuild fb = build_funnel(inst.points);
    double spacing = min_net_spacing(fb);
    ojson d1;
    d1["min_net_spacing"] = spacing;
    d1["r"] = fb.r;
    checks.push_back({"net_packing", spacing >= fb.r * (1 - tol), d1});
    uint64_t samples = get_u64(cfg, "samples", 1000);
    double cover = covering_radius_sampled(fb, samples, seed);
    ojson d2;
    d2["worst_sampled_covering"] = cover;
    checks.push_back({"net_covering_sampled", cover < 2 * fb.r, d2});
    double worst_image = 0;
    for (double dd : fb.image_dist) worst_image = std::max(worst_image, dd);
    ojson d3;
    d3["max_image_dist"] = worst_image;
    checks.push_back({"image_distance", worst_image < 2 * fb.r, d3});
  } else if (inst.kind == "graph") {
    FiniteMetric fm = apsp(inst.graph);
    bool connected = true;
    for (uint32_t x = 0; x < fm.n && connected; ++x)
      for (uint32_t y = 0; y < fm.n; ++y)
        if (!std::isfinite(fm.at(x, y))) {
          connected = false;
          break;
        }
    checks.push_back({"connected", connected, ojson()});
  } else if (inst.kind == "metric") {
    const FiniteMetric& m = inst.metric;
    bool tri = true;
    for (uint32_t x = 0; x < m.n && tri; ++x)
      for (uint32_t y = 0; y < m.n && tri; ++y)
        for (uint32_t z = 0; z < m.n; ++z)
          if (m.at(x, y) > m.at(x, z) + m.at(z, y) + 1e-12) {
            tri = false;
            break;
          }
    checks.push_back({"triangle_inequality", tri, ojson()});
  } else if (inst.kind == "flow") {
    GapResult g = flow_cut_gap(inst.flow);
    ojson d;
    d["eps"] = g.eps;
    d["min_sparsity"] = g.min_sparsity;
    d["gap"] = g.gap;
    checks.push_back({"weak_duality", g.weak_duality_ok, d});
  } else {
    fail_usage("verify: unknown instance kind " + inst.kind);
  }

  out["config_hash"] = hash_hex(config_json);
  return finish_checks(out, checks).dump(2);
}

std::string run_oracle_c1(const std::string& metric_json) {
  FiniteMetric m = metric_from_json(metric_json);
  CutConeResult r = c1_lp(m);
  std::vector<std::vector<double>> target(m.n, std::vector<double>(m.n, 0));
  for (uint32_t x = 0; x < m.n; ++x)
    for (uint32_t y = x + 1; y < m.n; ++y)
      target[x][y] = target[y][x] = cut_measure_distance(r.witness, x, y);
  EmbeddingReport rep = distortion(m, target);
  ojson out;
  out["command"] = "oracle";
  out["n"] = m.n;
  out["c_star"] = r.c_star;
  out["witness_distortion"] = rep.distortion;
  out["witness_matches"] = !rep.infinite && std::fabs(rep.distortion - r.c_star) <= 1e-6;
  out["witness"] = ojson::parse(cut_measure_to_json(r.witness));
  return out.dump(2);
}

std::string run_flow_gap(const std::string& flow_json) {
  FlowInstance inst = flow_instance_from_json(flow_json);
  inst.validate();
  GapResult g = flow_cut_gap(inst);
  ojson out;
  out["command"] = "flow-gap";
  out["n"] = inst.graph.n;
  out["eps"] = g.eps;
  out["min_sparsity"] = g.min_sparsity;
  out["gap"] = g.gap;
  out["weak_duality_ok"] = g.weak_duality_ok;
  ojson side = ojson::array();
  for (uint32_t v = 0; v < g.best_cut.size(); ++v)
    if (g.best_cut.test(v)) side.push_back(v);
  out["best_cut"] = std::move(side);
  return out.dump(2);
}

std::string run_partition_beta(const std::string& graph_json, const std::string& config_json) {
  Graph g = graph_from_json(graph_json);
  g.validate();
  ojson cfg = parse_config(config_json);
  if (!cfg.contains("seed")) fail_usage("partition-beta: missing required field seed");
  uint64_t seed = require_u64(cfg, "seed");
  uint32_t threads = resolve_threads(cfg);
  uint64_t partitions = get_u64(cfg, "partitions", 100);
  double scale = get_double(cfg, "scale", 0);
  if (!(scale > 0)) {
    FiniteMetric fm = apsp(g);
    double diam = 0;
    for (uint32_t x = 0; x < fm.n; ++x)
      for (uint32_t y = x + 1; y < fm.n; ++y) diam = std::max(diam, fm.at(x, y));
    if (!(diam > 0)) fail_usage("partition-beta: graph has no positive distances");
    scale = diam / 2;
  }
  BetaEstimate be = estimate_beta(g, scale, static_cast<uint32_t>(partitions), seed, threads);
  ojson out;
  out["command"] = "partition-beta";
  out["seed"] = seed;
  out["config_hash"] = hash_hex(config_json);
  out["n"] = g.n;
  out["scale"] = be.scale;
  out["partitions"] = be.partitions;
  out["beta"] = be.beta;
  out["max_diam"] = be.max_diam;
  out["diameter_bound_ok"] = be.max_diam <= be.scale + 1e-9;
  return out.dump(2);
}

bool report_passed(const std::string& report_json) {
  ojson j = ojson::parse(report_json, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return false;
  if (j.contains("pass")) return j["pass"].is_boolean() && j["pass"].get<bool>();
  if (j.contains("vertical_check")) {
    const ojson& vc = j["vertical_check"];
    if (vc.contains("pass") && vc["pass"].is_boolean() && !vc["pass"].get<bool>()) return false;
  }
  if (j.contains("witness_matches"))
    return j["witness_matches"].is_boolean() && j["witness_matches"].get<bool>();
  if (j.contains("weak_duality_ok"))
    return j["weak_duality_ok"].is_boolean() && j["weak_duality_ok"].get<bool>();
  if (j.contains("diameter_bound_ok"))
    return j["diameter_bound_ok"].is_boolean() && j["diameter_bound_ok"].get<bool>();
  return true;
}

}  // namespace npce
