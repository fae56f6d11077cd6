// surface.cpp
#include "surface.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace npce {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2 * kPi;

// acosh(1 + t) for t >= 0 without forming the cosh explicitly.
double acosh1p(double t) {
  if (t < 0) t = 0;
  return std::log1p(t + std::sqrt(t * (t + 2)));
}

// Wrapped angular difference in [0, pi].
double angdiff(double a, double b) {
  double x = std::fabs(a - b);
  x = std::fmod(x, kTwoPi);
  if (x > kPi) x = kTwoPi - x;
  return x;
}

// Minimum center angle between points of Gamma with the given radius whose
// chord distance is at least `chord`: sinh(d/2) = sinh(radius) * sin(phi/2).
double min_angle_for_chord(double radius, double chord) {
  double s = std::sinh(chord / 2) / std::sinh(radius);
  if (s >= 1) return kPi;
  return 2 * std::asin(s);
}

// In a triangle with sides adjacent to the apex p and q and opposite side w,
// sin^2(apex/2) = sinh((w+p-q)/2) sinh((w+q-p)/2) / (sinh p sinh q). The
// numerator is returned unscaled so callers can cancel a sinh factor.
double half_angle_numerator(double w, double p, double q) {
  double u = std::sinh((w + p - q) / 2) * std::sinh((w + q - p) / 2);
  return u < 0 ? 0 : u;  // triangle inequality up to rounding
}

// cosh(d) - 1 for the point pair at distances p, q from an apex with the
// given sin^2(half apex angle): the law of cosines with only positive terms.
double law_t(double p, double q, double sin2_half) {
  double sr = std::sinh((p - q) / 2);
  return 2 * sr * sr + 2 * std::sinh(p) * std::sinh(q) * sin2_half;
}

}  // namespace

double hdist(const HPoint& a, const HPoint& b) {
  double sr = std::sinh((a.rho - b.rho) / 2);
  double st = std::sin((a.theta - b.theta) / 2);
  double t = 2 * sr * sr + 2 * std::sinh(a.rho) * std::sinh(b.rho) * st * st;
  return acosh1p(t);
}

FunnelBuild build_funnel(const std::vector<HPoint>& points) {
  if (points.empty()) fail_check("build_funnel: no input points");
  for (const HPoint& p : points) {
    if (!(p.rho >= 0) || !std::isfinite(p.rho) || !std::isfinite(p.theta))
      fail_check("build_funnel: invalid point coordinates");
  }
  for (size_t i = 0; i < points.size(); ++i)
    for (size_t j = i + 1; j < points.size(); ++j) {
      double d = hdist(points[i], points[j]);
      if (d < 1 - 1e-12)
        fail_check("build_funnel: pairwise distance " + std::to_string(d) +
                   " below the required minimum 1; rescale the input");
    }

  FunnelBuild out;
  const double r = out.r;
  double top = 0;
  for (const HPoint& p : points) top = std::max(top, p.rho);
  uint32_t delta = static_cast<uint32_t>(std::ceil(top / r));
  out.delta = delta;

  // Nets, built from the outermost circle inward. The top circle gets an
  // equally spaced maximal r-net; each inner circle takes the radial
  // projections of the level above and prunes them greedily in angle order.
  out.nets.resize(delta + 1);
  if (delta > 0) {
    NetLayer& topnet = out.nets[delta];
    topnet.index = delta;
    topnet.radius = delta * r;
    double phi = min_angle_for_chord(topnet.radius, r);
    uint32_t m = static_cast<uint32_t>(std::floor(kTwoPi / phi));
    for (uint32_t j = 0; j < m; ++j) topnet.angles.push_back(j * (kTwoPi / m));
    topnet.candidates = topnet.angles;
    for (uint32_t j = 0; j < m; ++j) topnet.from.push_back(j);

    for (uint32_t i = delta - 1; i >= 1; --i) {
      NetLayer& net = out.nets[i];
      net.index = i;
      net.radius = i * r;
      net.candidates = out.nets[i + 1].angles;
      double phii = min_angle_for_chord(net.radius, r);
      for (size_t j = 0; j < net.candidates.size(); ++j) {
        double th = net.candidates[j];
        if (!net.angles.empty()) {
          if (angdiff(th, net.angles.back()) < phii) continue;
          if (angdiff(th, net.angles.front()) < phii) continue;
        }
        net.angles.push_back(th);
        net.from.push_back(static_cast<uint32_t>(j));
      }
    }
  }
  NetLayer& base = out.nets[0];
  base.index = 0;
  base.radius = 0;
  base.angles.push_back(0);
  if (delta > 0) {
    base.candidates = out.nets[1].angles;
    base.from.push_back(0);
  } else {
    base.candidates.push_back(0);
    base.from.push_back(0);
  }

  // Funnel vertices: layer by layer, ascending angle within a layer. The
  // parent of an outer point is the inner point on the same radial line when
  // it survived pruning, and otherwise the first inner point encountered
  // moving clockwise (descending angle, wrapping once).
  Funnel& f = out.funnel;
  f.layers.resize(delta + 1);
  uint32_t next_id = 0;
  for (uint32_t i = 0; i <= delta; ++i) {
    for (size_t j = 0; j < out.nets[i].angles.size(); ++j) f.layers[i].push_back(next_id++);
  }
  f.n = next_id;
  f.parent.assign(f.n, -1);
  out.position.resize(f.n);
  for (uint32_t i = 0; i <= delta; ++i)
    for (size_t j = 0; j < out.nets[i].angles.size(); ++j)
      out.position[f.layers[i][j]] = {i * r, out.nets[i].angles[j]};
  for (uint32_t i = 1; i <= delta; ++i) {
    const std::vector<double>& inner = out.nets[i - 1].angles;
    for (size_t j = 0; j < out.nets[i].angles.size(); ++j) {
      double th = out.nets[i].angles[j];
      auto it = std::lower_bound(inner.begin(), inner.end(), th);
      size_t pos;
      if (it != inner.end() && *it == th) {
        pos = static_cast<size_t>(it - inner.begin());
      } else if (it == inner.begin()) {
        pos = inner.size() - 1;  // wrap to the largest angle
      } else {
        pos = static_cast<size_t>(it - inner.begin()) - 1;
      }
      f.parent[f.layers[i][j]] = f.layers[i - 1][pos];
    }
  }
  std::vector<std::string> errs = validate_funnel(f);
  if (!errs.empty()) fail_check("build_funnel: constructed funnel invalid: " + errs.front());

  // Longest edge, horizontal and vertical.
  for (uint32_t i = 0; i <= delta; ++i) {
    const std::vector<uint32_t>& layer = f.layers[i];
    size_t k = layer.size();
    if (k >= 2) {
      size_t limit = k == 2 ? 1 : k;
      for (size_t j = 0; j < limit; ++j) {
        double d = hdist(out.position[layer[j]], out.position[layer[(j + 1) % k]]);
        out.max_edge_len = std::max(out.max_edge_len, d);
      }
    }
  }
  for (uint32_t v = 0; v < f.n; ++v)
    if (f.parent[v] >= 0) {
      double d = hdist(out.position[v], out.position[f.parent[v]]);
      out.max_edge_len = std::max(out.max_edge_len, d);
    }

  // Nearest vertex per input point: scan layers outward from the input's own
  // radius, widening until no unvisited layer can beat the best distance.
  // Within one layer the distance is monotone in angular difference, so only
  // the two angular neighbors matter.
  out.image.resize(points.size());
  out.image_dist.resize(points.size());
  for (size_t pi = 0; pi < points.size(); ++pi) {
    const HPoint& p = points[pi];
    double best = hdist(p, HPoint{0, 0});
    uint32_t best_v = f.layers[0][0];
    int center = static_cast<int>(std::lround(p.rho / r));
    for (int off = 0; off <= static_cast<int>(delta); ++off) {
      bool any = false;
      for (int sign = 0; sign < (off == 0 ? 1 : 2); ++sign) {
        int i = off == 0 ? center : (sign == 0 ? center - off : center + off);
        if (i < 1 || i > static_cast<int>(delta)) continue;
        if (std::fabs(i * r - p.rho) >= best) continue;
        any = true;
        const std::vector<double>& angles = out.nets[i].angles;
        auto it = std::lower_bound(angles.begin(), angles.end(), p.theta);
        size_t k = angles.size();
        size_t hi = it == angles.end() ? 0 : static_cast<size_t>(it - angles.begin());
        size_t lo = (hi + k - 1) % k;
        for (size_t cand : {lo, hi}) {
          double d = hdist(p, out.position[f.layers[i][cand]]);
          uint32_t v = f.layers[i][cand];
          if (d < best - 1e-15 || (std::fabs(d - best) <= 1e-15 && v < best_v)) {
            best = d;
            best_v = v;
          }
        }
      }
      if (off > 0 && !any && (center - off < 1) && (center + off > static_cast<int>(delta)))
        break;
      if (off > 0 && !any && std::min(std::fabs((center - off) * r - p.rho),
                                      std::fabs((center + off) * r - p.rho)) >= best)
        break;
    }
    out.image[pi] = best_v;
    out.image_dist[pi] = best;
  }
  return out;
}

SlackReport check_convexity(const HPoint& base, const HPoint& x, const HPoint& y,
                            uint32_t samples) {
  if (samples < 3) fail_check("check_convexity: need at least 3 samples");
  double c = hdist(x, y);
  if (c == 0) fail_check("check_convexity: x and y coincide");
  // f(s) = d(base, gamma(s)) from the triangle (base, x, gamma(s)): the angle
  // at x is fixed, so only the side along the geodesic varies.
  double b = hdist(base, x), a = hdist(base, y);
  double w = 2 * half_angle_numerator(a, b, c) / std::sinh(c);  // 2 sinh(b) sin^2(angle/2)
  std::vector<double> vals(samples);
  for (uint32_t j = 0; j < samples; ++j) {
    double s = c * j / (samples - 1);
    double sr = std::sinh((b - s) / 2);
    vals[j] = acosh1p(2 * sr * sr + w * std::sinh(s));
  }
  SlackReport rep;
  rep.min_slack = 1e300;
  for (uint32_t j = 1; j + 1 < samples; ++j) {
    double slack = vals[j - 1] + vals[j + 1] - 2 * vals[j];
    rep.min_slack = std::min(rep.min_slack, slack);
    ++rep.checks;
  }
  return rep;
}

SlackReport check_divergence(const HPoint& base, const HPoint& x, const HPoint& y,
                             uint32_t samples) {
  if (samples < 2) fail_check("check_divergence: need at least 2 samples");
  double p = hdist(base, x), q = hdist(base, y);
  if (p == 0 || q == 0) fail_check("check_divergence: endpoint coincides with the base");
  double w = hdist(x, y);
  double sin2_half = half_angle_numerator(w, p, q) / (std::sinh(p) * std::sinh(q));
  if (sin2_half > 1) sin2_half = 1;
  SlackReport rep;
  rep.min_slack = 1e300;
  double prev = 0;
  for (uint32_t j = 1; j <= samples; ++j) {
    double t = static_cast<double>(j) / samples;
    double cur = acosh1p(law_t(t * p, t * q, sin2_half));
    rep.min_slack = std::min(rep.min_slack, cur - prev);
    ++rep.checks;
    prev = cur;
  }
  return rep;
}

std::vector<HPoint> gen_disk_points(double radius, uint32_t count, double min_dist, Rng& rng) {
  if (!(radius > 0) || count == 0) fail_usage("gen_disk_points: need positive radius and count");
  std::vector<HPoint> pts;
  uint64_t attempts = 0;
  uint64_t limit = 20000ull * count + 20000;
  double area = std::cosh(radius) - 1;
  while (pts.size() < count) {
    if (++attempts > limit)
      fail_budget("gen_disk_points: rejection budget exhausted; disk too crowded for " +
                  std::to_string(count) + " points at separation " + std::to_string(min_dist));
    HPoint p;
    p.rho = acosh1p(rng.next_unit() * area);
    p.theta = rng.next_unit() * kTwoPi;
    bool ok = true;
    for (const HPoint& q : pts)
      if (hdist(p, q) < min_dist) {
        ok = false;
        break;
      }
    if (ok) pts.push_back(p);
  }
  return pts;
}

std::string points_to_csv(const std::vector<HPoint>& pts) {
  std::string out = "rho,theta\n";
  char buf[80];
  for (const HPoint& p : pts) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.rho, p.theta);
    out += buf;
  }
  return out;
}

std::vector<HPoint> points_from_csv(const std::string& text) {
  std::vector<HPoint> pts;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++lineno;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    bool header_candidate = first_content;
    first_content = false;
    if (header_candidate && line.find_first_of("0123456789") == std::string::npos) continue;
    size_t comma = line.find(',');
    if (comma == std::string::npos)
      fail_usage("points_from_csv: line " + std::to_string(lineno) + " has no comma");
    std::string left = line.substr(0, comma), right = line.substr(comma + 1);
    try {
      size_t ul = 0, ur = 0;
      HPoint p;
      p.rho = std::stod(left, &ul);
      p.theta = std::stod(right, &ur);
      while (ul < left.size() && left[ul] == ' ') ++ul;
      while (ur < right.size() && right[ur] == ' ') ++ur;
      if (ul != left.size() || ur != right.size()) throw std::invalid_argument("trailing");
      pts.push_back(p);
    } catch (const std::exception&) {
      fail_usage("points_from_csv: line " + std::to_string(lineno) + " is not a number pair");
    }
  }
  if (pts.empty()) fail_usage("points_from_csv: no data rows");
  return pts;
}

}  // namespace npce
