// surface.hpp - hyperbolic plane geometry and the circle-net funnel build.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pyramid.hpp"
#include "util.hpp"

namespace npce {

// Polar coordinates about a fixed basepoint: the basepoint itself is rho = 0
// (theta irrelevant there). Curvature is -1 throughout.
struct HPoint {
  double rho = 0;
  double theta = 0;
};

// Hyperbolic distance via the polar law of cosines, evaluated in a form with
// no cancellation so that nearby points keep full precision.
double hdist(const HPoint& a, const HPoint& b);

// The net on one circle Gamma_i of radius index * r. `candidates` holds the
// pre-pruning radial projections of the level above; `angles` the surviving
// r-net, both ascending. from[j] is the position in the layer above whose
// radial line produced angles[j].
struct NetLayer {
  uint32_t index = 0;
  double radius = 0;
  std::vector<double> angles;
  std::vector<double> candidates;
  std::vector<uint32_t> from;
};

struct FunnelBuild {
  double r = 0.125;
  uint32_t delta = 0;  // funnel has layers 0..delta
  Funnel funnel;
  std::vector<NetLayer> nets;      // nets[i] lives on Gamma_i
  std::vector<HPoint> position;    // funnel vertex -> plane position
  std::vector<uint32_t> image;     // input index -> nearest funnel vertex
  std::vector<double> image_dist;  // hdist(input, image)
  double max_edge_len = 0;         // over all funnel edges, hyperbolic length
};

// Builds the layered circle nets around the basepoint and the funnel over
// them, then maps every input point to its nearest graph vertex. Requires
// minimum pairwise input distance 1 (the caller scales beforehand).
FunnelBuild build_funnel(const std::vector<HPoint>& points);

// Smallest margin over all sampled inequalities; >= -tol means the property
// held at tolerance tol.
struct SlackReport {
  double min_slack = 0;
  uint32_t checks = 0;
};

// Discrete midpoint convexity of t -> d(base, gamma(t)) along the x-y
// geodesic, sampled on a uniform grid.
SlackReport check_convexity(const HPoint& base, const HPoint& x, const HPoint& y,
                            uint32_t samples);

// Monotonicity of t -> d(gamma_x(t), gamma_y(t)) for the two geodesics from
// base, both parameterized affinely on [0, 1].
SlackReport check_divergence(const HPoint& base, const HPoint& x, const HPoint& y,
                             uint32_t samples);

// Area-uniform points in the closed disk of the given radius, rejecting any
// candidate closer than min_dist to an accepted point.
std::vector<HPoint> gen_disk_points(double radius, uint32_t count, double min_dist, Rng& rng);

// CSV rows "rho,theta"; an optional header line is tolerated on input.
std::string points_to_csv(const std::vector<HPoint>& pts);
std::vector<HPoint> points_from_csv(const std::string& text);

}  // namespace npce
