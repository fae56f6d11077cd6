#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "pyramid.hpp"
#include "surface.hpp"
#include "util.hpp"

using namespace npce;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("hdist basics") {
  CHECK(hdist({0, 0}, {2.5, 1.3}) == 2.5);
  CHECK(hdist({1, 0.7}, {1, 0.7}) == 0.0);
  // Radial pairs and diametral pairs run through the basepoint.
  CHECK(hdist({1, 0}, {3, 0}) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(hdist({1, 0}, {1, kPi}) == doctest::Approx(2.0).epsilon(1e-14));

  HPoint a{2, 0.4}, b{1.5, 2.2};
  CHECK(hdist(a, b) == hdist(b, a));

  // Angles wrap modulo 2 pi.
  CHECK(hdist({1, 0.1}, {1, 2 * kPi + 1.1}) ==
        doctest::Approx(hdist({1, 0.1}, {1, 1.1})).epsilon(1e-14));
}

TEST_CASE("hdist triangle inequality on random triples") {
  Rng rng(99);
  for (int rep = 0; rep < 500; ++rep) {
    HPoint a{5 * rng.next_unit(), 2 * kPi * rng.next_unit()};
    HPoint b{5 * rng.next_unit(), 2 * kPi * rng.next_unit()};
    HPoint c{5 * rng.next_unit(), 2 * kPi * rng.next_unit()};
    CHECK(hdist(a, c) <= hdist(a, b) + hdist(b, c) + 1e-12);
  }
}

TEST_CASE("hdist grows with angle at fixed radius") {
  double prev = 0;
  for (int k = 1; k <= 16; ++k) {
    double d = hdist({2, 0}, {2, k * kPi / 16});
    CHECK(d > prev);
    prev = d;
  }
}

TEST_CASE("build_funnel on a single point") {
  FunnelBuild fb = build_funnel({{1.0, 0.3}});
  CHECK(fb.r == 0.125);
  CHECK(fb.delta == 8);
  CHECK(fb.funnel.layers.size() == 9);
  CHECK(fb.funnel.layers[0].size() == 1);
  CHECK(validate_funnel(fb.funnel).empty());
  REQUIRE(fb.image.size() == 1);
  CHECK(fb.image_dist[0] <= 2 * fb.r);
  CHECK(fb.max_edge_len > 0);

  // Net layers live on concentric circles with radius index * r.
  REQUIRE(fb.nets.size() == 9);
  for (const NetLayer& layer : fb.nets) {
    CHECK(layer.radius == doctest::Approx(layer.index * fb.r));
    CHECK_FALSE(layer.angles.empty());
  }
}

TEST_CASE("build_funnel nets pack and cover") {
  Rng rng(2024);
  std::vector<HPoint> pts = gen_disk_points(4.0, 12, 1.0, rng);
  FunnelBuild fb = build_funnel(pts);
  CHECK(validate_funnel(fb.funnel).empty());

  // Packing: consecutive net points on one circle stay r apart.
  for (const NetLayer& layer : fb.nets) {
    size_t k = layer.angles.size();
    if (k < 2) continue;
    for (size_t j = 0; j < k; ++j) {
      double a = layer.angles[j];
      double b = layer.angles[(j + 1) % k];
      CHECK(hdist({layer.radius, a}, {layer.radius, b}) >= fb.r - 1e-9);
    }
  }

  // Covering: every input lands close to its funnel image.
  for (size_t i = 0; i < pts.size(); ++i) {
    CHECK(fb.image[i] < fb.funnel.n);
    CHECK(fb.image_dist[i] < 2 * fb.r);
    CHECK(fb.image_dist[i] == doctest::Approx(hdist(pts[i], fb.position[fb.image[i]])));
  }

  // Funnel vertices carry their net position.
  uint32_t total = 0;
  for (const NetLayer& layer : fb.nets) total += layer.angles.size();
  CHECK(fb.funnel.n == total);
}

TEST_CASE("build_funnel rejects crowded input") {
  try {
    build_funnel({{1.0, 0.0}, {1.0, 0.001}});
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == Err::Check);
  }
}

TEST_CASE("convexity and divergence hold where they should") {
  SUBCASE("base on the segment gives a convex kink") {
    SlackReport s = check_convexity({1, 0}, {2, 0}, {2, kPi}, 101);
    CHECK(s.checks > 0);
    CHECK(s.min_slack >= -1e-9);
  }
  SUBCASE("generic triples, sampled") {
    Rng rng(99);
    for (int rep = 0; rep < 50; ++rep) {
      HPoint base{4 * rng.next_unit(), 2 * kPi * rng.next_unit()};
      HPoint x{4 * rng.next_unit() + 0.01, 2 * kPi * rng.next_unit()};
      HPoint y{4 * rng.next_unit() + 0.01, 2 * kPi * rng.next_unit()};
      if (hdist(x, y) < 1e-6 || hdist(base, x) < 1e-6 || hdist(base, y) < 1e-6) continue;
      CHECK(check_convexity(base, x, y, 64).min_slack >= -1e-9);
      CHECK(check_divergence(base, x, y, 64).min_slack >= -1e-9);
    }
  }
  SUBCASE("rays from the origin diverge monotonically") {
    SlackReport s = check_divergence({0, 0}, {3, 0.2}, {3, 2.0}, 50);
    CHECK(s.min_slack >= -1e-12);
  }
  SUBCASE("degenerate inputs are rejected") {
    CHECK_THROWS_AS(check_convexity({1, 0}, {2, 1}, {2, 1}, 10), Error);
    CHECK_THROWS_AS(check_divergence({1, 0}, {1, 0}, {2, 1}, 10), Error);
    CHECK_THROWS_AS(check_convexity({1, 0}, {2, 0}, {3, 0}, 2), Error);
  }
}

TEST_CASE("gen_disk_points respects count, radius, and spacing") {
  Rng rng(31);
  std::vector<HPoint> pts = gen_disk_points(6.0, 25, 1.0, rng);
  REQUIRE(pts.size() == 25);
  for (const HPoint& p : pts) CHECK(p.rho <= 6.0);
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j) CHECK(hdist(pts[i], pts[j]) >= 1.0);

  Rng rng2(31);
  std::vector<HPoint> again = gen_disk_points(6.0, 25, 1.0, rng2);
  CHECK(again.size() == pts.size());
  CHECK(again[24].rho == pts[24].rho);

  Rng rng3(1);
  CHECK_THROWS_AS(gen_disk_points(1.0, 100, 1.0, rng3), Error);
  try {
    Rng rng4(1);
    gen_disk_points(1.0, 100, 1.0, rng4);
  } catch (const Error& e) {
    CHECK(e.kind() == Err::Budget);
  }
  Rng rng5(1);
  CHECK_THROWS_AS(gen_disk_points(0.0, 5, 1.0, rng5), Error);
}

TEST_CASE("points round-trip through csv") {
  Rng rng(8);
  std::vector<HPoint> pts = gen_disk_points(3.0, 7, 1.0, rng);
  std::vector<HPoint> back = points_from_csv(points_to_csv(pts));
  REQUIRE(back.size() == pts.size());
  for (size_t i = 0; i < pts.size(); ++i) {
    CHECK(back[i].rho == pts[i].rho);
    CHECK(back[i].theta == pts[i].theta);
  }

  // A header line is tolerated; junk is not.
  std::vector<HPoint> one = points_from_csv("rho,theta\n1.5,0.25\n");
  REQUIRE(one.size() == 1);
  CHECK(one[0].rho == 1.5);

  for (const char* bad : {"", "1.5\n", "a,b\nc,d\n", "1,2,3\n"}) {
    try {
      points_from_csv(bad);
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.kind() == Err::Usage);
    }
  }
}
