#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qrmax/geometry.hpp"
#include "qrmax/map_expr.hpp"

using namespace qrmax;

namespace {
Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}
}  // namespace

TEST_CASE("radial star map on the sup-norm cube") {
  StarSurface cube = StarSurface::sup_norm_cube(2);
  CHECK((radial_star_map(cube, v2(1, 0)) - v2(1, 0)).norm() < 1e-15);
  double s = 1.0 / std::sqrt(2.0);
  CHECK((radial_star_map(cube, v2(s, s)) - v2(1, 1)).norm() < 1e-12);
  CHECK(radial_star_map(cube, Vec::Zero(2)).norm() == 0.0);
  // inverse examples
  CHECK((radial_star_inverse(cube, v2(1, 1)) - v2(s, s)).norm() < 1e-12);
  CHECK(radial_star_inverse(cube, Vec::Zero(2)).norm() == 0.0);
}

TEST_CASE("radial star map round trip and homogeneity") {
  Rng rng(7);
  for (int n : {2, 3}) {
    StarSurface cube = StarSurface::sup_norm_cube(n);
    StarSurface delta = StarSurface::normalized_cube(n);
    for (int i = 0; i < 1000; ++i) {
      Vec x = random_point(rng, n, 5.0);
      for (const StarSurface* s : {&cube, &delta}) {
        Vec y = radial_star_map(*s, x);
        CHECK((radial_star_inverse(*s, y) - x).norm() <= 1e-12 * std::max(1.0, x.norm()));
        double lam = uniform(rng, 0.1, 3.0);
        CHECK((radial_star_map(*s, lam * x) - lam * y).norm() <=
              1e-12 * std::max(1.0, y.norm()));
      }
    }
  }
}

TEST_CASE("conjugating a scaling by a radial map returns the scaling") {
  Rng rng(11);
  StarSurface cube = StarSurface::sup_norm_cube(2);
  MapExpr doubled = smooth_conjugate(scaling_map(2, 2.0), cube, cube);
  for (int i = 0; i < 200; ++i) {
    Vec x = random_point(rng, 2, 4.0);
    CHECK((doubled(x) - 2.0 * x).norm() <= 1e-12 * std::max(1.0, x.norm()));
  }
}

TEST_CASE("sup-norm cube bi-Lipschitz distortion on S(1)") {
  // The radial scale spans [1, sqrt(n)]; the difference-quotient stretch of
  // u -> u/||u||_inf peaks at sec^2 of the corner angle, which is n.
  for (int n : {2, 3}) {
    StarSurface cube = StarSurface::sup_norm_cube(n);
    CHECK(cube.min_radius() == doctest::Approx(1.0));
    CHECK(cube.max_radius() == doctest::Approx(std::sqrt(double(n))));
    Rng rng(13);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int i = 0; i < 20000; ++i) {
      Vec a = random_unit(rng, n);
      Vec b = (a + 1e-4 * random_unit(rng, n)).normalized();
      double num = (radial_star_map(cube, a) - radial_star_map(cube, b)).norm();
      double den = (a - b).norm();
      if (den < 1e-9) continue;
      double q = num / den;
      lo = std::min(lo, q);
      hi = std::max(hi, q);
    }
    double distortion = hi / lo;
    CHECK(distortion >= 1.0);
    CHECK(distortion <= double(n) + 0.05);
  }
}

TEST_CASE("convex polygon star surface agrees with the cube where it should") {
  std::vector<Vec> square{v2(1, 1), v2(-1, 1), v2(-1, -1), v2(1, -1)};
  StarSurface poly = StarSurface::convex_polygon(square);
  StarSurface cube = StarSurface::sup_norm_cube(2);
  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    Vec u = random_unit(rng, 2);
    CHECK(poly.radius(u) == doctest::Approx(cube.radius(u)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(StarSurface::convex_polygon({v2(1, 0), v2(2, 0), v2(3, 1)}),
                  std::invalid_argument);
}

TEST_CASE("spatial index: examples and the linear-scan oracle") {
  std::vector<Vec> pts{v2(0, 0), v2(3, 0)};
  SpatialIndex idx(pts);
  auto [d, witness] = nearest_distance(idx, v2(1, 0));
  CHECK(d == doctest::Approx(1.0));
  CHECK((witness - v2(0, 0)).norm() == 0.0);
  auto [d0, w0] = nearest_distance(idx, v2(3, 0));
  CHECK(d0 == 0.0);
  CHECK((w0 - v2(3, 0)).norm() == 0.0);

  CHECK_THROWS_AS(SpatialIndex(std::vector<Vec>{}), std::invalid_argument);

  Rng rng(17);
  for (int n : {2, 3, 4}) {
    std::vector<Vec> cloud;
    for (int i = 0; i < 10000; ++i) cloud.push_back(random_point(rng, n, 10.0));
    SpatialIndex tree(cloud);
    for (int i = 0; i < 500; ++i) {
      Vec q = random_point(rng, n, 12.0);
      auto hit = tree.nearest(q);
      auto [bd, bi] = oracle::linear_scan_nearest(cloud, q);
      CHECK(hit.distance == bd);  // exact agreement, no approximation
      CHECK((tree.point(hit.index) - cloud[bi]).norm() == 0.0);
    }
  }
}

TEST_CASE("hausdorff distance: examples and the double-loop oracle") {
  std::vector<Vec> a{v2(0, 0)}, b{v2(1, 0)};
  CHECK(hausdorff_distance(a, a) == 0.0);
  CHECK(hausdorff_distance(a, b) == doctest::Approx(1.0));
  CHECK_THROWS_AS(hausdorff_distance({}, b), std::invalid_argument);

  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec> A, B;
    int na = 5 + int(uniform(rng, 0, 60)), nb = 5 + int(uniform(rng, 0, 60));
    for (int i = 0; i < na; ++i) A.push_back(random_point(rng, 2, 5.0));
    for (int i = 0; i < nb; ++i) B.push_back(random_point(rng, 2, 5.0));
    CHECK(hausdorff_distance(A, B) == doctest::Approx(oracle::double_loop_hausdorff(A, B)));
  }
}

TEST_CASE("sphere sampling grids") {
  auto circle = circle_grid(2.0, 64);
  CHECK(circle.size() == 64);
  for (const auto& p : circle) CHECK(p.norm() == doctest::Approx(2.0));
  auto fib = fibonacci_sphere(1.5, 200);
  CHECK(fib.size() == 200);
  for (const auto& p : fib) CHECK(p.norm() == doctest::Approx(1.5));
  CHECK(sphere_grid(2, 0.0, 16).size() == 1);
}
