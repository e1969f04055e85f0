#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qrmax/zorich.hpp"

using namespace qrmax;

namespace {
constexpr double kPi = std::numbers::pi;

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}
Vec v3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}
}  // namespace

TEST_CASE("planar evaluation matches the closed form and the pinned points") {
  ZorichMap Z(2);
  CHECK((Z.eval(v2(0, 0)) - v2(0, 1)).norm() < 1e-15);
  CHECK((Z.eval(v2(1, std::log(2.0))) - v2(2, 0)).norm() < 1e-14);
  double s = std::sin(kPi / 4);
  CHECK((Z.eval(v2(2.5, 0)) - v2(-s, -s)).norm() < 1e-14);

  Rng rng(5);
  for (int i = 0; i < 5000; ++i) {
    Vec x = v2(uniform(rng, -40, 40), uniform(rng, -3, 3));
    Vec got = Z.eval(x);
    Vec want = oracle::planar_zorich(x);
    CHECK((got - want).norm() <= 1e-12 * want.norm());
  }
}

TEST_CASE("|Z(x)| = e^{x_n} exactly") {
  Rng rng(29);
  for (int n : {2, 3, 4}) {
    ZorichMap Z(n);
    for (int i = 0; i < 2000; ++i) {
      Vec x = random_point(rng, n, 8.0);
      x[n - 1] = uniform(rng, -3, 3);
      double want = std::exp(x[n - 1]);
      CHECK(std::abs(Z.eval(x).norm() - want) <= 1e-12 * want);
    }
  }
}

TEST_CASE("fold: identity on the base cell, pinned values, refold invariant") {
  ZorichMap Z2(2);
  FoldResult id = Z2.fold(Vec::Constant(1, 0.5));
  CHECK(id.cell[0] == doctest::Approx(0.5));
  CHECK(id.parity == 0);

  ZorichMap Z3(3);
  // mirrors pass through the even integers for n >= 3 (base cell [0, 2]^2)
  FoldResult a = Z3.fold(v2(2.5, 0.2));
  CHECK(a.cell[0] == doctest::Approx(1.5));
  CHECK(a.cell[1] == doctest::Approx(0.2));
  CHECK(a.parity == 1);
  CHECK(a.reflected[0]);
  CHECK(!a.reflected[1]);

  FoldResult b = Z3.fold(v2(5, -3));
  CHECK(b.cell[0] == doctest::Approx(1.0));
  CHECK(b.cell[1] == doctest::Approx(1.0));
  CHECK(b.parity == 0);

  Rng rng(31);
  for (int n : {2, 3, 4}) {
    ZorichMap Z(n);
    for (int i = 0; i < 1000; ++i) {
      Vec xp = random_point(rng, n - 1, 20.0);
      FoldResult f = Z.fold(xp);
      for (int k = 0; k < n - 1; ++k) {
        CHECK(f.cell[k] >= Z.cell_lo() - 1e-12);
        CHECK(f.cell[k] <= Z.cell_hi() + 1e-12);
      }
      FoldResult g = Z.fold(f.cell);
      CHECK((g.cell - f.cell).norm() <= 1e-12);
      CHECK(g.parity == 0);
      // the recorded group word reconstructs the input
      for (int k = 0; k < n - 1; ++k) {
        double rep = f.reflected[k] ? 2.0 * (Z.cell_center() + 1.0) - f.cell[k] : f.cell[k];
        CHECK(rep + 4.0 * f.translations[k] == doctest::Approx(xp[k]).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("group invariance on generators") {
  Rng rng(37);
  for (int n : {2, 3, 4}) {
    ZorichMap Z(n);
    auto gens = Z.group_generators();
    CHECK(gens.size() == (n == 2 ? 2u : 2u * (n - 1) + (n - 1) * (n - 2) / 2));
    for (int i = 0; i < 500; ++i) {
      Vec x = random_point(rng, n, 6.0);
      Vec zx = Z.eval(x);
      for (const auto& g : gens) {
        Vec zgx = Z.eval(g(x));
        CHECK((zgx - zx).norm() <= 1e-12 * zx.norm());
      }
    }
  }
}

TEST_CASE("canonical inverse: pinned points, errors, round trips") {
  ZorichMap Z2(2);
  CHECK((Z2.invert(v2(0, std::exp(1.0))) - v2(0, 1)).norm() < 1e-14);
  CHECK((Z2.invert(v2(2, 0)) - v2(1, std::log(2.0))).norm() < 1e-14);
  CHECK_THROWS_AS(Z2.invert(Vec::Zero(2)), std::domain_error);

  Rng rng(41);
  for (int n : {2, 3}) {
    ZorichMap Z(n);
    for (int i = 0; i < 10000; ++i) {
      Vec y = random_point(rng, n, 4.0);
      if (y.norm() < 1e-3) continue;
      Vec x = Z.invert(y);
      CHECK((Z.eval(x) - y).norm() <= 1e-10 * y.norm());
    }
    // south pole direction resolves through the reflected cell
    Vec south = Vec::Zero(n);
    south[n - 1] = -2.0;
    Vec x = Z.invert(south);
    CHECK((Z.eval(x) - south).norm() <= 1e-12 * south.norm());
  }
}

TEST_CASE("fiber law: equal values iff equal height and fold data") {
  Rng rng(43);
  for (int n : {2, 3}) {
    ZorichMap Z(n);
    for (int i = 0; i < 400; ++i) {
      Vec x = random_point(rng, n, 6.0);
      FoldResult fx = Z.fold(x.head(n - 1));
      // points in the fiber share values
      for (const auto& s : Z.fiber_near(x.head(n - 1), x.head(n - 1), 9.0)) {
        Vec y(n);
        y.head(n - 1) = s;
        y[n - 1] = x[n - 1];
        CHECK((Z.eval(y) - Z.eval(x)).norm() <= 1e-12 * Z.eval(x).norm());
      }
      // equal values force equal fold data (skip near the equator, where the
      // parity bit is not observable)
      Vec y = random_point(rng, n, 6.0);
      y[n - 1] = x[n - 1];
      Vec zx = Z.eval(x), zy = Z.eval(y);
      if ((zx - zy).norm() <= 1e-12 * zx.norm() && std::abs(zx[n - 1]) > 1e-6 * zx.norm()) {
        FoldResult fy = Z.fold(y.head(n - 1));
        CHECK((fx.cell - fy.cell).norm() <= 1e-9);
        CHECK(fx.parity == fy.parity);
      }
    }
  }
}

TEST_CASE("vertical lines map into radial rays") {
  Rng rng(47);
  for (int n : {2, 3}) {
    ZorichMap Z(n);
    for (int i = 0; i < 200; ++i) {
      Vec xp = random_point(rng, n - 1, 6.0);
      Vec x(n);
      x.head(n - 1) = xp;
      x[n - 1] = 0.0;
      Vec dir0 = Z.eval(x).normalized();
      for (double t : {-2.0, -0.5, 1.0, 2.5}) {
        x[n - 1] = t;
        CHECK((Z.eval(x).normalized() - dir0).norm() <= 1e-12);
      }
    }
  }
}

TEST_CASE("branch set probing by preimage counting (n = 3)") {
  ZorichMap Z(3);
  // interior point: only one preimage nearby
  Vec interior = v2(1.0, 1.0);
  CHECK(Z.fiber_near(interior, interior, 0.5).size() == 1);
  // near an edge (two coordinates close to mirrors) a second sheet appears
  Vec near_edge = v2(0.01, 0.01);
  CHECK(Z.fiber_near(near_edge, near_edge, 0.5).size() == 2);
  CHECK(Z.branch_distance(near_edge) == doctest::Approx(std::hypot(0.01, 0.01)));
  CHECK(Z.branch_distance(interior) == doctest::Approx(std::sqrt(2.0)));
  CHECK(std::isinf(ZorichMap(2).branch_distance(Vec::Constant(1, 0.3))));
}

TEST_CASE("path lifting: constant, radial, and full-circle paths") {
  ZorichMap Z(2);
  // constant path
  std::vector<Vec> constant{v2(0, 1), v2(0, 1), v2(0, 1)};
  auto lift_const = lift_path(Z, constant, v2(0, 0));
  for (const auto& p : lift_const) CHECK((p - v2(0, 0)).norm() <= 1e-12);

  // radial path (0,1) -> (0,e): vertical lift
  std::vector<Vec> radial;
  for (int i = 0; i <= 16; ++i) {
    double t = double(i) / 16;
    radial.push_back(v2(0, (1 - t) + t * std::exp(1.0)));
  }
  auto lift_rad = lift_path(Z, radial, v2(0, 0));
  CHECK((lift_rad.back() - v2(0, 1)).norm() <= 1e-10);
  for (const auto& p : lift_rad) CHECK(std::abs(p[0]) <= 1e-10);

  // full counterclockwise unit circle from (0,1): ends one lattice period over
  std::vector<Vec> circle;
  for (int i = 0; i <= 64; ++i) {
    double phi = kPi / 2 + 2.0 * kPi * i / 64;
    circle.push_back(v2(std::cos(phi), std::sin(phi)));
  }
  auto lift_ccw = lift_path(Z, circle, v2(0, 0));
  CHECK(lift_ccw.back()[0] == doctest::Approx(-4.0).epsilon(1e-9));
  CHECK(std::abs(lift_ccw.back()[1]) <= 1e-10);

  std::vector<Vec> circle_cw(circle.rbegin(), circle.rend());
  auto lift_cw = lift_path(Z, circle_cw, v2(0, 0));
  CHECK(lift_cw.back()[0] == doctest::Approx(4.0).epsilon(1e-9));

  // a coarse polyline resolves via internal refinement
  std::vector<Vec> coarse;
  for (int i = 0; i <= 4; ++i) {
    double phi = kPi / 2 + 2.0 * kPi * i / 4;
    coarse.push_back(v2(std::cos(phi), std::sin(phi)));
  }
  auto lift_coarse = lift_path(Z, coarse, v2(0, 0));
  CHECK(lift_coarse.back()[0] == doctest::Approx(-4.0).epsilon(1e-9));

  // errors: wrong start, path through zero
  CHECK_THROWS_AS(lift_path(Z, circle, v2(1, 0)), std::invalid_argument);
  std::vector<Vec> through_zero{v2(0, 1), v2(0, -1)};
  CHECK_THROWS_AS(lift_path(Z, through_zero, v2(0, 0)), std::domain_error);
}

TEST_CASE("path lifting refuses the branch-set image away from the endpoint (n = 3)") {
  ZorichMap Z(3);
  Vec edge_image = Z.eval(v3(0, 0, 0));  // an edge of the beam maps here
  Vec start_img = Z.eval(v3(1, 1, 0));
  std::vector<Vec> path{start_img, edge_image, start_img};
  CHECK_THROWS_AS(lift_path(Z, path, v3(1, 1, 0)), std::domain_error);
}

TEST_CASE("power maps: Schroeder identity, sphere law, zero") {
  Rng rng(53);
  for (int n : {2, 3}) {
    for (int d : {2, 3}) {
      ZorichMap Z(n);
      PowerMap P(Z, d);
      CHECK(P.eval(Vec::Zero(n)).norm() == 0.0);
      double worst_s = 0, worst_m = 0;
      for (int i = 0; i < 2000; ++i) {
        Vec x = random_point(rng, n, 8.0);
        x[n - 1] = uniform(rng, -3, 3);
        Vec zx = Z.eval(x);
        Vec lhs = P.eval(zx);
        Vec rhs = Z.eval(double(d) * x);
        worst_s = std::max(worst_s, (lhs - rhs).norm() / rhs.norm());
        double want = std::pow(zx.norm(), d);
        worst_m = std::max(worst_m, std::abs(P.eval(zx).norm() - want) / want);
      }
      CAPTURE(n);
      CAPTURE(d);
      CHECK(worst_s <= 1e-9);
      CHECK(worst_m <= 1e-9);
    }
  }
}

TEST_CASE("power map branch independence across explicit group images") {
  Rng rng(59);
  ZorichMap Z(3);
  PowerMap P(Z, 2);
  auto gens = Z.group_generators();
  for (int i = 0; i < 300; ++i) {
    Vec y = random_point(rng, 3, 6.0);
    Vec base = P.eval(Z.eval(y));
    for (const auto& g : gens) {
      Vec other = P.eval(Z.eval(g(y)));
      CHECK((other - base).norm() <= 1e-10 * std::max(1.0, base.norm()));
    }
  }
}

TEST_CASE("power preimages: counts and forward verification") {
  Rng rng(61);
  struct Case {
    int n, d;
  };
  for (Case c : {Case{2, 2}, Case{2, 3}, Case{3, 2}}) {
    ZorichMap Z(c.n);
    PowerMap P(Z, c.d);
    long expect = P.expected_preimage_count();
    for (int i = 0; i < 50; ++i) {
      Vec y = random_point(rng, c.n, 3.0);
      if (y.norm() < 1e-2) continue;
      auto pre = P.preimages(y);
      CHECK(!pre.degenerate);
      CHECK(long(pre.points.size()) == expect);
      for (const auto& x : pre.points)
        CHECK((P.eval(x) - y).norm() <= 1e-9 * std::max(1.0, y.norm()));
    }
  }
  ZorichMap Z(2);
  PowerMap P(Z, 2);
  auto zero = P.preimages(Vec::Zero(2));
  CHECK(zero.degenerate);
  CHECK(zero.points.size() == 1);
  CHECK(zero.points[0].norm() == 0.0);
}
