#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qrmax/growth.hpp"
#include "qrmax/map_expr.hpp"
#include "qrmax/shrink.hpp"

using namespace qrmax;

namespace {
Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

double gluing_winding(const AnnulusGluing& D, double r, int samples = 4096) {
  double total = 0.0, prev = 0.0;
  double lr = std::log(r);
  for (int i = 0; i <= samples; ++i) {
    double th = 2.0 * std::numbers::pi * i / samples;
    double ang = D.eval_log_polar(lr, th).second;
    if (i > 0) {
      double d = ang - prev;
      while (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
      while (d <= -std::numbers::pi) d += 2.0 * std::numbers::pi;
      total += d;
    }
    prev = ang;
  }
  return total / (2.0 * std::numbers::pi);
}
}  // namespace

TEST_CASE("nu: node values, interpolation, extensions, domain") {
  GrowthSchedule gs = GrowthSchedule::from_radii({2.0, 10.0, 60.0}, 0.4);
  CHECK(gs.nu(10.0) == 2.0);  // exact at nodes
  CHECK(gs.nu(2.0) == 1.0);
  CHECK(gs.nu(60.0) == 3.0);
  CHECK(gs.nu(6.0) == doctest::Approx(1.5));  // midpoint of the first segment
  CHECK(gs.nu(0.5) == 1.0);                   // constant left of r_1
  CHECK(gs.nu(110.0) == doctest::Approx(4.0));  // final slope continues
  CHECK_THROWS_AS(gs.nu(0.0), std::domain_error);
  CHECK_THROWS_AS(gs.nu(-3.0), std::domain_error);
}

TEST_CASE("psi: constant-degree closed form and domain") {
  GrowthSchedule c2 = GrowthSchedule::constant_nu(2.0);
  CHECK(std::abs(c2.psi(4.0) - 16.0) <= 1e-10 * 16.0);
  CHECK(c2.psi(1.0) == 1.0);
  CHECK_THROWS_AS(c2.psi(0.5), std::domain_error);
  for (double cval : {1.0, 2.0, 3.0}) {
    GrowthSchedule gs = GrowthSchedule::constant_nu(cval);
    for (double r : {1.0, 1.7, 3.0, 12.0}) {
      double want = cval * std::log(r);
      CHECK(std::abs(gs.log_psi(r) - want) <= 1e-10 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST_CASE("psi: closed form matches adaptive quadrature") {
  GrowthSchedule gs = GrowthSchedule::exp_exp(3, 0.5);
  auto quad_log_psi = [&](double r) {
    // integrate nu(e^u) over u in [0, log r]
    return oracle::adaptive_simpson([&](double u) { return gs.nu(std::exp(u)); }, 0.0,
                                    std::log(r), 1e-12);
  };
  const auto& radii = gs.radii();
  std::vector<double> probes{1.5, radii[0], std::sqrt(radii[0] * radii[1]), radii[1],
                             0.5 * (radii[1] + radii[2])};
  for (double r : probes) {
    double closed = gs.log_psi(r);
    double quad = quad_log_psi(r);
    // relative difference of Psi equals the difference of the logs to first order
    CHECK(std::abs(closed - quad) <= 1e-8);
  }
}

TEST_CASE("psi is strictly increasing with log-convex growth") {
  GrowthSchedule gs = GrowthSchedule::exp_exp(3, 0.5);
  double prev = gs.log_psi(1.0);
  std::vector<double> vals;
  for (double x = 0.1; x <= std::log(gs.radii()[2]); x += 0.1) {
    double v = gs.log_psi(std::exp(x));
    CHECK(v > prev);
    vals.push_back(v);
    prev = v;
  }
  for (std::size_t i = 2; i < vals.size(); ++i)
    CHECK(vals[i] - 2 * vals[i - 1] + vals[i - 2] >= -1e-9);
}

TEST_CASE("exceptional set membership with exact endpoints") {
  GrowthSchedule gs = GrowthSchedule::exp_exp(4, 0.5);
  const auto& radii = gs.radii();
  double r1 = radii[0];
  CHECK(r1 == doctest::Approx(std::exp(std::exp(1.0))));
  CHECK(gs.in_exceptional(10.0));  // 10 lies in (eps*r_1, r_1) = (7.577, 15.154)
  CHECK(!gs.in_exceptional(r1));   // intervals are open
  CHECK(!gs.in_exceptional(0.5 * r1));
  CHECK(!gs.in_exceptional(1.0));
  CHECK(!gs.in_exceptional(0.5 * r1 * (1.0 - 1e-16)));
  CHECK(gs.in_exceptional(std::nextafter(0.5 * r1, 1e300)));
  CHECK(gs.in_exceptional(std::nextafter(r1, 0.0)));
  CHECK(gs.point_in_exceptional_shell(v2(10, 0)));
  CHECK(!gs.point_in_exceptional_shell(v2(1, 0)));
}

TEST_CASE("upper logarithmic density of the exceptional set decreases") {
  GrowthSchedule gs = GrowthSchedule::exp_exp(4, 0.5);
  const auto& radii = gs.radii();
  double d2 = gs.log_density(radii[1]);
  double d3 = gs.log_density(radii[2]);
  double d4 = gs.log_density(radii[3]);
  CHECK(d2 > d3);
  CHECK(d3 > d4);
  CHECK(d4 > 0.0);
}

TEST_CASE("schedule validation") {
  CHECK_THROWS_AS(GrowthSchedule::from_radii({2.0, 3.0}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(GrowthSchedule::from_radii({3.0, 2.0}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(GrowthSchedule::from_radii({}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(GrowthSchedule::from_radii({1.0, 10.0}, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(GrowthSchedule::exp_exp(8, 0.5), std::invalid_argument);  // overflow
  CHECK_NOTHROW(GrowthSchedule::from_radii({2.0, 8.0}, 0.5));
}

TEST_CASE("annulus gluing: continuity across interface circles") {
  GrowthSchedule gs = GrowthSchedule::from_radii({2.0, 10.0, 60.0}, 0.4);
  AnnulusGluing D(gs);
  for (double r : {4.0, 10.0, 24.0, 60.0}) {  // eps*r_2 = 4, r_2 = 10, eps*r_3 = 24, r_3 = 60
    for (double th : {0.0, 0.7, 2.2, 3.14, 5.0}) {
      Vec inside = D.eval((r * (1 - 1e-9)) * v2(std::cos(th), std::sin(th)));
      Vec outside = D.eval((r * (1 + 1e-9)) * v2(std::cos(th), std::sin(th)));
      CHECK((inside - outside).norm() <= 1e-6 * inside.norm());
    }
  }
}

TEST_CASE("annulus gluing: rigid powers on good annuli") {
  GrowthSchedule gs = GrowthSchedule::from_radii({2.0, 10.0, 60.0}, 0.4);
  AnnulusGluing D(gs);
  // degree-1 region is the identity with a_1 = 1
  CHECK((D.eval(v2(2, 0)) - v2(2, 0)).norm() <= 1e-12);
  CHECK((D.eval(v2(0.3, -0.2)) - v2(0.3, -0.2)).norm() <= 1e-12);
  // circle-modulus constancy on good circles, a_k |z|^k law
  struct Probe {
    double r;
    int k;
  };
  for (Probe p : {Probe{3.0, 1}, Probe{10.0, 2}, Probe{20.0, 2}, Probe{60.0, 3}}) {
    CHECK(D.good_degree(p.r) == p.k);
    double lo = 1e300, hi = 0.0;
    for (const auto& z : circle_grid(p.r, 1000)) {
      double m = D.eval(z).norm();
      lo = std::min(lo, m);
      hi = std::max(hi, m);
    }
    CHECK((hi - lo) / hi <= 1e-9);
    double expect = std::exp(D.max_log_modulus(p.r));
    CHECK(hi == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("annulus gluing: blend zeros and degree increments") {
  GrowthSchedule gs = GrowthSchedule::from_radii({2.0, 10.0, 60.0}, 0.4);
  AnnulusGluing D(gs);
  for (int k : {2, 3}) {
    double rz = D.blend_zero_radius(k);
    double blend_lo = 0.4 * gs.radii()[k - 1];
    double blend_hi = gs.radii()[k - 1];
    CHECK(rz > blend_lo);
    CHECK(rz < blend_hi);
    // the zero sits on the negative real axis
    Vec zero = v2(-rz, 0);
    double mz = D.eval(zero).norm();
    double mcircle = std::exp(D.max_log_modulus(rz));
    CHECK(mz <= 1e-8 * mcircle);
    CHECK(D.zero_distance(zero) <= 1e-9);
    // winding jumps by one across the blend
    CHECK(std::lround(gluing_winding(D, blend_lo * 0.99)) == k - 1);
    CHECK(std::lround(gluing_winding(D, blend_hi * 1.01)) == k);
    CHECK(std::abs(gluing_winding(D, blend_hi * 1.01) - k) <= 1e-6);
  }
  CHECK_THROWS_AS(D.blend_zero_radius(1), std::invalid_argument);
  CHECK_THROWS_AS(D.blend_zero_radius(4), std::invalid_argument);
}

TEST_CASE("annulus gluing: maximum modulus is strictly increasing") {
  for (double eps : {0.2, 0.5, 0.8}) {
    GrowthSchedule gs = GrowthSchedule::exp_exp(4, eps);
    AnnulusGluing D(gs);
    double prev = -1e300;
    for (double x = -2.0; x <= std::log(gs.radii()[3]) + 1.0; x += 0.002) {
      double m = D.max_log_modulus(std::exp(x));
      CHECK(m > prev);
      prev = m;
    }
  }
}

TEST_CASE("smooth conjugation by star surfaces") {
  StarSurface cube = StarSurface::sup_norm_cube(2);
  // identity conjugates to the identity
  MapExpr ident = smooth_conjugate(identity_map(2), cube, cube);
  Rng rng(139);
  for (int i = 0; i < 200; ++i) {
    Vec x = random_point(rng, 2, 4.0);
    CHECK((ident(x) - x).norm() <= 1e-12 * std::max(1.0, x.norm()));
  }
  // the sup-norm square map conjugates to a sphere-to-sphere square map
  MapExpr squared = smooth_conjugate(sup_norm_square_map(), cube, cube);
  for (double r : {0.5, 1.0, 2.0}) {
    double lo = 1e300, hi = 0.0;
    for (const auto& x : circle_grid(r, 512)) {
      double m = squared(x).norm();
      lo = std::min(lo, m);
      hi = std::max(hi, m);
    }
    CHECK(std::abs(hi - r * r) <= 1e-9 * r * r);
    CHECK((hi - lo) / hi <= 1e-9);
  }
}

TEST_CASE("transcendental composite: scope guard and max-modulus structure") {
  ZorichMap Z3(3);
  auto ray3 = ClosedSetOracle::radial_ray(Vec::Unit(3, 0));
  H1Map h1_3{ShrinkMap(PullbackSet::analytic(ray3, Z3))};
  GrowthSchedule gs = GrowthSchedule::from_radii({2.0, 10.0, 60.0}, 0.4);
  AnnulusGluing D(gs);
  CHECK_THROWS_AS(transcendental_composite(D, h1_3), ScopeError);
  CHECK_THROWS_AS(transcendental_composite_eval(D, h1_3, Vec::Unit(3, 0)), ScopeError);

  ZorichMap Z(2);
  auto ray = ClosedSetOracle::radial_ray(v2(1, 0));
  ExceptionalBands bands{gs.exceptional_bands_log()};
  H1Map h1{ShrinkMap(PullbackSet::analytic(ray, Z, 9.0, bands))};
  MapExpr h = transcendental_composite(D, h1);
  CHECK(h(Vec::Zero(2)).norm() == 0.0);

  // on a good circle, the target point attains the circle maximum and
  // off-target points sit strictly below, by the h1 modulus-law margin
  for (double r : {3.0, 24.0}) {
    Vec on = v2(r, 0);
    double m_on = h(on).norm();
    CHECK(std::abs(m_on - std::exp(D.max_log_modulus(r))) <= 1e-9 * m_on);
    for (double th : {0.5, 1.5, 3.0}) {
      Vec x = r * v2(std::cos(th), std::sin(th));
      double m_off = h(x).norm();
      CHECK(m_off < m_on);
      // |h(x)| <= M(|h1(x)|, D) with |h1(x)| = r e^{-p/2} < r
      double inner = x.norm() * h1.modulus_factor(x);
      CHECK(m_off <= std::exp(D.max_log_modulus(inner)) * (1 + 1e-9));
    }
  }
}
