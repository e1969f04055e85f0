// Brute-force reference implementations used only by tests. These stay
// independent of the library code paths they check.
#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include "qrmax/common.hpp"

namespace qrmax::oracle {

// exact nearest neighbour by linear scan
inline std::pair<double, std::size_t> linear_scan_nearest(const std::vector<Vec>& pts,
                                                          const Vec& q) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t idx = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double d = (pts[i] - q).norm();
    if (d < best) {
      best = d;
      idx = i;
    }
  }
  return {best, idx};
}

// O(|A||B|) symmetric Hausdorff distance
inline double double_loop_hausdorff(const std::vector<Vec>& a, const std::vector<Vec>& b) {
  double h = 0;
  for (const auto& p : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : b) best = std::min(best, (p - q).norm());
    h = std::max(h, best);
  }
  for (const auto& q : b) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : a) best = std::min(best, (p - q).norm());
    h = std::max(h, best);
  }
  return h;
}

// distance to the log-spiral via a dense polyline (plus the origin)
inline double dense_spiral_distance(double omega, double phase, const Vec& y, int per_turn = 4096) {
  double rho = y.norm();
  if (rho == 0) return 0;
  double best = rho;  // origin
  double lo = std::log(rho) - (2.0 * std::numbers::pi / std::abs(omega) + 2.5);
  double hi = std::log(rho) + 1.0;
  double du = 2.0 * std::numbers::pi / (std::abs(omega) * per_turn);
  Vec prev(2), cur(2);
  bool have_prev = false;
  for (double u = lo; u <= hi; u += du) {
    double e = std::exp(u);
    cur << e * std::sin(omega * u + phase), e * std::cos(omega * u + phase);
    if (have_prev) {
      Vec d = cur - prev;
      double t = std::clamp((y - prev).dot(d) / d.squaredNorm(), 0.0, 1.0);
      best = std::min(best, (prev + t * d - y).norm());
    }
    prev = cur;
    have_prev = true;
  }
  return best;
}

// closed-form planar Zorich map (the n = 2 realisation is a rotated complex
// exponential with period 4 in the first coordinate)
inline Vec planar_zorich(const Vec& x) {
  Vec out(2);
  out << std::exp(x[1]) * std::sin(std::numbers::pi * x[0] / 2.0),
      std::exp(x[1]) * std::cos(std::numbers::pi * x[0] / 2.0);
  return out;
}

// adaptive Simpson quadrature
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol, int depth = 48) {
  auto simpson = [&](double lo, double hi) {
    return (hi - lo) / 6.0 * (f(lo) + 4.0 * f(0.5 * (lo + hi)) + f(hi));
  };
  std::function<double(double, double, double, int)> rec = [&](double lo, double hi, double whole,
                                                               int d) -> double {
    double mid = 0.5 * (lo + hi);
    double left = simpson(lo, mid), right = simpson(mid, hi);
    if (d <= 0 || std::abs(left + right - whole) < 15.0 * tol) return left + right;
    return rec(lo, mid, left, d - 1) + rec(mid, hi, right, d - 1);
  };
  return rec(a, b, simpson(a, b), depth);
}

}  // namespace qrmax::oracle
