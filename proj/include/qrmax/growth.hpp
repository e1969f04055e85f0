#pragma once

#include <utility>
#include <vector>

#include "qrmax/common.hpp"

namespace qrmax {

/// The growth data of the slow-growth transcendental construction: a radius
/// sequence (r_k) increasing to infinity, epsilon in (0,1), the piecewise
/// linear degree function nu with nu(r_k) = k (and nu = 1 left of r_1), the
/// growth function Psi(r) = exp(int_1^r nu(t)/t dt), and the exceptional
/// radius set E_eps = union of the open intervals (eps r_k, r_k).
class GrowthSchedule {
 public:
  /// nu(r_k) = k for the given radii; requires eps*r_{k+1} > r_k so the
  /// exceptional intervals are disjoint.
  static GrowthSchedule from_radii(std::vector<double> radii, double epsilon);
  /// The super-exponential default r_k = exp(e^k), k = 1..count.
  static GrowthSchedule exp_exp(int count, double epsilon);
  /// Constant-degree reference schedule (nu == c, empty exceptional set).
  static GrowthSchedule constant_nu(double c, double epsilon = 0.5);

  double epsilon() const { return epsilon_; }
  const std::vector<double>& radii() const { return radii_; }

  /// Piecewise-linear degree function; throws std::domain_error for t <= 0.
  double nu(double t) const;
  /// Psi by closed-form per-segment integration; throws for r < 1.
  double psi(double r) const { return std::exp(log_psi(r)); }
  /// log Psi(r) (overflow-free form).
  double log_psi(double r) const;

  /// r in (eps r_k, r_k) for some k (open intervals, exact at endpoints).
  bool in_exceptional(double r) const;
  /// S_eps membership for a point: |x| in E_eps.
  bool point_in_exceptional_shell(const Vec& x) const { return in_exceptional(x.norm()); }
  /// Logarithmic density of E_eps over [1, R]: |E_eps cap [1,R]|_dlog / log R.
  double log_density(double R) const;
  /// Open intervals (log(eps r_k), log r_k), for clipping lifts.
  std::vector<std::pair<double, double>> exceptional_bands_log() const;

 private:
  GrowthSchedule() = default;
  double epsilon_ = 0.5;
  std::vector<double> radii_;             // empty for constant_nu
  std::vector<double> eps_radii_;         // eps * r_k, computed once
  std::vector<double> nu_ts_, nu_vs_;     // nu nodes
  double nu_left_ = 1.0;
};

/// Planar model of the smoothed slow-growth map: a gluing of rigid power
/// maps a_k z^k on the good annuli [r_k, eps r_{k+1}] with one-degree blends
/// across the exceptional annuli (eps r_k, r_k). Coefficients a_{k+1} =
/// a_k / r_{k+1} make the pieces match continuously; on every circle outside
/// E_eps the modulus is constant and the maximum modulus is strictly
/// increasing. Evaluation is exact in log-polar form (no overflow until the
/// final exponentiation).
class AnnulusGluing {
 public:
  explicit AnnulusGluing(GrowthSchedule schedule);

  const GrowthSchedule& schedule() const { return schedule_; }

  /// Value at z in R^2 (0 at 0). May overflow to inf for astronomically
  /// large |z|; use eval_log_polar where that matters.
  Vec eval(const Vec& z) const;
  /// (log |D(z)|, arg D(z)) for z given as (log|z|, theta).
  std::pair<double, double> eval_log_polar(double log_r, double theta) const;
  /// log of the maximum modulus over the circle of radius r (closed form).
  double max_log_modulus(double r) const;
  /// Power degree on the good annulus containing r (the blend annuli carry
  /// the transition k-1 -> k). r below eps*r_2 reports degree 1.
  int good_degree(double r) const;
  /// True when r lies inside the blend annulus (eps r_k, r_k), k >= 2.
  bool in_blend(double r) const;
  /// The single radius in (eps r_k, r_k) where the blend factor vanishes
  /// (on the negative real axis); the circle-degree increments there. k >= 2.
  double blend_zero_radius(int k) const;
  /// Distance from z to the nearest blend-factor zero (non-smooth loci).
  double zero_distance(const Vec& z) const;

 private:
  struct Region {
    int k;        // degree index
    bool blend;   // blend from degree k-1 to k over (eps r_k, r_k)
  };
  Region region_of_log(double log_r) const;
  // blend profile value/interval in log radius for blend k
  double blend_t(int k, double log_r) const;

  GrowthSchedule schedule_;
  std::vector<double> log_radii_;      // log r_k, 1-based (index 0 unused)
  std::vector<double> log_coeff_;      // log a_k
  double log_eps_ = 0.0;
  std::vector<double> zero_radii_;     // blend zeros, index k
};

}  // namespace qrmax
