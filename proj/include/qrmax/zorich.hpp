#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "qrmax/common.hpp"

namespace qrmax {

/// Result of folding a point of R^{n-1} into the fundamental cell.
/// `cell` is the in-cell representative, `parity` the reflection count mod 2,
/// and the translation counts / reflection flags describe the group word that
/// was applied, coordinate by coordinate.
struct FoldResult {
  Vec cell;
  int parity = 0;
  std::vector<int> translations;
  std::vector<bool> reflected;
};

/// The Zorich map Z : R^n -> R^n \ {0}, a quasiregular analogue of the
/// exponential. |Z(x)| = e^{x_n} and Z maps each hyperplane x_n = t onto the
/// sphere S(e^t). Z is strongly automorphic with respect to the group G
/// generated by the translations 4Z^{n-1} and, for n >= 3, rotations by pi
/// about the origin in coordinate pairs of R^{n-1}.
///
/// Construction: each of the first n-1 coordinates is folded into the base
/// cell by the period-4 tent rule with mirror hyperplanes on
///   {odd integers}   for n = 2 (base cell [-1,1]; no reflections lie in G),
///   {even integers}  for n >= 3 (base cell [0,2]; mirrors pass through the
///                    origin so that x -> d*x maps mirrors to mirrors, which
///                    is what makes the power-map Schroeder equation solvable
///                    for every integer degree d).
/// On the cell the hemisphere map is geodesic-polar with sup-norm radial
/// coordinate: with xi the cell point relative to the cell centre,
/// rho = ||xi||_inf, u = xi/|xi|_2,
///   h(xi) = (u sin(pi rho / 2), cos(pi rho / 2)),
/// and an odd total reflection parity flips the last coordinate.
class ZorichMap {
 public:
  explicit ZorichMap(int n);

  int dimension() const { return n_; }
  /// Centre of the base cell per coordinate (0 for n = 2, 1 for n >= 3).
  double cell_center() const { return z0_; }
  double cell_lo() const { return z0_ - 1.0; }
  double cell_hi() const { return z0_ + 1.0; }

  /// Fold x' (in R^{n-1}) into the base cell. Refolding a folded point is the
  /// identity with parity 0.
  FoldResult fold(const Vec& x_prime) const;

  /// Z(x) = e^{x_n} h(fold(x')).
  Vec eval(const Vec& x) const;

  /// Canonical preimage of y != 0: the base-cell branch for w_n >= 0, the
  /// single-reflection neighbour cell otherwise. eval(invert(y)) == y.
  Vec invert(const Vec& y) const;

  /// Unit image point for given in-cell coordinates and parity.
  Vec hemisphere_point(const Vec& cell, int parity) const;

  /// All fiber representatives of Z over Z(base) whose horizontal coordinates
  /// lie within `radius` of `center` coordinate-wise. For n = 2 the fiber is
  /// the 4Z translation orbit; for n >= 3 it also contains the even-reflection
  /// copies.
  std::vector<Vec> fiber_near(const Vec& base_prime, const Vec& center_prime, double radius) const;

  /// The fiber point (in R^{n-1}) closest to `anchor` in Euclidean norm;
  /// exact via separable assignment with a parity constraint. Optionally
  /// reports the squared-distance margin to the best alternative assignment.
  Vec nearest_fiber_point(const Vec& base_prime, const Vec& anchor_prime,
                          double* margin_sq = nullptr) const;

  /// Fold a full point of R^n to the canonical representative of its G-orbit
  /// (used to make sampled pullback queries exactly G-invariant).
  Vec g_fold(const Vec& x) const;
  /// Horizontal bounding box (lo, hi) of the g_fold image per coordinate.
  std::pair<Vec, Vec> g_domain() const;

  /// Distance from x' to the branch-set projection (the cell edges where two
  /// coordinates sit on mirror hyperplanes). +inf for n = 2.
  double branch_distance(const Vec& x_prime) const;

  /// Group generators as callables on R^n (translations by +-4 e_i; for
  /// n >= 3 also the coordinate-pair rotations about the origin).
  std::vector<std::function<Vec(const Vec&)>> group_generators() const;

 private:
  int n_;
  double z0_;
};

struct LiftOptions {
  double max_step = 0.5;    // accepted lift-space step per segment piece
  int max_depth = 48;       // segment halving budget
  double start_tol = 1e-8;  // relative tolerance for eval(start) == path front
};

/// Lift a polyline in R^n \ {0} through Z starting from a given preimage of
/// its first vertex. Returns the lifted polyline (same vertex count).
/// Throws LiftRefinementError when a step cannot be disambiguated within the
/// refinement budget, and std::domain_error if the path meets the branch-set
/// image away from its endpoint or passes through 0.
std::vector<Vec> lift_path(const ZorichMap& Z, const std::vector<Vec>& path, const Vec& start_lift,
                           const LiftOptions& options = {});

/// The quasiregular power map P of degree d^{n-1}: the solution of the
/// Schroeder equation P(Z(x)) = Z(d x). |P(x)| = |x|^d and P(0) = 0.
class PowerMap {
 public:
  PowerMap(ZorichMap zorich, int degree);

  const ZorichMap& zorich() const { return zorich_; }
  int degree() const { return degree_; }
  int dimension() const { return zorich_.dimension(); }
  /// d^{n-1}
  long expected_preimage_count() const;

  Vec eval(const Vec& x) const;

  struct Preimages {
    std::vector<Vec> points;
    bool degenerate = false;  // y == 0: only x == 0
  };
  /// Full preimage set {x : P(x) = y}; cardinality d^{n-1} for generic y.
  Preimages preimages(const Vec& y) const;

 private:
  ZorichMap zorich_;
  int degree_;
};

}  // namespace qrmax
