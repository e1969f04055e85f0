#pragma once

#include <functional>
#include <optional>
#include <string>

#include "qrmax/common.hpp"
#include "qrmax/geometry.hpp"
#include "qrmax/growth.hpp"
#include "qrmax/shrink.hpp"
#include "qrmax/zorich.hpp"

namespace qrmax {

/// A composable map of R^n with evaluation and metadata. Non-smooth loci
/// (branch-set images, pullback medial axes, blend-annulus zeros) are exposed
/// through a distance estimate so probes can steer clear of them.
struct MapExpr {
  enum class Type { Polynomial, Transcendental, Block };

  int dimension = 2;
  Type type = Type::Block;
  std::string name;
  std::optional<long> degree;             // claimed degree
  std::optional<double> distortion_bound; // claimed bound, when one is asserted
  std::function<Vec(const Vec&)> fn;
  std::function<double(const Vec&)> non_smooth_distance;  // default: +inf

  Vec operator()(const Vec& x) const { return fn(x); }
  double smooth_clearance(const Vec& x) const {
    return non_smooth_distance ? non_smooth_distance(x)
                               : std::numeric_limits<double>::infinity();
  }
};

MapExpr identity_map(int n);
MapExpr linear_map(Mat A);
MapExpr scaling_map(int n, double factor);
/// Planar map with ||q(z)||_inf = ||z||_inf^2 (cube-sphere power model).
MapExpr sup_norm_square_map();

MapExpr zorich_expr(const ZorichMap& Z);
MapExpr power_expr(const PowerMap& P);
MapExpr h1_expr(const H1Map& h1);
MapExpr gluing_expr(const AnnulusGluing& D);

/// outer after inner; degree multiplies when both are claimed.
MapExpr compose(MapExpr outer, MapExpr inner);

/// radial_star_inverse(surf_out) o map o radial_star_map(surf_in)
MapExpr smooth_conjugate(MapExpr map, const StarSurface& surf_in, const StarSurface& surf_out);

/// Theorem-1 composite h = P o h1 (polynomial type, degree d^{n-1}).
MapExpr polynomial_composite(const PowerMap& P, const H1Map& h1);

/// Theorem-2 planar model h = D o h1 (transcendental type). Throws ScopeError
/// for dimension != 2: the interior slow-growth construction is represented
/// by the planar annulus-gluing model only.
MapExpr transcendental_composite(const AnnulusGluing& D, const H1Map& h1);

/// Convenience evaluation of the Theorem-2 model at one point.
Vec transcendental_composite_eval(const AnnulusGluing& D, const H1Map& h1, const Vec& x);

}  // namespace qrmax
