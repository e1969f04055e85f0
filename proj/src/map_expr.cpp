#include "qrmax/map_expr.hpp"

#include <limits>

namespace qrmax {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

MapExpr identity_map(int n) {
  MapExpr m;
  m.dimension = n;
  m.type = MapExpr::Type::Polynomial;
  m.degree = 1;
  m.name = "identity";
  m.fn = [](const Vec& x) { return x; };
  return m;
}

MapExpr linear_map(Mat A) {
  if (A.rows() != A.cols() || A.rows() < 2)
    throw std::invalid_argument("linear_map: need a square matrix, n >= 2");
  MapExpr m;
  m.dimension = static_cast<int>(A.rows());
  m.type = MapExpr::Type::Polynomial;
  m.degree = 1;
  m.name = "linear";
  m.fn = [A = std::move(A)](const Vec& x) -> Vec { return A * x; };
  return m;
}

MapExpr scaling_map(int n, double factor) { return linear_map(factor * Mat::Identity(n, n)); }

MapExpr sup_norm_square_map() {
  MapExpr m;
  m.dimension = 2;
  m.type = MapExpr::Type::Block;
  m.name = "sup-norm-square";
  m.fn = [](const Vec& x) -> Vec { return x.cwiseAbs().maxCoeff() * x; };
  return m;
}

MapExpr zorich_expr(const ZorichMap& Z) {
  MapExpr m;
  m.dimension = Z.dimension();
  m.type = MapExpr::Type::Block;
  m.name = "zorich";
  m.fn = [Z](const Vec& x) { return Z.eval(x); };
  m.non_smooth_distance = [Z](const Vec& x) {
    return Z.branch_distance(x.head(Z.dimension() - 1));
  };
  return m;
}

MapExpr power_expr(const PowerMap& P) {
  MapExpr m;
  m.dimension = P.dimension();
  m.type = MapExpr::Type::Polynomial;
  m.degree = P.expected_preimage_count();
  m.name = "power-d" + std::to_string(P.degree());
  m.fn = [P](const Vec& x) { return P.eval(x); };
  m.non_smooth_distance = [P](const Vec& x) {
    if (x.norm() == 0.0) return 0.0;
    const ZorichMap& Z = P.zorich();
    // images of the branch set pull back to branch-set points
    return Z.branch_distance(Z.invert(x).head(Z.dimension() - 1));
  };
  return m;
}

MapExpr h1_expr(const H1Map& h1) {
  MapExpr m;
  m.dimension = h1.dimension();
  m.type = MapExpr::Type::Block;
  m.degree = 1;
  m.name = "h1";
  m.fn = [h1](const Vec& x) { return h1.eval(x); };
  m.non_smooth_distance = [h1](const Vec& x) {
    if (x.norm() == 0.0) return 0.0;
    const ZorichMap& Z = h1.zorich();
    Vec y = Z.invert(x);
    auto [d, gap] = h1.shrink().pullback().distance_with_ambiguity(y);
    (void)d;
    // kinks sit on the pullback medial axis and on the branch-set image
    return std::min(gap * 0.5, Z.branch_distance(y.head(Z.dimension() - 1)));
  };
  return m;
}

MapExpr gluing_expr(const AnnulusGluing& D) {
  MapExpr m;
  m.dimension = 2;
  m.type = MapExpr::Type::Transcendental;
  m.name = "annulus-gluing";
  m.fn = [D](const Vec& z) { return D.eval(z); };
  m.non_smooth_distance = [D](const Vec& z) { return D.zero_distance(z); };
  return m;
}

MapExpr compose(MapExpr outer, MapExpr inner) {
  if (outer.dimension != inner.dimension)
    throw std::invalid_argument("compose: dimension mismatch");
  MapExpr m;
  m.dimension = inner.dimension;
  m.type = (outer.type == MapExpr::Type::Transcendental ||
            inner.type == MapExpr::Type::Transcendental)
               ? MapExpr::Type::Transcendental
               : (outer.type == MapExpr::Type::Polynomial &&
                          inner.type == MapExpr::Type::Polynomial
                      ? MapExpr::Type::Polynomial
                      : MapExpr::Type::Block);
  if (outer.degree && inner.degree) m.degree = *outer.degree * *inner.degree;
  m.name = outer.name + "∘" + inner.name;
  auto of = outer.fn;
  auto inf = inner.fn;
  m.fn = [of, inf](const Vec& x) { return of(inf(x)); };
  auto onsd = outer.non_smooth_distance;
  auto insd = inner.non_smooth_distance;
  m.non_smooth_distance = [of, inf, onsd, insd](const Vec& x) {
    double d = insd ? insd(x) : kInf;
    if (onsd) d = std::min(d, onsd(inf(x)));
    return d;
  };
  return m;
}

MapExpr smooth_conjugate(MapExpr map, const StarSurface& surf_in, const StarSurface& surf_out) {
  if (map.dimension != surf_in.dimension() || map.dimension != surf_out.dimension())
    throw std::invalid_argument("smooth_conjugate: dimension mismatch");
  MapExpr m;
  m.dimension = map.dimension;
  m.type = map.type;
  m.degree = map.degree;
  m.name = "conjugated(" + map.name + ")";
  auto f = map.fn;
  m.fn = [f, surf_in, surf_out](const Vec& x) {
    return radial_star_inverse(surf_out, f(radial_star_map(surf_in, x)));
  };
  auto nsd = map.non_smooth_distance;
  m.non_smooth_distance = [nsd, surf_in](const Vec& x) {
    return nsd ? nsd(radial_star_map(surf_in, x)) : kInf;
  };
  return m;
}

MapExpr polynomial_composite(const PowerMap& P, const H1Map& h1) {
  if (P.dimension() != h1.dimension())
    throw std::invalid_argument("polynomial_composite: dimension mismatch");
  MapExpr m = compose(power_expr(P), h1_expr(h1));
  m.type = MapExpr::Type::Polynomial;
  m.degree = P.expected_preimage_count();
  m.name = "theorem1-d" + std::to_string(P.degree());
  return m;
}

MapExpr transcendental_composite(const AnnulusGluing& D, const H1Map& h1) {
  if (h1.dimension() != 2)
    throw ScopeError(
        "transcendental composite: only n = 2 is supported; the interior slow-growth "
        "construction is represented by the planar annulus-gluing model");
  MapExpr m = compose(gluing_expr(D), h1_expr(h1));
  m.type = MapExpr::Type::Transcendental;
  m.name = "theorem2";
  return m;
}

Vec transcendental_composite_eval(const AnnulusGluing& D, const H1Map& h1, const Vec& x) {
  if (x.size() != 2)
    throw ScopeError(
        "transcendental composite: only n = 2 is supported; the interior slow-growth "
        "construction is represented by the planar annulus-gluing model");
  return D.eval(h1.eval(x));
}

}  // namespace qrmax
