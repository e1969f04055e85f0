#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "qrmax/common.hpp"

namespace qrmax {

/// Origin-centred or general sphere S(center, radius). radius == 0 is the
/// degenerate singleton {center}.
struct Sphere {
  Vec center;
  double radius = 0.0;

  Sphere(Vec c, double r) : center(std::move(c)), radius(r) {
    require_finite(center, "Sphere center");
    if (!(radius >= 0)) throw std::invalid_argument("Sphere: radius must be >= 0");
  }
  static Sphere origin(int n, double r) { return Sphere(Vec::Zero(n), r); }
  bool contains(const Vec& x, double tol = 1e-12) const {
    return std::abs((x - center).norm() - radius) <= tol;
  }
};

/// A star-like surface about the origin, described by its radial function:
/// the distance from the origin to the surface in each unit direction. The
/// radial function must be bounded between positive constants.
class StarSurface {
 public:
  enum class Kind { EuclideanSphere, SupNormCube, ConvexPolygon };

  static StarSurface euclidean_sphere(int n);
  /// Boundary of scale*[-1,1]^n; radial function scale/||u||_inf.
  static StarSurface sup_norm_cube(int n, double scale = 1.0);
  /// Convex polygon boundary through the given vertices (n = 2 only). The
  /// origin must lie strictly inside. Vertices may be given in any order.
  static StarSurface convex_polygon(std::vector<Vec> vertices);
  /// Cube surface normalised so that max |x| over the surface equals 1,
  /// the stand-in for a PL model sphere.
  static StarSurface normalized_cube(int n) { return sup_norm_cube(n, 1.0 / std::sqrt(double(n))); }

  int dimension() const { return n_; }
  Kind kind() const { return kind_; }
  /// Radius of the surface along a direction (u need not be normalised).
  double radius(const Vec& direction) const;
  double min_radius() const { return min_radius_; }
  double max_radius() const { return max_radius_; }

 private:
  StarSurface(int n, Kind k) : n_(n), kind_(k) {}
  int n_;
  Kind kind_;
  double scale_ = 1.0;
  double min_radius_ = 1.0;
  double max_radius_ = 1.0;
  std::vector<Vec> vertices_;       // polygon, sorted by angle
  std::vector<double> vertex_angles_;
};

/// x |-> radius(x/|x|) * x; maps S(r) onto the r-dilate of the surface.
/// Total: 0 |-> 0. Positively homogeneous of degree 1.
Vec radial_star_map(const StarSurface& surface, const Vec& x);

/// Exact inverse of radial_star_map.
Vec radial_star_inverse(const StarSurface& surface, const Vec& y);

/// Exact nearest-neighbour index over a finite point set (kd-tree with
/// branch-and-bound pruning; no approximation).
class SpatialIndex {
 public:
  explicit SpatialIndex(std::vector<Vec> points);

  struct Hit {
    double distance;
    std::size_t index;
  };

  /// Exact nearest stored point. Throws std::invalid_argument if empty.
  Hit nearest(const Vec& query) const;
  /// Distances of the two nearest stored points (second = first when only
  /// one point is stored). Used for medial-axis proximity estimates.
  std::pair<double, double> two_nearest(const Vec& query) const;

  std::size_t size() const { return points_.size(); }
  const Vec& point(std::size_t i) const { return points_[i]; }
  int dimension() const { return dim_; }

 private:
  struct Node {
    int axis = -1;
    double split = 0.0;
    std::size_t begin = 0, end = 0;  // leaf range into order_
    int left = -1, right = -1;
    Vec box_lo, box_hi;
  };
  int build(std::size_t begin, std::size_t end);
  void search(int node, const Vec& q, double& best, std::size_t& best_idx) const;
  void search2(int node, const Vec& q, double& best1, double& best2) const;

  std::vector<Vec> points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
  int dim_ = 0;
  int root_ = -1;
};

/// Exact min over stored points of |y - p| with an achieving witness.
std::pair<double, Vec> nearest_distance(const SpatialIndex& index, const Vec& y);

/// Symmetric Hausdorff distance between finite non-empty point sets.
double hausdorff_distance(const std::vector<Vec>& a, const std::vector<Vec>& b);

/// Uniform angular grid on the circle of radius r (n = 2).
std::vector<Vec> circle_grid(double r, int count);
/// Fibonacci lattice on the sphere of radius r (n = 3).
std::vector<Vec> fibonacci_sphere(double r, int count);
/// Deterministic sphere sampling for any n >= 2 (grid / lattice / seeded
/// directions for n >= 4).
std::vector<Vec> sphere_grid(int n, double r, int count);
/// Nominal spacing between neighbouring samples of sphere_grid.
double sphere_grid_spacing(int n, double r, int count);

}  // namespace qrmax
