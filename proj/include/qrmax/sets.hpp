#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qrmax/common.hpp"
#include "qrmax/geometry.hpp"

namespace qrmax {

/// Finite sample of T on the sphere S(r).
struct SphereSection {
  double radius = 0.0;
  std::vector<Vec> samples;
  double resolution = 0.0;  // spacing of the probe grid that produced it
};

enum class SetKind { FullSpace, RadialRay, LogSpiral, Cone, PointCloud, Union };
enum class DistanceMode { ExactFormula, CloudApproximate };

/// A closed target set T with membership, distance and per-sphere sections.
/// Built-in kinds have closed-form (or numerically exact) distance; point
/// clouds are explicitly approximate, with the declared resolution acting as
/// the membership tolerance.
class ClosedSetOracle {
 public:
  static ClosedSetOracle full_space(int n);
  /// {a*direction : a >= 0}
  static ClosedSetOracle radial_ray(Vec direction);
  /// n = 2: { r * (sin(w log r + phase), cos(w log r + phase)) : r > 0 } u {0}
  static ClosedSetOracle log_spiral(double omega, double phase = 0.0);
  /// Solid cone {x : angle(x, axis) <= half_angle} (contains 0).
  static ClosedSetOracle cone(Vec axis, double half_angle);
  static ClosedSetOracle point_cloud(std::vector<Vec> points, double resolution);
  static ClosedSetOracle point_cloud_from_csv(const std::string& path, double resolution);
  static ClosedSetOracle set_union(std::vector<ClosedSetOracle> children);

  int dimension() const { return n_; }
  SetKind kind() const { return kind_; }
  DistanceMode distance_mode() const { return mode_; }
  /// Membership tolerance: 0 for exact kinds, the resolution for clouds.
  double tolerance() const { return tolerance_; }

  /// Euclidean distance to T; 1-Lipschitz.
  double distance(const Vec& x) const;
  bool contains(const Vec& x, double extra_tol = 1e-12) const {
    return distance(x) <= tolerance_ + extra_tol;
  }

  /// Non-empty sample of T on S(r) at roughly `count` probe resolution.
  /// Throws EmptySectionError when the intersection is empty at that
  /// resolution (possible for clouds and misconfigured sets).
  SphereSection sphere_section(double r, int count) const;

  // kind parameters (used by the pullback construction)
  const Vec& ray_direction() const { return direction_; }
  double spiral_omega() const { return omega_; }
  double spiral_phase() const { return phase_; }
  const Vec& cone_axis() const { return direction_; }
  double cone_half_angle() const { return half_angle_; }
  const std::vector<ClosedSetOracle>& children() const { return children_; }
  const std::vector<Vec>& cloud_points() const { return cloud_; }

 private:
  ClosedSetOracle(int n, SetKind k, DistanceMode m) : n_(n), kind_(k), mode_(m) {}

  int n_;
  SetKind kind_;
  DistanceMode mode_;
  double tolerance_ = 0.0;
  Vec direction_;       // ray / cone axis
  double omega_ = 0.0;  // spiral angular speed
  double phase_ = 0.0;
  double half_angle_ = 0.0;
  std::vector<Vec> cloud_;
  std::shared_ptr<SpatialIndex> cloud_index_;
  std::vector<ClosedSetOracle> children_;
};

/// Per-radius check that min over S(r) of distance(.) vanishes, including the
/// r = 0 convention S(0) = {0} (every valid T contains the origin).
struct SphereCoverageReport {
  struct Row {
    double r;
    double achieved_min;
    bool pass;
  };
  std::vector<Row> rows;
  bool pass = true;
};

SphereCoverageReport validate_meets_every_sphere(const ClosedSetOracle& T,
                                                 const std::vector<double>& r_grid,
                                                 int probe_count = 512);

}  // namespace qrmax
