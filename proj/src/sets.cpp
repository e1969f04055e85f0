#include "qrmax/sets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace qrmax {

namespace {
constexpr double kPi = std::numbers::pi;

// planar direction at angle psi, measured from the positive y-axis toward
// the positive x-axis (matches the planar Zorich parameterisation)
Vec dir2(double psi) {
  Vec d(2);
  d << std::sin(psi), std::cos(psi);
  return d;
}

double angle_of(const Vec& y) { return std::atan2(y[0], y[1]); }

// golden-section minimisation on [a,b]
template <class F>
double golden_min(F&& f, double a, double b, int iters = 80) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters && (b - a) > 1e-14; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? c : d;
}
}  // namespace

ClosedSetOracle ClosedSetOracle::full_space(int n) {
  if (n < 2) throw std::invalid_argument("ClosedSetOracle: dimension must be >= 2");
  return ClosedSetOracle(n, SetKind::FullSpace, DistanceMode::ExactFormula);
}

ClosedSetOracle ClosedSetOracle::radial_ray(Vec direction) {
  require_finite(direction, "radial_ray direction");
  if (direction.size() < 2) throw std::invalid_argument("radial_ray: dimension must be >= 2");
  double norm = direction.norm();
  if (!(norm > 0)) throw std::invalid_argument("radial_ray: zero direction");
  ClosedSetOracle o(static_cast<int>(direction.size()), SetKind::RadialRay,
                    DistanceMode::ExactFormula);
  o.direction_ = direction / norm;
  return o;
}

ClosedSetOracle ClosedSetOracle::log_spiral(double omega, double phase) {
  if (!std::isfinite(omega) || omega == 0.0)
    throw std::invalid_argument("log_spiral: omega must be finite and nonzero");
  ClosedSetOracle o(2, SetKind::LogSpiral, DistanceMode::ExactFormula);
  o.omega_ = omega;
  o.phase_ = phase;
  return o;
}

ClosedSetOracle ClosedSetOracle::cone(Vec axis, double half_angle) {
  require_finite(axis, "cone axis");
  if (axis.size() < 2) throw std::invalid_argument("cone: dimension must be >= 2");
  double norm = axis.norm();
  if (!(norm > 0)) throw std::invalid_argument("cone: zero axis");
  if (!(half_angle >= 0 && half_angle <= kPi))
    throw std::invalid_argument("cone: half_angle must lie in [0, pi]");
  ClosedSetOracle o(static_cast<int>(axis.size()), SetKind::Cone, DistanceMode::ExactFormula);
  o.direction_ = axis / norm;
  o.half_angle_ = half_angle;
  return o;
}

ClosedSetOracle ClosedSetOracle::point_cloud(std::vector<Vec> points, double resolution) {
  if (points.empty()) throw std::invalid_argument("point_cloud: empty point set");
  if (!(resolution > 0)) throw std::invalid_argument("point_cloud: resolution must be > 0");
  ClosedSetOracle o(static_cast<int>(points[0].size()), SetKind::PointCloud,
                    DistanceMode::CloudApproximate);
  o.cloud_ = std::move(points);
  o.cloud_index_ = std::make_shared<SpatialIndex>(o.cloud_);
  o.tolerance_ = resolution;
  return o;
}

ClosedSetOracle ClosedSetOracle::point_cloud_from_csv(const std::string& path, double resolution) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("point_cloud_from_csv: cannot open " + path);
  std::vector<Vec> pts;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        row.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw std::invalid_argument("point_cloud_from_csv: bad number at " + path + ":" +
                                    std::to_string(lineno));
      }
    }
    if (row.size() < 2)
      throw std::invalid_argument("point_cloud_from_csv: need >= 2 columns at " + path + ":" +
                                  std::to_string(lineno));
    if (!pts.empty() && pts[0].size() != static_cast<long>(row.size()))
      throw std::invalid_argument("point_cloud_from_csv: inconsistent column count at " + path +
                                  ":" + std::to_string(lineno));
    pts.push_back(Eigen::Map<Vec>(row.data(), row.size()));
  }
  return point_cloud(std::move(pts), resolution);
}

ClosedSetOracle ClosedSetOracle::set_union(std::vector<ClosedSetOracle> children) {
  if (children.empty()) throw std::invalid_argument("set_union: no children");
  int n = children[0].dimension();
  DistanceMode mode = DistanceMode::ExactFormula;
  double tol = 0.0;
  for (const auto& c : children) {
    if (c.dimension() != n) throw std::invalid_argument("set_union: mixed dimensions");
    if (c.distance_mode() == DistanceMode::CloudApproximate) mode = DistanceMode::CloudApproximate;
    tol = std::max(tol, c.tolerance());
  }
  ClosedSetOracle o(n, SetKind::Union, mode);
  o.children_ = std::move(children);
  o.tolerance_ = tol;
  return o;
}

double ClosedSetOracle::distance(const Vec& x) const {
  require_dimension(x, n_, "ClosedSetOracle::distance");
  require_finite(x, "ClosedSetOracle::distance");
  switch (kind_) {
    case SetKind::FullSpace:
      return 0.0;
    case SetKind::RadialRay: {
      double t = std::max(0.0, direction_.dot(x));
      return (x - t * direction_).norm();
    }
    case SetKind::LogSpiral: {
      double rho = x.norm();
      if (rho == 0.0) return 0.0;
      double alpha = angle_of(x);
      auto dist_sq = [&](double u) {
        double e = std::exp(u);
        return rho * rho + e * e - 2.0 * rho * e * std::cos(omega_ * u + phase_ - alpha);
      };
      double lo = std::log(rho) - (2.0 * kPi / std::abs(omega_) + 2.0);
      double hi = std::log(rho) + std::numbers::ln2 + 0.1;
      double step = std::min(0.02, 2.0 * kPi / (std::abs(omega_) * 64.0));
      double best = rho * rho;  // the origin belongs to the set
      double prev_u = lo, prev_f = dist_sq(lo);
      double cur_u = lo + step, cur_f = dist_sq(cur_u);
      for (double u = lo + 2 * step; u <= hi + step; u += step) {
        double f = dist_sq(std::min(u, hi));
        if (cur_f <= prev_f && cur_f <= f) {
          double u_star = golden_min(dist_sq, prev_u, std::min(u, hi));
          best = std::min(best, dist_sq(u_star));
        }
        prev_u = cur_u;
        prev_f = cur_f;
        cur_u = std::min(u, hi);
        cur_f = f;
      }
      best = std::min({best, dist_sq(lo), dist_sq(hi)});
      return std::sqrt(std::max(0.0, best));
    }
    case SetKind::Cone: {
      double along = direction_.dot(x);
      double across = (x - along * direction_).norm();
      double alpha = std::atan2(across, along);  // in [0, pi]
      if (alpha <= half_angle_) return 0.0;
      double excess = alpha - half_angle_;
      if (excess >= kPi / 2) return x.norm();
      return x.norm() * std::sin(excess);
    }
    case SetKind::PointCloud:
      return cloud_index_->nearest(x).distance;
    case SetKind::Union: {
      double d = std::numeric_limits<double>::infinity();
      for (const auto& c : children_) d = std::min(d, c.distance(x));
      return d;
    }
  }
  return 0.0;
}

SphereSection ClosedSetOracle::sphere_section(double r, int count) const {
  if (!(r >= 0)) throw std::invalid_argument("sphere_section: r must be >= 0");
  if (count < 1) throw std::invalid_argument("sphere_section: count must be >= 1");
  SphereSection sec;
  sec.radius = r;
  if (r == 0.0) {
    Vec origin = Vec::Zero(n_);
    if (distance(origin) <= tolerance_ + 1e-12) {
      sec.samples.push_back(origin);
      return sec;
    }
    throw EmptySectionError("sphere_section: set misses S(0)");
  }
  switch (kind_) {
    case SetKind::FullSpace:
      sec.samples = sphere_grid(n_, r, count);
      sec.resolution = sphere_grid_spacing(n_, r, count);
      break;
    case SetKind::RadialRay:
      sec.samples.push_back(r * direction_);
      break;
    case SetKind::LogSpiral: {
      double u = std::log(r);
      sec.samples.push_back(r * dir2(omega_ * u + phase_));
      break;
    }
    case SetKind::Cone: {
      if (n_ == 2) {
        double a0 = std::atan2(direction_[0], direction_[1]);
        double dtheta = 2.0 * kPi / count;
        int m = std::max(1, static_cast<int>(std::ceil(2.0 * half_angle_ / dtheta)) + 1);
        for (int i = 0; i < m; ++i) {
          double t = m == 1 ? 0.0 : -half_angle_ + 2.0 * half_angle_ * i / (m - 1);
          sec.samples.push_back(r * dir2(a0 + t));
        }
        sec.resolution = m > 1 ? r * 2.0 * half_angle_ / (m - 1) : 0.0;
      } else {
        for (const auto& p : sphere_grid(n_, r, count))
          if (distance(p) == 0.0) sec.samples.push_back(p);
        sec.samples.push_back(r * direction_);
        sec.resolution = sphere_grid_spacing(n_, r, count);
      }
      break;
    }
    case SetKind::PointCloud: {
      for (const auto& p : cloud_) {
        double norm = p.norm();
        if (norm > 0 && std::abs(norm - r) <= tolerance_)
          sec.samples.push_back((r / norm) * p);
      }
      if (sec.samples.empty())
        throw EmptySectionError("sphere_section: cloud misses S(" + format_g12(r) + ")");
      sec.resolution = tolerance_;
      break;
    }
    case SetKind::Union: {
      bool any = false;
      for (const auto& c : children_) {
        try {
          SphereSection child = c.sphere_section(r, count);
          sec.samples.insert(sec.samples.end(), child.samples.begin(), child.samples.end());
          sec.resolution = std::max(sec.resolution, child.resolution);
          any = true;
        } catch (const EmptySectionError&) {
        }
      }
      if (!any)
        throw EmptySectionError("sphere_section: union misses S(" + format_g12(r) + ")");
      break;
    }
  }
  if (sec.samples.empty())
    throw EmptySectionError("sphere_section: empty section at r = " + format_g12(r));
  return sec;
}

SphereCoverageReport validate_meets_every_sphere(const ClosedSetOracle& T,
                                                 const std::vector<double>& r_grid,
                                                 int probe_count) {
  std::vector<double> grid = r_grid;
  if (std::find(grid.begin(), grid.end(), 0.0) == grid.end()) grid.insert(grid.begin(), 0.0);
  SphereCoverageReport report;
  for (double r : grid) {
    SphereCoverageReport::Row row{r, 0.0, true};
    try {
      SphereSection sec = T.sphere_section(r, probe_count);
      double worst = 0.0;
      for (const auto& p : sec.samples) worst = std::max(worst, T.distance(p));
      row.achieved_min = worst;
      row.pass = worst <= T.tolerance() + 1e-9;
    } catch (const EmptySectionError&) {
      double lo = std::numeric_limits<double>::infinity();
      if (r == 0.0) {
        lo = T.distance(Vec::Zero(T.dimension()));
      } else {
        for (const auto& p : sphere_grid(T.dimension(), r, probe_count))
          lo = std::min(lo, T.distance(p));
      }
      row.achieved_min = lo;
      row.pass = false;
    }
    report.pass = report.pass && row.pass;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace qrmax
