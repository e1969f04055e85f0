#include "qrmax/shrink.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace qrmax {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

double p_of_distance(double d) {
  if (!(d >= 0)) throw std::domain_error("p_of_distance: distance must be >= 0");
  return d / (1.0 + d);
}

double ExceptionalBands::vertical_distance(double t) const {
  for (const auto& [a, b] : log_bands)
    if (t > a && t < b) return std::min(t - a, b - t);
  return 0.0;
}

bool ExceptionalBands::contains(double t) const {
  for (const auto& [a, b] : log_bands)
    if (t > a && t < b) return true;
  return false;
}

// ---------------------------------------------------------------------------
// PullbackSet

bool PullbackSet::analytic_supported(const ClosedSetOracle& T) {
  switch (T.kind()) {
    case SetKind::FullSpace:
    case SetKind::RadialRay:
    case SetKind::LogSpiral:
      return true;
    case SetKind::Cone:
      return T.dimension() == 2;
    default:
      return false;
  }
}

PullbackSet PullbackSet::analytic(const ClosedSetOracle& T, const ZorichMap& Z, double cap,
                                  std::optional<ExceptionalBands> bands) {
  if (T.dimension() != Z.dimension())
    throw std::invalid_argument("PullbackSet: set and map dimensions differ");
  if (!(cap > 0)) throw std::invalid_argument("PullbackSet: cap must be > 0");
  if (!analytic_supported(T))
    throw std::invalid_argument("PullbackSet: no analytic pullback for this set kind");
  PullbackSet ps;
  ps.mode_ = Mode::Analytic;
  ps.zorich_ = std::make_shared<ZorichMap>(Z);
  ps.cap_ = cap;
  ps.bands_ = std::move(bands);
  switch (T.kind()) {
    case SetKind::FullSpace:
      ps.analytic_kind_ = AnalyticKind::FullSpace;
      break;
    case SetKind::RadialRay:
      ps.analytic_kind_ = AnalyticKind::FiberPoints;
      ps.fiber_base_ = Z.invert(T.ray_direction()).head(Z.dimension() - 1);
      break;
    case SetKind::LogSpiral:
      ps.analytic_kind_ = AnalyticKind::SlantLines;
      ps.slope_ = 2.0 * T.spiral_omega() / kPi;
      ps.intercept_ = 2.0 * T.spiral_phase() / kPi;
      break;
    case SetKind::Cone: {
      ps.analytic_kind_ = AnalyticKind::VerticalStrip;
      double a0 = std::atan2(T.cone_axis()[0], T.cone_axis()[1]);
      ps.intercept_ = 2.0 * a0 / kPi;
      ps.strip_half_width_ = 2.0 * T.cone_half_angle() / kPi;
      break;
    }
    default:
      break;
  }
  return ps;
}

PullbackSet PullbackSet::hyperplanes(const ZorichMap& Z, std::vector<double> t_levels,
                                     double cap) {
  if (t_levels.empty()) throw std::invalid_argument("PullbackSet::hyperplanes: no levels");
  PullbackSet ps;
  ps.mode_ = Mode::Analytic;
  ps.analytic_kind_ = AnalyticKind::Hyperplanes;
  ps.zorich_ = std::make_shared<ZorichMap>(Z);
  ps.cap_ = cap;
  std::sort(t_levels.begin(), t_levels.end());
  ps.t_levels_ = std::move(t_levels);
  return ps;
}

PullbackSet PullbackSet::sampled(const ClosedSetOracle& T, const ZorichMap& Z,
                                 const SampledParams& params, double cap,
                                 std::optional<ExceptionalBands> bands) {
  if (T.dimension() != Z.dimension())
    throw std::invalid_argument("PullbackSet: set and map dimensions differ");
  if (!(params.t_step > 0) || !(params.t_max >= params.t_min))
    throw std::invalid_argument("PullbackSet::sampled: bad t range");
  PullbackSet ps;
  ps.mode_ = Mode::Sampled;
  ps.zorich_ = std::make_shared<ZorichMap>(Z);
  ps.cap_ = cap;
  ps.bands_ = bands;

  auto [lo, hi] = Z.g_domain();
  Vec center = 0.5 * (lo + hi);
  double radius = 0.5 * (hi - lo).maxCoeff() + cap + 2.0;

  std::vector<Vec> points;
  double max_lift_spacing = 0.0;
  const int n = Z.dimension();
  for (double t = params.t_min - cap; t <= params.t_max + cap + 1e-12; t += params.t_step) {
    if (bands && bands->contains(t)) continue;  // shell removed from the target
    double r = std::exp(t);
    SphereSection sec;
    try {
      sec = T.sphere_section(r, params.section_count);
    } catch (const EmptySectionError&) {
      continue;
    }
    max_lift_spacing = std::max(max_lift_spacing, sec.resolution / r * (2.0 / kPi) *
                                                      (n == 2 ? 1.0 : 2.0));
    for (const auto& q : sec.samples) {
      Vec y = Z.invert(q);
      for (const auto& s : Z.fiber_near(y.head(n - 1), center, radius)) {
        Vec p(n);
        p.head(n - 1) = s;
        p[n - 1] = y[n - 1];
        points.push_back(p);
      }
    }
  }
  if (points.empty())
    throw std::invalid_argument("PullbackSet::sampled: no section samples in the t range");
  ps.index_ = std::make_shared<SpatialIndex>(std::move(points));
  ps.resolution_ = params.t_step + max_lift_spacing;
  return ps;
}

double PullbackSet::raw_distance(const Vec& y, double* second) const {
  const int n = zorich_->dimension();
  require_dimension(y, n, "PullbackSet::distance");
  require_finite(y, "PullbackSet::distance");
  double vert = bands_ ? bands_->vertical_distance(y[n - 1]) : 0.0;
  if (second) *second = kInf;
  switch (mode_ == Mode::Sampled ? AnalyticKind::None : analytic_kind_) {
    case AnalyticKind::FullSpace: {
      if (second && bands_) {
        for (const auto& [a, b] : bands_->log_bands)
          if (y[n - 1] > a && y[n - 1] < b) *second = std::max(y[n - 1] - a, b - y[n - 1]);
      }
      return vert;
    }
    case AnalyticKind::FiberPoints: {
      double margin_sq = 0;
      Vec nearest = zorich_->nearest_fiber_point(fiber_base_, y.head(n - 1), &margin_sq);
      double d1 = (y.head(n - 1) - nearest).norm();
      if (second) *second = std::hypot(std::sqrt(d1 * d1 + margin_sq), vert);
      return std::hypot(d1, vert);
    }
    case AnalyticKind::SlantLines: {
      // lines s = slope*t + intercept + 4m in (s, t) coordinates
      double res = y[0] - slope_ * y[n - 1] - intercept_;
      double m0 = std::round(res / 4.0);
      double best = kInf, second_best = kInf;
      int extra = static_cast<int>(std::ceil((cap_ * std::hypot(1.0, slope_) + 4.0) / 4.0));
      for (double m = m0 - extra; m <= m0 + extra; m += 1.0) {
        double d;
        double b = intercept_ + 4.0 * m;
        if (!bands_) {
          d = std::abs(res - 4.0 * m) / std::hypot(1.0, slope_);
        } else {
          // perpendicular foot parameter on the clipped line
          double t_star =
              (y[n - 1] + slope_ * (y[0] - b)) / (1.0 + slope_ * slope_);
          auto line_dist = [&](double t) {
            return std::hypot(y[0] - (slope_ * t + b), y[n - 1] - t);
          };
          if (!bands_->contains(t_star)) {
            d = line_dist(t_star);
          } else {
            d = kInf;
            for (const auto& [a, bb] : bands_->log_bands)
              if (t_star > a && t_star < bb) {
                d = std::min(line_dist(a), line_dist(bb));
                break;
              }
          }
        }
        if (d < best) {
          second_best = best;
          best = d;
        } else if (d < second_best) {
          second_best = d;
        }
      }
      if (second) *second = second_best;
      return best;
    }
    case AnalyticKind::VerticalStrip: {
      double res = y[0] - intercept_;
      double m0 = std::round(res / 4.0);
      double best = kInf, second_best = kInf;
      for (double m = m0 - 2; m <= m0 + 2; m += 1.0) {
        double d = std::max(0.0, std::abs(res - 4.0 * m) - strip_half_width_);
        if (d < best) {
          second_best = best;
          best = d;
        } else if (d < second_best) {
          second_best = d;
        }
      }
      if (second) *second = std::hypot(second_best, vert);
      return std::hypot(best, vert);
    }
    case AnalyticKind::Hyperplanes: {
      double best = kInf, second_best = kInf;
      for (double t : t_levels_) {
        double d = std::abs(y[n - 1] - t);
        if (d < best) {
          second_best = best;
          best = d;
        } else if (d < second_best) {
          second_best = d;
        }
      }
      if (second) *second = second_best;
      return best;
    }
    case AnalyticKind::None:
      break;
  }
  // sampled
  Vec folded = zorich_->g_fold(y);
  auto [d1, d2] = index_->two_nearest(folded);
  if (second) *second = d2;
  return d1;
}

double PullbackSet::distance(const Vec& y) const { return std::min(raw_distance(y), cap_); }

std::pair<double, double> PullbackSet::distance_with_ambiguity(const Vec& y) const {
  double second = kInf;
  double d = raw_distance(y, &second);
  double gap = std::isfinite(second) ? std::max(0.0, second - d) : kInf;
  return {std::min(d, cap_), gap};
}

// ---------------------------------------------------------------------------
// ShrinkMap / H1Map

double ShrinkMap::shift(const Vec& y) const {
  return 0.5 * p_of_distance(pullback_.distance(y));
}

Vec ShrinkMap::apply(const Vec& y) const {
  Vec out = y;
  out[y.size() - 1] -= shift(y);
  return out;
}

Vec H1Map::eval(const Vec& x) const {
  require_dimension(x, dimension(), "H1Map::eval");
  if (x.norm() == 0.0) return Vec::Zero(dimension());
  Vec y = zorich().invert(x);
  return zorich().eval(shrink_.apply(y));
}

Vec H1Map::eval_through(const Vec& x, const Vec& lift) const {
  require_dimension(lift, dimension(), "H1Map::eval_through lift");
  if ((zorich().eval(lift) - x).norm() > 1e-8 * std::max(1.0, x.norm()))
    throw std::invalid_argument("H1Map::eval_through: lift is not a preimage of x");
  return zorich().eval(shrink_.apply(lift));
}

double H1Map::modulus_factor(const Vec& x) const {
  if (x.norm() == 0.0) return 1.0;
  Vec y = zorich().invert(x);
  return std::exp(-shrink_.shift(y));
}

}  // namespace qrmax
