#include "qrmax/growth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qrmax {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double smoothstep(double u) { return u * u * (3.0 - 2.0 * u); }
}  // namespace

// ---------------------------------------------------------------------------
// GrowthSchedule

GrowthSchedule GrowthSchedule::from_radii(std::vector<double> radii, double epsilon) {
  if (!(epsilon > 0 && epsilon < 1))
    throw std::invalid_argument("GrowthSchedule: epsilon must lie in (0,1)");
  if (radii.empty()) throw std::invalid_argument("GrowthSchedule: empty radius sequence");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0) || !std::isfinite(radii[i]))
      throw std::invalid_argument("GrowthSchedule: radii must be positive and finite");
    if (i > 0 && !(radii[i] > radii[i - 1]))
      throw std::invalid_argument("GrowthSchedule: radii must be strictly increasing");
    if (i > 0 && !(epsilon * radii[i] > radii[i - 1]))
      throw std::invalid_argument(
          "GrowthSchedule: exceptional intervals overlap (need eps*r_{k+1} > r_k)");
  }
  GrowthSchedule gs;
  gs.epsilon_ = epsilon;
  gs.radii_ = std::move(radii);
  gs.eps_radii_.reserve(gs.radii_.size());
  for (double r : gs.radii_) gs.eps_radii_.push_back(epsilon * r);
  gs.nu_ts_ = gs.radii_;
  gs.nu_vs_.resize(gs.radii_.size());
  for (std::size_t i = 0; i < gs.radii_.size(); ++i) gs.nu_vs_[i] = double(i + 1);
  gs.nu_left_ = 1.0;
  return gs;
}

GrowthSchedule GrowthSchedule::exp_exp(int count, double epsilon) {
  if (count < 1) throw std::invalid_argument("GrowthSchedule::exp_exp: count must be >= 1");
  std::vector<double> radii;
  radii.reserve(count);
  for (int k = 1; k <= count; ++k) {
    double r = std::exp(std::exp(double(k)));
    if (!std::isfinite(r))
      throw std::invalid_argument("GrowthSchedule::exp_exp: radius overflows double at k = " +
                                  std::to_string(k));
    radii.push_back(r);
  }
  return from_radii(std::move(radii), epsilon);
}

GrowthSchedule GrowthSchedule::constant_nu(double c, double epsilon) {
  if (!(c > 0)) throw std::invalid_argument("GrowthSchedule::constant_nu: c must be > 0");
  GrowthSchedule gs;
  gs.epsilon_ = epsilon;
  gs.nu_left_ = c;
  return gs;
}

double GrowthSchedule::nu(double t) const {
  if (!(t > 0)) throw std::domain_error("GrowthSchedule::nu: t must be > 0");
  if (nu_ts_.empty()) return nu_left_;
  if (t <= nu_ts_.front()) return nu_left_;
  auto it = std::upper_bound(nu_ts_.begin(), nu_ts_.end(), t);
  if (it == nu_ts_.end()) {
    // continue the final segment's slope
    std::size_t k = nu_ts_.size() - 1;
    double slope =
        k == 0 ? 0.0 : (nu_vs_[k] - nu_vs_[k - 1]) / (nu_ts_[k] - nu_ts_[k - 1]);
    return nu_vs_[k] + slope * (t - nu_ts_[k]);
  }
  std::size_t hi = it - nu_ts_.begin();
  std::size_t lo = hi - 1;
  double w = (t - nu_ts_[lo]) / (nu_ts_[hi] - nu_ts_[lo]);
  return nu_vs_[lo] + w * (nu_vs_[hi] - nu_vs_[lo]);
}

namespace {
// integral of (a*t + b)/t over [x, y] = a*(y-x) + b*log(y/x)
double segment_integral(double a, double b, double x, double y) {
  return a * (y - x) + b * std::log(y / x);
}
}  // namespace

double GrowthSchedule::log_psi(double r) const {
  if (!(r >= 1)) throw std::domain_error("GrowthSchedule::psi: r must be >= 1");
  if (r == 1.0) return 0.0;
  if (nu_ts_.empty()) return nu_left_ * std::log(r);

  double total = 0.0;
  double from = 1.0;
  // constant part below the first node
  if (from < nu_ts_.front()) {
    double to = std::min(r, nu_ts_.front());
    total += nu_left_ * std::log(to / from);
    from = to;
  }
  if (from >= r) return total;
  // linear segments between nodes
  for (std::size_t k = 0; k + 1 < nu_ts_.size() && from < r; ++k) {
    double t0 = nu_ts_[k], t1 = nu_ts_[k + 1];
    if (r <= t0) break;
    if (from >= t1) continue;
    double x = std::max(from, t0), y = std::min(r, t1);
    if (y <= x) continue;
    double a = (nu_vs_[k + 1] - nu_vs_[k]) / (t1 - t0);
    double b = nu_vs_[k] - a * t0;
    total += segment_integral(a, b, x, y);
    from = y;
  }
  // beyond the last node
  if (from < r) {
    std::size_t k = nu_ts_.size() - 1;
    double slope =
        k == 0 ? 0.0 : (nu_vs_[k] - nu_vs_[k - 1]) / (nu_ts_[k] - nu_ts_[k - 1]);
    double a = slope;
    double b = nu_vs_[k] - a * nu_ts_[k];
    total += segment_integral(a, b, from, r);
  }
  return total;
}

bool GrowthSchedule::in_exceptional(double r) const {
  for (std::size_t k = 0; k < radii_.size(); ++k)
    if (r > eps_radii_[k] && r < radii_[k]) return true;
  return false;
}

double GrowthSchedule::log_density(double R) const {
  if (!(R >= 1)) throw std::domain_error("GrowthSchedule::log_density: R must be >= 1");
  double logR = std::log(R);
  if (logR == 0.0) return 0.0;
  double measure = 0.0;
  for (std::size_t k = 0; k < radii_.size(); ++k) {
    double lo = std::max(std::log(eps_radii_[k]), 0.0);
    double hi = std::min(std::log(radii_[k]), logR);
    if (hi > lo) measure += hi - lo;
  }
  return measure / logR;
}

std::vector<std::pair<double, double>> GrowthSchedule::exceptional_bands_log() const {
  std::vector<std::pair<double, double>> bands;
  bands.reserve(radii_.size());
  for (std::size_t k = 0; k < radii_.size(); ++k)
    bands.push_back({std::log(eps_radii_[k]), std::log(radii_[k])});
  return bands;
}

// ---------------------------------------------------------------------------
// AnnulusGluing

AnnulusGluing::AnnulusGluing(GrowthSchedule schedule) : schedule_(std::move(schedule)) {
  const auto& radii = schedule_.radii();
  if (radii.empty())
    throw std::invalid_argument("AnnulusGluing: schedule must carry a radius sequence");
  log_eps_ = std::log(schedule_.epsilon());
  log_radii_.assign(radii.size() + 1, 0.0);
  log_coeff_.assign(radii.size() + 1, 0.0);
  for (std::size_t k = 1; k <= radii.size(); ++k) log_radii_[k] = std::log(radii[k - 1]);
  for (std::size_t k = 2; k <= radii.size(); ++k)
    log_coeff_[k] = log_coeff_[k - 1] - log_radii_[k];
  zero_radii_.assign(radii.size() + 1, 0.0);
  for (std::size_t k = 2; k <= radii.size(); ++k)
    zero_radii_[k] = blend_zero_radius(static_cast<int>(k));
}

AnnulusGluing::Region AnnulusGluing::region_of_log(double log_r) const {
  const int K = static_cast<int>(schedule_.radii().size());
  for (int k = K; k >= 2; --k) {
    if (log_r >= log_radii_[k]) return {k, false};
    if (log_r > log_eps_ + log_radii_[k]) return {k, true};
  }
  return {1, false};
}

double AnnulusGluing::blend_t(int k, double log_r) const {
  double a = log_eps_ + log_radii_[k];
  double u = (log_r - a) / (-log_eps_);
  return smoothstep(std::clamp(u, 0.0, 1.0));
}

std::pair<double, double> AnnulusGluing::eval_log_polar(double log_r, double theta) const {
  Region reg = region_of_log(log_r);
  if (!reg.blend) {
    return {log_coeff_[reg.k] + reg.k * log_r, reg.k * theta};
  }
  int k = reg.k;
  double t = blend_t(k, log_r);
  double E = std::exp(log_r - log_radii_[k]);  // r / r_k <= 1
  double re = (1.0 - t) + t * E * std::cos(theta);
  double im = t * E * std::sin(theta);
  double mod2 = re * re + im * im;
  if (mod2 == 0.0) return {-kInf, 0.0};
  return {log_coeff_[k - 1] + (k - 1) * log_r + 0.5 * std::log(mod2),
          (k - 1) * theta + std::atan2(im, re)};
}

Vec AnnulusGluing::eval(const Vec& z) const {
  require_dimension(z, 2, "AnnulusGluing::eval");
  require_finite(z, "AnnulusGluing::eval");
  double r = z.norm();
  Vec out = Vec::Zero(2);
  if (r == 0.0) return out;
  auto [log_mod, phi] = eval_log_polar(std::log(r), std::atan2(z[1], z[0]));
  double m = std::exp(log_mod);
  out << m * std::cos(phi), m * std::sin(phi);
  return out;
}

double AnnulusGluing::max_log_modulus(double r) const {
  if (!(r > 0)) return -kInf;
  double x = std::log(r);
  Region reg = region_of_log(x);
  if (!reg.blend) return log_coeff_[reg.k] + reg.k * x;
  int k = reg.k;
  double t = blend_t(k, x);
  double E = std::exp(x - log_radii_[k]);
  return log_coeff_[k - 1] + (k - 1) * x + std::log((1.0 - t) + t * E);
}

int AnnulusGluing::good_degree(double r) const {
  if (!(r > 0)) return 1;
  double x = std::log(r);
  Region reg = region_of_log(x);
  if (!reg.blend) return reg.k;
  return r >= zero_radii_[reg.k] ? reg.k : reg.k - 1;
}

bool AnnulusGluing::in_blend(double r) const {
  if (!(r > 0)) return false;
  return region_of_log(std::log(r)).blend;
}

double AnnulusGluing::blend_zero_radius(int k) const {
  if (k < 2 || k > static_cast<int>(schedule_.radii().size()))
    throw std::invalid_argument("AnnulusGluing::blend_zero_radius: no blend with index " +
                                std::to_string(k));
  double a = log_eps_ + log_radii_[k];
  double b = log_radii_[k];
  // root of (1 - t(x)) * r_k = t(x) * e^x; the left side decreases from r_k/eps,
  // the right increases from 0
  auto g = [&](double x) {
    double t = blend_t(k, x);
    return (1.0 - t) * std::exp(log_radii_[k] - x) - t;
  };
  double lo = a, hi = b;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (g(mid) > 0)
      lo = mid;
    else
      hi = mid;
  }
  return std::exp(0.5 * (lo + hi));
}

double AnnulusGluing::zero_distance(const Vec& z) const {
  double best = kInf;
  for (std::size_t k = 2; k < zero_radii_.size(); ++k) {
    Vec zero(2);
    zero << -zero_radii_[k], 0.0;
    best = std::min(best, (z - zero).norm());
  }
  return best;
}

}  // namespace qrmax
