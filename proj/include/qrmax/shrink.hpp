#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "qrmax/common.hpp"
#include "qrmax/geometry.hpp"
#include "qrmax/sets.hpp"
#include "qrmax/zorich.hpp"

namespace qrmax {

/// The distance saturation p(d) = d / (1 + d): monotone, 1-Lipschitz,
/// valued in [0, 1). Throws std::domain_error for d < 0.
double p_of_distance(double d);

/// Optional removal of the exceptional shells: the lift of T \ S_eps drops
/// the horizontal bands y_n in (log(eps r_k), log(r_k)).
struct ExceptionalBands {
  std::vector<std::pair<double, double>> log_bands;  // open intervals in y_n

  /// 0 when t is allowed, else the distance to the nearest allowed level.
  double vertical_distance(double t) const;
  bool contains(double t) const;
};

/// Distance field to T' = Z^{-1}(T), the pullback of a target set under the
/// Zorich map, capped at `cap` (capping keeps the field 1-Lipschitz and
/// perturbs the saturated shift by at most 1/(2(1+cap))).
///
/// Analytic mode has closed-form distance: supported for full-space sets,
/// radial rays, planar log-spirals, planar cones, and explicit horizontal
/// hyperplane unions (the lift of a union of spheres). Sampled mode inverts
/// sphere-section samples, replicates them over the nearby group translates
/// and parity cells, and queries an exact spatial index; queries are folded
/// to a G-fundamental domain first, so the field is exactly G-invariant.
class PullbackSet {
 public:
  enum class Mode { Analytic, Sampled };

  static bool analytic_supported(const ClosedSetOracle& T);

  static PullbackSet analytic(const ClosedSetOracle& T, const ZorichMap& Z, double cap = 9.0,
                              std::optional<ExceptionalBands> bands = std::nullopt);

  /// T' = union of hyperplanes {y_n = t}: the lift of a union of spheres
  /// S(e^t). Used directly by the shrink-map studies.
  static PullbackSet hyperplanes(const ZorichMap& Z, std::vector<double> t_levels,
                                 double cap = 9.0);

  struct SampledParams {
    double t_min = -3.0;
    double t_max = 3.0;
    double t_step = 0.05;
    int section_count = 512;
  };
  static PullbackSet sampled(const ClosedSetOracle& T, const ZorichMap& Z,
                             const SampledParams& params, double cap = 9.0,
                             std::optional<ExceptionalBands> bands = std::nullopt);

  /// Capped distance from y to the represented preimage set.
  double distance(const Vec& y) const;
  /// Distance together with the gap to the second-nearest represented sheet
  /// (a proxy for proximity to the medial axis, where the field is kinked).
  std::pair<double, double> distance_with_ambiguity(const Vec& y) const;

  Mode mode() const { return mode_; }
  double cap() const { return cap_; }
  bool exact() const { return mode_ == Mode::Analytic; }
  /// Lift-space sampling resolution (0 in analytic mode).
  double resolution() const { return resolution_; }
  const ZorichMap& zorich() const { return *zorich_; }
  int dimension() const { return zorich_->dimension(); }
  const std::optional<ExceptionalBands>& bands() const { return bands_; }

 private:
  enum class AnalyticKind { None, FullSpace, FiberPoints, SlantLines, VerticalStrip, Hyperplanes };

  PullbackSet() = default;
  double raw_distance(const Vec& y, double* second = nullptr) const;

  Mode mode_ = Mode::Analytic;
  AnalyticKind analytic_kind_ = AnalyticKind::None;
  std::shared_ptr<const ZorichMap> zorich_;
  double cap_ = 9.0;
  double resolution_ = 0.0;
  std::optional<ExceptionalBands> bands_;

  // FiberPoints: the ray direction's fiber in R^{n-1}
  Vec fiber_base_;
  // SlantLines (n = 2): s = slope * t + intercept (mod 4)
  double slope_ = 0.0, intercept_ = 0.0;
  // VerticalStrip (n = 2): s in [intercept - width, intercept + width] (mod 4)
  double strip_half_width_ = 0.0;
  // Hyperplanes: allowed t levels
  std::vector<double> t_levels_;
  // Sampled
  std::shared_ptr<SpatialIndex> index_;
};

/// The vertical shrink f(y) = (y', y_n - p(d(y, T'))/2) of the complement of
/// the pullback set: identity exactly on T', injective, moves points down,
/// preserves maximal vertical segments, linear distortion bounded by 3.
class ShrinkMap {
 public:
  explicit ShrinkMap(PullbackSet pullback) : pullback_(std::move(pullback)) {}

  Vec apply(const Vec& y) const;
  double shift(const Vec& y) const;  // p(d)/2 >= 0
  const PullbackSet& pullback() const { return pullback_; }
  int dimension() const { return pullback_.dimension(); }

 private:
  PullbackSet pullback_;
};

/// h1(x) = Z(f(Z^{-1}(x))): the quasiconformal map that is the identity on T
/// and strictly decreases |x| elsewhere, with
///   |h1(x)| = |x| * exp(-p(d(y, T'))/2).
class H1Map {
 public:
  explicit H1Map(ShrinkMap shrink) : shrink_(std::move(shrink)) {}

  Vec eval(const Vec& x) const;
  /// Evaluate through an explicit preimage of x (test hook for checking
  /// branch independence). `lift` must satisfy Z(lift) == x.
  Vec eval_through(const Vec& x, const Vec& lift) const;
  /// exp(-p/2) at x (for closed-form modulus oracles); 1 at x = 0.
  double modulus_factor(const Vec& x) const;

  const ShrinkMap& shrink() const { return shrink_; }
  const ZorichMap& zorich() const { return shrink_.pullback().zorich(); }
  int dimension() const { return shrink_.dimension(); }

 private:
  ShrinkMap shrink_;
};

}  // namespace qrmax
