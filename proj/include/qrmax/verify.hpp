#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "qrmax/common.hpp"
#include "qrmax/growth.hpp"
#include "qrmax/map_expr.hpp"
#include "qrmax/sets.hpp"

namespace qrmax {

struct MaxModBudget {
  int samples = 1024;        // sphere samples (angular grid / Fibonacci lattice)
  int refine_iters = 48;     // derivative-free polish budget
  double argmax_rel_floor = 1e-12;  // band floor relative to the maximum
};

/// Maximum modulus over S(r) with the argmax sample set. Samples within a
/// resolution-adjusted band of the maximum are reported (times (1 + 1e-9)),
/// because the true argmax set may be a continuum.
struct MaxModResult {
  double r = 0.0;
  double m_est = 0.0;      // refined estimate of M(r, f)
  double m_grid = 0.0;     // best grid sample
  double tol_used = 0.0;   // argmax admission tolerance actually applied
  double resolution = 0.0; // sample spacing on the sphere
  int iterations = 0;      // refinement evaluations spent
  std::vector<Vec> argmax;
  std::vector<std::size_t> argmax_indices;
};

MaxModResult max_modulus(const MapExpr& f, double r, const MaxModBudget& budget);

/// Maximum modulus set extraction over a radius grid.
struct MMSExtract {
  std::vector<double> grid;
  std::vector<MaxModResult> per_radius;
  std::vector<bool> in_exceptional;  // schedule flags (false without schedule)
  std::vector<Vec> points;           // union of argmax samples
};

MMSExtract extract_mms(const MapExpr& f, std::vector<double> grid, const MaxModBudget& budget,
                       const GrowthSchedule* schedule = nullptr);

/// Per-radius Hausdorff comparison of the extracted argmax set with T cap S(r).
struct TargetComparison {
  struct Row {
    double r = 0.0;
    double hausdorff = 0.0;  // NaN when skipped
    double bound = 0.0;
    bool skipped = false;
    bool pass = true;
  };
  std::vector<Row> rows;
  double max_hausdorff = 0.0;
  double max_bound = 0.0;
  bool pass = true;
  std::string note;  // cloud-substitution caveat when applicable
};

TargetComparison compare_to_target(const MMSExtract& extract, const ClosedSetOracle& T,
                                   bool exclude_exceptional, int section_count);

enum class DistortionMode { Jacobian, Roundness };

/// Finite-difference distortion estimates: singular-value ratios of a central
/// finite-difference Jacobian, or finite-scale roundness max|df|/min|df| over
/// a probe sphere. Points within 1e-6 of known non-smooth loci are excluded
/// from Jacobian mode and listed.
struct DistortionReport {
  struct Entry {
    Vec point;
    double value = 1.0;   // H = sigma_max/sigma_min or roundness ratio
    bool degenerate = false;
  };
  std::vector<Entry> entries;
  std::vector<Vec> excluded;
  double probe_radius = 0.0;
  DistortionMode mode = DistortionMode::Roundness;
  // summary over non-degenerate entries
  double min = 1.0, median = 1.0, p95 = 1.0, max = 1.0;
};

DistortionReport distortion_probe(const MapExpr& f, const std::vector<Vec>& samples,
                                  double probe_radius, DistortionMode mode,
                                  int sphere_samples = 64);

/// max |fn(x) - fn(y)| / |x - y| over the pairs (coincident pairs skipped).
double lipschitz_probe(const std::function<double(const Vec&)>& fn,
                       const std::vector<std::pair<Vec, Vec>>& pairs);

/// Winding number of theta -> f(r e^{i theta}) around 0 (n = 2), computed by
/// accumulated argument differences over `samples` circle points.
double winding_degree(const MapExpr& f, double r, int samples = 4096);

}  // namespace qrmax
