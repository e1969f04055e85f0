#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace qrmax {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline bool all_finite(const Vec& v) { return v.allFinite(); }

inline void require_finite(const Vec& v, const char* what) {
  if (!v.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite coordinates");
}

inline void require_dimension(const Vec& v, int n, const char* what) {
  if (v.size() != n)
    throw std::invalid_argument(std::string(what) + ": expected dimension " + std::to_string(n) +
                                ", got " + std::to_string(v.size()));
}

/// Raised when a request falls outside the implemented scope (e.g. the
/// transcendental pipeline for n >= 3, which is represented by a planar model).
struct ScopeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised by path lifting when a step cannot be disambiguated even after
/// the refinement budget is exhausted.
struct LiftRefinementError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when a sphere section of a target set comes back empty.
struct EmptySectionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised on malformed experiment configuration; message lists the fields.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Uniform direction on the unit sphere of R^n.
inline Vec random_unit(Rng& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec v(n);
  do {
    for (int i = 0; i < n; ++i) v[i] = g(rng);
  } while (v.norm() < 1e-12);
  return v / v.norm();
}

inline Vec random_point(Rng& rng, int n, double box) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = uniform(rng, -box, box);
  return v;
}

/// Decimal formatting used by every emitted file: 12 significant digits.
std::string format_g12(double x);

/// Round to the double nearest the 12-digit decimal form (stabilises JSON output).
double round_g12(double x);

}  // namespace qrmax
