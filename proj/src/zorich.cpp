#include "qrmax/zorich.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numbers>

namespace qrmax {

namespace {
constexpr double kPi = std::numbers::pi;

// tent fold of one coordinate: mirrors at {z0 - 1, z0 + 1} + 4Z
struct Fold1 {
  double cell;
  bool reflected;
  int translation;
};

Fold1 fold_coord(double s, double z0) {
  double T = std::fmod(s - z0 + 1.0, 4.0);
  if (T < 0) T += 4.0;
  Fold1 f{};
  if (T <= 2.0) {
    f.cell = z0 - 1.0 + T;
    f.reflected = false;
    f.translation = static_cast<int>(std::lround((s - f.cell) / 4.0));
  } else {
    f.cell = z0 + 3.0 - T;
    f.reflected = true;
    double rep = 2.0 * (z0 + 1.0) - f.cell;  // reflection across the upper wall
    f.translation = static_cast<int>(std::lround((s - rep) / 4.0));
  }
  return f;
}

// nearest element of {rep + 4k} to a
double nearest_in_family(double rep, double a) {
  return rep + 4.0 * std::round((a - rep) / 4.0);
}
}  // namespace

ZorichMap::ZorichMap(int n) : n_(n), z0_(n == 2 ? 0.0 : 1.0) {
  if (n < 2) throw std::invalid_argument("ZorichMap: dimension must be >= 2");
}

FoldResult ZorichMap::fold(const Vec& x_prime) const {
  require_dimension(x_prime, n_ - 1, "ZorichMap::fold");
  require_finite(x_prime, "ZorichMap::fold");
  FoldResult r;
  r.cell.resize(n_ - 1);
  r.translations.resize(n_ - 1);
  r.reflected.resize(n_ - 1);
  int parity = 0;
  for (int i = 0; i < n_ - 1; ++i) {
    Fold1 f = fold_coord(x_prime[i], z0_);
    r.cell[i] = f.cell;
    r.translations[i] = f.translation;
    r.reflected[i] = f.reflected;
    parity ^= f.reflected ? 1 : 0;
  }
  r.parity = parity;
  return r;
}

Vec ZorichMap::hemisphere_point(const Vec& cell, int parity) const {
  Vec xi = cell.array() - z0_;
  double rho = xi.cwiseAbs().maxCoeff();
  double l2 = xi.norm();
  Vec h(n_);
  if (l2 == 0.0) {
    h.setZero();
  } else {
    double s = std::sin(kPi * rho / 2.0);
    h.head(n_ - 1) = (s / l2) * xi;
  }
  double c = std::cos(kPi * rho / 2.0);
  h[n_ - 1] = (parity % 2 == 0) ? c : -c;
  if (l2 == 0.0) h.head(n_ - 1).setZero();
  return h;
}

Vec ZorichMap::eval(const Vec& x) const {
  require_dimension(x, n_, "ZorichMap::eval");
  require_finite(x, "ZorichMap::eval");
  FoldResult f = fold(x.head(n_ - 1));
  return std::exp(x[n_ - 1]) * hemisphere_point(f.cell, f.parity);
}

Vec ZorichMap::invert(const Vec& y) const {
  require_dimension(y, n_, "ZorichMap::invert");
  require_finite(y, "ZorichMap::invert");
  double r = y.norm();
  if (!(r > 0)) throw std::domain_error("ZorichMap::invert: 0 has no preimage");
  double t = std::log(r);
  Vec w = y / r;
  double wn = w[n_ - 1];
  double rho = (2.0 / kPi) * std::acos(std::min(1.0, std::abs(wn)));
  Vec xi = Vec::Zero(n_ - 1);
  double l2 = w.head(n_ - 1).norm();
  if (l2 > 0) {
    Vec u = w.head(n_ - 1) / l2;
    double ninf = u.cwiseAbs().maxCoeff();
    xi = (rho / ninf) * u;
  }
  Vec x(n_);
  x.head(n_ - 1) = xi.array() + z0_;
  if (wn < 0) x[0] = 2.0 * (z0_ + 1.0) - x[0];  // single-reflection neighbour cell
  x[n_ - 1] = t;
  return x;
}

std::vector<Vec> ZorichMap::fiber_near(const Vec& base_prime, const Vec& center_prime,
                                       double radius) const {
  require_dimension(center_prime, n_ - 1, "ZorichMap::fiber_near center");
  FoldResult f = fold(base_prime);
  const int m = n_ - 1;
  // candidate values per coordinate: (value, reflection bit)
  std::vector<std::vector<std::pair<double, int>>> cands(m);
  for (int i = 0; i < m; ++i) {
    double lo = center_prime[i] - radius, hi = center_prime[i] + radius;
    for (int bit = 0; bit < 2; ++bit) {
      double rep = bit == 0 ? f.cell[i] : 2.0 * (z0_ + 1.0) - f.cell[i];
      double k0 = std::ceil((lo - rep) / 4.0);
      for (double k = k0; rep + 4.0 * k <= hi; k += 1.0)
        cands[i].push_back({rep + 4.0 * k, bit});
    }
  }
  std::vector<Vec> out;
  Vec cur(m);
  std::function<void(int, int)> rec = [&](int i, int parity) {
    if (i == m) {
      if (parity % 2 == f.parity % 2) out.push_back(cur);
      return;
    }
    for (const auto& [v, bit] : cands[i]) {
      cur[i] = v;
      rec(i + 1, parity + bit);
    }
  };
  rec(0, 0);
  return out;
}

Vec ZorichMap::nearest_fiber_point(const Vec& base_prime, const Vec& anchor_prime,
                                   double* margin_sq) const {
  require_dimension(anchor_prime, n_ - 1, "ZorichMap::nearest_fiber_point anchor");
  FoldResult f = fold(base_prime);
  const int m = n_ - 1;
  Vec best0(m), best1(m);       // best value per coordinate per family
  Vec cost0(m), cost1(m);
  for (int i = 0; i < m; ++i) {
    double rep0 = f.cell[i];
    double rep1 = 2.0 * (z0_ + 1.0) - f.cell[i];
    best0[i] = nearest_in_family(rep0, anchor_prime[i]);
    best1[i] = nearest_in_family(rep1, anchor_prime[i]);
    cost0[i] = (best0[i] - anchor_prime[i]) * (best0[i] - anchor_prime[i]);
    cost1[i] = (best1[i] - anchor_prime[i]) * (best1[i] - anchor_prime[i]);
  }
  // Valid assignments are the per-coordinate minimum with an even or odd set
  // S of coordinates flipped to the other family, |S| parity matching the
  // fold parity defect. The optimum flips the single cheapest coordinate
  // when the unconstrained minimum has the wrong parity.
  std::vector<int> bits(m);
  int parity = 0;
  for (int i = 0; i < m; ++i) {
    bits[i] = cost1[i] < cost0[i] ? 1 : 0;
    parity ^= bits[i];
  }
  std::vector<double> flip(m);  // cost of moving coordinate i off its family minimum
  for (int i = 0; i < m; ++i) flip[i] = std::abs(cost1[i] - cost0[i]);
  bool need_fix = (parity % 2) != (f.parity % 2);
  int fix_at = -1;
  if (need_fix) {
    fix_at = static_cast<int>(std::min_element(flip.begin(), flip.end()) - flip.begin());
    bits[fix_at] ^= 1;
  }
  Vec result(m);
  for (int i = 0; i < m; ++i) result[i] = bits[i] ? best1[i] : best0[i];
  if (margin_sq) {
    // gap to the best alternative: a lattice move within one family, or the
    // next-cheapest parity-respecting flip set
    double second = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      double d = std::abs(result[i] - anchor_prime[i]);
      second = std::min(second, (4.0 - d) * (4.0 - d) - d * d);
    }
    if (need_fix) {
      for (int i = 0; i < m; ++i)
        if (i != fix_at) second = std::min(second, flip[i] - flip[fix_at]);
    } else if (m >= 2) {
      double s1 = std::numeric_limits<double>::infinity();
      double s2 = std::numeric_limits<double>::infinity();
      for (double v : flip) {
        if (v < s1) {
          s2 = s1;
          s1 = v;
        } else if (v < s2) {
          s2 = v;
        }
      }
      second = std::min(second, s1 + s2);
    }
    *margin_sq = std::max(0.0, second);
  }
  return result;
}

Vec ZorichMap::g_fold(const Vec& x) const {
  require_dimension(x, n_, "ZorichMap::g_fold");
  FoldResult f = fold(x.head(n_ - 1));
  Vec out(n_);
  out.head(n_ - 1) = f.cell;
  if (f.parity % 2 == 1) out[0] = 2.0 * cell_lo() - out[0];  // undo one reflection
  out[n_ - 1] = x[n_ - 1];
  return out;
}

std::pair<Vec, Vec> ZorichMap::g_domain() const {
  Vec lo = Vec::Constant(n_ - 1, cell_lo());
  Vec hi = Vec::Constant(n_ - 1, cell_hi());
  lo[0] = 2.0 * cell_lo() - cell_hi();
  return {lo, hi};
}

double ZorichMap::branch_distance(const Vec& x_prime) const {
  if (n_ == 2) return std::numeric_limits<double>::infinity();
  require_dimension(x_prime, n_ - 1, "ZorichMap::branch_distance");
  // mirrors sit on even integers for n >= 3; the branch set needs two
  // coordinates on mirrors simultaneously
  std::vector<double> wall(n_ - 1);
  for (int i = 0; i < n_ - 1; ++i) {
    double d = std::fmod(std::abs(x_prime[i]), 2.0);
    wall[i] = std::min(d, 2.0 - d);
  }
  std::sort(wall.begin(), wall.end());
  return std::hypot(wall[0], wall[1]);
}

std::vector<std::function<Vec(const Vec&)>> ZorichMap::group_generators() const {
  std::vector<std::function<Vec(const Vec&)>> gens;
  for (int i = 0; i < n_ - 1; ++i) {
    for (double sign : {+4.0, -4.0}) {
      gens.push_back([i, sign](const Vec& x) {
        Vec y = x;
        y[i] += sign;
        return y;
      });
    }
  }
  if (n_ >= 3) {
    for (int i = 0; i < n_ - 1; ++i)
      for (int j = i + 1; j < n_ - 1; ++j)
        gens.push_back([i, j](const Vec& x) {
          Vec y = x;
          y[i] = -y[i];
          y[j] = -y[j];
          return y;
        });
  }
  return gens;
}

// ---------------------------------------------------------------------------
// Path lifting

namespace {

Vec lift_advance(const ZorichMap& Z, Vec cur, const Vec& from_image, const Vec& target_image,
                 int depth, bool is_final, const LiftOptions& opt) {
  const int n = Z.dimension();
  if (target_image.norm() == 0.0)
    throw std::domain_error("lift_path: path passes through 0");
  Vec y0 = Z.invert(target_image);
  if (!is_final && Z.branch_distance(y0.head(n - 1)) < 1e-9)
    throw std::domain_error("lift_path: path meets the branch-set image away from its endpoint");
  double margin_sq = 0;
  Vec cand_prime = Z.nearest_fiber_point(y0.head(n - 1), cur.head(n - 1), &margin_sq);
  Vec cand(n);
  cand.head(n - 1) = cand_prime;
  cand[n - 1] = y0[n - 1];
  double step = (cand - cur).norm();
  double best_sq = (cand.head(n - 1) - cur.head(n - 1)).squaredNorm();
  double gap = std::sqrt(best_sq + margin_sq) - std::sqrt(best_sq);
  if (step <= opt.max_step && (gap > 1e-9 || step <= 1e-7)) return cand;
  if (depth >= opt.max_depth)
    throw LiftRefinementError("lift_path: refinement budget exhausted; supply a finer path");
  Vec mid = 0.5 * (from_image + target_image);
  Vec m = lift_advance(Z, std::move(cur), from_image, mid, depth + 1, false, opt);
  return lift_advance(Z, std::move(m), mid, target_image, depth + 1, is_final, opt);
}

}  // namespace

std::vector<Vec> lift_path(const ZorichMap& Z, const std::vector<Vec>& path, const Vec& start_lift,
                           const LiftOptions& options) {
  if (path.empty()) throw std::invalid_argument("lift_path: empty path");
  const int n = Z.dimension();
  require_dimension(start_lift, n, "lift_path start");
  for (const auto& p : path) {
    require_dimension(p, n, "lift_path vertex");
    if (p.norm() == 0.0) throw std::domain_error("lift_path: path passes through 0");
  }
  double scale = path.front().norm();
  if ((Z.eval(start_lift) - path.front()).norm() > options.start_tol * std::max(1.0, scale))
    throw std::invalid_argument("lift_path: start_lift is not a preimage of the path start");
  std::vector<Vec> lifts;
  lifts.reserve(path.size());
  lifts.push_back(start_lift);
  Vec cur = start_lift;
  for (std::size_t i = 1; i < path.size(); ++i) {
    bool is_final = (i + 1 == path.size());
    cur = lift_advance(Z, cur, path[i - 1], path[i], 0, is_final, options);
    lifts.push_back(cur);
  }
  return lifts;
}

// ---------------------------------------------------------------------------
// PowerMap

PowerMap::PowerMap(ZorichMap zorich, int degree) : zorich_(std::move(zorich)), degree_(degree) {
  if (degree_ < 2) throw std::invalid_argument("PowerMap: degree must be >= 2");
}

long PowerMap::expected_preimage_count() const {
  long c = 1;
  for (int i = 0; i < dimension() - 1; ++i) c *= degree_;
  return c;
}

Vec PowerMap::eval(const Vec& x) const {
  require_dimension(x, dimension(), "PowerMap::eval");
  if (x.norm() == 0.0) return Vec::Zero(dimension());
  Vec y = zorich_.invert(x);
  return zorich_.eval(degree_ * y);
}

PowerMap::Preimages PowerMap::preimages(const Vec& y) const {
  require_dimension(y, dimension(), "PowerMap::preimages");
  const int n = dimension();
  if (y.norm() == 0.0) {
    Preimages out;
    out.points.push_back(Vec::Zero(n));
    out.degenerate = true;
    return out;
  }
  Vec y0 = zorich_.invert(y);
  const int m = n - 1;
  std::vector<int> k(m, 0);
  Preimages out;
  std::map<std::pair<std::vector<long>, int>, bool> seen;
  for (;;) {
    Vec w(n);
    for (int i = 0; i < m; ++i) w[i] = (y0[i] + 4.0 * k[i]) / degree_;
    w[n - 1] = y0[n - 1] / degree_;
    // dedupe by fold data (collapses non-generic coincidences only)
    FoldResult f = zorich_.fold(w.head(m));
    std::vector<long> key(m);
    for (int i = 0; i < m; ++i) key[i] = std::lround(f.cell[i] * 1e9);
    if (!seen.emplace(std::make_pair(key, f.parity), true).second) {
      // duplicate representative
    } else {
      out.points.push_back(zorich_.eval(w));
    }
    int i = 0;
    while (i < m && ++k[i] == degree_) k[i++] = 0;
    if (i == m) break;
  }
  return out;
}

}  // namespace qrmax
