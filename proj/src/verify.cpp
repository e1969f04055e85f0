#include "qrmax/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qrmax/parallel.hpp"

namespace qrmax {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// golden-section maximisation of g on [a, b]
template <class F>
std::pair<double, int> golden_max(F&& g, double a, double b, int max_iters) {
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double gc = g(c), gd = g(d);
  int evals = 2;
  for (int i = 0; i < max_iters && (b - a) > 1e-13; ++i) {
    if (gc > gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - gr * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + gr * (b - a);
      gd = g(d);
    }
    ++evals;
  }
  return {std::max(gc, gd), evals};
}

// Nelder-Mead maximisation of g around 0 in R^k with a fixed evaluation budget
template <class F>
std::pair<double, int> nelder_mead_max(F&& g, int k, double scale, int budget) {
  std::vector<Vec> simplex;
  std::vector<double> vals;
  simplex.push_back(Vec::Zero(k));
  for (int i = 0; i < k; ++i) {
    Vec v = Vec::Zero(k);
    v[i] = scale;
    simplex.push_back(v);
  }
  int evals = 0;
  auto val = [&](const Vec& v) {
    ++evals;
    return g(v);
  };
  for (auto& s : simplex) vals.push_back(val(s));
  while (evals < budget) {
    // sort ascending (we maximise, so the best is the back)
    std::vector<std::size_t> idx(simplex.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    std::vector<Vec> s2;
    std::vector<double> v2;
    for (auto i : idx) {
      s2.push_back(simplex[i]);
      v2.push_back(vals[i]);
    }
    simplex = s2;
    vals = v2;
    Vec centroid = Vec::Zero(k);
    for (std::size_t i = 1; i < simplex.size(); ++i) centroid += simplex[i];
    centroid /= double(simplex.size() - 1);
    Vec worst = simplex[0];
    Vec refl = centroid + (centroid - worst);
    double fr = val(refl);
    if (fr > vals.back()) {
      Vec expand = centroid + 2.0 * (centroid - worst);
      double fe = val(expand);
      if (fe > fr) {
        simplex[0] = expand;
        vals[0] = fe;
      } else {
        simplex[0] = refl;
        vals[0] = fr;
      }
    } else if (fr > vals[1]) {
      simplex[0] = refl;
      vals[0] = fr;
    } else {
      Vec contract = centroid + 0.5 * (worst - centroid);
      double fc = val(contract);
      if (fc > vals[0]) {
        simplex[0] = contract;
        vals[0] = fc;
      } else {
        for (std::size_t i = 0; i + 1 < simplex.size(); ++i) {
          simplex[i] = simplex.back() + 0.5 * (simplex[i] - simplex.back());
          vals[i] = val(simplex[i]);
        }
      }
    }
  }
  return {*std::max_element(vals.begin(), vals.end()), evals};
}

// orthonormal tangent frame at a nonzero point
std::vector<Vec> tangent_frame(const Vec& p) {
  const int n = static_cast<int>(p.size());
  Vec u = p / p.norm();
  std::vector<Vec> frame;
  int pivot = 0;
  u.cwiseAbs().minCoeff(&pivot);
  Vec prev = u;
  for (int i = 0; i < n && static_cast<int>(frame.size()) < n - 1; ++i) {
    Vec e = Vec::Zero(n);
    e[(pivot + i) % n] = 1.0;
    Vec v = e - u.dot(e) * u;
    for (const auto& f : frame) v -= f.dot(v) * f;
    double norm = v.norm();
    if (norm > 1e-9) frame.push_back(v / norm);
  }
  return frame;
}
}  // namespace

MaxModResult max_modulus(const MapExpr& f, double r, const MaxModBudget& budget) {
  if (!(r >= 0)) throw std::domain_error("max_modulus: r must be >= 0");
  if (budget.samples < 1) throw std::invalid_argument("max_modulus: sample budget must be >= 1");
  const int n = f.dimension;
  MaxModResult result;
  result.r = r;
  if (r == 0.0) {
    Vec origin = Vec::Zero(n);
    result.m_est = result.m_grid = f(origin).norm();
    result.argmax.push_back(origin);
    result.argmax_indices.push_back(0);
    return result;
  }
  std::vector<Vec> pts = sphere_grid(n, r, budget.samples);
  const std::size_t N = pts.size();
  std::vector<double> vals(N);
  parallel_for_index(N, [&](std::size_t i) { vals[i] = f(pts[i]).norm(); });

  std::size_t best = 0;
  for (std::size_t i = 1; i < N; ++i)
    if (vals[i] > vals[best]) best = i;
  result.m_grid = vals[best];
  result.resolution = sphere_grid_spacing(n, r, budget.samples);

  // resolution-adjusted argmax band: the drop from the peak to its highest
  // neighbouring sample, cushioned by (1 + 1e-9), with a relative floor
  double neighbor_best = -kInf;
  if (n == 2 && N >= 2) {
    neighbor_best = std::max(vals[(best + 1) % N], vals[(best + N - 1) % N]);
  } else {
    for (std::size_t i = 0; i < N; ++i) {
      if (i == best) continue;
      double d = (pts[i] - pts[best]).norm();
      if (d <= 2.2 * result.resolution) neighbor_best = std::max(neighbor_best, vals[i]);
    }
  }
  double gap = neighbor_best > -kInf ? std::max(0.0, result.m_grid - neighbor_best) : 0.0;
  double floor = budget.argmax_rel_floor * std::max(result.m_grid, 1e-300);
  double threshold = result.m_grid - ((1.0 + 1e-9) * gap + floor);

  // local refinement in a sphere chart around the best sample
  result.m_est = result.m_grid;
  if (budget.refine_iters > 0) {
    if (n == 2) {
      double th_best = std::atan2(pts[best][1], pts[best][0]);
      double half = 2.0 * kPi / budget.samples;
      auto g = [&](double th) {
        Vec p(2);
        p << r * std::cos(th), r * std::sin(th);
        return f(p).norm();
      };
      auto [m, evals] = golden_max(g, th_best - half, th_best + half, budget.refine_iters);
      result.m_est = std::max(result.m_est, m);
      result.iterations = evals;
    } else {
      auto frame = tangent_frame(pts[best]);
      auto g = [&](const Vec& ab) {
        Vec p = pts[best];
        for (std::size_t i = 0; i < frame.size(); ++i) p += ab[i] * frame[i];
        p *= r / p.norm();
        return f(p).norm();
      };
      auto [m, evals] =
          nelder_mead_max(g, n - 1, 0.5 * result.resolution, budget.refine_iters);
      result.m_est = std::max(result.m_est, m);
      result.iterations = evals;
    }
  }

  result.tol_used = result.m_est - threshold;
  for (std::size_t i = 0; i < N; ++i) {
    if (vals[i] >= threshold) {
      result.argmax.push_back(pts[i]);
      result.argmax_indices.push_back(i);
    }
  }
  return result;
}

MMSExtract extract_mms(const MapExpr& f, std::vector<double> grid, const MaxModBudget& budget,
                       const GrowthSchedule* schedule) {
  MMSExtract out;
  if (grid.empty()) return out;
  std::sort(grid.begin(), grid.end());
  out.grid = std::move(grid);
  out.per_radius.reserve(out.grid.size());
  for (double r : out.grid) {
    out.per_radius.push_back(max_modulus(f, r, budget));
    out.in_exceptional.push_back(schedule ? schedule->in_exceptional(r) : false);
    const auto& am = out.per_radius.back().argmax;
    out.points.insert(out.points.end(), am.begin(), am.end());
  }
  return out;
}

TargetComparison compare_to_target(const MMSExtract& extract, const ClosedSetOracle& T,
                                   bool exclude_exceptional, int section_count) {
  TargetComparison cmp;
  if (T.distance_mode() == DistanceMode::CloudApproximate)
    cmp.note =
        "point-cloud target: the map realizes the sample cloud closure as its maximum "
        "modulus set; bounds include the cloud resolution";
  for (std::size_t i = 0; i < extract.grid.size(); ++i) {
    const MaxModResult& mm = extract.per_radius[i];
    TargetComparison::Row row;
    row.r = extract.grid[i];
    if (exclude_exceptional && extract.in_exceptional[i]) {
      row.skipped = true;
      row.hausdorff = std::numeric_limits<double>::quiet_NaN();
      cmp.rows.push_back(row);
      continue;
    }
    SphereSection sec = T.sphere_section(row.r, std::max(section_count, 1));
    row.bound = 2.0 * std::max(mm.resolution, sec.resolution) + T.tolerance();
    row.hausdorff = hausdorff_distance(mm.argmax, sec.samples);
    row.pass = row.hausdorff <= row.bound;
    cmp.max_hausdorff = std::max(cmp.max_hausdorff, row.hausdorff);
    cmp.max_bound = std::max(cmp.max_bound, row.bound);
    cmp.pass = cmp.pass && row.pass;
    cmp.rows.push_back(row);
  }
  return cmp;
}

DistortionReport distortion_probe(const MapExpr& f, const std::vector<Vec>& samples,
                                  double probe_radius, DistortionMode mode, int sphere_samples) {
  if (!(probe_radius > 0))
    throw std::invalid_argument("distortion_probe: probe radius must be > 0");
  DistortionReport report;
  report.probe_radius = probe_radius;
  report.mode = mode;
  const int n = f.dimension;

  std::vector<std::optional<DistortionReport::Entry>> slots(samples.size());
  std::vector<char> excluded(samples.size(), 0);
  parallel_for_index(samples.size(), [&](std::size_t i) {
    const Vec& x = samples[i];
    if (mode == DistortionMode::Jacobian && f.smooth_clearance(x) < 1e-6) {
      excluded[i] = 1;
      return;
    }
    DistortionReport::Entry e;
    e.point = x;
    if (mode == DistortionMode::Jacobian) {
      Mat J(n, n);
      for (int j = 0; j < n; ++j) {
        Vec hplus = x, hminus = x;
        hplus[j] += probe_radius;
        hminus[j] -= probe_radius;
        J.col(j) = (f(hplus) - f(hminus)) / (2.0 * probe_radius);
      }
      Eigen::JacobiSVD<Mat> svd(J);
      double smax = svd.singularValues()(0);
      double smin = svd.singularValues()(n - 1);
      if (!(smin > 1e-14 * smax)) {
        e.degenerate = true;
        e.value = kInf;
      } else {
        e.value = smax / smin;
      }
    } else {
      Vec f0 = f(x);
      double lo = kInf, hi = 0.0;
      for (const auto& d : sphere_grid(n, probe_radius, sphere_samples)) {
        double v = (f(x + d) - f0).norm();
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (!(lo > 0)) {
        e.degenerate = true;
        e.value = kInf;
      } else {
        e.value = hi / lo;
      }
    }
    slots[i] = std::move(e);
  });
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (excluded[i])
      report.excluded.push_back(samples[i]);
    else if (slots[i])
      report.entries.push_back(std::move(*slots[i]));
  }
  std::vector<double> vals;
  for (const auto& e : report.entries)
    if (!e.degenerate) vals.push_back(e.value);
  if (!vals.empty()) {
    std::sort(vals.begin(), vals.end());
    report.min = vals.front();
    report.max = vals.back();
    report.median = vals[vals.size() / 2];
    report.p95 = vals[std::min(vals.size() - 1, (std::size_t)std::ceil(0.95 * vals.size()))];
  }
  return report;
}

double lipschitz_probe(const std::function<double(const Vec&)>& fn,
                       const std::vector<std::pair<Vec, Vec>>& pairs) {
  double worst = 0.0;
  for (const auto& [x, y] : pairs) {
    double d = (x - y).norm();
    if (d < 1e-15) continue;  // coincident pair
    worst = std::max(worst, std::abs(fn(x) - fn(y)) / d);
  }
  return worst;
}

double winding_degree(const MapExpr& f, double r, int samples) {
  if (f.dimension != 2) throw std::invalid_argument("winding_degree: n = 2 only");
  if (samples < 8) throw std::invalid_argument("winding_degree: too few samples");
  std::vector<double> angles(samples);
  std::vector<Vec> pts = circle_grid(r, samples);
  std::vector<Vec> imgs(samples);
  parallel_for_index(samples, [&](std::size_t i) { imgs[i] = f(pts[i]); });
  for (int i = 0; i < samples; ++i) {
    if (imgs[i].norm() == 0.0)
      throw std::domain_error("winding_degree: image passes through 0 on the sampled circle");
    angles[i] = std::atan2(imgs[i][1], imgs[i][0]);
  }
  double total = 0.0;
  for (int i = 0; i < samples; ++i) {
    double d = angles[(i + 1) % samples] - angles[i];
    while (d > kPi) d -= 2.0 * kPi;
    while (d <= -kPi) d += 2.0 * kPi;
    total += d;
  }
  return total / (2.0 * kPi);
}

}  // namespace qrmax
