#include "qrmax/geometry.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numbers>

namespace qrmax {

std::string format_g12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

double round_g12(double x) {
  if (!std::isfinite(x)) return x;
  return std::strtod(format_g12(x).c_str(), nullptr);
}

// ---------------------------------------------------------------------------
// StarSurface

StarSurface StarSurface::euclidean_sphere(int n) {
  if (n < 2) throw std::invalid_argument("StarSurface: dimension must be >= 2");
  StarSurface s(n, Kind::EuclideanSphere);
  s.min_radius_ = s.max_radius_ = 1.0;
  return s;
}

StarSurface StarSurface::sup_norm_cube(int n, double scale) {
  if (n < 2) throw std::invalid_argument("StarSurface: dimension must be >= 2");
  if (!(scale > 0)) throw std::invalid_argument("StarSurface: scale must be > 0");
  StarSurface s(n, Kind::SupNormCube);
  s.scale_ = scale;
  s.min_radius_ = scale;                    // along axis directions
  s.max_radius_ = scale * std::sqrt(double(n));  // along diagonals
  return s;
}

StarSurface StarSurface::convex_polygon(std::vector<Vec> vertices) {
  if (vertices.size() < 3) throw std::invalid_argument("StarSurface: polygon needs >= 3 vertices");
  for (const auto& v : vertices) {
    require_dimension(v, 2, "StarSurface polygon vertex");
    require_finite(v, "StarSurface polygon vertex");
    if (v.norm() < 1e-12)
      throw std::invalid_argument("StarSurface: polygon vertex at the origin");
  }
  std::sort(vertices.begin(), vertices.end(), [](const Vec& a, const Vec& b) {
    return std::atan2(a[1], a[0]) < std::atan2(b[1], b[0]);
  });
  StarSurface s(2, Kind::ConvexPolygon);
  s.vertices_ = std::move(vertices);
  s.vertex_angles_.reserve(s.vertices_.size());
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  const std::size_t m = s.vertices_.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Vec& a = s.vertices_[i];
    const Vec& b = s.vertices_[(i + 1) % m];
    // origin strictly inside a convex CCW polygon: every edge turns positively
    double cross = a[0] * b[1] - a[1] * b[0];
    if (cross <= 1e-12)
      throw std::invalid_argument("StarSurface: polygon must be convex with the origin inside");
    s.vertex_angles_.push_back(std::atan2(a[1], a[0]));
    hi = std::max(hi, a.norm());
    // min over the edge: distance from origin to segment ab
    Vec d = b - a;
    double t = std::clamp(-a.dot(d) / d.squaredNorm(), 0.0, 1.0);
    lo = std::min(lo, (a + t * d).norm());
  }
  s.min_radius_ = lo;
  s.max_radius_ = hi;
  return s;
}

double StarSurface::radius(const Vec& direction) const {
  require_dimension(direction, n_, "StarSurface direction");
  double norm = direction.norm();
  if (!(norm > 0)) throw std::invalid_argument("StarSurface: zero direction");
  switch (kind_) {
    case Kind::EuclideanSphere:
      return 1.0;
    case Kind::SupNormCube: {
      Vec u = direction / norm;
      double ninf = u.cwiseAbs().maxCoeff();
      return scale_ / ninf;
    }
    case Kind::ConvexPolygon: {
      double ang = std::atan2(direction[1], direction[0]);
      const std::size_t m = vertices_.size();
      // wedge containing ang: last vertex angle <= ang (wrapping)
      std::size_t i = std::upper_bound(vertex_angles_.begin(), vertex_angles_.end(), ang) -
                      vertex_angles_.begin();
      std::size_t a = (i + m - 1) % m;
      const Vec& va = vertices_[a];
      const Vec& vb = vertices_[(a + 1) % m];
      // solve t*u = va + s*(vb - va)
      Vec u = direction / norm;
      Eigen::Matrix2d A;
      A << u[0], va[0] - vb[0], u[1], va[1] - vb[1];
      Eigen::Vector2d rhs(va[0], va[1]);
      Eigen::Vector2d sol = A.colPivHouseholderQr().solve(rhs);
      return sol[0];
    }
  }
  return 1.0;
}

Vec radial_star_map(const StarSurface& surface, const Vec& x) {
  require_dimension(x, surface.dimension(), "radial_star_map");
  require_finite(x, "radial_star_map");
  double norm = x.norm();
  if (norm == 0.0) return Vec::Zero(x.size());
  return surface.radius(x) * x;
}

Vec radial_star_inverse(const StarSurface& surface, const Vec& y) {
  require_dimension(y, surface.dimension(), "radial_star_inverse");
  require_finite(y, "radial_star_inverse");
  double norm = y.norm();
  if (norm == 0.0) return Vec::Zero(y.size());
  return y / surface.radius(y);
}

// ---------------------------------------------------------------------------
// SpatialIndex

namespace {
constexpr std::size_t kLeafSize = 12;
}

SpatialIndex::SpatialIndex(std::vector<Vec> points) : points_(std::move(points)) {
  if (points_.empty())
    throw std::invalid_argument("SpatialIndex: point set must be non-empty");
  dim_ = static_cast<int>(points_[0].size());
  for (const auto& p : points_) {
    require_dimension(p, dim_, "SpatialIndex point");
    require_finite(p, "SpatialIndex point");
  }
  order_.resize(points_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
  nodes_.reserve(2 * points_.size() / kLeafSize + 4);
  root_ = build(0, points_.size());
}

int SpatialIndex::build(std::size_t begin, std::size_t end) {
  Node node;
  node.begin = begin;
  node.end = end;
  node.box_lo = points_[order_[begin]];
  node.box_hi = points_[order_[begin]];
  for (std::size_t i = begin + 1; i < end; ++i) {
    node.box_lo = node.box_lo.cwiseMin(points_[order_[i]]);
    node.box_hi = node.box_hi.cwiseMax(points_[order_[i]]);
  }
  int id = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  if (end - begin <= kLeafSize) return id;

  int axis = 0;
  (node.box_hi - node.box_lo).maxCoeff(&axis);
  std::size_t mid = (begin + end) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::size_t a, std::size_t b) { return points_[a][axis] < points_[b][axis]; });
  double split = points_[order_[mid]][axis];

  int left = build(begin, mid);
  int right = build(mid, end);
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

namespace {
double box_distance(const Vec& q, const Vec& lo, const Vec& hi) {
  double s = 0;
  for (int i = 0; i < q.size(); ++i) {
    double d = 0;
    if (q[i] < lo[i]) d = lo[i] - q[i];
    else if (q[i] > hi[i]) d = q[i] - hi[i];
    s += d * d;
  }
  return std::sqrt(s);
}
}  // namespace

void SpatialIndex::search(int id, const Vec& q, double& best, std::size_t& best_idx) const {
  const Node& node = nodes_[id];
  if (box_distance(q, node.box_lo, node.box_hi) >= best) return;
  if (node.axis < 0) {
    for (std::size_t i = node.begin; i < node.end; ++i) {
      std::size_t idx = order_[i];
      double d = (points_[idx] - q).norm();
      // deterministic tie-break: smaller stored index wins
      if (d < best || (d == best && idx < best_idx)) {
        best = d;
        best_idx = idx;
      }
    }
    return;
  }
  int first = node.left, second = node.right;
  if (q[node.axis] > node.split) std::swap(first, second);
  search(first, q, best, best_idx);
  search(second, q, best, best_idx);
}

void SpatialIndex::search2(int id, const Vec& q, double& best1, double& best2) const {
  const Node& node = nodes_[id];
  if (box_distance(q, node.box_lo, node.box_hi) >= best2) return;
  if (node.axis < 0) {
    for (std::size_t i = node.begin; i < node.end; ++i) {
      double d = (points_[order_[i]] - q).norm();
      if (d < best1) {
        best2 = best1;
        best1 = d;
      } else if (d < best2) {
        best2 = d;
      }
    }
    return;
  }
  int first = node.left, second = node.right;
  if (q[node.axis] > node.split) std::swap(first, second);
  search2(first, q, best1, best2);
  search2(second, q, best1, best2);
}

SpatialIndex::Hit SpatialIndex::nearest(const Vec& query) const {
  require_dimension(query, dim_, "SpatialIndex query");
  require_finite(query, "SpatialIndex query");
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_idx = 0;
  search(root_, query, best, best_idx);
  return {best, best_idx};
}

std::pair<double, double> SpatialIndex::two_nearest(const Vec& query) const {
  require_dimension(query, dim_, "SpatialIndex query");
  double best1 = std::numeric_limits<double>::infinity();
  double best2 = std::numeric_limits<double>::infinity();
  search2(root_, query, best1, best2);
  if (!std::isfinite(best2)) best2 = best1;
  return {best1, best2};
}

std::pair<double, Vec> nearest_distance(const SpatialIndex& index, const Vec& y) {
  auto hit = index.nearest(y);
  return {hit.distance, index.point(hit.index)};
}

double hausdorff_distance(const std::vector<Vec>& a, const std::vector<Vec>& b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("hausdorff_distance: inputs must be non-empty");
  SpatialIndex ia(a), ib(b);
  double h = 0;
  for (const auto& p : a) h = std::max(h, ib.nearest(p).distance);
  for (const auto& q : b) h = std::max(h, ia.nearest(q).distance);
  return h;
}

// ---------------------------------------------------------------------------
// Sphere sampling

std::vector<Vec> circle_grid(double r, int count) {
  if (count < 1) throw std::invalid_argument("circle_grid: count must be >= 1");
  std::vector<Vec> out;
  out.reserve(count);
  for (int j = 0; j < count; ++j) {
    double th = 2.0 * std::numbers::pi * j / count;
    Vec p(2);
    p << r * std::cos(th), r * std::sin(th);
    out.push_back(p);
  }
  return out;
}

std::vector<Vec> fibonacci_sphere(double r, int count) {
  if (count < 1) throw std::invalid_argument("fibonacci_sphere: count must be >= 1");
  std::vector<Vec> out;
  out.reserve(count);
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  for (int j = 0; j < count; ++j) {
    double z = 1.0 - (2.0 * j + 1.0) / count;
    double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    double th = 2.0 * std::numbers::pi * j / golden;
    Vec p(3);
    p << r * rho * std::cos(th), r * rho * std::sin(th), r * z;
    out.push_back(p);
  }
  return out;
}

std::vector<Vec> sphere_grid(int n, double r, int count) {
  if (n < 2) throw std::invalid_argument("sphere_grid: dimension must be >= 2");
  if (r == 0.0) return {Vec::Zero(n)};
  if (n == 2) return circle_grid(r, count);
  if (n == 3) return fibonacci_sphere(r, count);
  // n >= 4: deterministic seeded directions
  Rng rng(0x5ca1ab1eULL);
  std::vector<Vec> out;
  out.reserve(count);
  for (int j = 0; j < count; ++j) out.push_back(r * random_unit(rng, n));
  return out;
}

double sphere_grid_spacing(int n, double r, int count) {
  if (r == 0.0) return 0.0;
  if (n == 2) return 2.0 * std::numbers::pi * r / count;
  // area-based estimate for n == 3, crude extension beyond
  return r * std::sqrt(4.0 * std::numbers::pi / count);
}

}  // namespace qrmax
