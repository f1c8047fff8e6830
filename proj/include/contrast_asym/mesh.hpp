#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "contrast_asym/error.hpp"
#include "contrast_asym/geometry.hpp"

namespace contrast_asym {

struct Triangle {
  std::array<int, 3> v{};
  Region tag = Region::background;
};

struct BoundaryEdge {
  int a = 0;
  int b = 0;
  int gamma = 0;
};

/// Conforming P1 triangulation with region and boundary tags.
struct Mesh {
  std::vector<Point> vertices;
  std::vector<Triangle> triangles;
  std::vector<BoundaryEdge> boundary;
  double h = 0.0;
  /// Periodic identification: vertex → representative vertex. Empty when not periodic.
  std::vector<int> periodic_master;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_triangles() const { return triangles.size(); }
  bool periodic() const { return !periodic_master.empty(); }
};

/// Geometric quantities of one triangle.
struct TriGeom {
  double area = 0.0;
  std::array<Point, 3> grad{};  ///< gradients of the barycentric basis functions
  Point centroid{};
};

inline TriGeom tri_geom(const Mesh& m, std::size_t t) {
  const auto& v = m.triangles[t].v;
  const Point p0 = m.vertices[v[0]], p1 = m.vertices[v[1]], p2 = m.vertices[v[2]];
  const double det = cross(p1 - p0, p2 - p0);
  TriGeom g;
  g.area = 0.5 * det;
  const double inv = 1.0 / det;
  g.grad[0] = {(p1[1] - p2[1]) * inv, (p2[0] - p1[0]) * inv};
  g.grad[1] = {(p2[1] - p0[1]) * inv, (p0[0] - p2[0]) * inv};
  g.grad[2] = {(p0[1] - p1[1]) * inv, (p1[0] - p0[0]) * inv};
  g.centroid = {(p0[0] + p1[0] + p2[0]) / 3.0, (p0[1] + p1[1] + p2[1]) / 3.0};
  return g;
}

inline double min_angle_degrees(const Mesh& m, std::size_t t) {
  const auto& v = m.triangles[t].v;
  double best = 180.0;
  for (int k = 0; k < 3; ++k) {
    const Point a = m.vertices[v[k]], b = m.vertices[v[(k + 1) % 3]], c = m.vertices[v[(k + 2) % 3]];
    const Point u = b - a, w = c - a;
    const double ang = std::atan2(std::abs(cross(u, w)), dot<2>(u, w));
    best = std::min(best, ang * 180.0 / std::numbers::pi);
  }
  return best;
}

inline double min_angle_degrees(const Mesh& m) {
  double best = 180.0;
  for (std::size_t t = 0; t < m.triangles.size(); ++t) best = std::min(best, min_angle_degrees(m, t));
  return best;
}

inline std::vector<char> boundary_vertex_mask(const Mesh& m) {
  std::vector<char> mask(m.vertices.size(), 0);
  for (const auto& e : m.boundary) mask[e.a] = mask[e.b] = 1;
  return mask;
}

inline std::vector<std::size_t> inclusion_triangles(const Mesh& m) {
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < m.triangles.size(); ++t)
    if (m.triangles[t].tag != Region::background) out.push_back(t);
  return out;
}

inline double boundary_length(const Mesh& m) {
  double s = 0.0;
  for (const auto& e : m.boundary) s += distance(m.vertices[e.a], m.vertices[e.b]);
  return s;
}

/// Re-tags every triangle by the family region at its centroid.
inline Mesh retag(Mesh m, const InclusionFamily& f, int n) {
  const Snapshot snap(f, n);
  for (std::size_t t = 0; t < m.triangles.size(); ++t) m.triangles[t].tag = snap.region_at(tri_geom(m, t).centroid);
  return m;
}

// ---------------------------------------------------------------------------
// Ring meshes

namespace detail {

struct RingSpec {
  std::vector<double> s;   ///< ring parameters, ascending
  std::vector<int> count;  ///< nodes per ring; count[0] == 1 for a point centre
  std::function<Point(double, double)> map;
  bool segment_centre = false;  ///< ring 0 folds onto a segment: node j ≡ node count[0] − j
  /// Optional blend of the last rings onto a box for a periodic cell; half-widths (lx, ly).
  int box_rings = 0;
  double box_lx = 0.0;
  double box_ly = 0.0;
};

/// Point on the boundary of the box [−lx, lx]×[−ly, ly], linear in the angle on each half side.
inline Point box_point(double lx, double ly, double theta) {
  const double q = std::numbers::pi / 4.0;
  double t = std::fmod(theta, 2.0 * std::numbers::pi);
  if (t < 0) t += 2.0 * std::numbers::pi;
  const int raw = int(std::floor((t + q) / (2.0 * q)));
  const int side = raw % 4;
  const double local = (t - raw * 2.0 * q) / q;  // in [−1, 1)
  switch (side) {
    case 0: return {lx, ly * local};
    case 1: return {-lx * local, ly};
    case 2: return {-lx, -ly * local};
    default: return {lx * local, -ly};
  }
}

inline void add_oriented(Mesh& m, int a, int b, int c, Region tag) {
  const double ar = cross(m.vertices[b] - m.vertices[a], m.vertices[c] - m.vertices[a]);
  if (ar == 0.0) throw Error(ErrorCode::invalid_family, "degenerate triangle in ring mesh");
  if (ar > 0) m.triangles.push_back({{a, b, c}, tag});
  else m.triangles.push_back({{a, c, b}, tag});
}

inline Mesh ring_mesh(const RingSpec& spec, double h) {
  Mesh m;
  m.h = h;
  const int rings = int(spec.s.size());
  const int total = rings + spec.box_rings;
  std::vector<std::vector<int>> ids(total);
  auto counts = spec.count;
  for (int k = 0; k < spec.box_rings; ++k) counts.push_back(spec.count.back());

  for (int k = 0; k < total; ++k) {
    const int nk = counts[k];
    ids[k].resize(nk);
    for (int j = 0; j < nk; ++j) {
      const double th = 2.0 * std::numbers::pi * j / nk;
      if (k == 0 && spec.segment_centre && j > nk / 2) {
        ids[k][j] = ids[k][nk - j];
        continue;
      }
      Point p;
      if (k < rings) {
        p = spec.map(spec.s[k], th);
      } else {
        const double t = double(k - rings + 1) / spec.box_rings;
        const Point c = spec.map(spec.s.back(), th);
        const Point b = box_point(spec.box_lx, spec.box_ly, th);
        p = (1.0 - t) * c + t * b;
        if (k == total - 1) p = b;
      }
      ids[k][j] = int(m.vertices.size());
      m.vertices.push_back(p);
    }
  }

  for (int k = 0; k + 1 < total; ++k) {
    const auto& in = ids[k];
    const auto& out = ids[k + 1];
    const int a = int(in.size()), b = int(out.size());
    if (a == 1) {
      for (int j = 0; j < b; ++j) add_oriented(m, in[0], out[j], out[(j + 1) % b], Region::background);
      continue;
    }
    int i = 0, j = 0;
    while (i < a || j < b) {
      const double ai = double(i + 1) / a, bj = double(j + 1) / b;
      bool inner = j == b || (i < a && ai <= bj);
      if (i < a && j < b) {
        // A folded centre puts inner nodes on a segment; never close a triangle along it.
        const Point p = m.vertices[in[i % a]];
        const Point q = inner ? m.vertices[in[(i + 1) % a]] : m.vertices[out[(j + 1) % b]];
        const double ar = cross(q - p, m.vertices[out[j % b]] - p);
        if (std::abs(ar) <= 1e-12 * distance(q, p) * distance(m.vertices[out[j % b]], p)) inner = !inner;
      }
      if (inner) {
        add_oriented(m, in[i % a], in[(i + 1) % a], out[j % b], Region::background);
        ++i;
      } else {
        add_oriented(m, in[i % a], out[(j + 1) % b], out[j % b], Region::background);
        ++j;
      }
    }
  }

  const auto& last = ids[total - 1];
  const int nl = int(last.size());
  for (int j = 0; j < nl; ++j) m.boundary.push_back({last[j], last[(j + 1) % nl], 0});

  if (spec.box_rings > 0) {
    std::vector<int> parent(m.vertices.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    auto unite = [&](int x, int y) {
      x = find(x), y = find(y);
      if (x != y) parent[std::max(x, y)] = std::min(x, y);
    };
    if (nl % 8 != 0) throw Error(ErrorCode::invalid_family, "periodic ring count must be divisible by 8");
    for (int j = 0; j < nl; ++j) {
      const Point p = m.vertices[last[j]];
      if (std::abs(std::abs(p[0]) - spec.box_lx) < 1e-12) unite(last[j], last[((nl / 2 - j) % nl + nl) % nl]);
      if (std::abs(std::abs(p[1]) - spec.box_ly) < 1e-12) unite(last[j], last[(nl - j) % nl]);
    }
    m.periodic_master.resize(m.vertices.size());
    for (std::size_t v = 0; v < m.vertices.size(); ++v) m.periodic_master[v] = find(int(v));
  }
  return m;
}

inline int ring_count(double length, double spacing) {
  const int c = int(std::ceil(length / (8.0 * spacing) - 1e-9));
  return 8 * std::max(1, c);
}

/// Subdivides [a, b] into pieces no longer than `step`, endpoints included.
inline void subdivide(std::vector<double>& out, double a, double b, double step) {
  const int m = std::max(1, int(std::ceil((b - a) / step - 1e-9)));
  for (int k = 1; k <= m; ++k) out.push_back(k == m ? b : a + (b - a) * k / m);
}

/// Steps growing by 1.2 from `step` up to `cap`, rescaled to end exactly at b.
inline void subdivide_graded(std::vector<double>& out, double a, double b, double step, double cap) {
  std::vector<double> steps;
  double x = a;
  while (x < b - 1e-12) {
    step = std::min(1.2 * step, cap);
    steps.push_back(step);
    x += step;
  }
  if (steps.size() > 1 && x - b > 0.5 * steps.back()) {
    x -= steps.back();
    steps.pop_back();
  }
  const double scale = (b - a) / (x - a);
  x = a;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    x = i + 1 == steps.size() ? b : x + scale * steps[i];
    out.push_back(x);
  }
}

}  // namespace detail

struct PeriodicCell {
  double half_x = 0.0;
  double half_y = 0.0;
};

/// Polar mesh of B(c, radius) conforming to the given interface radii.
/// With coarsen > 1 and no periodic cell, the spacing outside the last interface grows to coarsen·h.
inline Mesh polar_mesh(Point center, double radius, std::vector<double> interfaces, double h,
                       const PeriodicCell* cell = nullptr, double coarsen = 1.0) {
  if (!(h > 0.0)) throw Error(ErrorCode::config, "mesh size must be positive");
  std::sort(interfaces.begin(), interfaces.end());
  std::vector<double> req{0.0};
  for (double r : interfaces)
    if (r > 1e-12 && r < radius - 1e-12 && std::abs(r - req.back()) > 1e-12) req.push_back(r);
  req.push_back(radius);
  detail::RingSpec spec;
  spec.s = {0.0};
  const bool graded = coarsen > 1.0 && !cell && req.size() > 2;
  for (std::size_t k = 0; k + 1 < req.size(); ++k) {
    if (graded && k + 2 == req.size()) detail::subdivide_graded(spec.s, req[k], req[k + 1], h, coarsen * h);
    else detail::subdivide(spec.s, req[k], req[k + 1], h);
  }
  spec.count = {1};
  for (std::size_t k = 1; k < spec.s.size(); ++k) {
    const double local = graded ? std::max(h, spec.s[k] - spec.s[k - 1]) : h;
    spec.count.push_back(detail::ring_count(2.0 * std::numbers::pi * spec.s[k], local));
  }
  spec.map = [center](double r, double th) { return Point{center[0] + r * std::cos(th), center[1] + r * std::sin(th)}; };
  if (cell) {
    const double gap = std::max(cell->half_x, cell->half_y) - radius;
    spec.box_rings = std::max(1, int(std::ceil(gap / h)));
    spec.box_lx = cell->half_x;
    spec.box_ly = cell->half_y;
    if (center[0] != 0.0 || center[1] != 0.0)
      throw Error(ErrorCode::invalid_family, "periodic cells need a centred domain");
  }
  return detail::ring_mesh(spec, h);
}

/// Elliptic-coordinate mesh of {ξ < ξ₀} (foci ±1) conforming to the levels ξ = interfaces.
inline Mesh elliptic_mesh(double xi0, std::vector<double> interfaces, double h,
                          const PeriodicCell* cell = nullptr) {
  if (!(h > 0.0)) throw Error(ErrorCode::config, "mesh size must be positive");
  std::sort(interfaces.begin(), interfaces.end());
  std::vector<double> req{0.0};
  for (double x : interfaces)
    if (x > 1e-12 && x < xi0 - 1e-12 && std::abs(x - req.back()) > 1e-12) req.push_back(x);
  req.push_back(xi0);
  const double inner = req.size() > 2 ? req[1] : std::min(h, xi0);

  detail::RingSpec spec;
  spec.s = {0.0};
  detail::subdivide(spec.s, 0.0, req[1], std::min(0.5 * inner, h));
  const double growth = 1.25;
  for (std::size_t k = 1; k + 1 < req.size(); ++k) {
    const double a = req[k], b = req[k + 1];
    double step = spec.s.back() - spec.s[spec.s.size() - 2];
    std::vector<double> steps;
    double x = a;
    while (x < b - 1e-12) {
      step = std::min(growth * step, h / std::cosh(x));
      steps.push_back(step);
      x += step;
    }
    if (steps.size() > 1 && x - b > 0.5 * steps.back()) {
      x -= steps.back();
      steps.pop_back();
    }
    const double scale = (b - a) / (x - a);
    x = a;
    for (std::size_t i = 0; i < steps.size(); ++i) {
      x = i + 1 == steps.size() ? b : x + scale * steps[i];
      spec.s.push_back(x);
    }
  }
  const int rings = int(spec.s.size());
  spec.count.resize(rings);
  for (int k = 0; k < rings; ++k) {
    double gap = std::numeric_limits<double>::infinity();
    if (k > 0) gap = std::min(gap, spec.s[k] - spec.s[k - 1]);
    if (k + 1 < rings) gap = std::min(gap, spec.s[k + 1] - spec.s[k]);
    const double step = std::min(gap, h / std::cosh(spec.s[k]));
    spec.count[k] = detail::ring_count(2.0 * std::numbers::pi, step);
  }
  for (int k = rings - 2; k >= 0; --k) spec.count[k] = std::max(spec.count[k], spec.count[k + 1] / 2 / 8 * 8);
  for (int k = 1; k < rings; ++k) spec.count[k] = std::max(spec.count[k], spec.count[k - 1] / 2 / 8 * 8);
  spec.segment_centre = true;
  spec.map = [](double xi, double eta) { return Point{std::cosh(xi) * std::cos(eta), std::sinh(xi) * std::sin(eta)}; };
  if (cell) {
    const double gap = std::max(cell->half_x - std::cosh(xi0), cell->half_y - std::sinh(xi0));
    spec.box_rings = std::max(1, int(std::ceil(gap / h)));
    spec.box_lx = cell->half_x;
    spec.box_ly = cell->half_y;
  }
  return detail::ring_mesh(spec, h);
}

// ---------------------------------------------------------------------------
// Tensor-grid meshes

namespace detail {

inline std::vector<double> grid_lines(std::vector<double> req, double lo, double hi, double h) {
  req.push_back(lo);
  req.push_back(hi);
  std::sort(req.begin(), req.end());
  std::vector<double> uniq;
  for (double x : req) {
    if (x < lo - 1e-12 || x > hi + 1e-12) continue;
    if (uniq.empty() || x - uniq.back() > 1e-12) uniq.push_back(x);
  }
  std::vector<double> out{uniq.front()};
  for (std::size_t k = 0; k + 1 < uniq.size(); ++k) subdivide(out, uniq[k], uniq[k + 1], h);
  return out;
}

}  // namespace detail

/// Structured triangulation of a rectangle with grid lines through the required coordinates.
inline Mesh rectangle_grid_mesh(Point lo, Point hi, const std::vector<double>& xs_req,
                                const std::vector<double>& ys_req, double h,
                                const std::function<Point(Point)>& warp = nullptr, bool periodic = false) {
  if (!(h > 0.0)) throw Error(ErrorCode::config, "mesh size must be positive");
  const auto xs = detail::grid_lines(xs_req, lo[0], hi[0], h);
  const auto ys = detail::grid_lines(ys_req, lo[1], hi[1], h);
  const int nx = int(xs.size()), ny = int(ys.size());
  Mesh m;
  m.h = h;
  m.vertices.reserve(std::size_t(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const Point p{xs[i], ys[j]};
      m.vertices.push_back(warp ? warp(p) : p);
    }
  auto id = [nx](int i, int j) { return j * nx + i; };
  const double cx = 0.5 * (lo[0] + hi[0]), cy = 0.5 * (lo[1] + hi[1]);
  for (int j = 0; j + 1 < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      const double mx = 0.5 * (xs[i] + xs[i + 1]) - cx, my = 0.5 * (ys[j] + ys[j + 1]) - cy;
      // Diagonals point away from the centre so corner cells split through their corner.
      if ((mx > 0) == (my > 0)) {
        detail::add_oriented(m, a, b, c, Region::background);
        detail::add_oriented(m, a, c, d, Region::background);
      } else {
        detail::add_oriented(m, a, b, d, Region::background);
        detail::add_oriented(m, b, c, d, Region::background);
      }
    }
  for (int i = 0; i + 1 < nx; ++i) {
    m.boundary.push_back({id(i, 0), id(i + 1, 0), 0});
    m.boundary.push_back({id(i + 1, ny - 1), id(i, ny - 1), 0});
  }
  for (int j = 0; j + 1 < ny; ++j) {
    m.boundary.push_back({id(nx - 1, j), id(nx - 1, j + 1), 0});
    m.boundary.push_back({id(0, j + 1), id(0, j), 0});
  }
  if (periodic) {
    m.periodic_master.resize(m.vertices.size());
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const int ii = i == nx - 1 ? 0 : i, jj = j == ny - 1 ? 0 : j;
        m.periodic_master[id(i, j)] = id(ii, jj);
      }
  }
  return m;
}

/// Grid on the square around a disk, identity on an inner rectangle and blended radially onto
/// the circle outside it.
inline Mesh disk_grid_mesh(Point center, double radius, Point inner_half, const std::vector<double>& xs_req,
                           const std::vector<double>& ys_req, double h) {
  const double ax = inner_half[0], ay = inner_half[1];
  if (std::hypot(ax, ay) >= radius) throw Error(ErrorCode::invalid_family, "inner grid block leaves the disk");
  auto ray_rect = [](double lx, double ly, Point d) {
    return std::min(std::abs(d[0]) > 0 ? lx / std::abs(d[0]) : 1e300, std::abs(d[1]) > 0 ? ly / std::abs(d[1]) : 1e300);
  };
  auto warp = [=](Point q) -> Point {
    const Point p = q - center;
    if (std::abs(p[0]) <= ax + 1e-14 && std::abs(p[1]) <= ay + 1e-14) return q;
    const double r = norm<2>(p);
    const Point d{p[0] / r, p[1] / r};
    const double kin = ray_rect(ax, ay, d), kout = ray_rect(radius, radius, d);
    const double t = (r - kin) / (kout - kin);
    return center + (kin + t * (radius - kin)) * d;
  };
  std::vector<double> xs = xs_req, ys = ys_req;
  xs.push_back(center[0] - ax);
  xs.push_back(center[0] + ax);
  ys.push_back(center[1] - ay);
  ys.push_back(center[1] + ay);
  return rectangle_grid_mesh({center[0] - radius, center[1] - radius}, {center[0] + radius, center[1] + radius}, xs,
                             ys, h, warp);
}

// ---------------------------------------------------------------------------
// Family meshes

namespace detail {

inline void require_resolvable(const InclusionFamily& f, int n, double h) {
  const double w = min_inclusion_width(f, n);
  if (w < 0.5 * h)
    throw Error(ErrorCode::unresolvable_thin_region,
                family_name(f) + " at n = " + std::to_string(n) + " has width " + std::to_string(w) +
                    " below h/2 = " + std::to_string(0.5 * h));
}

inline bool is_rectilinear(const Polyline& p) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Point a = p[i], b = p[(i + 1) % p.size()];
    if (a[0] != b[0] && a[1] != b[1]) return false;
  }
  return true;
}

}  // namespace detail

/// Interface-conforming mesh for several parameters at once; tags follow n_list.back().
inline Mesh build_study_mesh(const InclusionFamily& f, const std::vector<int>& n_list, double h,
                             const PeriodicCell* cell = nullptr) {
  if (n_list.empty()) throw Error(ErrorCode::config, "n_list must not be empty");
  for (int n : n_list) detail::require_resolvable(f, n, h);
  Mesh m = std::visit(
      [&](const auto& k) -> Mesh {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, RadialAnnuli>) {
          const auto* disk = std::get_if<Disk>(&f.domain.outer);
          if (!disk || k.d != 2) throw Error(ErrorCode::unsupported_dimension, "radial annuli mesh needs d = 2 on a disk");
          std::vector<double> radii;
          for (int n : n_list) radii.insert(radii.end(), {1.0 - 1.0 / n, 1.0, 1.0 + 1.0 / n});
          return polar_mesh(disk->center, disk->radius, radii, h, cell);
        } else if constexpr (std::is_same_v<T, DiskInclusion>) {
          const auto* disk = std::get_if<Disk>(&f.domain.outer);
          if (!disk || disk->center != k.center)
            throw Error(ErrorCode::invalid_family, "disk inclusions are meshed concentric with a disk domain");
          std::vector<double> radii;
          for (int n : n_list) radii.push_back(k.rho(n));
          return polar_mesh(disk->center, disk->radius, radii, h, cell, 4.0);
        } else if constexpr (std::is_same_v<T, ConfocalEllipse>) {
          std::vector<double> levels;
          for (int n : n_list) levels.push_back(1.0 / n);
          return elliptic_mesh(k.outer_xi, levels, h, cell);
        } else {
          if (n_list.size() != 1) throw Error(ErrorCode::invalid_family, "grid meshes are built per n");
          if (cell) throw Error(ErrorCode::invalid_family, "periodic cells are available for ring meshes");
          std::vector<double> xs, ys;
          double xmax = 0, ymax = 0;
          const int n = n_list.front();
          for (const Piece& p : pieces(f, n))
            for (const auto& loop : p.loops) {
              if (!detail::is_rectilinear(loop))
                throw Error(ErrorCode::invalid_family, "grid meshes need axis-aligned polygon edges");
              for (const Point& q : loop) {
                xs.push_back(q[0]);
                ys.push_back(q[1]);
              }
            }
          if (const auto* r = std::get_if<Rectangle>(&f.domain.outer))
            return rectangle_grid_mesh(r->lo, r->hi, xs, ys, h);
          const auto* disk = std::get_if<Disk>(&f.domain.outer);
          if (!disk) throw Error(ErrorCode::invalid_family, "grid meshes need a disk or rectangle domain");
          for (double x : xs) xmax = std::max(xmax, std::abs(x - disk->center[0]));
          for (double y : ys) ymax = std::max(ymax, std::abs(y - disk->center[1]));
          const double rr = disk->radius;
          const Point half{std::max(xmax, 0.5 * rr), std::max(ymax, 0.5 * rr)};
          return disk_grid_mesh(disk->center, rr, half, xs, ys, h);
        }
      },
      f.kind);
  return retag(std::move(m), f, n_list.back());
}

inline Mesh build_mesh(const InclusionFamily& f, int n, double h) { return build_study_mesh(f, {n}, h); }

/// Mesh of a region without inclusions.
inline Mesh build_domain_mesh(const Shape& outer, double h) {
  return std::visit(
      [&](const auto& g) -> Mesh {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Disk>) return polar_mesh(g.center, g.radius, {}, h);
        else if constexpr (std::is_same_v<T, Rectangle>) return rectangle_grid_mesh(g.lo, g.hi, {}, {}, h);
        else {
          if (g.center[0] != 0.0 || g.center[1] != 0.0 || std::abs(g.a * g.a - g.b * g.b - 1.0) > 1e-9)
            throw Error(ErrorCode::invalid_family, "ellipse domains must be confocal with foci at ±1");
          return elliptic_mesh(std::acosh(g.a), {}, h);
        }
      },
      outer);
}

// ---------------------------------------------------------------------------
// Text format

namespace detail {

inline std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

inline void write_mesh(std::ostream& os, const Mesh& m) {
  os << m.vertices.size() << ' ' << m.triangles.size() << ' ' << m.boundary.size() << '\n';
  for (const Point& p : m.vertices) os << detail::fmt_double(p[0]) << ' ' << detail::fmt_double(p[1]) << '\n';
  for (const Triangle& t : m.triangles)
    os << t.v[0] << ' ' << t.v[1] << ' ' << t.v[2] << ' ' << int(t.tag) << '\n';
  for (const BoundaryEdge& e : m.boundary) os << e.a << ' ' << e.b << ' ' << e.gamma << '\n';
}

inline Mesh read_mesh(std::istream& is) {
  Mesh m;
  std::size_t nv = 0, nt = 0, nb = 0;
  if (!(is >> nv >> nt >> nb)) throw Error(ErrorCode::io, "bad mesh header");
  m.vertices.resize(nv);
  for (auto& p : m.vertices) {
    std::string x, y;
    if (!(is >> x >> y)) throw Error(ErrorCode::io, "truncated vertex list");
    p = {std::strtod(x.c_str(), nullptr), std::strtod(y.c_str(), nullptr)};
  }
  m.triangles.resize(nt);
  for (auto& t : m.triangles) {
    int tag = 0;
    if (!(is >> t.v[0] >> t.v[1] >> t.v[2] >> tag)) throw Error(ErrorCode::io, "truncated triangle list");
    if (tag < 0 || tag > 2) throw Error(ErrorCode::io, "bad region tag");
    for (int v : t.v)
      if (v < 0 || std::size_t(v) >= nv) throw Error(ErrorCode::io, "triangle references a missing vertex");
    t.tag = Region(tag);
  }
  m.boundary.resize(nb);
  for (auto& e : m.boundary)
    if (!(is >> e.a >> e.b >> e.gamma)) throw Error(ErrorCode::io, "truncated boundary list");
  double hmax = 0.0;
  for (const auto& t : m.triangles)
    for (int k = 0; k < 3; ++k) hmax = std::max(hmax, distance(m.vertices[t.v[k]], m.vertices[t.v[(k + 1) % 3]]));
  m.h = hmax;
  return m;
}

}  // namespace contrast_asym
