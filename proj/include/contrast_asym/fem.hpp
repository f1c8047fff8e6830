#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "contrast_asym/error.hpp"
#include "contrast_asym/geometry.hpp"
#include "contrast_asym/mesh.hpp"
#include "contrast_asym/tensors.hpp"

namespace contrast_asym {

using MeshPtr = std::shared_ptr<const Mesh>;

inline MeshPtr share(Mesh m) { return std::make_shared<const Mesh>(std::move(m)); }

// ---------------------------------------------------------------------------
// Conductivity fields

/// Region-wise conductivity: a background map plus per-region overrides.
struct MatrixField {
  using Map = std::function<SymMat2(Point)>;

  Map background;
  std::vector<std::pair<Region, Map>> regions;

  static MatrixField constant(const SymMat2& g) {
    return {[g](Point) { return g; }, {}};
  }

  SymMat2 at(Point x, Region tag) const {
    for (const auto& [r, map] : regions)
      if (r == tag) return map(x);
    return background(x);
  }
};

inline MatrixField gamma_0(const InclusionFamily& f) { return MatrixField::constant(f.background); }

inline MatrixField gamma_n(const InclusionFamily& f, int n) {
  auto snap = std::make_shared<const Snapshot>(f, n);
  MatrixField m = gamma_0(f);
  m.regions.push_back({Region::A, [snap](Point x) { return snap->gamma_in_region(Region::A, x); }});
  m.regions.push_back({Region::B, [snap](Point x) { return snap->gamma_in_region(Region::B, x); }});
  return m;
}

/// Conductivity per triangle, evaluated at centroids and validated.
inline std::vector<SymMat2> cell_values(const Mesh& m, const MatrixField& g) {
  std::vector<SymMat2> out(m.triangles.size());
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    out[t] = g.at(tri_geom(m, t).centroid, m.triangles[t].tag);
    require_conductivity(out[t]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sparse algebra

struct CsrMatrix {
  std::size_t n = 0;
  std::vector<std::size_t> row_ptr;
  std::vector<int> col;
  std::vector<double> val;

  void multiply(const std::vector<double>& x, std::vector<double>& y) const {
    y.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += val[k] * x[col[k]];
      y[i] = s;
    }
  }

  double& entry(std::size_t i, int j) {
    const auto b = col.begin() + std::ptrdiff_t(row_ptr[i]), e = col.begin() + std::ptrdiff_t(row_ptr[i + 1]);
    return val[std::size_t(std::lower_bound(b, e, j) - col.begin())];
  }

  std::vector<double> diagonal() const {
    std::vector<double> d(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
        if (col[k] == int(i)) d[i] = val[k];
    return d;
  }
};

struct SolveInfo {
  int iterations = 0;
  double relative_residual = 0.0;
  std::vector<std::string> warnings;
};

inline constexpr double kCgTolerance = 1e-12;

/// Jacobi-preconditioned conjugate gradients.
inline SolveInfo pcg(const CsrMatrix& a, const std::vector<double>& b, std::vector<double>& x) {
  const std::size_t n = a.n;
  SolveInfo info;
  x.assign(n, 0.0);
  const double bnorm = std::sqrt(std::inner_product(b.begin(), b.end(), b.begin(), 0.0));
  if (bnorm == 0.0) return info;
  const auto diag = a.diagonal();
  std::vector<double> r = b, z(n), p(n), q(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
  p = z;
  double rz = std::inner_product(r.begin(), r.end(), z.begin(), 0.0);
  const int cap = std::max(10, int(50.0 * std::sqrt(double(n))));
  for (int it = 1; it <= cap; ++it) {
    a.multiply(p, q);
    const double alpha = rz / std::inner_product(p.begin(), p.end(), q.begin(), 0.0);
    double rr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
      rr += r[i] * r[i];
    }
    info.iterations = it;
    info.relative_residual = std::sqrt(rr) / bnorm;
    if (info.relative_residual <= kCgTolerance) return info;
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
    const double rz_new = std::inner_product(r.begin(), r.end(), z.begin(), 0.0);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  throw Error(ErrorCode::solver_divergence, "conjugate gradients reached the iteration cap " + std::to_string(cap) +
                                                " at relative residual " + std::to_string(info.relative_residual));
}

// ---------------------------------------------------------------------------
// Fields

struct ScalarField {
  MeshPtr mesh;
  std::vector<double> values;
  SolveInfo info;

  double operator[](std::size_t v) const { return values[v]; }
};

inline void require_same_mesh(const MeshPtr& a, const MeshPtr& b) {
  if (a.get() != b.get()) throw Error(ErrorCode::mismatched_mesh, "fields live on different meshes");
}

inline ScalarField interpolate(const MeshPtr& m, const std::function<double(Point)>& f) {
  ScalarField s{m, std::vector<double>(m->vertices.size()), {}};
  for (std::size_t v = 0; v < m->vertices.size(); ++v) s.values[v] = f(m->vertices[v]);
  return s;
}

inline Point cell_gradient(const Mesh& m, const TriGeom& g, std::size_t t, const std::vector<double>& u) {
  const auto& v = m.triangles[t].v;
  Point d{0.0, 0.0};
  for (int k = 0; k < 3; ++k) d = d + u[v[k]] * g.grad[k];
  return d;
}

inline std::vector<Point> gradients(const ScalarField& u) {
  const Mesh& m = *u.mesh;
  std::vector<Point> out(m.triangles.size());
  for (std::size_t t = 0; t < m.triangles.size(); ++t) out[t] = cell_gradient(m, tri_geom(m, t), t, u.values);
  return out;
}

/// ∫_Ω u for a P1 field.
inline double integral(const ScalarField& u) {
  const Mesh& m = *u.mesh;
  double s = 0.0;
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const auto& v = m.triangles[t].v;
    s += tri_geom(m, t).area * (u[v[0]] + u[v[1]] + u[v[2]]) / 3.0;
  }
  return s;
}

inline double domain_area(const Mesh& m) {
  double s = 0.0;
  for (std::size_t t = 0; t < m.triangles.size(); ++t) s += tri_geom(m, t).area;
  return s;
}

inline double boundary_mean(const ScalarField& u) {
  const Mesh& m = *u.mesh;
  double s = 0.0, len = 0.0;
  for (const auto& e : m.boundary) {
    const double l = distance(m.vertices[e.a], m.vertices[e.b]);
    s += 0.5 * l * (u[e.a] + u[e.b]);
    len += l;
  }
  return s / len;
}

/// Exact L² norm of a P1 field.
inline double l2_norm(const ScalarField& u) {
  const Mesh& m = *u.mesh;
  double s = 0.0;
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const auto& v = m.triangles[t].v;
    const double a = u[v[0]], b = u[v[1]], c = u[v[2]];
    s += tri_geom(m, t).area / 6.0 * (a * a + b * b + c * c + a * b + b * c + c * a);
  }
  return std::sqrt(s);
}

inline ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  require_same_mesh(a.mesh, b.mesh);
  ScalarField r{a.mesh, a.values, {}};
  for (std::size_t i = 0; i < r.values.size(); ++i) r.values[i] -= b.values[i];
  return r;
}

inline ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  require_same_mesh(a.mesh, b.mesh);
  ScalarField r{a.mesh, a.values, {}};
  for (std::size_t i = 0; i < r.values.size(); ++i) r.values[i] += b.values[i];
  return r;
}

inline ScalarField operator*(double s, const ScalarField& a) {
  ScalarField r{a.mesh, a.values, {}};
  for (double& v : r.values) v *= s;
  return r;
}

// ---------------------------------------------------------------------------
// Assembly

/// Full stiffness matrix over all vertices (no constraints).
inline CsrMatrix stiffness(const Mesh& m, const std::vector<SymMat2>& cells);

namespace detail {

/// Maps vertices to unknowns; fixed vertices get −1.
struct DofMap {
  std::vector<int> dof;
  std::size_t count = 0;
};

inline CsrMatrix csr_pattern(const Mesh& m, const DofMap& map) {
  std::vector<std::vector<int>> adj(map.count);
  for (const auto& t : m.triangles)
    for (int a = 0; a < 3; ++a) {
      const int da = map.dof[t.v[a]];
      if (da < 0) continue;
      for (int b = 0; b < 3; ++b) {
        const int db = map.dof[t.v[b]];
        if (db >= 0) adj[da].push_back(db);
      }
    }
  CsrMatrix a;
  a.n = map.count;
  a.row_ptr.assign(map.count + 1, 0);
  for (std::size_t i = 0; i < map.count; ++i) {
    auto& r = adj[i];
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    a.row_ptr[i + 1] = a.row_ptr[i] + r.size();
  }
  a.col.reserve(a.row_ptr.back());
  for (auto& r : adj) a.col.insert(a.col.end(), r.begin(), r.end());
  a.val.assign(a.col.size(), 0.0);
  return a;
}

inline std::array<std::array<double, 3>, 3> element_matrix(const TriGeom& g, const SymMat2& k) {
  std::array<std::array<double, 3>, 3> e{};
  for (int a = 0; a < 3; ++a) {
    const Point kg = k * g.grad[a];
    for (int b = 0; b < 3; ++b) e[a][b] = g.area * dot<2>(kg, g.grad[b]);
  }
  return e;
}

/// Assembles K and the reduced right-hand side for the given dof map and fixed values.
inline void assemble(const Mesh& m, const std::vector<SymMat2>& cells, const DofMap& map,
                     const std::vector<double>& fixed, const std::vector<double>& vertex_load, CsrMatrix& a,
                     std::vector<double>& rhs) {
  a = csr_pattern(m, map);
  rhs.assign(map.count, 0.0);
  for (std::size_t v = 0; v < m.vertices.size(); ++v)
    if (map.dof[v] >= 0 && !vertex_load.empty()) rhs[map.dof[v]] += vertex_load[v];
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const auto& tv = m.triangles[t].v;
    const auto e = element_matrix(tri_geom(m, t), cells[t]);
    for (int i = 0; i < 3; ++i) {
      const int di = map.dof[tv[i]];
      if (di < 0) continue;
      for (int j = 0; j < 3; ++j) {
        const int dj = map.dof[tv[j]];
        if (dj >= 0) a.entry(di, dj) += e[i][j];
        else rhs[di] -= e[i][j] * fixed[tv[j]];
      }
    }
  }
}

inline std::vector<int> representatives(const Mesh& m) {
  std::vector<int> rep(m.vertices.size());
  if (m.periodic()) rep = m.periodic_master;
  else std::iota(rep.begin(), rep.end(), 0);
  return rep;
}

/// Unknowns for all vertices (periodic ones merged), optionally pinning the first one.
inline DofMap free_map(const Mesh& m, bool pin) {
  const auto rep = representatives(m);
  DofMap map;
  map.dof.assign(m.vertices.size(), -1);
  std::vector<int> rep_dof(m.vertices.size(), -1);
  bool pinned = !pin;
  for (std::size_t v = 0; v < m.vertices.size(); ++v) {
    const int r = rep[v];
    if (rep_dof[r] == -1) {
      if (!pinned) {
        rep_dof[r] = -2;
        pinned = true;
      } else {
        rep_dof[r] = int(map.count++);
      }
    }
    map.dof[v] = rep_dof[r] >= 0 ? rep_dof[r] : -1;
  }
  return map;
}

inline std::vector<double> expand(const Mesh& m, const DofMap& map, const std::vector<double>& x,
                                  const std::vector<double>& fixed) {
  std::vector<double> u(m.vertices.size());
  for (std::size_t v = 0; v < m.vertices.size(); ++v) u[v] = map.dof[v] >= 0 ? x[map.dof[v]] : fixed[v];
  return u;
}

inline void contrast_warning(const std::vector<SymMat2>& cells, SolveInfo& info) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& c : cells) {
    const auto ev = eigenvalues(c);
    lo = std::min(lo, ev[0]);
    hi = std::max(hi, ev[1]);
  }
  if (hi / lo > 1e8) info.warnings.push_back("conductivity eigenvalue ratio exceeds 1e8");
}

}  // namespace detail

inline CsrMatrix stiffness(const Mesh& m, const std::vector<SymMat2>& cells) {
  detail::DofMap map;
  map.dof.resize(m.vertices.size());
  std::iota(map.dof.begin(), map.dof.end(), 0);
  map.count = m.vertices.size();
  CsrMatrix a;
  std::vector<double> rhs;
  detail::assemble(m, cells, map, {}, {}, a, rhs);
  return a;
}

/// Residual-based nodal flux K·u; at boundary vertices it is the consistent outward flux.
inline std::vector<double> nodal_flux(const Mesh& m, const std::vector<SymMat2>& cells, const std::vector<double>& u) {
  std::vector<double> y;
  stiffness(m, cells).multiply(u, y);
  return y;
}

// ---------------------------------------------------------------------------
// Boundary data and solves

struct DirichletData {
  std::function<double(Point)> g;
};

/// Flux density γ∇u·n on ∂Ω.
struct NeumannData {
  std::function<double(Point)> h;
};

/// Consistent nodal boundary loads, vertex-indexed.
struct NeumannLoad {
  std::vector<double> load;
};

struct PeriodicData {};

using BoundaryData = std::variant<DirichletData, NeumannData, NeumannLoad, PeriodicData>;

enum class Space { dirichlet, mean_zero, periodic };

enum class MeanKind { domain, boundary };

namespace detail {

inline void subtract_mean(ScalarField& u, MeanKind kind) {
  const double mean = kind == MeanKind::domain ? integral(u) / domain_area(*u.mesh) : boundary_mean(u);
  for (double& v : u.values) v -= mean;
}

/// Two-point Gauss integration of ∫_∂Ω h φ_i.
inline std::vector<double> boundary_load(const Mesh& m, const std::function<double(Point)>& h) {
  std::vector<double> load(m.vertices.size(), 0.0);
  const double g = 0.5 / std::sqrt(3.0);
  for (const auto& e : m.boundary) {
    const Point a = m.vertices[e.a], b = m.vertices[e.b];
    const double l = distance(a, b);
    for (double s : {0.5 - g, 0.5 + g}) {
      const double v = h((1.0 - s) * a + s * b) * 0.5 * l;
      load[e.a] += (1.0 - s) * v;
      load[e.b] += s * v;
    }
  }
  return load;
}

/// Removes a small incompatible total by spreading it over the boundary mass.
inline void make_compatible(const Mesh& m, std::vector<double>& load) {
  double total = 0.0, scale = 0.0;
  for (double v : load) total += v, scale += std::abs(v);
  if (scale == 0.0) return;
  if (std::abs(total) > 1e-6 * scale)
    throw Error(ErrorCode::nonzero_flux, "Neumann data does not integrate to zero over the boundary");
  std::vector<double> mass(m.vertices.size(), 0.0);
  double len = 0.0;
  for (const auto& e : m.boundary) {
    const double l = distance(m.vertices[e.a], m.vertices[e.b]);
    mass[e.a] += 0.5 * l;
    mass[e.b] += 0.5 * l;
    len += l;
  }
  for (std::size_t v = 0; v < load.size(); ++v) load[v] -= total * mass[v] / len;
}

/// Core solve: K u = load with the constraints of `space`.
inline ScalarField solve_with_load(const MeshPtr& mesh, const std::vector<SymMat2>& cells, Space space,
                                   std::vector<double> load, const std::vector<double>& dirichlet, MeanKind mean) {
  const Mesh& m = *mesh;
  DofMap map;
  std::vector<double> fixed(m.vertices.size(), 0.0);
  if (space == Space::dirichlet) {
    const auto mask = boundary_vertex_mask(m);
    map.dof.assign(m.vertices.size(), -1);
    for (std::size_t v = 0; v < m.vertices.size(); ++v) {
      if (mask[v]) fixed[v] = dirichlet.empty() ? 0.0 : dirichlet[v];
      else map.dof[v] = int(map.count++);
    }
  } else {
    if (space == Space::periodic && !m.periodic()) throw Error(ErrorCode::invalid_family, "mesh is not periodic");
    map = free_map(m, true);
  }
  CsrMatrix a;
  std::vector<double> rhs;
  if (space == Space::periodic) {
    // Loads of identified vertices are gathered on their representative.
    std::vector<double> merged(load.size(), 0.0);
    for (std::size_t v = 0; v < load.size(); ++v) merged[m.periodic_master[v]] += load[v];
    std::vector<double> spread(load.size(), 0.0);
    for (std::size_t v = 0; v < load.size(); ++v)
      if (std::size_t(m.periodic_master[v]) == v) spread[v] = merged[v];
    load = std::move(spread);
  }
  assemble(m, cells, map, fixed, load, a, rhs);
  std::vector<double> x;
  ScalarField u{mesh, {}, pcg(a, rhs, x)};
  contrast_warning(cells, u.info);
  u.values = expand(m, map, x, fixed);
  if (space != Space::dirichlet) subtract_mean(u, mean);
  return u;
}

}  // namespace detail

/// Solves div(γ∇u) = 0 with the given boundary data.
inline ScalarField solve(const MeshPtr& mesh, const MatrixField& gamma, const BoundaryData& bc) {
  const Mesh& m = *mesh;
  const auto cells = cell_values(m, gamma);
  return std::visit(
      [&](const auto& d) -> ScalarField {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, DirichletData>) {
          std::vector<double> g(m.vertices.size(), 0.0);
          const auto mask = boundary_vertex_mask(m);
          for (std::size_t v = 0; v < m.vertices.size(); ++v)
            if (mask[v]) g[v] = d.g(m.vertices[v]);
          return detail::solve_with_load(mesh, cells, Space::dirichlet, {}, g, MeanKind::domain);
        } else if constexpr (std::is_same_v<T, NeumannData>) {
          auto load = detail::boundary_load(m, d.h);
          detail::make_compatible(m, load);
          return detail::solve_with_load(mesh, cells, Space::mean_zero, load, {}, MeanKind::domain);
        } else if constexpr (std::is_same_v<T, NeumannLoad>) {
          auto load = d.load;
          if (load.size() != m.vertices.size()) throw Error(ErrorCode::mismatched_mesh, "load size differs from mesh");
          detail::make_compatible(m, load);
          return detail::solve_with_load(mesh, cells, Space::mean_zero, load, {}, MeanKind::domain);
        } else {
          return detail::solve_with_load(mesh, cells, Space::periodic, {}, {}, MeanKind::domain);
        }
      },
      bc);
}

/// Load vector ∫ F·∇φ_i for a cellwise constant vector field F.
inline std::vector<double> divergence_load(const Mesh& m, const std::vector<Point>& flux) {
  std::vector<double> load(m.vertices.size(), 0.0);
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const TriGeom g = tri_geom(m, t);
    for (int k = 0; k < 3; ++k) load[m.triangles[t].v[k]] += g.area * dot<2>(flux[t], g.grad[k]);
  }
  return load;
}

/// wₙ with ∫γₙ∇wₙ·∇φ = ∫(γ₀−γₙ)∇u₀·∇φ over the discrete space.
inline ScalarField solve_perturbation(const MeshPtr& mesh, const MatrixField& g0, const MatrixField& gn,
                                      const ScalarField& u0, Space space) {
  require_same_mesh(mesh, u0.mesh);
  const Mesh& m = *mesh;
  const auto c0 = cell_values(m, g0), cn = cell_values(m, gn);
  const auto grad = gradients(u0);
  std::vector<Point> flux(m.triangles.size());
  for (std::size_t t = 0; t < m.triangles.size(); ++t) flux[t] = SymMat2(c0[t] - cn[t]) * grad[t];
  return detail::solve_with_load(mesh, cn, space, divergence_load(m, flux), {}, MeanKind::domain);
}

/// E(w) = ∫γ∇w·∇w.
inline double energy(const MeshPtr& mesh, const MatrixField& gamma, const ScalarField& w) {
  require_same_mesh(mesh, w.mesh);
  const Mesh& m = *mesh;
  double s = 0.0;
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const TriGeom g = tri_geom(m, t);
    const Point d = cell_gradient(m, g, t, w.values);
    s += g.area * dot<2>(gamma.at(g.centroid, m.triangles[t].tag) * d, d);
  }
  return s;
}

enum class GreenKind { dirichlet, neumann };

inline std::size_t nearest_vertex(const Mesh& m, Point y) {
  std::size_t best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < m.vertices.size(); ++v) {
    const double d = distance(m.vertices[v], y);
    if (d < bd) bd = d, best = v;
  }
  return best;
}

/// Discrete G(·, y) with div(γ₀∇G) = δ_y, nodal delta at the vertex nearest y.
inline ScalarField greens_function(const MeshPtr& mesh, const MatrixField& g0, Point y, GreenKind kind,
                                   const Shape* k_region = nullptr) {
  if (k_region && contains(*k_region, y)) throw Error(ErrorCode::point_inside_k, "probe point lies inside K");
  const Mesh& m = *mesh;
  const auto cells = cell_values(m, g0);
  std::vector<double> load(m.vertices.size(), 0.0);
  load[nearest_vertex(m, y)] = -1.0;
  if (kind == GreenKind::dirichlet)
    return detail::solve_with_load(mesh, cells, Space::dirichlet, load, {}, MeanKind::domain);
  const double len = boundary_length(m);
  for (const auto& e : m.boundary) {
    const double l = distance(m.vertices[e.a], m.vertices[e.b]);
    load[e.a] += 0.5 * l / len;
    load[e.b] += 0.5 * l / len;
  }
  return detail::solve_with_load(mesh, cells, Space::mean_zero, load, {}, MeanKind::boundary);
}

/// max |∇u| over triangles whose centroid lies in K.
inline double grad_sup_on(const ScalarField& u, const Shape& k) {
  const Mesh& m = *u.mesh;
  double s = 0.0;
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const TriGeom g = tri_geom(m, t);
    if (contains(k, g.centroid)) s = std::max(s, norm<2>(cell_gradient(m, g, t, u.values)));
  }
  return s;
}

/// Relative residual ‖K u − load‖ / ‖load‖ over free rows of a Dirichlet problem (interior vertices).
inline double interior_residual(const MeshPtr& mesh, const MatrixField& gamma, const ScalarField& u,
                                const std::vector<double>& load = {}) {
  const Mesh& m = *mesh;
  const auto cells = cell_values(m, gamma);
  const auto y = nodal_flux(m, cells, u.values);
  const auto mask = boundary_vertex_mask(m);
  double r = 0.0, s = 0.0;
  for (std::size_t v = 0; v < m.vertices.size(); ++v) {
    if (mask[v]) continue;
    const double l = load.empty() ? 0.0 : load[v];
    r += (y[v] - l) * (y[v] - l);
  }
  const auto a = stiffness(m, cells);
  for (std::size_t k = 0; k < a.val.size(); ++k) s = std::max(s, std::abs(a.val[k]));
  double un = 0.0;
  for (double v : u.values) un = std::max(un, std::abs(v));
  return std::sqrt(r) / std::max(1e-300, s * un);
}

// ---------------------------------------------------------------------------
// Field text format

inline void write_field(std::ostream& os, const ScalarField& u) {
  for (std::size_t v = 0; v < u.values.size(); ++v) os << v << ' ' << detail::fmt_double(u.values[v]) << '\n';
}

inline ScalarField read_field(std::istream& is, const MeshPtr& mesh) {
  ScalarField u{mesh, std::vector<double>(mesh->vertices.size(), 0.0), {}};
  std::vector<char> seen(u.values.size(), 0);
  std::size_t v;
  std::string x;
  while (is >> v >> x) {
    if (v >= u.values.size()) throw Error(ErrorCode::mismatched_mesh, "field references a missing vertex");
    u.values[v] = std::strtod(x.c_str(), nullptr);
    seen[v] = 1;
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end())
    throw Error(ErrorCode::mismatched_mesh, "field does not cover every vertex");
  return u;
}

}  // namespace contrast_asym
