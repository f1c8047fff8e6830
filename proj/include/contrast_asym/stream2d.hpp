#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

#include "contrast_asym/error.hpp"
#include "contrast_asym/fem.hpp"
#include "contrast_asym/mesh.hpp"
#include "contrast_asym/tensors.hpp"

namespace contrast_asym {

inline constexpr double kFluxHypothesisTol = 1e-6;

/// σ = Jᵀγ⁻¹J applied to every region of a conductivity field.
inline MatrixField dual_field(const MatrixField& g) {
  MatrixField s;
  s.background = [b = g.background](Point x) { return sigma_of(b(x)); };
  for (const auto& [tag, map] : g.regions) s.regions.push_back({tag, [map](Point x) { return sigma_of(map(x)); }});
  return s;
}

/// Triangles selected by a predicate, with boundary edges labelled by closed component.
/// Component 0 encloses the largest area; the others follow in decreasing order.
struct Submesh {
  MeshPtr mesh;
  std::vector<int> parent_vertex;  ///< submesh vertex → vertex of the parent mesh
  std::vector<std::size_t> parent_triangle;
  int components = 0;
};

inline Submesh extract_submesh(const Mesh& m, const std::function<bool(std::size_t)>& keep) {
  Submesh sub;
  Mesh out;
  out.h = m.h;
  std::vector<int> local(m.vertices.size(), -1);
  std::map<std::pair<int, int>, int> edge_count;
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    if (!keep(t)) continue;
    Triangle tri = m.triangles[t];
    for (int& v : tri.v) {
      if (local[v] < 0) {
        local[v] = int(out.vertices.size());
        out.vertices.push_back(m.vertices[v]);
        sub.parent_vertex.push_back(v);
      }
      v = local[v];
    }
    for (int k = 0; k < 3; ++k) {
      const int a = tri.v[k], b = tri.v[(k + 1) % 3];
      ++edge_count[{std::min(a, b), std::max(a, b)}];
    }
    out.triangles.push_back(tri);
    sub.parent_triangle.push_back(t);
  }
  if (out.triangles.empty()) throw Error(ErrorCode::zero_measure, "subdomain selects no triangles");
  // Oriented boundary edges (counter-clockwise around the kept region).
  std::vector<std::pair<int, int>> edges;
  for (const auto& tri : out.triangles)
    for (int k = 0; k < 3; ++k) {
      const int a = tri.v[k], b = tri.v[(k + 1) % 3];
      if (edge_count[{std::min(a, b), std::max(a, b)}] == 1) edges.push_back({a, b});
    }
  // Components by vertex connectivity of the boundary edges.
  std::vector<int> parent(out.vertices.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  for (const auto& [a, b] : edges) parent[find(a)] = find(b);
  std::map<int, double> area;
  for (const auto& [a, b] : edges) area[find(a)] += 0.5 * cross(out.vertices[a], out.vertices[b]);
  std::vector<std::pair<double, int>> order;
  for (const auto& [root, ar] : area) order.push_back({-std::abs(ar), root});
  std::sort(order.begin(), order.end());
  std::map<int, int> label;
  for (std::size_t k = 0; k < order.size(); ++k) label[order[k].second] = int(k);
  for (const auto& [a, b] : edges) out.boundary.push_back({a, b, label[find(a)]});
  sub.components = int(order.size());
  sub.mesh = share(std::move(out));
  return sub;
}

/// Restriction of a parent field to a submesh.
inline ScalarField restrict_field(const Submesh& sub, const ScalarField& u) {
  ScalarField r{sub.mesh, std::vector<double>(sub.parent_vertex.size()), u.info};
  for (std::size_t v = 0; v < sub.parent_vertex.size(); ++v) r.values[v] = u[sub.parent_vertex[v]];
  return r;
}

/// Outward flux through boundary component Γᵢ, from the residual K·u at its vertices.
inline double boundary_flux(const MeshPtr& mesh, const MatrixField& gamma, const ScalarField& u, int component) {
  require_same_mesh(mesh, u.mesh);
  const Mesh& m = *mesh;
  std::vector<char> on(m.vertices.size(), 0);
  bool found = false;
  for (const auto& e : m.boundary)
    if (e.gamma == component) on[e.a] = on[e.b] = 1, found = true;
  if (!found) throw Error(ErrorCode::unknown_boundary, "no boundary component " + std::to_string(component));
  const auto y = nodal_flux(m, cell_values(m, gamma), u.values);
  double s = 0.0;
  for (std::size_t v = 0; v < m.vertices.size(); ++v)
    if (on[v]) s += y[v];
  return s;
}

/// Σ|K·u| over the boundary vertices, the scale against which flux hypotheses are judged.
inline double boundary_flux_scale(const MeshPtr& mesh, const MatrixField& gamma, const ScalarField& u) {
  const Mesh& m = *mesh;
  const auto y = nodal_flux(m, cell_values(m, gamma), u.values);
  const auto mask = boundary_vertex_mask(m);
  double s = 0.0;
  for (std::size_t v = 0; v < m.vertices.size(); ++v)
    if (mask[v]) s += std::abs(y[v]);
  return s;
}

/// ψ minimising ∫|J∇ψ − γ∇u|² over P1 fields, with ∫ψ = 0.
inline ScalarField stream_function(const MeshPtr& mesh, const MatrixField& gamma, const ScalarField& u) {
  require_same_mesh(mesh, u.mesh);
  const Mesh& m = *mesh;
  int components = 0;
  for (const auto& e : m.boundary) components = std::max(components, e.gamma + 1);
  const double scale = std::max(boundary_flux_scale(mesh, gamma, u), 1e-300);
  for (int c = 0; c < components; ++c)
    if (std::abs(boundary_flux(mesh, gamma, u, c)) > kFluxHypothesisTol * scale)
      throw Error(ErrorCode::nonzero_flux, "flux through boundary component " + std::to_string(c) + " is not zero");
  const auto cells = cell_values(m, gamma);
  const Mat2 jt = rotation_j().transpose();
  std::vector<Point> target(m.triangles.size());
  for (std::size_t t = 0; t < m.triangles.size(); ++t)
    target[t] = jt * (cells[t] * cell_gradient(m, tri_geom(m, t), t, u.values));
  const std::vector<SymMat2> unit(m.triangles.size(), SymMat2::identity());
  return detail::solve_with_load(mesh, unit, Space::mean_zero, divergence_load(m, target), {}, MeanKind::domain);
}

/// ‖γ∇u − J∇ψ‖_{L²} / ‖γ∇u‖_{L²}.
inline double duality_residual(const MeshPtr& mesh, const MatrixField& gamma, const ScalarField& u,
                               const ScalarField& psi) {
  const Mesh& m = *mesh;
  const auto cells = cell_values(m, gamma);
  const Mat2 j = rotation_j();
  double r = 0.0, s = 0.0;
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const TriGeom g = tri_geom(m, t);
    const Point q = cells[t] * cell_gradient(m, g, t, u.values);
    const Point d = q - j * cell_gradient(m, g, t, psi.values);
    r += g.area * dot<2>(d, d);
    s += g.area * dot<2>(q, q);
  }
  return std::sqrt(r / s);
}

/// Dual norm of the weak residual of div(σ∇ψ) = 0 at interior vertices, relative to the σ-energy of ψ.
inline double dual_equation_residual(const MeshPtr& mesh, const MatrixField& sigma, const ScalarField& psi) {
  const Mesh& m = *mesh;
  const auto cells = cell_values(m, sigma);
  auto load = nodal_flux(m, cells, psi.values);
  const auto mask = boundary_vertex_mask(m);
  for (std::size_t v = 0; v < load.size(); ++v) load[v] = mask[v] ? 0.0 : -load[v];
  const ScalarField e = detail::solve_with_load(mesh, cells, Space::dirichlet, load, {}, MeanKind::domain);
  const double num = energy(mesh, sigma, e), den = energy(mesh, sigma, psi);
  return std::sqrt(num / den);
}

/// Σₙ = σₙ + σ₀σₙ⁻¹σ₀ integrated in Frobenius norm over the inclusion triangles.
inline double sigma_l1(const Mesh& m, const MatrixField& g0, const MatrixField& gn) {
  const auto c0 = cell_values(m, g0), cn = cell_values(m, gn);
  double s = 0.0;
  for (std::size_t t : inclusion_triangles(m)) {
    const SymMat2 s0 = sigma_of(c0[t]), sn = sigma_of(cn[t]);
    s += frobenius(SymMat2(sn + sandwich(s0, inverse(sn)))) * tri_geom(m, t).area;
  }
  return s;
}

/// (1/‖Σₙ‖_{L¹})·‖(σ₀−σₙ)∇(ψₙ−ψ₀)‖_{L¹}.
inline double dual_gap(const MeshPtr& mesh, const MatrixField& g0, const MatrixField& gn, const ScalarField& psi0,
                       const ScalarField& psin) {
  require_same_mesh(mesh, psi0.mesh);
  require_same_mesh(mesh, psin.mesh);
  const Mesh& m = *mesh;
  const auto c0 = cell_values(m, g0), cn = cell_values(m, gn);
  double s = 0.0;
  for (std::size_t t : inclusion_triangles(m)) {
    const TriGeom g = tri_geom(m, t);
    const Point d = cell_gradient(m, g, t, psin.values) - cell_gradient(m, g, t, psi0.values);
    s += g.area * norm<2>(SymMat2(sigma_of(c0[t]) - sigma_of(cn[t])) * d);
  }
  const double mass = sigma_l1(m, g0, gn);
  if (mass <= 0.0) throw Error(ErrorCode::zero_measure, "no inclusion triangles carry contrast");
  return s / mass;
}

struct RoleSwap {
  std::size_t cells = 0;
  std::size_t violations = 0;
  bool holds() const { return violations == 0; }
};

/// On A cells σₙ ≤ σ₀ and on B cells σₙ ≥ σ₀.
inline RoleSwap role_swap_check(const Mesh& m, const MatrixField& g0, const MatrixField& gn) {
  const auto c0 = cell_values(m, g0), cn = cell_values(m, gn);
  RoleSwap r;
  for (std::size_t t : inclusion_triangles(m)) {
    const SymMat2 s0 = sigma_of(c0[t]), sn = sigma_of(cn[t]);
    const bool ok = m.triangles[t].tag == Region::A ? psd_leq(sn, s0) : psd_leq(s0, sn);
    ++r.cells;
    if (!ok) ++r.violations;
  }
  return r;
}

}  // namespace contrast_asym
