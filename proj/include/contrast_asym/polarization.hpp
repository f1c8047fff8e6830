#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <vector>

#include "contrast_asym/error.hpp"
#include "contrast_asym/fem.hpp"
#include "contrast_asym/mesh.hpp"
#include "contrast_asym/parallel.hpp"
#include "contrast_asym/tensors.hpp"

namespace contrast_asym {

inline constexpr double kWTolerance = 0.05;

/// Correctors wⁱ with ∫γₙ∇wⁱ·∇φ = ∫(γ₀−γₙ)eᵢ·∇φ, one per coordinate direction.
inline std::vector<ScalarField> correctors(const MeshPtr& mesh, const MatrixField& g0, const MatrixField& gn,
                                           Space space) {
  std::vector<ScalarField> out(2);
  parallel_for(2, [&](std::size_t i) {
    const ScalarField ei = interpolate(mesh, [i](Point x) { return x[i]; });
    out[i] = solve_perturbation(mesh, g0, gn, ei, space);
  });
  return out;
}

/// Per inclusion triangle: μ weight and the D, W, M densities.
struct PolarizationRecord {
  MeshPtr mesh;
  std::vector<std::size_t> triangle;
  std::vector<double> weight;
  std::vector<Mat2> D;
  std::vector<Mat2> W;
  std::vector<Mat2> M;
  double l1_dn = 0.0;  ///< Σ |dₙ|_F·area over inclusion triangles

  Mat2 average(const std::vector<Mat2>& field) const {
    Mat2 s;
    for (std::size_t k = 0; k < triangle.size(); ++k)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) s(i, j) += weight[k] * field[k](i, j);
    return s;
  }
  Mat2 mean_D() const { return average(D); }
  Mat2 mean_W() const { return average(W); }
  Mat2 mean_M() const { return average(M); }

  double total_mass() const {
    double s = 0.0;
    for (double w : weight) s += w;
    return s;
  }

  double asymmetry() const {
    const Mat2 m = mean_M();
    return std::abs(m(0, 1) - m(1, 0)) * std::numbers::sqrt2;
  }
};

inline PolarizationRecord tensor_densities(const MeshPtr& mesh, const MatrixField& g0, const MatrixField& gn,
                                           const std::vector<ScalarField>& corr) {
  if (corr.size() != 2) throw Error(ErrorCode::unsupported_dimension, "need two correctors");
  for (const auto& w : corr) require_same_mesh(mesh, w.mesh);
  const Mesh& m = *mesh;
  PolarizationRecord rec;
  rec.mesh = mesh;
  const auto c0 = cell_values(m, g0), cn = cell_values(m, gn);
  std::vector<double> dnorm;
  for (std::size_t t : inclusion_triangles(m)) {
    const TriGeom g = tri_geom(m, t);
    const double df = frobenius(dn_at(c0[t], cn[t], true));
    const SymMat2 jump = cn[t] - c0[t];
    std::array<Point, 2> grad{cell_gradient(m, g, t, corr[0].values), cell_gradient(m, g, t, corr[1].values)};
    Mat2 D, W, M;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        D(i, j) = jump(i, j) / df;
        const Point col{jump(0, j), jump(1, j)};
        W(i, j) = -dot<2>(grad[i], col) / df;
        M(i, j) = D(i, j) - W(i, j);
      }
    rec.triangle.push_back(t);
    rec.weight.push_back(df * g.area);
    rec.D.push_back(D);
    rec.W.push_back(W);
    rec.M.push_back(M);
    rec.l1_dn += df * g.area;
  }
  if (rec.triangle.empty() || rec.l1_dn <= 0.0)
    throw Error(ErrorCode::zero_measure, "no inclusion triangles carry contrast");
  for (double& w : rec.weight) w /= rec.l1_dn;
  return rec;
}

enum class Component { mu, D, W, M };

/// Σ over inclusion triangles of density·weight·φ(centroid).
inline double measure_integrate(const PolarizationRecord& rec, const std::function<double(Point)>& phi,
                                Component which, int i = 0, int j = 0) {
  const Mesh& m = *rec.mesh;
  double s = 0.0;
  for (std::size_t k = 0; k < rec.triangle.size(); ++k) {
    double density = 1.0;
    if (which == Component::D) density = rec.D[k](i, j);
    else if (which == Component::W) density = rec.W[k](i, j);
    else if (which == Component::M) density = rec.M[k](i, j);
    s += density * rec.weight[k] * phi(tri_geom(m, rec.triangle[k]).centroid);
  }
  return s;
}

struct WBounds {
  double min_eig = 0.0;
  double max_eig = 0.0;
  double bound = 1.0;
  bool pass = false;
};

/// Eigenvalue range of the symmetric part of the μ-weighted W against [−tol, bound + tol].
inline WBounds w_bounds_check(const PolarizationRecord& rec, bool isotropic, double tol = kWTolerance) {
  const auto ev = eigenvalues(SymMat2::symmetric_part(rec.mean_W()));
  WBounds b;
  b.min_eig = ev[0];
  b.max_eig = ev[1];
  b.bound = isotropic ? 1.0 / std::numbers::sqrt2 : 1.0;
  b.pass = ev[0] >= -tol && ev[1] <= b.bound + tol;
  return b;
}

enum class Sign { plus, minus };

/// Converts the volume-normalised tensor 𝕄 of isotropic phases γ₁ in γ₀ to the dₙ-normalised M.
inline SymMat2 cv_convert(const SymMat2& mm, double g1, double g0, Sign sign) {
  const double f = (1.0 / std::numbers::sqrt2) * g1 / (g1 * g1 + g0 * g0) * (sign == Sign::plus ? g1 - g0 : g0 - g1);
  return f * mm;
}

/// Volume-normalised tensor of a disk of conductivity γ₁ in γ₀: the interior field factor 2γ₀/(γ₁+γ₀).
inline SymMat2 disk_volume_tensor(double g1, double g0) { return SymMat2::identity(2.0 * g0 / (g1 + g0)); }

namespace detail {

/// Inclusion triangle indices of b matched to those of a by vertex coordinates.
inline std::vector<std::size_t> match_inclusions(const Mesh& a, const Mesh& b) {
  const auto ta = inclusion_triangles(a);
  std::vector<std::size_t> out;
  for (std::size_t t : ta) {
    if (t >= b.triangles.size()) throw Error(ErrorCode::mismatched_mesh, "inclusion triangles differ");
    for (int k = 0; k < 3; ++k) {
      const int va = a.triangles[t].v[k], vb = b.triangles[t].v[k];
      if (std::size_t(vb) >= b.vertices.size() || a.vertices[va] != b.vertices[vb])
        throw Error(ErrorCode::mismatched_mesh, "inclusion triangles differ");
    }
    out.push_back(t);
  }
  if (inclusion_triangles(b).size() != out.size()) throw Error(ErrorCode::mismatched_mesh, "inclusion triangles differ");
  return out;
}

}  // namespace detail

/// (1/‖dₙ‖_{L¹})·‖(γₙ−γ₀)∇(wʸ − wˣ)‖_{L¹}, maximised over the corrector index.
/// The fields may live on two meshes that share their inclusion triangles.
inline double bc_independence(const MatrixField& g0, const MatrixField& gn, const std::vector<ScalarField>& wy,
                              const std::vector<ScalarField>& wx) {
  if (wy.size() != wx.size() || wy.empty()) throw Error(ErrorCode::mismatched_mesh, "corrector counts differ");
  const Mesh& a = *wy[0].mesh;
  const Mesh& b = *wx[0].mesh;
  const auto tris = detail::match_inclusions(a, b);
  const auto c0 = cell_values(a, g0), cn = cell_values(a, gn);
  double l1 = 0.0;
  for (std::size_t t : tris) l1 += frobenius(dn_at(c0[t], cn[t], true)) * tri_geom(a, t).area;
  if (l1 <= 0.0) throw Error(ErrorCode::zero_measure, "no inclusion triangles carry contrast");
  double worst = 0.0;
  for (std::size_t i = 0; i < wy.size(); ++i) {
    double s = 0.0;
    for (std::size_t t : tris) {
      const TriGeom ga = tri_geom(a, t), gb = tri_geom(b, t);
      const Point d = cell_gradient(a, ga, t, wy[i].values) - cell_gradient(b, gb, t, wx[i].values);
      s += ga.area * norm<2>(SymMat2(cn[t] - c0[t]) * d);
    }
    worst = std::max(worst, s / l1);
  }
  return worst;
}

inline void write_record_csv(std::ostream& os, const PolarizationRecord& rec) {
  os << "triangle_id,weight,D11,D12,D22,W11,W12,W21,W22,M11,M12,M21,M22\n";
  for (std::size_t k = 0; k < rec.triangle.size(); ++k) {
    const auto& D = rec.D[k];
    const auto& W = rec.W[k];
    const auto& M = rec.M[k];
    os << rec.triangle[k] << ',' << detail::fmt_double(rec.weight[k]);
    for (double v : {D(0, 0), D(0, 1), D(1, 1), W(0, 0), W(0, 1), W(1, 0), W(1, 1), M(0, 0), M(0, 1), M(1, 0), M(1, 1)})
      os << ',' << detail::fmt_double(v);
    os << '\n';
  }
}

}  // namespace contrast_asym
