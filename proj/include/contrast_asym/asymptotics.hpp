#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "contrast_asym/error.hpp"
#include "contrast_asym/fem.hpp"
#include "contrast_asym/fit.hpp"
#include "contrast_asym/geometry.hpp"
#include "contrast_asym/mesh.hpp"
#include "contrast_asym/parallel.hpp"
#include "contrast_asym/polarization.hpp"

namespace contrast_asym {

// ---------------------------------------------------------------------------
// Boundary data dictionary

struct NamedData {
  std::string name;
  std::function<double(Point)> f;
};

inline const std::vector<NamedData>& boundary_data_registry() {
  static const std::vector<NamedData> reg{
      {"x1", [](Point x) { return x[0]; }},
      {"x2", [](Point x) { return x[1]; }},
      {"x1x2", [](Point x) { return x[0] * x[1]; }},
      {"harmonic2", [](Point x) { return x[0] * x[0] - x[1] * x[1]; }},
  };
  return reg;
}

inline const NamedData& boundary_data(const std::string& name) {
  for (const auto& d : boundary_data_registry())
    if (d.name == name) return d;
  throw Error(ErrorCode::unknown_boundary, "unknown boundary data '" + name + "' (x1, x2, x1x2, harmonic2)");
}

/// 8 points on the circle of radius 0.85·(outer radius of Ω).
inline std::vector<Point> default_probes(const InclusionFamily& f) {
  const double r = 0.85 * outer_radius(f.domain.outer);
  std::vector<Point> out;
  for (int k = 0; k < 8; ++k) {
    const double t = 2.0 * std::numbers::pi * k / 8.0;
    out.push_back({r * std::cos(t), r * std::sin(t)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Representation formula

/// ∫(γₙ−γ₀)(∇wₙ+∇u₀)·∇G over inclusion triangles; equals wₙ at the source vertex of a Dirichlet G.
inline double reciprocity_value(const MeshPtr& mesh, const MatrixField& g0, const MatrixField& gn,
                                const ScalarField& u0, const ScalarField& wn, const ScalarField& green) {
  require_same_mesh(mesh, u0.mesh);
  require_same_mesh(mesh, wn.mesh);
  require_same_mesh(mesh, green.mesh);
  const Mesh& m = *mesh;
  double s = 0.0;
  for (std::size_t t : inclusion_triangles(m)) {
    const TriGeom g = tri_geom(m, t);
    const SymMat2 jump = gn.at(g.centroid, m.triangles[t].tag) - g0.at(g.centroid, m.triangles[t].tag);
    const Point du = cell_gradient(m, g, t, wn.values) + cell_gradient(m, g, t, u0.values);
    s += g.area * dot<2>(jump * du, cell_gradient(m, g, t, green.values));
  }
  return s;
}

/// ‖dₙ‖·Σ weight·Mᵢⱼ·∂ᵢu₀·∂ⱼG. The record may come from a mesh that shares the inclusion triangles.
inline double leading_order(const PolarizationRecord& rec, const ScalarField& u0, const ScalarField& green,
                            double l1_dn) {
  require_same_mesh(u0.mesh, green.mesh);
  const Mesh& m = *u0.mesh;
  detail::match_inclusions(*rec.mesh, m);
  double s = 0.0;
  for (std::size_t k = 0; k < rec.triangle.size(); ++k) {
    const std::size_t t = rec.triangle[k];
    const TriGeom g = tri_geom(m, t);
    const Point du = cell_gradient(m, g, t, u0.values), dg = cell_gradient(m, g, t, green.values);
    double v = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) v += rec.M[k](i, j) * du[i] * dg[j];
    s += rec.weight[k] * v;
  }
  return l1_dn * s;
}

struct RepresentationCheck {
  int n = 0;
  std::string data;
  Point y{};
  double exact = 0.0;        ///< (uₙ−u₀)(y) at the source vertex
  double reciprocity = 0.0;
  double leading = 0.0;
  double remainder = 0.0;
  double scaled_remainder = 0.0;
  double l1_dn = 0.0;
};

// ---------------------------------------------------------------------------
// Study meshes

/// Meshes for a rate study: one mesh re-tagged per n where the geometry allows, else one per n.
class StudyMeshes {
 public:
  StudyMeshes(const InclusionFamily& f, const std::vector<int>& n_list, double h, bool with_cell = false)
      : family_(f), n_list_(n_list) {
    const bool ring = !std::holds_alternative<Strips>(f.kind) && !std::holds_alternative<CustomPolygons>(f.kind);
    std::optional<PeriodicCell> cell;
    if (with_cell) {
      const double r = outer_radius(f.domain.outer);
      double hy = r;
      if (const auto* e = std::get_if<Ellipse>(&f.domain.outer)) hy = e->b;
      cell = PeriodicCell{1.5 * r, 1.5 * hy};
    }
    shared_ = ring;
    if (ring) {
      const Mesh base = build_study_mesh(f, n_list, h);
      std::optional<Mesh> cell_base;
      if (cell) cell_base = build_study_mesh(f, n_list, h, &*cell);
      for (int n : n_list) {
        meshes_[n] = share(retag(base, f, n));
        if (cell_base) cells_[n] = share(retag(*cell_base, f, n));
      }
    } else {
      if (with_cell) throw Error(ErrorCode::invalid_family, "periodic cells need a ring-meshed family");
      for (int n : n_list) meshes_[n] = share(build_mesh(f, n, h));
    }
  }

  const MeshPtr& at(int n) const { return meshes_.at(n); }
  const MeshPtr& cell_at(int n) const { return cells_.at(n); }
  /// True when every n uses the same vertex set.
  bool shared() const { return shared_; }
  const InclusionFamily& family() const { return family_; }

 private:
  InclusionFamily family_;
  std::vector<int> n_list_;
  std::map<int, MeshPtr> meshes_;
  std::map<int, MeshPtr> cells_;
  bool shared_ = false;
};

/// Discrete ‖dₙ‖_{L¹} over the inclusion triangles of a mesh.
inline double discrete_l1_dn(const Mesh& m, const MatrixField& g0, const MatrixField& gn) {
  const auto c0 = cell_values(m, g0), cn = cell_values(m, gn);
  double s = 0.0;
  for (std::size_t t : inclusion_triangles(m)) s += frobenius(dn_at(c0[t], cn[t], true)) * tri_geom(m, t).area;
  return s;
}

/// ‖(γₙ−γ₀)∇w‖_{L¹}.
inline double flux_l1(const MeshPtr& mesh, const MatrixField& g0, const MatrixField& gn, const ScalarField& w) {
  const Mesh& m = *mesh;
  const auto c0 = cell_values(m, g0), cn = cell_values(m, gn);
  double s = 0.0;
  for (std::size_t t : inclusion_triangles(m)) {
    const TriGeom g = tri_geom(m, t);
    s += g.area * norm<2>(SymMat2(cn[t] - c0[t]) * cell_gradient(m, g, t, w.values));
  }
  return s;
}

struct RepresentationStudy {
  std::vector<RepresentationCheck> checks;
  std::vector<double> worst_scaled;  ///< per n, max over probes and data
  double max_reciprocity_defect = 0.0;
  RateFit decay;
  bool decay_fitted = false;
};

/// Reciprocity and remainder at every (n, data, probe); M comes from periodic-cell correctors.
inline RepresentationStudy representation_study(const InclusionFamily& f, const std::vector<int>& n_list, double h,
                                                const std::vector<std::string>& data,
                                                const std::vector<Point>& probes) {
  const StudyMeshes meshes(f, n_list, h, true);
  const MatrixField g0 = gamma_0(f);
  RepresentationStudy out;
  // u₀ and G do not depend on n when the mesh is shared.
  std::map<int, std::vector<ScalarField>> u0s, greens;
  for (int n : n_list) {
    const MeshPtr& mesh = meshes.at(n);
    if (!u0s.empty() && meshes.shared()) {
      for (auto& u : u0s.begin()->second) u0s[n].push_back(ScalarField{mesh, u.values, u.info});
      for (auto& g : greens.begin()->second) greens[n].push_back(ScalarField{mesh, g.values, g.info});
      continue;
    }
    u0s[n].resize(data.size());
    greens[n].resize(probes.size());
    parallel_for(data.size() + probes.size(), [&](std::size_t k) {
      if (k < data.size()) u0s[n][k] = solve(mesh, g0, DirichletData{boundary_data(data[k]).f});
      else greens[n][k - data.size()] = greens_function(mesh, g0, probes[k - data.size()], GreenKind::dirichlet,
                                                        &f.domain.k);
    });
  }
  for (int n : n_list) {
    const MeshPtr& mesh = meshes.at(n);
    const MatrixField gn = gamma_n(f, n);
    const auto corr = correctors(meshes.cell_at(n), g0, gn, Space::periodic);
    const auto rec = tensor_densities(meshes.cell_at(n), g0, gn, corr);
    const double l1 = discrete_l1_dn(*mesh, g0, gn);
    std::vector<ScalarField> w(data.size());
    parallel_for(data.size(), [&](std::size_t k) {
      w[k] = solve_perturbation(mesh, g0, gn, u0s[n][k], Space::dirichlet);
    });
    double worst = 0.0;
    for (std::size_t k = 0; k < data.size(); ++k) {
      const std::size_t first = out.checks.size();
      for (std::size_t p = 0; p < probes.size(); ++p) {
        RepresentationCheck c;
        c.n = n;
        c.data = data[k];
        c.y = probes[p];
        c.exact = w[k][nearest_vertex(*mesh, probes[p])];
        c.reciprocity = reciprocity_value(mesh, g0, gn, u0s[n][k], w[k], greens[n][p]);
        c.leading = leading_order(rec, u0s[n][k], greens[n][p], l1);
        c.remainder = c.exact - c.leading;
        c.l1_dn = l1;
        c.scaled_remainder = std::abs(c.remainder) / l1;
        worst = std::max(worst, c.scaled_remainder);
        out.checks.push_back(c);
      }
      // Defects are relative to the largest perturbation this data produces over the probe set.
      double scale = 1e-300;
      for (std::size_t i = first; i < out.checks.size(); ++i) scale = std::max(scale, std::abs(out.checks[i].exact));
      for (std::size_t i = first; i < out.checks.size(); ++i)
        out.max_reciprocity_defect =
            std::max(out.max_reciprocity_defect, std::abs(out.checks[i].exact - out.checks[i].reciprocity) / scale);
    }
    out.worst_scaled.push_back(worst);
  }
  if (n_list.size() >= 3) {
    std::vector<std::pair<double, double>> s;
    for (std::size_t i = 0; i < n_list.size(); ++i) s.emplace_back(double(n_list[i]), out.worst_scaled[i]);
    out.decay = fit_rate(s);
    out.decay_fitted = true;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rate tables

enum class Quantity { energy, l2, linf_remainder, flux_l1, bc_gap };

inline const char* to_string(Quantity q) {
  switch (q) {
    case Quantity::energy: return "energy";
    case Quantity::l2: return "l2";
    case Quantity::linf_remainder: return "linf_remainder";
    case Quantity::flux_l1: return "flux_l1";
    case Quantity::bc_gap: return "bc_gap";
  }
  return "?";
}

inline Quantity parse_quantity(const std::string& s) {
  for (Quantity q : {Quantity::energy, Quantity::l2, Quantity::linf_remainder, Quantity::flux_l1, Quantity::bc_gap})
    if (s == to_string(q)) return q;
  throw Error(ErrorCode::config, "unknown quantity '" + s + "' (energy, l2, linf_remainder, flux_l1, bc_gap)");
}

/// Exponent the bound predicts for the quantity against ‖dₙ‖_{L¹}, and the acceptance threshold.
inline std::pair<double, double> expected_exponent(Quantity q) {
  switch (q) {
    case Quantity::energy: return {1.0, 0.85};
    case Quantity::l2: return {1.0, 0.55};
    case Quantity::linf_remainder: return {1.0, 1.0};
    case Quantity::flux_l1: return {1.0, 0.85};
    case Quantity::bc_gap: return {0.25, 0.2};
  }
  return {0.0, 0.0};
}

struct RateRow {
  int n = 0;
  double l1_dn = 0.0;
  double value = 0.0;
};

struct RateTable {
  std::string label;
  std::vector<RateRow> rows;
  RateFit fit;
  double theory_exponent = 0.0;
  double threshold = 0.0;

  bool meets_threshold() const { return fit.slope >= threshold; }
};

inline RateTable make_rate_table(std::string label, std::vector<RateRow> rows, double exponent, double threshold) {
  RateTable t;
  t.label = std::move(label);
  t.rows = std::move(rows);
  t.theory_exponent = exponent;
  t.threshold = threshold;
  std::vector<std::pair<double, double>> s;
  for (const auto& r : t.rows) s.emplace_back(r.l1_dn, r.value);
  t.fit = fit_rate(s);
  return t;
}

struct RateOptions {
  double h = 0.02;
  std::string data = "x1";
  Point probe{1.7, 0.0};
};

/// Computes the quantity for every n and fits its slope against ‖dₙ‖_{L¹}.
inline RateTable rate_harness(const InclusionFamily& f, const std::vector<int>& n_list, Quantity q,
                              const RateOptions& opt = {}) {
  if (n_list.size() < 3) throw Error(ErrorCode::too_few_samples, "a rate study needs at least 3 values of n");
  const StudyMeshes meshes(f, n_list, opt.h, q == Quantity::linf_remainder);
  const MatrixField g0 = gamma_0(f);
  const auto& g = boundary_data(opt.data);
  std::vector<RateRow> rows(n_list.size());
  parallel_for(n_list.size(), [&](std::size_t idx) {
    const int n = n_list[idx];
    const MeshPtr& mesh = meshes.at(n);
    const MatrixField gn = gamma_n(f, n);
    RateRow row;
    row.n = n;
    row.l1_dn = discrete_l1_dn(*mesh, g0, gn);
    if (q == Quantity::bc_gap) {
      const auto wd = correctors(mesh, g0, gn, Space::dirichlet);
      const auto wm = correctors(mesh, g0, gn, Space::mean_zero);
      row.value = bc_independence(g0, gn, wd, wm);
    } else {
      const ScalarField u0 = solve(mesh, g0, DirichletData{g.f});
      const ScalarField w = solve_perturbation(mesh, g0, gn, u0, Space::dirichlet);
      if (q == Quantity::energy) row.value = energy(mesh, gn, w);
      else if (q == Quantity::l2) row.value = l2_norm(w);
      else if (q == Quantity::flux_l1) row.value = flux_l1(mesh, g0, gn, w);
      else {
        const ScalarField green = greens_function(mesh, g0, opt.probe, GreenKind::dirichlet, &f.domain.k);
        const auto corr = correctors(meshes.cell_at(n), g0, gn, Space::periodic);
        const auto rec = tensor_densities(meshes.cell_at(n), g0, gn, corr);
        row.value = std::abs(w[nearest_vertex(*mesh, opt.probe)] - leading_order(rec, u0, green, row.l1_dn));
      }
    }
    rows[idx] = row;
  });
  const auto [exponent, threshold] = expected_exponent(q);
  return make_rate_table(to_string(q), std::move(rows), exponent, threshold);
}

inline void write_rate_csv(std::ostream& os, const RateTable& t) {
  os << "n,l1_dn,quantity,value\n";
  for (const auto& r : t.rows)
    os << r.n << ',' << detail::fmt_double(r.l1_dn) << ',' << t.label << ',' << detail::fmt_double(r.value) << '\n';
  os << "# slope=" << detail::fmt_double(t.fit.slope) << " residual=" << detail::fmt_double(t.fit.residual)
     << " theory_exponent=" << detail::fmt_double(t.theory_exponent) << '\n';
}

}  // namespace contrast_asym
