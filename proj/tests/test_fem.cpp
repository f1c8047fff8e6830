#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "contrast_asym/fem.hpp"
#include "contrast_asym/fit.hpp"
#include "contrast_asym/oracles.hpp"

namespace ca = contrast_asym;

namespace {

const ca::MatrixField kIdentity = ca::MatrixField::constant(ca::SymMat2::identity(1.0));

ca::MeshPtr disk_mesh(double h) { return ca::share(ca::build_domain_mesh(ca::Disk{{0, 0}, 2.0}, h)); }

double max_abs(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

// ∫γ∇u·∇v for P1 fields.
double bilinear(const ca::Mesh& m, const std::vector<ca::SymMat2>& cells, const std::vector<double>& u,
                const std::vector<double>& v) {
  double s = 0.0;
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const auto g = ca::tri_geom(m, t);
    s += g.area * ca::dot<2>(cells[t] * ca::cell_gradient(m, g, t, u), ca::cell_gradient(m, g, t, v));
  }
  return s;
}

TEST(Solve, LinearDataIsReproducedExactly) {
  const auto mesh = disk_mesh(0.1);
  const auto u = ca::solve(mesh, kIdentity, ca::DirichletData{[](ca::Point x) { return x[0]; }});
  for (std::size_t v = 0; v < mesh->vertices.size(); ++v) EXPECT_NEAR(u[v], mesh->vertices[v][0], 1e-10);
  EXPECT_TRUE(u.info.warnings.empty());
}

TEST(Solve, LinearDataWithConstantAnisotropy) {
  const auto mesh = disk_mesh(0.1);
  ca::SymMat2 g;
  g.set(0, 0, 3.0);
  g.set(0, 1, 0.7);
  g.set(1, 1, 0.5);
  const auto f = [](ca::Point x) { return 2.0 * x[0] - x[1]; };
  const auto u = ca::solve(mesh, ca::MatrixField::constant(g), ca::DirichletData{f});
  for (std::size_t v = 0; v < mesh->vertices.size(); ++v) EXPECT_NEAR(u[v], f(mesh->vertices[v]), 1e-10);
}

TEST(Solve, RadialShellsMatchLayeredOracle) {
  const int n = 8;
  const auto fam = ca::radial_annuli(0.5, -0.5);
  const auto mesh = ca::share(ca::build_mesh(fam, n, 0.02));
  const auto u = ca::solve(mesh, ca::gamma_n(fam, n), ca::DirichletData{[](ca::Point x) { return x[0]; }});
  const auto s = ca::radial_solution(2, n, 0.5, -0.5);
  const auto exact = ca::interpolate(mesh, [&](ca::Point x) { return s.value(x); });
  EXPECT_LT(ca::l2_norm(u - exact) / ca::l2_norm(exact), 0.02);
}

TEST(Solve, P1ConvergesAtSecondOrder) {
  const auto exact = [](ca::Point x) { return std::exp(0.5 * x[0]) * std::cos(0.5 * x[1]); };
  std::vector<std::pair<double, double>> samples;
  for (double h : {0.2, 0.1, 0.05, 0.025}) {
    const auto mesh = disk_mesh(h);
    const auto u = ca::solve(mesh, kIdentity, ca::DirichletData{exact});
    const auto e = ca::interpolate(mesh, exact);
    samples.emplace_back(h, ca::l2_norm(u - e) / ca::l2_norm(e));
  }
  EXPECT_GE(ca::fit_rate(samples).slope, 1.8);
}

TEST(Solve, DirichletValuesAreImposedExactly) {
  const auto fam = ca::radial_annuli(0.5, -0.5);
  const auto mesh = ca::share(ca::build_mesh(fam, 4, 0.1));
  const auto g = [](ca::Point x) { return x[0] * x[1] + 0.3; };
  const auto u = ca::solve(mesh, ca::gamma_n(fam, 4), ca::DirichletData{g});
  const auto mask = ca::boundary_vertex_mask(*mesh);
  for (std::size_t v = 0; v < mask.size(); ++v)
    if (mask[v]) EXPECT_EQ(u[v], g(mesh->vertices[v]));
}

TEST(Solve, GalerkinResidualAndMaximumPrinciple) {
  const auto fam = ca::radial_annuli(0.5, -0.5);
  const auto mesh = ca::share(ca::build_mesh(fam, 8, 0.05));
  const auto g = [](ca::Point x) { return x[0]; };
  const auto u = ca::solve(mesh, ca::gamma_n(fam, 8), ca::DirichletData{g});
  EXPECT_LT(ca::interior_residual(mesh, ca::gamma_n(fam, 8), u), 1e-10);
  for (double v : u.values) {
    EXPECT_GE(v, -2.0 - 1e-8);
    EXPECT_LE(v, 2.0 + 1e-8);
  }
}

TEST(Solve, NeumannWithDiscreteFluxReproducesDirichlet) {
  const auto fam = ca::radial_annuli(0.5, -0.5);
  const auto mesh = ca::share(ca::build_mesh(fam, 4, 0.05));
  const auto gamma = ca::gamma_n(fam, 4);
  const auto ud = ca::solve(mesh, gamma, ca::DirichletData{[](ca::Point x) { return x[0] - 0.5 * x[1]; }});
  auto load = ca::nodal_flux(*mesh, ca::cell_values(*mesh, gamma), ud.values);
  const auto mask = ca::boundary_vertex_mask(*mesh);
  for (std::size_t v = 0; v < load.size(); ++v)
    if (!mask[v]) load[v] = 0.0;
  const auto un = ca::solve(mesh, gamma, ca::NeumannLoad{load});
  const double shift = ca::integral(ud) / ca::domain_area(*mesh);
  auto aligned = ud;
  for (double& v : aligned.values) v -= shift;
  EXPECT_LT(ca::l2_norm(un - aligned) / ca::l2_norm(aligned), 1e-6);
}

TEST(Solve, NeumannWithAnalyticFluxConverges) {
  // u = x₁² − x₂² on B(0,2): ∇u·ν = x₁² − x₂² on |x| = 2.
  const auto exact = [](ca::Point x) { return x[0] * x[0] - x[1] * x[1]; };
  const auto mesh = disk_mesh(0.05);
  const auto u = ca::solve(mesh, kIdentity, ca::NeumannData{exact});
  EXPECT_LT(std::abs(ca::integral(u)), 1e-10 * ca::l2_norm(u));
  const auto e = ca::interpolate(mesh, exact);
  EXPECT_LT(ca::l2_norm(u - e) / ca::l2_norm(e), 5e-3);
}

TEST(Solve, IncompatibleNeumannDataIsRejected) {
  const auto mesh = disk_mesh(0.2);
  try {
    ca::solve(mesh, kIdentity, ca::NeumannData{[](ca::Point) { return 1.0; }});
    FAIL();
  } catch (const ca::Error& e) {
    EXPECT_EQ(e.code(), ca::ErrorCode::nonzero_flux);
  }
}

TEST(Solve, ExtremeContrastWarns) {
  const auto fam = ca::disk_inclusion(0.2, 10.0);
  const auto mesh = ca::share(ca::build_mesh(fam, 1, 0.1));
  auto gamma = ca::MatrixField::constant(ca::SymMat2::identity(1e-4));
  gamma.regions.emplace_back(ca::Region::A, [](ca::Point) { return ca::SymMat2::identity(1e5); });
  const auto u = ca::solve(mesh, gamma, ca::DirichletData{[](ca::Point x) { return x[0]; }});
  EXPECT_FALSE(u.info.warnings.empty());
}

TEST(Perturbation, EqualConductivitiesGiveZero) {
  const auto fam = ca::radial_annuli(0.5, -0.5);
  const auto mesh = ca::share(ca::build_mesh(fam, 8, 0.05));
  const auto g0 = ca::gamma_0(fam);
  const auto u0 = ca::solve(mesh, g0, ca::DirichletData{[](ca::Point x) { return x[0]; }});
  for (auto space : {ca::Space::dirichlet, ca::Space::mean_zero}) {
    const auto w = ca::solve_perturbation(mesh, g0, g0, u0, space);
    EXPECT_EQ(max_abs(w.values), 0.0);
  }
}

TEST(Perturbation, SumMatchesDirectSolve) {
  const int n = 8;
  const auto fam = ca::radial_annuli(0.5, -0.5);
  const auto mesh = ca::share(ca::build_mesh(fam, n, 0.05));
  const ca::DirichletData g{[](ca::Point x) { return x[0]; }};
  const auto u0 = ca::solve(mesh, ca::gamma_0(fam), g);
  const auto un = ca::solve(mesh, ca::gamma_n(fam, n), g);
  const auto w = ca::solve_perturbation(mesh, ca::gamma_0(fam), ca::gamma_n(fam, n), u0, ca::Space::dirichlet);
  EXPECT_LT(max_abs((u0 + w - un).values), 1e-8);
}

TEST(Perturbation, IsTheEnergyMinimiser) {
  const int n = 8;
  const auto fam = ca::radial_annuli(0.5, -0.5);
  const auto mesh = ca::share(ca::build_mesh(fam, n, 0.05));
  const auto u0 = ca::solve(mesh, ca::gamma_0(fam), ca::DirichletData{[](ca::Point x) { return x[0]; }});
  const auto w = ca::solve_perturbation(mesh, ca::gamma_0(fam), ca::gamma_n(fam, n), u0, ca::Space::dirichlet);
  const auto cn = ca::cell_values(*mesh, ca::gamma_n(fam, n));
  auto diff = ca::cell_values(*mesh, ca::gamma_0(fam));
  for (std::size_t t = 0; t < diff.size(); ++t) diff[t] = ca::SymMat2(diff[t] - cn[t]);
  auto functional = [&](const std::vector<double>& v) {
    return 0.5 * bilinear(*mesh, cn, v, v) - bilinear(*mesh, diff, u0.values, v);
  };
  const double jw = functional(w.values);
  const auto mask = ca::boundary_vertex_mask(*mesh);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    auto v = w.values;
    for (std::size_t k = 0; k < v.size(); ++k)
      if (!mask[k]) v[k] += 1e-3 * uni(rng);
    EXPECT_GE(functional(v), jw - 1e-10);
  }
}

TEST(Perturbation, EnergyAndFluxBounds) {
  for (int n : {4, 8, 16}) {
    const auto fam = ca::radial_annuli(0.5, -0.5);
    const auto mesh = ca::share(ca::build_mesh(fam, n, 0.03));
    const auto u0 = ca::solve(mesh, ca::gamma_0(fam), ca::DirichletData{[](ca::Point x) { return x[0]; }});
    const auto gn = ca::gamma_n(fam, n);
    const auto w = ca::solve_perturbation(mesh, ca::gamma_0(fam), gn, u0, ca::Space::dirichlet);
    const double sup = ca::grad_sup_on(u0, fam.domain.k);
    EXPECT_LE(ca::energy(mesh, gn, w), 1.05 * ca::l1_dn(fam, n) * sup * sup);
  }
}

TEST(Perturbation, MeanZeroConstraintHolds) {
  const auto fam = ca::disk_inclusion(0.2, 10.0);
  const auto mesh = ca::share(ca::build_mesh(fam, 1, 0.05));
  const auto u0 = ca::solve(mesh, ca::gamma_0(fam), ca::DirichletData{[](ca::Point x) { return x[1]; }});
  const auto w = ca::solve_perturbation(mesh, ca::gamma_0(fam), ca::gamma_n(fam, 1), u0, ca::Space::mean_zero);
  EXPECT_LT(std::abs(ca::integral(w)) / ca::domain_area(*mesh), 1e-10 * max_abs(w.values));
}

TEST(Perturbation, PeriodicCellCorrector) {
  const auto fam = ca::disk_inclusion(0.2, 10.0);
  const ca::PeriodicCell cell{0.5, 0.5};
  const auto mesh = ca::share(ca::retag(ca::polar_mesh({0, 0}, 0.4, {0.2}, 0.02, &cell), fam, 1));
  ASSERT_TRUE(mesh->periodic());
  const auto u0 = ca::interpolate(mesh, [](ca::Point x) { return x[0]; });
  const auto w = ca::solve_perturbation(mesh, ca::gamma_0(fam), ca::gamma_n(fam, 1), u0, ca::Space::periodic);
  for (std::size_t v = 0; v < w.values.size(); ++v) EXPECT_EQ(w[v], w[mesh->periodic_master[v]]);
  EXPECT_LT(std::abs(ca::integral(w)), 1e-10 * max_abs(w.values));
  EXPECT_NEAR(ca::domain_area(*mesh), 1.0, 1e-12);
  // Symmetry of the inclusion: the corrector of x₁ is odd in x₁ and even in x₂.
  const auto ref = ca::interpolate(mesh, [](ca::Point x) { return x[0]; });
  EXPECT_GT(ca::l2_norm(w), 0.0);
  double odd = 0.0;
  for (std::size_t v = 0; v < w.values.size(); ++v) odd += w[v] * ref[v];
  EXPECT_LT(odd, 0.0);
}

TEST(Perturbation, PeriodicSpaceNeedsPeriodicMesh) {
  const auto mesh = disk_mesh(0.2);
  const auto u0 = ca::interpolate(mesh, [](ca::Point x) { return x[0]; });
  EXPECT_THROW(ca::solve_perturbation(mesh, kIdentity, kIdentity, u0, ca::Space::periodic), ca::Error);
}

TEST(Energy, ClosedFormValues) {
  const auto sq = ca::share(ca::build_domain_mesh(ca::Rectangle{{0, 0}, {1, 1}}, 0.1));
  EXPECT_EQ(ca::energy(sq, kIdentity, ca::interpolate(sq, [](ca::Point) { return 0.0; })), 0.0);
  EXPECT_NEAR(ca::energy(sq, kIdentity, ca::interpolate(sq, [](ca::Point x) { return x[0]; })), 1.0, 1e-13);
  EXPECT_NEAR(ca::energy(sq, ca::MatrixField::constant(ca::SymMat2::identity(3.0)),
                         ca::interpolate(sq, [](ca::Point x) { return x[0] + x[1]; })),
              6.0, 1e-12);
}

TEST(Energy, MismatchedMeshesAreRejected) {
  const auto a = disk_mesh(0.2), b = disk_mesh(0.2);
  EXPECT_THROW(ca::energy(a, kIdentity, ca::interpolate(b, [](ca::Point) { return 1.0; })), ca::Error);
}

TEST(Green, DirichletReciprocity) {
  const auto mesh = disk_mesh(0.05);
  const ca::Point y1{0.7, 0.3}, y2{-0.9, -0.6};
  const auto i1 = ca::nearest_vertex(*mesh, y1), i2 = ca::nearest_vertex(*mesh, y2);
  const auto g1 = ca::greens_function(mesh, kIdentity, y1, ca::GreenKind::dirichlet);
  const auto g2 = ca::greens_function(mesh, kIdentity, y2, ca::GreenKind::dirichlet);
  EXPECT_LT(std::abs(g1[i2] - g2[i1]) / std::abs(g1[i2]), 1e-8);
}

TEST(Green, NeumannReciprocityAndBoundaryMean) {
  const auto mesh = disk_mesh(0.05);
  const ca::Point y1{0.4, -0.2}, y2{-1.1, 0.5};
  const auto i1 = ca::nearest_vertex(*mesh, y1), i2 = ca::nearest_vertex(*mesh, y2);
  const auto g1 = ca::greens_function(mesh, kIdentity, y1, ca::GreenKind::neumann);
  const auto g2 = ca::greens_function(mesh, kIdentity, y2, ca::GreenKind::neumann);
  EXPECT_LT(std::abs(ca::boundary_mean(g1)), 1e-10 * max_abs(g1.values));
  EXPECT_LT(std::abs(g1[i2] - g2[i1]) / std::abs(g1[i2]), 1e-8);
}

TEST(Green, MatchesLogarithmAwayFromPole) {
  // Dirichlet Green function of B(0,2) with pole at 0 is (1/2π)log(|x|/2).
  std::vector<double> errs;
  for (double h : {0.1, 0.05, 0.025}) {
    const auto mesh = disk_mesh(h);
    const auto g = ca::greens_function(mesh, kIdentity, {0, 0}, ca::GreenKind::dirichlet);
    double e = 0.0;
    for (std::size_t v = 0; v < mesh->vertices.size(); ++v) {
      const double r = std::hypot(mesh->vertices[v][0], mesh->vertices[v][1]);
      if (r > 0.3) e = std::max(e, std::abs(g[v] - std::log(r / 2.0) / (2.0 * std::numbers::pi)));
    }
    errs.push_back(e);
  }
  EXPECT_LT(errs[1], errs[0]);
  EXPECT_LT(errs[2], errs[1]);
  EXPECT_LT(errs[2], 1e-3);
}

TEST(Green, ScreenedSingularityStaysBounded) {
  std::vector<double> screened;
  for (double h : {0.1, 0.05, 0.025}) {
    const auto mesh = disk_mesh(h);
    const ca::Point y{0.5, 0.0};
    const auto g = ca::greens_function(mesh, kIdentity, y, ca::GreenKind::dirichlet);
    double s = 0.0;
    for (std::size_t v = 0; v < mesh->vertices.size(); ++v) {
      const double r = ca::distance(mesh->vertices[v], y);
      if (r > 1e-12 && r < 0.3) s = std::max(s, std::abs(g[v] - std::log(r) / (2.0 * std::numbers::pi)));
    }
    screened.push_back(s);
  }
  for (double s : screened) EXPECT_LT(s, 0.5);
  EXPECT_LT(std::abs(screened[2] - screened[1]), 0.05);
}

TEST(Green, PoleInsideKIsRejected) {
  const auto fam = ca::disk_inclusion(0.2, 10.0);
  const auto mesh = disk_mesh(0.2);
  try {
    ca::greens_function(mesh, kIdentity, {0.1, 0.0}, ca::GreenKind::dirichlet, &fam.domain.k);
    FAIL();
  } catch (const ca::Error& e) {
    EXPECT_EQ(e.code(), ca::ErrorCode::point_inside_k);
  }
}

TEST(FieldText, RoundTripAndCoverage) {
  const auto mesh = disk_mesh(0.3);
  const auto u = ca::interpolate(mesh, [](ca::Point x) { return std::sin(x[0]) / 3.0; });
  std::stringstream ss;
  ca::write_field(ss, u);
  const auto r = ca::read_field(ss, mesh);
  EXPECT_EQ(r.values, u.values);
  std::istringstream partial("0 1.0\n");
  EXPECT_THROW(ca::read_field(partial, mesh), ca::Error);
}

}  // namespace
