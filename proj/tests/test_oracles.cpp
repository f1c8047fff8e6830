#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "contrast_asym/fit.hpp"
#include "contrast_asym/geometry.hpp"
#include "contrast_asym/oracles.hpp"

namespace ca = contrast_asym;
using std::numbers::pi;

namespace {

// Unknowns ordered A1, A2, B2, A3, B3, A4, B4; written independently of the library assembly.
Eigen::VectorXd radial_coefficients_eigen(int n, double alpha, double beta) {
  const double r[3] = {1.0 - 1.0 / n, 1.0, 1.0 + 1.0 / n};
  const double c[4] = {1.0, std::pow(n, alpha), std::pow(n, beta), 1.0};
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(7, 7);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(7);
  auto ia = [](int layer) { return layer == 0 ? 0 : 2 * layer - 1; };
  auto ib = [](int layer) { return 2 * layer; };
  for (int k = 0; k < 3; ++k) {
    const double q = 1.0 / (r[k] * r[k]);
    // value: A_k + B_k q = A_{k+1} + B_{k+1} q; flux: c_k (A_k − B_k q) = c_{k+1}(A_{k+1} − B_{k+1} q)
    m(2 * k, ia(k)) += 1.0;
    if (k > 0) m(2 * k, ib(k)) += q;
    m(2 * k, ia(k + 1)) -= 1.0;
    m(2 * k, ib(k + 1)) -= q;
    m(2 * k + 1, ia(k)) += c[k];
    if (k > 0) m(2 * k + 1, ib(k)) -= c[k] * q;
    m(2 * k + 1, ia(k + 1)) -= c[k + 1];
    m(2 * k + 1, ib(k + 1)) += c[k + 1] * q;
  }
  m(6, ia(3)) = 1.0;
  m(6, ib(3)) = 0.25;
  rhs(6) = 1.0;
  return m.fullPivLu().solve(rhs);
}

// Midpoint rule in polar coordinates for ‖u − x₁‖ over B(0,2).
struct Quadrature {
  double l1 = 0.0, l2 = 0.0, sup = 0.0;
};

Quadrature quadrature(const ca::LayeredSolution& s) {
  Quadrature q;
  const int nr = 1000, nt = 1024;
  std::vector<double> breaks{0.0};
  breaks.insert(breaks.end(), s.radii.begin(), s.radii.end());
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double a = breaks[k], b = breaks[k + 1], dr = (b - a) / nr;
    for (int i = 0; i < nr; ++i) {
      const double r = a + (i + 0.5) * dr;
      for (int j = 0; j < nt; ++j) {
        const double t = (j + 0.5) * 2.0 * pi / nt;
        const ca::Point x{r * std::cos(t), r * std::sin(t)};
        const double w = std::abs(s.value(x) - x[0]);
        const double da = r * dr * 2.0 * pi / nt;
        q.l1 += w * da;
        q.l2 += w * w * da;
        q.sup = std::max(q.sup, w);
      }
    }
  }
  q.l2 = std::sqrt(q.l2);
  return q;
}

TEST(Radial, HomogeneousMediumIsIdentity) {
  const auto s = ca::radial_solution(2, 10, 0.0, 0.0);
  for (double a : s.A) EXPECT_NEAR(a, 1.0, 1e-14);
  for (double b : s.B) EXPECT_NEAR(b, 0.0, 1e-14);
  const auto p = ca::radial_perturbation(s);
  EXPECT_NEAR(p.sup, 0.0, 1e-14);
  EXPECT_NEAR(p.l1, 0.0, 1e-14);
}

TEST(Radial, CoefficientsMatchIndependentSolve) {
  for (int n : {3, 10, 100}) {
    const auto s = ca::radial_solution(2, n, 0.5, -0.5);
    const auto x = radial_coefficients_eigen(n, 0.5, -0.5);
    const double got[7] = {s.A[0], s.A[1], s.B[1], s.A[2], s.B[2], s.A[3], s.B[3]};
    for (int k = 0; k < 7; ++k) EXPECT_NEAR(got[k], x(k), 1e-10 * std::max(1.0, std::abs(x(k))));
  }
}

TEST(Radial, LibrarySystemMatchesEigenSolve) {
  const auto [a, b] = ca::layered_system(3, {0.5, 0.9, 1.3, 2.0}, {1.0, 7.0, 0.2, 1.0});
  const Eigen::Index n = Eigen::Index(b.size());
  const Eigen::MatrixXd m = Eigen::Map<const Eigen::Matrix<double, -1, -1, Eigen::RowMajor>>(a.data(), n, n);
  const Eigen::VectorXd x = m.fullPivLu().solve(Eigen::Map<const Eigen::VectorXd>(b.data(), n));
  const auto s = ca::layered_solution(3, {0.5, 0.9, 1.3, 2.0}, {1.0, 7.0, 0.2, 1.0});
  for (Eigen::Index k = 0; k < 4; ++k) EXPECT_NEAR(s.A[k], x(k), 1e-12);
  for (Eigen::Index k = 1; k < 4; ++k) EXPECT_NEAR(s.B[k], x(3 + k), 1e-12);
}

TEST(Radial, ResidualsVanish) {
  for (int d : {2, 3})
    for (int n : {2, 8, 64, 512})
      for (auto [al, be] : {std::pair{0.5, -0.5}, {0.9, 0.3}, {-0.7, -0.7}, {1.5, 0.0}})
        for (double r : ca::layered_residuals(ca::radial_solution(d, n, al, be))) EXPECT_LT(r, 1e-10);
}

TEST(Radial, ConvergentCaseApproachesIdentity) {
  double prev_a = 1.0, prev_b = 1.0;
  for (int n : {10, 100, 1000}) {
    const auto s = ca::radial_solution(2, n, 0.5, -0.5);
    EXPECT_LT(std::abs(s.A[0] - 1.0), prev_a);
    EXPECT_LT(std::abs(s.B[3]), prev_b);
    prev_a = std::abs(s.A[0] - 1.0);
    prev_b = std::abs(s.B[3]);
  }
}

TEST(Radial, NormsMatchQuadrature) {
  for (auto [al, be] : {std::pair{0.5, -0.5}, {1.5, 0.0}, {-0.3, 0.8}}) {
    const auto s = ca::radial_solution(2, 8, al, be);
    const auto q = quadrature(s);
    const auto p = ca::radial_perturbation(s);
    EXPECT_NEAR(p.l1, q.l1, 1e-4 * q.l1);
    EXPECT_NEAR(ca::radial_perturbation_l2(s), q.l2, 1e-4 * q.l2);
    EXPECT_GE(p.sup, q.sup - 1e-12);
    EXPECT_NEAR(p.sup, q.sup, 1e-2 * q.sup);
  }
}

TEST(Radial, EnergyMatchesQuadrature) {
  const auto s = ca::radial_solution(2, 8, 0.5, -0.5);
  double e = 0.0;
  std::vector<double> breaks{0.0};
  breaks.insert(breaks.end(), s.radii.begin(), s.radii.end());
  const int nr = 4000, nt = 64;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double dr = (breaks[k + 1] - breaks[k]) / nr;
    for (int i = 0; i < nr; ++i) {
      const double r = breaks[k] + (i + 0.5) * dr;
      for (int j = 0; j < nt; ++j) {
        const double t = (j + 0.5) * 2.0 * pi / nt;
        const auto g = s.gradient({r * std::cos(t), r * std::sin(t)});
        e += s.c[k] * ((g[0] - 1.0) * (g[0] - 1.0) + g[1] * g[1]) * r * dr * 2.0 * pi / nt;
      }
    }
  }
  EXPECT_NEAR(ca::radial_perturbation_energy(s), e, 1e-4 * e);
}

TEST(Radial, SupNormDecaysAtRateDelta) {
  std::vector<std::pair<double, double>> pts;
  for (int n : {8, 16, 32, 64, 128}) pts.emplace_back(n, ca::radial_perturbation(ca::radial_solution(2, n, 0.5, -0.5)).sup);
  EXPECT_NEAR(ca::fit_rate(pts).slope, -0.5, 0.15);
}

TEST(Radial, SupNormStaysAwayFromZeroOutsideWindow) {
  for (int n = 8; n <= 512; n *= 2) EXPECT_GT(ca::radial_perturbation(ca::radial_solution(2, n, 1.5, 0.0)).sup, 0.5);
}

TEST(Radial, TwoSidedL1Sandwich) {
  // One constant per exponent pair; both ratios settle, so the band does not drift with n.
  const double C = 50.0;
  for (auto [al, be] : {std::pair{0.5, -0.5}, {0.0, -0.5}, {-0.5, 0.5}, {0.9, 0.0}}) {
    const auto fam = ca::radial_annuli(al, be);
    double lower = 0.0, upper = 0.0;
    for (int n = 8; n <= 512; n *= 2) {
      const auto p = ca::radial_perturbation(ca::radial_solution(2, n, al, be));
      const double l1 = ca::l1_dn(fam, n);
      EXPECT_GE(p.l1, l1 / C) << n;
      EXPECT_LE(p.sup, C * l1) << n;
      if (n == 256) lower = p.l1 / l1, upper = p.sup / l1;
      if (n == 512) {
        EXPECT_NEAR(p.l1 / l1 / lower, 1.0, 0.1);
        EXPECT_NEAR(p.sup / l1 / upper, 1.0, 0.1);
      }
    }
  }
}

TEST(Radial, InvalidInputs) {
  EXPECT_THROW(ca::radial_solution(2, 1, 0.5, -0.5), ca::Error);
  EXPECT_THROW(ca::radial_solution(1, 8, 0.5, -0.5), ca::Error);
}

TEST(Radial, CsvRow) {
  std::ostringstream os;
  ca::write_radial_csv_header(os);
  ca::write_radial_csv_row(os, ca::radial_solution(2, 4, 0.0, 0.0));
  EXPECT_EQ(os.str(), "n,alpha,beta,A1,A2,A3,A4,B2,B3,B4\n4,0,0,1,1,1,1,0,0,0\n");
}

ca::Point elliptic_point(double xi, double eta) { return {std::cosh(xi) * std::cos(eta), std::sinh(xi) * std::sin(eta)}; }

TEST(Elliptic, UnitContrastIsIdentity) {
  const auto s = ca::elliptic_solution(8, 1.0);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> xi(0.0, 2.0), eta(0.0, 2.0 * pi);
  for (int k = 0; k < 10; ++k) {
    const auto x = elliptic_point(xi(rng), eta(rng));
    for (int i = 0; i < 2; ++i) EXPECT_NEAR(s.value(i, x), x[i], 1e-12);
  }
  EXPECT_EQ(s.ell[0], 0.0);
  EXPECT_EQ(s.ell[1], 0.0);
}

TEST(Elliptic, TransmissionConditionsHold) {
  for (double lam : {0.01, 0.5, 4.0, 300.0}) {
    const auto s = ca::elliptic_solution(16, lam);
    for (double r : ca::elliptic_residuals(s)) EXPECT_LT(r, 1e-10);
    // Pointwise continuity of u and of the conormal flux across ξ = 1/16, by one-sided differences.
    const double e = 1e-6;
    for (double eta : {0.3, 1.1, 2.5, 4.0}) {
      const auto pin = elliptic_point(s.xi1 - e, eta), pout = elliptic_point(s.xi1 + e, eta);
      for (int i = 0; i < 2; ++i) {
        const auto tin = elliptic_point(s.xi1 - 2 * e, eta), tout = elliptic_point(s.xi1 + 2 * e, eta);
        const double vin = 2.0 * s.value(i, pin) - s.value(i, tin);
        const double vout = 2.0 * s.value(i, pout) - s.value(i, tout);
        EXPECT_NEAR(vin, vout, 1e-8 * (std::abs(vout) + 1.0));
        const double fin = lam * (s.value(i, pin) - s.value(i, tin)) / e;
        const double fout = (s.value(i, tout) - s.value(i, pout)) / e;
        EXPECT_NEAR(fin, fout, 1e-3 * (std::abs(fout) + 1e-3));
      }
      const auto pb = elliptic_point(2.0, eta);
      for (int i = 0; i < 2; ++i) EXPECT_NEAR(s.value(i, pb), pb[i], 1e-12);
    }
  }
}

TEST(Elliptic, DensityIsDiagonal) {
  const auto s = ca::elliptic_solution(8, 5.0);
  const double dn = std::numbers::sqrt2 * (5.0 + 0.2);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> xi(0.0, s.xi1), eta(0.0, 2.0 * pi);
  for (int k = 0; k < 10; ++k) {
    const auto x = elliptic_point(0.999 * xi(rng), eta(rng));
    for (int i = 0; i < 2; ++i) {
      auto g = s.gradient(i, x);
      g[i] -= 1.0;
      for (int j = 0; j < 2; ++j) {
        const double v = (1.0 - 5.0) * g[j] / dn;
        if (i == j) EXPECT_NEAR(v, s.ell[i], 1e-12);
        else EXPECT_NEAR(v, 0.0, 1e-10);
      }
    }
  }
}

TEST(Elliptic, ConductiveTrend) {
  // λ = √n: ℓ² increases toward 1/√2 and ℓ¹ decreases toward 0.
  double l1 = 1.0, l2 = 0.0;
  for (int n : {16, 64, 256, 1024, 4096}) {
    const auto s = ca::elliptic_solution(n, std::sqrt(double(n)));
    EXPECT_LT(s.ell[0], l1);
    EXPECT_GT(s.ell[1], l2);
    EXPECT_LT(s.ell[1], 1.0 / std::numbers::sqrt2);
    l1 = s.ell[0];
    l2 = s.ell[1];
  }
  const double gap1 = 1.0 / std::numbers::sqrt2 - ca::elliptic_solution(1024, 32.0).ell[1];
  const double gap2 = 1.0 / std::numbers::sqrt2 - ca::elliptic_solution(4096, 64.0).ell[1];
  EXPECT_NEAR(gap1 / gap2, 2.0, 0.3);
}

TEST(Elliptic, InsulatingTrend) {
  // λ = 1/n: two-point ratios of ℓ¹ approach 4, ℓ² stays bounded.
  std::vector<double> l1, l2;
  for (int n : {16, 32, 64}) {
    const auto s = ca::elliptic_solution(n, 1.0 / n);
    l1.push_back(s.ell[0]);
    l2.push_back(s.ell[1]);
  }
  EXPECT_NEAR(l1[0] / l1[1], 4.0, 0.5);
  EXPECT_NEAR(l1[1] / l1[2], 4.0, 0.5);
  for (double v : l2) EXPECT_LT(std::abs(v), 1.0);
  EXPECT_LT(std::abs(l2[2] - l2[1]), std::abs(l2[1] - l2[0]));
}

TEST(Elliptic, LimitTensors) {
  const double r = 1.0 / std::numbers::sqrt2;
  const auto c = ca::elliptic_limit_tensors(ca::EllipticLimit::conductive);
  EXPECT_EQ(c.W(0, 0), 0.0);
  EXPECT_EQ(c.W(1, 1), r);
  EXPECT_EQ(c.D(0, 0), r);
  EXPECT_EQ(c.D(1, 1), r);
  EXPECT_EQ(c.M(0, 0), r);
  EXPECT_EQ(c.M(1, 1), 0.0);
  const auto i = ca::elliptic_limit_tensors(ca::EllipticLimit::insulating);
  for (int k = 0; k < 2; ++k) {
    EXPECT_EQ(i.W(k, k), 0.0);
    EXPECT_EQ(i.D(k, k), -r);
    EXPECT_EQ(i.M(k, k), -r);
  }
  for (const auto& t : {c, i})
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        EXPECT_EQ(t.M(a, b), t.D(a, b) - t.W(a, b));
        if (a != b) EXPECT_EQ(t.W(a, b), 0.0);
        else {
          EXPECT_GE(t.W(a, b), 0.0);
          EXPECT_LE(t.W(a, b), r);
        }
      }
}

TEST(Elliptic, DensitiesSatisfyReussBounds) {
  for (double q : {-1.0, -0.5, 0.5, 0.9})
    for (int n : {8, 64, 512}) {
      const auto t = ca::elliptic_densities(ca::elliptic_solution(n, std::pow(n, q)));
      for (int k = 0; k < 2; ++k) {
        EXPECT_GE(t.W(k, k), -1e-14);
        EXPECT_LE(t.W(k, k), 1.0 / std::numbers::sqrt2 + 1e-14);
        EXPECT_NEAR(t.M(k, k), t.D(k, k) - t.W(k, k), 1e-15);
      }
    }
}

TEST(Elliptic, InvalidInputs) {
  EXPECT_THROW(ca::elliptic_solution(1, 2.0), ca::Error);
  EXPECT_THROW(ca::elliptic_solution(8, -1.0), ca::Error);
}

}  // namespace
