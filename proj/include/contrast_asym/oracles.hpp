#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "contrast_asym/error.hpp"
#include "contrast_asym/geometry.hpp"
#include "contrast_asym/mesh.hpp"
#include "contrast_asym/tensors.hpp"

namespace contrast_asym {

// ---------------------------------------------------------------------------
// Dense linear algebra for small systems

/// Gaussian elimination with partial pivoting; a is row-major n×n.
inline std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = b.size();
  if (a.size() != n * n) throw Error(ErrorCode::config, "dense_solve: size mismatch");
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i * n + k]) > std::abs(a[piv * n + k])) piv = i;
    if (a[piv * n + k] == 0.0 || !std::isfinite(a[piv * n + k]))
      throw Error(ErrorCode::invalid_conductivity, "singular transmission system");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
      std::swap(b[k], b[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a[i * n + k] / a[k * n + k];
      if (f == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t k = n; k-- > 0;) {
    double s = b[k];
    for (std::size_t j = k + 1; j < n; ++j) s -= a[k * n + j] * x[j];
    x[k] = s / a[k * n + k];
  }
  return x;
}

// ---------------------------------------------------------------------------
// Radially layered media

inline double sphere_area(int d) { return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d); }

/// ∫_{S^{d−1}} |ω₁| dω.
inline double sphere_abs_moment(int d) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * (d - 1)) / std::tgamma(0.5 * (d + 1));
}

/// u = x₁·(Aᵢ + Bᵢ|x|^{−d}) on layer i, layers separated by `radii`, u = x₁ on the outer radius.
struct LayeredSolution {
  int d = 2;
  std::vector<double> radii;  ///< interfaces followed by the outer radius, ascending
  std::vector<double> c;      ///< conductivity per layer, innermost first
  std::vector<double> A;
  std::vector<double> B;      ///< B[0] == 0

  std::size_t layer(double r) const {
    std::size_t k = 0;
    while (k + 1 < c.size() && r > radii[k]) ++k;
    return k;
  }

  double value(const Point& x) const {
    const double r = std::hypot(x[0], x[1]);
    const std::size_t k = layer(r);
    return x[0] * (A[k] + (B[k] == 0.0 ? 0.0 : B[k] * std::pow(r, -d)));
  }

  Point gradient(const Point& x) const {
    const double r = std::hypot(x[0], x[1]);
    const std::size_t k = layer(r);
    if (B[k] == 0.0) return {A[k], 0.0};
    const double rd = std::pow(r, -d);
    const double f = -d * B[k] * rd / (r * r);
    return {A[k] + B[k] * rd + f * x[0] * x[0], f * x[0] * x[1]};
  }
};

/// Residuals of the continuity, flux and outer conditions, each relative to its largest term.
inline std::vector<double> layered_residuals(const LayeredSolution& s) {
  std::vector<double> out;
  const int d = s.d;
  for (std::size_t k = 0; k + 1 < s.c.size(); ++k) {
    const double r = s.radii[k], rd = std::pow(r, -d);
    const double u0 = s.A[k] + s.B[k] * rd, u1 = s.A[k + 1] + s.B[k + 1] * rd;
    out.push_back(std::abs(u0 - u1) / std::max({std::abs(u0), std::abs(u1), 1e-300}));
    const double f0 = s.c[k] * (s.A[k] + (1 - d) * s.B[k] * rd);
    const double f1 = s.c[k + 1] * (s.A[k + 1] + (1 - d) * s.B[k + 1] * rd);
    out.push_back(std::abs(f0 - f1) / std::max({std::abs(f0), std::abs(f1), 1e-300}));
  }
  const double R = s.radii.back();
  out.push_back(std::abs(s.A.back() + s.B.back() * std::pow(R, -d) - 1.0));
  return out;
}

/// Matrix and right-hand side of the layered transmission problem; unknowns A₁..A_L, B₂..B_L.
inline std::pair<std::vector<double>, std::vector<double>> layered_system(int d, const std::vector<double>& radii,
                                                                           const std::vector<double>& c) {
  const std::size_t L = c.size();
  const std::size_t n = 2 * L - 1;
  std::vector<double> a(n * n, 0.0), b(n, 0.0);
  auto col_a = [](std::size_t k) { return k; };
  auto col_b = [L](std::size_t k) { return L + k - 1; };
  std::size_t row = 0;
  for (std::size_t k = 0; k + 1 < L; ++k) {
    const double rd = std::pow(radii[k], -d);
    a[row * n + col_a(k)] = 1.0;
    if (k > 0) a[row * n + col_b(k)] = rd;
    a[row * n + col_a(k + 1)] = -1.0;
    a[row * n + col_b(k + 1)] = -rd;
    ++row;
    a[row * n + col_a(k)] = c[k];
    if (k > 0) a[row * n + col_b(k)] = c[k] * (1 - d) * rd;
    a[row * n + col_a(k + 1)] = -c[k + 1];
    a[row * n + col_b(k + 1)] = -c[k + 1] * (1 - d) * rd;
    ++row;
  }
  a[row * n + col_a(L - 1)] = 1.0;
  if (L > 1) a[row * n + col_b(L - 1)] = std::pow(radii.back(), -d);
  b[row] = 1.0;
  return {a, b};
}

inline LayeredSolution layered_solution(int d, std::vector<double> radii, std::vector<double> c) {
  if (d < 2) throw Error(ErrorCode::unsupported_dimension, "layered solution needs d >= 2");
  if (radii.size() != c.size()) throw Error(ErrorCode::config, "need one radius per layer");
  for (double v : c) require_conductivity(SymMat2::identity(v), "layer conductivity");
  for (std::size_t k = 1; k < radii.size(); ++k)
    if (!(radii[k] > radii[k - 1])) throw Error(ErrorCode::config, "layer radii must ascend");
  const auto [a, b] = layered_system(d, radii, c);
  const auto x = dense_solve(a, b);
  LayeredSolution s;
  s.d = d;
  s.radii = std::move(radii);
  s.c = std::move(c);
  const std::size_t L = s.c.size();
  s.A.assign(x.begin(), x.begin() + std::ptrdiff_t(L));
  s.B.assign(L, 0.0);
  for (std::size_t k = 1; k < L; ++k) s.B[k] = x[L + k - 1];
  return s;
}

struct RadialSolution : LayeredSolution {
  int n = 0;
  double alpha = 0.0;
  double beta = 0.0;
};

inline RadialSolution radial_solution(int d, int n, double alpha, double beta) {
  if (n < 2) throw Error(ErrorCode::config, "radial solution needs n >= 2");
  const double h = 1.0 / n;
  RadialSolution s;
  static_cast<LayeredSolution&>(s) =
      layered_solution(d, {1.0 - h, 1.0, 1.0 + h, 2.0}, {1.0, std::pow(double(n), alpha), std::pow(double(n), beta), 1.0});
  s.n = n;
  s.alpha = alpha;
  s.beta = beta;
  return s;
}

struct PerturbationNorms {
  double sup = 0.0;
  double l1 = 0.0;
};

/// ‖u − x₁‖ in L∞(Ω) and L¹(Ω), by exact radial integration.
inline PerturbationNorms radial_perturbation(const LayeredSolution& s) {
  PerturbationNorms out;
  const int d = s.d;
  double lo = 0.0;
  for (std::size_t k = 0; k < s.c.size(); ++k) {
    const double hi = s.radii[k];
    const double a = s.A[k] - 1.0, B = s.B[k];
    // sup of r·|a + B r^{−d}|
    auto f = [&](double r) { return r == 0.0 ? 0.0 : std::abs(r * a + B * std::pow(r, 1 - d)); };
    out.sup = std::max({out.sup, f(lo), f(hi)});
    if (a != 0.0 && B != 0.0) {
      const double rd = (d - 1) * B / a;
      if (rd > 0.0) {
        const double rs = std::pow(rd, 1.0 / d);
        if (rs > lo && rs < hi) out.sup = std::max(out.sup, f(rs));
      }
    }
    // ∫ |a r^d + B| dr
    auto F = [&](double r) { return a * std::pow(r, d + 1) / (d + 1) + B * r; };
    std::vector<double> cuts{lo};
    if (a != 0.0 && -B / a > 0.0) {
      const double r0 = std::pow(-B / a, 1.0 / d);
      if (r0 > lo && r0 < hi) cuts.push_back(r0);
    }
    cuts.push_back(hi);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) out.l1 += std::abs(F(cuts[i + 1]) - F(cuts[i]));
    lo = hi;
  }
  out.l1 *= sphere_abs_moment(d);
  return out;
}

/// ‖u − x₁‖_{L²(Ω)}, exact.
inline double radial_perturbation_l2(const LayeredSolution& s) {
  const int d = s.d;
  double total = 0.0, lo = 0.0;
  for (std::size_t k = 0; k < s.c.size(); ++k) {
    const double hi = s.radii[k];
    const double a = s.A[k] - 1.0, B = s.B[k];
    double v = a * a * (std::pow(hi, d + 2) - std::pow(lo, d + 2)) / (d + 2);
    if (B != 0.0) {
      v += a * B * (hi * hi - lo * lo);
      v += B * B * (d == 2 ? std::log(hi / lo) : (std::pow(hi, 2 - d) - std::pow(lo, 2 - d)) / (2 - d));
    }
    total += v;
    lo = hi;
  }
  return std::sqrt(sphere_area(d) / d * total);
}

/// ∫γ∇w·∇w for w = u − x₁, exact.
inline double radial_perturbation_energy(const LayeredSolution& s) {
  const int d = s.d;
  double total = 0.0, lo = 0.0;
  for (std::size_t k = 0; k < s.c.size(); ++k) {
    const double hi = s.radii[k];
    const double a = s.A[k] - 1.0, B = s.B[k];
    double v = a * a * (std::pow(hi, d) - std::pow(lo, d)) / d;
    if (B != 0.0) v += (d - 1) * B * B * (std::pow(lo, -d) - std::pow(hi, -d)) / d;
    total += s.c[k] * v;
    lo = hi;
  }
  return sphere_area(d) * total;
}

inline void write_radial_csv_header(std::ostream& os) { os << "n,alpha,beta,A1,A2,A3,A4,B2,B3,B4\n"; }

inline void write_radial_csv_row(std::ostream& os, const RadialSolution& s) {
  os << s.n << ',' << detail::fmt_double(s.alpha) << ',' << detail::fmt_double(s.beta);
  for (double v : s.A) os << ',' << detail::fmt_double(v);
  for (std::size_t k = 1; k < s.B.size(); ++k) os << ',' << detail::fmt_double(s.B[k]);
  os << '\n';
}

// ---------------------------------------------------------------------------
// Confocal elliptic inclusion

/// Branch of sinh(acosh z) = √(z−1)√(z+1), cut along [−1, 1].
inline std::complex<double> elliptic_sinh(std::complex<double> z) {
  return std::sqrt(z - 1.0) * std::sqrt(z + 1.0);
}

/// First-harmonic transmission solution with foci ±1: inclusion ξ < ξ₁ of conductivity λ,
/// background 1, uⁱ = xᵢ on ξ = ξ₀.
struct EllipticSolution {
  int n = 0;
  double lambda = 1.0;
  double xi1 = 0.0;
  double xi0 = 2.0;
  /// Per branch i: inside uⁱ = a·xᵢ; outside uⁱ = b·xᵢ + c·(Re, Im)ⁱ sinh ζ.
  std::array<double, 2> a{1.0, 1.0};
  std::array<double, 2> b{1.0, 1.0};
  std::array<double, 2> c{0.0, 0.0};
  std::array<double, 2> ell{0.0, 0.0};

  bool inside(Point x) const { return ellipse_xi(x) < xi1; }

  double value(int i, Point x) const {
    if (inside(x)) return a[i] * x[i];
    const auto s = elliptic_sinh({x[0], x[1]});
    return b[i] * x[i] + c[i] * (i == 0 ? s.real() : s.imag());
  }

  Point gradient(int i, Point x) const {
    if (inside(x)) return i == 0 ? Point{a[0], 0.0} : Point{0.0, a[1]};
    const std::complex<double> z{x[0], x[1]};
    const auto dp = z / elliptic_sinh(z);
    const Point gr = i == 0 ? Point{dp.real(), -dp.imag()} : Point{dp.imag(), dp.real()};
    const Point e = i == 0 ? Point{1.0, 0.0} : Point{0.0, 1.0};
    return b[i] * e + c[i] * gr;
  }
};

inline EllipticSolution elliptic_solution(int n, double lambda, double xi0 = 2.0) {
  if (n < 2) throw Error(ErrorCode::config, "elliptic solution needs n >= 2");
  require_conductivity(SymMat2::identity(lambda), "inclusion conductivity");
  EllipticSolution s;
  s.n = n;
  s.lambda = lambda;
  s.xi1 = 1.0 / n;
  s.xi0 = xi0;
  const double c1 = std::cosh(s.xi1), s1 = std::sinh(s.xi1), c0 = std::cosh(xi0), s0 = std::sinh(xi0);
  // Branch 1 (cos η): inside a cosh ξ, outside b cosh ξ + c sinh ξ. Branch 2 (sin η): sinh ↔ cosh.
  const std::array<std::array<double, 4>, 2> t{{{c1, s1, c0, s0}, {s1, c1, s0, c0}}};
  for (int i = 0; i < 2; ++i) {
    const auto [p, q, P, Q] = t[i];
    // a p = b p + c q;  λ a q = b q + c p;  b P + c Q = P
    const std::vector<double> m{p, -p, -q, lambda * q, -q, -p, 0.0, P, Q};
    const auto x = dense_solve(m, {0.0, 0.0, P});
    s.a[i] = x[0];
    s.b[i] = x[1];
    s.c[i] = x[2];
    s.ell[i] = (1.0 - lambda) * (s.a[i] - 1.0) / (std::numbers::sqrt2 * (lambda + 1.0 / lambda));
  }
  return s;
}

/// Relative residuals of the transmission and outer conditions for both branches.
inline std::vector<double> elliptic_residuals(const EllipticSolution& s) {
  std::vector<double> out;
  const double c1 = std::cosh(s.xi1), s1 = std::sinh(s.xi1), c0 = std::cosh(s.xi0), s0 = std::sinh(s.xi0);
  const std::array<std::array<double, 4>, 2> t{{{c1, s1, c0, s0}, {s1, c1, s0, c0}}};
  for (int i = 0; i < 2; ++i) {
    const auto [p, q, P, Q] = t[i];
    const double u_in = s.a[i] * p, u_out = s.b[i] * p + s.c[i] * q;
    out.push_back(std::abs(u_in - u_out) / std::max(std::abs(u_in), std::abs(u_out)));
    const double f_in = s.lambda * s.a[i] * q, f_out = s.b[i] * q + s.c[i] * p;
    out.push_back(std::abs(f_in - f_out) / std::max({std::abs(f_in), std::abs(f_out), 1e-300}));
    out.push_back(std::abs(s.b[i] * P + s.c[i] * Q - P) / P);
  }
  return out;
}

/// Cellwise densities inside the inclusion: D = (λ−1)/|d|·I, W = diag(ℓ¹, ℓ²), M = D − W.
struct TensorTriple {
  Mat2 W;
  Mat2 D;
  Mat2 M;
};

inline TensorTriple elliptic_densities(const EllipticSolution& s) {
  const double dn = std::numbers::sqrt2 * (s.lambda + 1.0 / s.lambda);
  TensorTriple t;
  t.D = Mat2{};
  t.W = Mat2{};
  for (int i = 0; i < 2; ++i) {
    t.D(i, i) = (s.lambda - 1.0) / dn;
    t.W(i, i) = s.ell[i];
  }
  t.M = t.D;
  for (int i = 0; i < 2; ++i) t.M(i, i) -= t.W(i, i);
  return t;
}

enum class EllipticLimit { conductive, insulating };

/// Limit tensors for vanishing confocal inclusions, as stated for the two extreme regimes.
inline TensorTriple elliptic_limit_tensors(EllipticLimit which) {
  const double r = 1.0 / std::numbers::sqrt2;
  TensorTriple t;
  if (which == EllipticLimit::conductive) {
    t.W(1, 1) = r;
    t.D(0, 0) = r;
    t.D(1, 1) = r;
    t.M(0, 0) = r;
  } else {
    t.D(0, 0) = t.D(1, 1) = -r;
    t.M(0, 0) = t.M(1, 1) = -r;
  }
  return t;
}

}  // namespace contrast_asym
