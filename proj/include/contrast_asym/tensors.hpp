#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>

#include "contrast_asym/error.hpp"

namespace contrast_asym {

inline constexpr double kMinConductivity = 1e-8;
inline constexpr double kMaxConductivity = 1e8;
inline constexpr double kPsdRelTol = 1e-10;

template <int D>
using Vec = std::array<double, D>;

using Point = Vec<2>;

/// Dense D×D matrix, row-major. Used for the rotation J and intermediate products.
template <int D>
struct Mat {
  std::array<std::array<double, D>, D> a{};

  double operator()(int i, int j) const { return a[i][j]; }
  double& operator()(int i, int j) { return a[i][j]; }

  static Mat identity() {
    Mat m;
    for (int i = 0; i < D; ++i) m.a[i][i] = 1.0;
    return m;
  }

  Mat transpose() const {
    Mat t;
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) t.a[i][j] = a[j][i];
    return t;
  }

  friend Mat operator*(const Mat& x, const Mat& y) {
    Mat r;
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) {
        double s = 0.0;
        for (int k = 0; k < D; ++k) s += x.a[i][k] * y.a[k][j];
        r.a[i][j] = s;
      }
    return r;
  }

  friend Vec<D> operator*(const Mat& x, const Vec<D>& v) {
    Vec<D> r{};
    for (int i = 0; i < D; ++i)
      for (int k = 0; k < D; ++k) r[i] += x.a[i][k] * v[k];
    return r;
  }
};

/// Symmetric D×D matrix stored as its row-major upper triangle.
template <int D>
class SymMat {
  static_assert(D == 2 || D == 3, "SymMat supports d = 2 and d = 3");

 public:
  static constexpr int dim = D;
  static constexpr int size = D * (D + 1) / 2;

  SymMat() = default;

  explicit SymMat(const std::array<double, size>& upper) : e_(upper) {}

  static SymMat identity(double s = 1.0) {
    SymMat m;
    for (int i = 0; i < D; ++i) m.set(i, i, s);
    return m;
  }

  static SymMat diag(const Vec<D>& d) {
    SymMat m;
    for (int i = 0; i < D; ++i) m.set(i, i, d[i]);
    return m;
  }

  /// Symmetric part of a dense matrix.
  static SymMat symmetric_part(const Mat<D>& m) {
    SymMat s;
    for (int i = 0; i < D; ++i)
      for (int j = i; j < D; ++j) s.set(i, j, 0.5 * (m(i, j) + m(j, i)));
    return s;
  }

  double operator()(int i, int j) const { return e_[index(i, j)]; }
  void set(int i, int j, double v) { e_[index(i, j)] = v; }

  const std::array<double, size>& upper() const { return e_; }

  Mat<D> dense() const {
    Mat<D> m;
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) m(i, j) = (*this)(i, j);
    return m;
  }

  double trace() const {
    double t = 0.0;
    for (int i = 0; i < D; ++i) t += (*this)(i, i);
    return t;
  }

  friend SymMat operator+(SymMat x, const SymMat& y) {
    for (int k = 0; k < size; ++k) x.e_[k] += y.e_[k];
    return x;
  }
  friend SymMat operator-(SymMat x, const SymMat& y) {
    for (int k = 0; k < size; ++k) x.e_[k] -= y.e_[k];
    return x;
  }
  friend SymMat operator*(double s, SymMat x) {
    for (auto& v : x.e_) v *= s;
    return x;
  }
  friend SymMat operator*(SymMat x, double s) { return s * x; }

  friend Vec<D> operator*(const SymMat& m, const Vec<D>& v) {
    Vec<D> r{};
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) r[i] += m(i, j) * v[j];
    return r;
  }

  friend bool operator==(const SymMat&, const SymMat&) = default;

 private:
  static constexpr int index(int i, int j) {
    if (i > j) std::swap(i, j);
    return i * D - i * (i - 1) / 2 + (j - i);
  }

  std::array<double, size> e_{};
};

using SymMat2 = SymMat<2>;
using SymMat3 = SymMat<3>;
using Mat2 = Mat<2>;

template <int D>
double dot(const Vec<D>& a, const Vec<D>& b) {
  double s = 0.0;
  for (int i = 0; i < D; ++i) s += a[i] * b[i];
  return s;
}

template <int D>
double norm(const Vec<D>& a) {
  return std::sqrt(dot<D>(a, a));
}

template <int D>
double determinant(const SymMat<D>& m) {
  if constexpr (D == 2) {
    return m(0, 0) * m(1, 1) - m(0, 1) * m(0, 1);
  } else {
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(1, 2)) -
           m(0, 1) * (m(0, 1) * m(2, 2) - m(1, 2) * m(0, 2)) +
           m(0, 2) * (m(0, 1) * m(1, 2) - m(1, 1) * m(0, 2));
  }
}

/// Eigenvalues in ascending order, closed form.
template <int D>
Vec<D> eigenvalues(const SymMat<D>& m) {
  if constexpr (D == 2) {
    const double mean = 0.5 * (m(0, 0) + m(1, 1));
    const double half = 0.5 * (m(0, 0) - m(1, 1));
    const double r = std::hypot(half, m(0, 1));
    return {mean - r, mean + r};
  } else {
    const double p1 = m(0, 1) * m(0, 1) + m(0, 2) * m(0, 2) + m(1, 2) * m(1, 2);
    const double q = m.trace() / 3.0;
    if (p1 == 0.0) {
      Vec<3> ev{m(0, 0), m(1, 1), m(2, 2)};
      std::sort(ev.begin(), ev.end());
      return ev;
    }
    const double p2 = (m(0, 0) - q) * (m(0, 0) - q) + (m(1, 1) - q) * (m(1, 1) - q) +
                      (m(2, 2) - q) * (m(2, 2) - q) + 2.0 * p1;
    const double p = std::sqrt(p2 / 6.0);
    const SymMat<3> b = (1.0 / p) * (m - SymMat<3>::identity(q));
    const double r = std::clamp(0.5 * determinant(b), -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    const double hi = q + 2.0 * p * std::cos(phi);
    const double lo = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
    return {lo, 3.0 * q - hi - lo, hi};
  }
}

template <int D>
double max_abs_eigenvalue(const SymMat<D>& m) {
  const auto ev = eigenvalues(m);
  return std::max(std::abs(ev.front()), std::abs(ev.back()));
}

template <int D>
double frobenius(const SymMat<D>& m) {
  double s = 0.0;
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) s += m(i, j) * m(i, j);
  return std::sqrt(s);
}

template <int D>
double frobenius(const Mat<D>& m) {
  double s = 0.0;
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) s += m(i, j) * m(i, j);
  return std::sqrt(s);
}

template <int D>
bool is_finite(const SymMat<D>& m) {
  return std::all_of(m.upper().begin(), m.upper().end(),
                     [](double v) { return std::isfinite(v); });
}

/// Throws unless m is a conductivity: finite, SPD, eigenvalues in the contrast cap.
template <int D>
void require_conductivity(const SymMat<D>& m, const char* what = "conductivity") {
  if (!is_finite(m)) throw Error(ErrorCode::invalid_conductivity, std::string(what) + " is not finite");
  const auto ev = eigenvalues(m);
  if (!(ev.front() > 0.0))
    throw Error(ErrorCode::invalid_conductivity, std::string(what) + " is not positive definite");
  if (ev.front() < kMinConductivity || ev.back() > kMaxConductivity)
    throw Error(ErrorCode::invalid_conductivity,
                std::string(what) + " has eigenvalues outside [1e-8, 1e8]");
}

/// Cofactor inverse.
template <int D>
SymMat<D> inverse(const SymMat<D>& m) {
  const double det = determinant(m);
  if (det == 0.0 || !std::isfinite(det))
    throw Error(ErrorCode::invalid_conductivity, "matrix is singular");
  SymMat<D> r;
  if constexpr (D == 2) {
    r.set(0, 0, m(1, 1) / det);
    r.set(1, 1, m(0, 0) / det);
    r.set(0, 1, -m(0, 1) / det);
  } else {
    r.set(0, 0, (m(1, 1) * m(2, 2) - m(1, 2) * m(1, 2)) / det);
    r.set(0, 1, (m(0, 2) * m(1, 2) - m(0, 1) * m(2, 2)) / det);
    r.set(0, 2, (m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1)) / det);
    r.set(1, 1, (m(0, 0) * m(2, 2) - m(0, 2) * m(0, 2)) / det);
    r.set(1, 2, (m(0, 1) * m(0, 2) - m(0, 0) * m(1, 2)) / det);
    r.set(2, 2, (m(0, 0) * m(1, 1) - m(0, 1) * m(0, 1)) / det);
  }
  return r;
}

/// a·b·a for symmetric a, b; the result is symmetric.
template <int D>
SymMat<D> sandwich(const SymMat<D>& a, const SymMat<D>& b) {
  return SymMat<D>::symmetric_part(a.dense() * b.dense() * a.dense());
}

/// B − A has no eigenvalue below −tol, tol relative to the largest eigenvalue magnitude.
template <int D>
bool psd_leq(const SymMat<D>& a, const SymMat<D>& b) {
  const double scale = std::max({max_abs_eigenvalue(a), max_abs_eigenvalue(b), 0.0});
  const double tol = kPsdRelTol * scale;
  return eigenvalues(b - a).front() >= -tol;
}

template <int D>
SymMat<D> dn_at(const SymMat<D>& g0, const SymMat<D>& gn, bool inside_inclusion) {
  require_conductivity(g0, "background conductivity");
  require_conductivity(gn, "inclusion conductivity");
  if (!inside_inclusion) return SymMat<D>{};
  return gn + sandwich(g0, inverse(gn));
}

template <int D>
SymMat<D> dn_prime_at(const SymMat<D>& g0, const SymMat<D>& gn) {
  require_conductivity(g0, "background conductivity");
  require_conductivity(gn, "inclusion conductivity");
  return sandwich(gn - g0, inverse(gn));
}

enum class Region { background = 0, A = 1, B = 2 };

inline const char* to_string(Region r) {
  switch (r) {
    case Region::background: return "background";
    case Region::A: return "A";
    case Region::B: return "B";
  }
  return "?";
}

struct NotLowAlphaReport {
  double dn = 0.0;
  double g0 = 0.0;
  double gn = 0.0;
  double contrast = 0.0;
  double dn_prime = 0.0;
  bool dominates_g0 = false;
  bool dominates_gn = false;
  bool dominates_contrast = false;
  bool dominates_dn_prime = false;

  bool all() const { return dominates_g0 && dominates_gn && dominates_contrast && dominates_dn_prime; }
};

/// The four Frobenius lower bounds satisfied by d_n on an ordered inclusion.
template <int D>
NotLowAlphaReport check_notlowalpha(const SymMat<D>& g0, const SymMat<D>& gn, Region region) {
  if (region == Region::A && !psd_leq(g0, gn))
    throw Error(ErrorCode::ordering_violation, "conductive region requires gamma_n >= gamma_0");
  if (region == Region::B && !psd_leq(gn, g0))
    throw Error(ErrorCode::ordering_violation, "insulating region requires gamma_n <= gamma_0");
  NotLowAlphaReport r;
  r.dn = frobenius(dn_at(g0, gn, true));
  r.g0 = frobenius(g0);
  r.gn = frobenius(gn);
  r.contrast = frobenius(SymMat<D>(gn - g0));
  r.dn_prime = frobenius(dn_prime_at(g0, gn));
  const double slack = 1e-12 * r.dn;
  r.dominates_g0 = r.dn + slack >= r.g0;
  r.dominates_gn = r.dn + slack >= r.gn;
  r.dominates_contrast = r.dn + slack >= r.contrast;
  r.dominates_dn_prime = r.dn + slack >= r.dn_prime;
  return r;
}

struct FrobeniusSandwich {
  double square_norm = 0.0;  ///< |A²|_F
  double norm_squared = 0.0; ///< |A|_F²
  double upper = 0.0;        ///< √d |A²|_F
};

template <int D>
FrobeniusSandwich frobenius_sandwich(const SymMat<D>& a) {
  const Mat<D> sq = a.dense() * a.dense();
  const double f = frobenius(a);
  return {frobenius(sq), f * f, std::sqrt(double(D)) * frobenius(sq)};
}

/// The rotation J = [[0, −1], [1, 0]].
inline Mat2 rotation_j() {
  Mat2 j;
  j(0, 1) = -1.0;
  j(1, 0) = 1.0;
  return j;
}

template <int D>
SymMat2 sigma_of(const SymMat<D>& g) {
  if constexpr (D != 2) {
    throw Error(ErrorCode::unsupported_dimension, "stream duality needs d = 2");
  } else {
    require_conductivity(g);
    const Mat2 j = rotation_j();
    return SymMat2::symmetric_part(j.transpose() * inverse(g).dense() * j);
  }
}

struct SigmaTwoWays {
  SymMat2 direct;   ///< σₙ + σ₀σₙ⁻¹σ₀
  SymMat2 via_dn;   ///< Jᵀγ₀⁻¹dₙγ₀⁻¹J
  double deviation = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool bounds_hold = false;
};

inline SigmaTwoWays Sigma_n_two_ways(const SymMat2& g0, const SymMat2& gn) {
  const SymMat2 s0 = sigma_of(g0);
  const SymMat2 sn = sigma_of(gn);
  SigmaTwoWays r;
  r.direct = sn + sandwich(s0, inverse(sn));
  const Mat2 j = rotation_j();
  const SymMat2 g0inv = inverse(g0);
  const SymMat2 dn = dn_at(g0, gn, true);
  r.via_dn = SymMat2::symmetric_part(j.transpose() * g0inv.dense() * dn.dense() * g0inv.dense() * j);
  for (int k = 0; k < SymMat2::size; ++k)
    r.deviation = std::max(r.deviation, std::abs(r.direct.upper()[k] - r.via_dn.upper()[k]));
  const auto ev = eigenvalues(g0inv);
  const double dnf = frobenius(dn);
  const double sf = frobenius(r.direct);
  r.lower = dnf * ev[0] * ev[0];
  r.upper = dnf * ev[1] * ev[1];
  const double slack = 1e-12 * dnf * ev[1] * ev[1];
  r.bounds_hold = sf + slack >= r.lower && sf <= r.upper + slack;
  return r;
}

}  // namespace contrast_asym
