#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "contrast_asym/error.hpp"
#include "contrast_asym/tensors.hpp"

namespace contrast_asym {

inline constexpr int kCurveSegments = 256;

// ---------------------------------------------------------------------------
// Planar primitives

inline Point operator+(Point a, Point b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Point operator-(Point a, Point b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Point operator*(double s, Point a) { return {s * a[0], s * a[1]}; }
inline double cross(Point a, Point b) { return a[0] * b[1] - a[1] * b[0]; }
inline double distance(Point a, Point b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

using Polyline = std::vector<Point>;  ///< closed loop, last vertex joins the first

inline double point_segment_distance(Point p, Point a, Point b) {
  const Point ab = b - a;
  const double len2 = dot<2>(ab, ab);
  double t = len2 > 0.0 ? dot<2>(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, a + t * ab);
}

inline bool segments_cross(Point a, Point b, Point c, Point d) {
  const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

inline double segment_segment_distance(Point a, Point b, Point c, Point d) {
  if (segments_cross(a, b, c, d)) return 0.0;
  return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                   point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

inline double polygon_area(const Polyline& poly) {
  double s = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) s += cross(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * s;
}

inline Point polygon_centroid(const Polyline& poly) {
  const double a = polygon_area(poly);
  Point c{0.0, 0.0};
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point p = poly[i], q = poly[(i + 1) % poly.size()];
    const double w = cross(p, q);
    c = c + (w / (6.0 * a)) * (p + q);
  }
  return c;
}

/// Even-odd ray casting; points on the boundary may go either way.
inline bool point_in_polygon(Point p, const Polyline& poly) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point a = poly[i], b = poly[j];
    if ((a[1] > p[1]) != (b[1] > p[1])) {
      const double x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
      if (p[0] < x) in = !in;
    }
  }
  return in;
}

inline double point_polyline_distance(Point p, const Polyline& poly) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i)
    d = std::min(d, point_segment_distance(p, poly[i], poly[(i + 1) % poly.size()]));
  return d;
}

inline double polyline_distance(const Polyline& p, const Polyline& q) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j)
      d = std::min(d, segment_segment_distance(p[i], p[(i + 1) % p.size()], q[j],
                                               q[(j + 1) % q.size()]));
  return d;
}

inline Polyline circle_polyline(Point c, double r, int segments = kCurveSegments) {
  Polyline out(segments);
  for (int k = 0; k < segments; ++k) {
    const double t = 2.0 * std::numbers::pi * k / segments;
    out[k] = {c[0] + r * std::cos(t), c[1] + r * std::sin(t)};
  }
  return out;
}

inline Polyline ellipse_polyline(Point c, double a, double b, int segments = kCurveSegments) {
  Polyline out(segments);
  for (int k = 0; k < segments; ++k) {
    const double t = 2.0 * std::numbers::pi * k / segments;
    out[k] = {c[0] + a * std::cos(t), c[1] + b * std::sin(t)};
  }
  return out;
}

inline Polyline rectangle_polyline(Point lo, Point hi) {
  return {lo, {hi[0], lo[1]}, hi, {lo[0], hi[1]}};
}

// ---------------------------------------------------------------------------
// Domains

struct Disk {
  Point center{0.0, 0.0};
  double radius = 1.0;
};

/// Axis-aligned ellipse with semi-axes a (along x) and b (along y).
struct Ellipse {
  Point center{0.0, 0.0};
  double a = 1.0;
  double b = 1.0;
};

struct Rectangle {
  Point lo{0.0, 0.0};
  Point hi{1.0, 1.0};
};

using Shape = std::variant<Disk, Ellipse, Rectangle>;

inline bool contains(const Shape& s, Point p) {
  return std::visit(
      [&](const auto& g) -> bool {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Disk>) {
          return distance(p, g.center) < g.radius;
        } else if constexpr (std::is_same_v<T, Ellipse>) {
          const double x = (p[0] - g.center[0]) / g.a, y = (p[1] - g.center[1]) / g.b;
          return x * x + y * y < 1.0;
        } else {
          return p[0] > g.lo[0] && p[0] < g.hi[0] && p[1] > g.lo[1] && p[1] < g.hi[1];
        }
      },
      s);
}

inline Polyline boundary_polyline(const Shape& s, int segments = kCurveSegments) {
  return std::visit(
      [&](const auto& g) -> Polyline {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Disk>) return circle_polyline(g.center, g.radius, segments);
        else if constexpr (std::is_same_v<T, Ellipse>) return ellipse_polyline(g.center, g.a, g.b, segments);
        else return rectangle_polyline(g.lo, g.hi);
      },
      s);
}

/// Distance from p to the boundary of s (exact for disks and rectangles).
inline double boundary_distance(const Shape& s, Point p) {
  if (const auto* d = std::get_if<Disk>(&s)) return std::abs(d->radius - distance(p, d->center));
  if (const auto* r = std::get_if<Rectangle>(&s)) {
    if (contains(s, p))
      return std::min({p[0] - r->lo[0], r->hi[0] - p[0], p[1] - r->lo[1], r->hi[1] - p[1]});
    return point_polyline_distance(p, rectangle_polyline(r->lo, r->hi));
  }
  return point_polyline_distance(p, boundary_polyline(s, 4096));
}

inline double shape_area(const Shape& s) {
  return std::visit(
      [](const auto& g) -> double {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Disk>) return std::numbers::pi * g.radius * g.radius;
        else if constexpr (std::is_same_v<T, Ellipse>) return std::numbers::pi * g.a * g.b;
        else return (g.hi[0] - g.lo[0]) * (g.hi[1] - g.lo[1]);
      },
      s);
}

/// Largest distance from the origin to the shape; used for probe placement.
inline double outer_radius(const Shape& s) {
  return std::visit(
      [](const auto& g) -> double {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Disk>) return norm<2>(g.center) + g.radius;
        else if constexpr (std::is_same_v<T, Ellipse>) return norm<2>(g.center) + std::max(g.a, g.b);
        else return std::max({norm<2>(g.lo), norm<2>(g.hi), std::hypot(g.lo[0], g.hi[1]),
                              std::hypot(g.hi[0], g.lo[1])});
      },
      s);
}

struct Domain2D {
  Shape outer;
  Shape k;  ///< open safety region holding every inclusion
  std::vector<int> boundary_components{0};
};

/// Throws unless K lies strictly inside the outer shape.
inline void validate(const Domain2D& dom) {
  double margin = std::numeric_limits<double>::infinity();
  for (const Point& p : boundary_polyline(dom.k)) {
    if (!contains(dom.outer, p)) throw Error(ErrorCode::invalid_family, "K is not inside the domain");
    margin = std::min(margin, boundary_distance(dom.outer, p));
  }
  if (!(margin > 0.0)) throw Error(ErrorCode::invalid_family, "K touches the domain boundary");
}

// ---------------------------------------------------------------------------
// Inclusion families

struct RadialAnnuli {
  int d = 2;
  double alpha = 0.0;
  double beta = 0.0;
};

struct Strips {
  int d = 2;
  double epsilon = 0.5;
};

/// Confocal ellipse inclusion ξ < 1/n with isotropic contrast λₙ = nᵠ (foci ±1).
struct ConfocalEllipse {
  double q = 0.5;
  double outer_xi = 2.0;
};

struct DiskInclusion {
  Point center{0.0, 0.0};
  double rho0 = 0.2;
  double rho_exponent = 0.0;
  double lambda0 = 10.0;
  double lambda_exponent = 0.0;

  double rho(int n) const { return rho0 * std::pow(double(n), rho_exponent); }
  double lambda(int n) const { return lambda0 * std::pow(double(n), lambda_exponent); }
};

struct TaggedPolygon {
  Region tag = Region::A;
  Polyline vertices;
  SymMat2 value = SymMat2::identity();
};

struct CustomPolygons {
  std::function<std::vector<TaggedPolygon>(int)> at;
};

using FamilyKind = std::variant<RadialAnnuli, Strips, ConfocalEllipse, DiskInclusion, CustomPolygons>;

struct InclusionFamily {
  FamilyKind kind;
  Domain2D domain;
  SymMat2 background = SymMat2::identity();
};

inline std::string family_name(const InclusionFamily& f) {
  return std::visit(
      [](const auto& k) -> std::string {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, RadialAnnuli>) return "radial_annuli";
        else if constexpr (std::is_same_v<T, Strips>) return "strips";
        else if constexpr (std::is_same_v<T, ConfocalEllipse>) return "confocal_ellipse";
        else if constexpr (std::is_same_v<T, DiskInclusion>) return "disk_inclusion";
        else return "custom_polygons";
      },
      f.kind);
}

inline int family_dim(const InclusionFamily& f) {
  if (const auto* r = std::get_if<RadialAnnuli>(&f.kind)) return r->d;
  if (const auto* s = std::get_if<Strips>(&f.kind)) return s->d;
  return 2;
}

inline InclusionFamily radial_annuli(double alpha, double beta, int d = 2) {
  if (d < 2) throw Error(ErrorCode::unsupported_dimension, "radial annuli need d >= 2");
  return {RadialAnnuli{d, alpha, beta}, Domain2D{Disk{{0, 0}, 2.0}, Disk{{0, 0}, 1.6}}};
}

inline InclusionFamily strips(double epsilon) {
  return {Strips{2, epsilon}, Domain2D{Disk{{0, 0}, 2.0}, Disk{{0, 0}, 1.65}}};
}

inline InclusionFamily confocal_ellipse(double q) {
  const double xi0 = 2.0;
  return {ConfocalEllipse{q, xi0},
          Domain2D{Ellipse{{0, 0}, std::cosh(xi0), std::sinh(xi0)},
                   Ellipse{{0, 0}, std::cosh(1.0), std::sinh(1.0)}}};
}

inline InclusionFamily disk_inclusion(double rho0, double lambda0, double rho_exponent = 0.0,
                                      double lambda_exponent = 0.0, Point center = {0, 0}) {
  DiskInclusion k{center, rho0, rho_exponent, lambda0, lambda_exponent};
  const double rmax = rho_exponent <= 0.0 ? rho0 : 2.0;
  return {k, Domain2D{Disk{{0, 0}, 2.0}, Disk{center, 2.5 * rmax}}};
}

inline InclusionFamily custom_polygons(std::function<std::vector<TaggedPolygon>(int)> at,
                                       Domain2D domain) {
  return {CustomPolygons{std::move(at)}, std::move(domain)};
}

/// One connected inclusion piece with constant conductivity.
struct Piece {
  Region tag = Region::A;
  double measure = 0.0;    ///< d-dimensional volume
  double dn_frob = 0.0;    ///< |dₙ|_F, constant on the piece
  bool ordered = true;     ///< γₙ ≥ γ₀ on A, ≤ on B
  std::vector<Polyline> loops;            ///< planar boundary (d = 2 sections)
  std::function<bool(Point)> contains;    ///< closed membership test
  double width = 0.0;      ///< thinnest cross-section
  SymMat2 gamma = SymMat2::identity();  ///< planar conductivity on the piece
};

namespace detail {

inline double unit_ball_volume(int d) {
  return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

struct Shell {
  double r_in, r_out, c;
  Region tag;
};

inline std::vector<Shell> radial_shells(const RadialAnnuli& k, int n) {
  const double h = 1.0 / n;
  const double ca = std::pow(double(n), k.alpha), cb = std::pow(double(n), k.beta);
  return {{1.0 - h, 1.0, ca, k.alpha >= 0.0 ? Region::A : Region::B},
          {1.0, 1.0 + h, cb, k.beta >= 0.0 ? Region::A : Region::B}};
}

inline std::vector<std::pair<Region, Rectangle>> strip_rects(const Strips& s, int n) {
  std::vector<std::pair<Region, Rectangle>> out;
  const double wa = std::pow(double(n), -(s.d + 1 + s.epsilon));
  for (int k = 1; k <= n; ++k) {
    const double x = double(k) / n;
    out.push_back({Region::A, Rectangle{{x, 0.0}, {x + wa, 1.0}}});
    out.push_back({Region::B, Rectangle{{x + 0.5 / n, 0.0}, {x + 0.75 / n, 1.0}}});
  }
  return out;
}

inline SymMat2 strip_value(Region tag, int n) {
  if (tag == Region::A) return SymMat2::diag({1.0, double(n)});
  return SymMat2::identity(std::log(double(n)) / n);
}

inline SymMat<3> to3(const SymMat2& m) {
  SymMat<3> r = SymMat<3>::identity();
  r.set(0, 0, m(0, 0));
  r.set(0, 1, m(0, 1));
  r.set(1, 1, m(1, 1));
  return r;
}

}  // namespace detail

inline double ellipse_xi(Point p) {
  const double s = std::hypot(p[0] - 1.0, p[1]) + std::hypot(p[0] + 1.0, p[1]);
  return std::acosh(std::max(1.0, 0.5 * s));
}

inline double ellipse_lambda(const ConfocalEllipse& e, int n) { return std::pow(double(n), e.q); }

/// Piecewise-constant description of (Aₙ, Bₙ, dₙ) at parameter n.
inline std::vector<Piece> pieces(const InclusionFamily& f, int n) {
  if (n < 1) throw Error(ErrorCode::invalid_family, "n must be >= 1");
  std::vector<Piece> out;
  const SymMat2 g0 = f.background;
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, RadialAnnuli>) {
          const double sd = std::sqrt(double(k.d));
          for (const auto& s : detail::radial_shells(k, n)) {
            Piece p;
            p.tag = s.tag;
            p.measure = detail::unit_ball_volume(k.d) *
                        (std::pow(s.r_out, k.d) - std::pow(s.r_in, k.d));
            p.dn_frob = sd * (s.c + 1.0 / s.c);
            p.ordered = s.tag == Region::A ? s.c >= 1.0 : s.c <= 1.0;
            p.loops = {circle_polyline({0, 0}, s.r_in), circle_polyline({0, 0}, s.r_out)};
            p.contains = [ri = s.r_in, ro = s.r_out](Point x) {
              const double r = norm<2>(x);
              return r >= ri && r <= ro;
            };
            p.width = s.r_out - s.r_in;
            p.gamma = SymMat2::identity(s.c);
            out.push_back(std::move(p));
          }
        } else if constexpr (std::is_same_v<T, Strips>) {
          for (const auto& [tag, rect] : detail::strip_rects(k, n)) {
            const SymMat2 v = detail::strip_value(tag, n);
            Piece p;
            p.tag = tag;
            const double w = rect.hi[0] - rect.lo[0];
            p.measure = w;
            if (k.d == 2) {
              p.dn_frob = frobenius(dn_at(g0, v, true));
              p.ordered = tag == Region::A ? psd_leq(g0, v) : psd_leq(v, g0);
            } else {
              SymMat<3> v3 = detail::to3(v);
              if (tag == Region::A) v3.set(2, 2, double(n));
              else v3.set(2, 2, v(0, 0));
              const SymMat<3> g3 = detail::to3(g0);
              p.dn_frob = frobenius(dn_at(g3, v3, true));
              p.ordered = tag == Region::A ? psd_leq(g3, v3) : psd_leq(v3, g3);
            }
            p.loops = {rectangle_polyline(rect.lo, rect.hi)};
            p.contains = [rect](Point x) {
              return x[0] >= rect.lo[0] && x[0] <= rect.hi[0] && x[1] >= rect.lo[1] && x[1] <= rect.hi[1];
            };
            p.width = std::min(w, 1.0);
            p.gamma = v;
            out.push_back(std::move(p));
          }
        } else if constexpr (std::is_same_v<T, ConfocalEllipse>) {
          const double xi = 1.0 / n, lam = ellipse_lambda(k, n);
          const SymMat2 v = SymMat2::identity(lam);
          Piece p;
          p.tag = lam >= 1.0 ? Region::A : Region::B;
          p.measure = std::numbers::pi * std::cosh(xi) * std::sinh(xi);
          p.dn_frob = frobenius(dn_at(g0, v, true));
          p.ordered = p.tag == Region::A ? psd_leq(g0, v) : psd_leq(v, g0);
          p.loops = {ellipse_polyline({0, 0}, std::cosh(xi), std::sinh(xi))};
          p.contains = [xi](Point x) { return ellipse_xi(x) <= xi; };
          p.width = 2.0 * std::sinh(xi);
          p.gamma = v;
          out.push_back(std::move(p));
        } else if constexpr (std::is_same_v<T, DiskInclusion>) {
          const double rho = k.rho(n), lam = k.lambda(n);
          const SymMat2 v = SymMat2::identity(lam);
          Piece p;
          p.tag = lam >= 1.0 ? Region::A : Region::B;
          p.measure = std::numbers::pi * rho * rho;
          p.dn_frob = frobenius(dn_at(g0, v, true));
          p.ordered = p.tag == Region::A ? psd_leq(g0, v) : psd_leq(v, g0);
          p.loops = {circle_polyline(k.center, rho)};
          p.contains = [c = k.center, rho](Point x) { return distance(x, c) <= rho; };
          p.width = 2.0 * rho;
          p.gamma = v;
          out.push_back(std::move(p));
        } else {
          for (const TaggedPolygon& poly : k.at(n)) {
            if (poly.vertices.size() < 3) throw Error(ErrorCode::invalid_family, "polygon needs 3 vertices");
            Piece p;
            p.tag = poly.tag;
            p.measure = std::abs(polygon_area(poly.vertices));
            p.dn_frob = frobenius(dn_at(g0, poly.value, true));
            p.ordered = poly.tag == Region::A ? psd_leq(g0, poly.value) : psd_leq(poly.value, g0);
            p.loops = {poly.vertices};
            p.contains = [v = poly.vertices](Point x) {
              return point_in_polygon(x, v) || point_polyline_distance(x, v) == 0.0;
            };
            double w = std::numeric_limits<double>::infinity();
            double xmin = w, xmax = -w, ymin = w, ymax = -w;
            for (const Point& q : poly.vertices) {
              xmin = std::min(xmin, q[0]);
              xmax = std::max(xmax, q[0]);
              ymin = std::min(ymin, q[1]);
              ymax = std::max(ymax, q[1]);
            }
            p.width = std::min(xmax - xmin, ymax - ymin);
            p.gamma = poly.value;
            out.push_back(std::move(p));
          }
        }
      },
      f.kind);
  return out;
}

/// ∫_Ω |dₙ|_F restricted to one region tag (background means both).
inline double l1_dn_region(const InclusionFamily& f, int n, Region which) {
  double s = 0.0;
  for (const Piece& p : pieces(f, n))
    if (which == Region::background || p.tag == which) s += p.dn_frob * p.measure;
  return s;
}

inline double l1_dn(const InclusionFamily& f, int n) { return l1_dn_region(f, n, Region::background); }

inline double lp_dn_region(const InclusionFamily& f, int n, double p, Region which) {
  double s = 0.0;
  for (const Piece& q : pieces(f, n))
    if (which == Region::background || q.tag == which) s += std::pow(q.dn_frob, p) * q.measure;
  return std::pow(s, 1.0 / p);
}

/// Family frozen at one parameter n, for repeated point queries.
class Snapshot {
 public:
  Snapshot(const InclusionFamily& f, int n) : background_(f.background), n_(n), pieces_(pieces(f, n)) {}

  int n() const { return n_; }
  const std::vector<Piece>& parts() const { return pieces_; }

  Region region_at(Point x) const {
    for (const Piece& p : pieces_)
      if (p.contains(x)) return p.tag;
    return Region::background;
  }

  /// γₙ at a point assigned to region `tag`; the nearest piece carrying that tag wins.
  SymMat2 gamma_in_region(Region tag, Point x) const {
    if (tag == Region::background) return background_;
    for (const Piece& p : pieces_)
      if (p.tag == tag && p.contains(x)) return p.gamma;
    double best = std::numeric_limits<double>::infinity();
    SymMat2 v = background_;
    for (const Piece& p : pieces_) {
      if (p.tag != tag) continue;
      for (const auto& loop : p.loops) {
        const double d = point_polyline_distance(x, loop);
        if (d < best) best = d, v = p.gamma;
      }
    }
    return v;
  }

  SymMat2 gamma_at(Point x) const {
    for (const Piece& p : pieces_)
      if (p.contains(x)) return p.gamma;
    return background_;
  }

 private:
  SymMat2 background_;
  int n_;
  std::vector<Piece> pieces_;
};

inline Region region_at(const InclusionFamily& f, int n, Point x) { return Snapshot(f, n).region_at(x); }

namespace detail {

inline bool pieces_touch(const Piece& a, const Piece& b) {
  for (const auto& loop : a.loops)
    for (const Point& p : loop)
      if (b.contains(p)) return true;
  for (const auto& loop : b.loops)
    for (const Point& p : loop)
      if (a.contains(p)) return true;
  return false;
}

inline double piece_distance(const Piece& a, const Piece& b) {
  if (pieces_touch(a, b)) return 0.0;
  double d = std::numeric_limits<double>::infinity();
  for (const auto& la : a.loops)
    for (const auto& lb : b.loops) d = std::min(d, polyline_distance(la, lb));
  return d;
}

inline bool pieces_overlap(const Piece& a, const Piece& b) {
  for (const auto& la : a.loops) {
    for (const auto& lb : b.loops)
      for (std::size_t i = 0; i < la.size(); ++i)
        for (std::size_t j = 0; j < lb.size(); ++j)
          if (segments_cross(la[i], la[(i + 1) % la.size()], lb[j], lb[(j + 1) % lb.size()]))
            return true;
    if (la.size() >= 3 && std::abs(polygon_area(la)) > 0.0 && b.contains(polygon_centroid(la)) &&
        a.contains(polygon_centroid(la)))
      return true;
  }
  for (const auto& lb : b.loops)
    if (lb.size() >= 3 && std::abs(polygon_area(lb)) > 0.0 && a.contains(polygon_centroid(lb)) &&
        b.contains(polygon_centroid(lb)))
      return true;
  return false;
}

}  // namespace detail

/// Distance between the closures of Aₙ and Bₙ; +∞ when either is empty.
inline double separation(const InclusionFamily& f, int n) {
  const auto ps = pieces(f, n);
  double d = std::numeric_limits<double>::infinity();
  for (const Piece& a : ps) {
    if (a.tag != Region::A) continue;
    for (const Piece& b : ps)
      if (b.tag == Region::B) d = std::min(d, detail::piece_distance(a, b));
  }
  return d;
}

/// Thinnest inclusion cross-section at parameter n.
inline double min_inclusion_width(const InclusionFamily& f, int n) {
  double w = std::numeric_limits<double>::infinity();
  for (const Piece& p : pieces(f, n)) w = std::min(w, p.width);
  return w;
}

}  // namespace contrast_asym
