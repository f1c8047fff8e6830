#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "contrast_asym/fit.hpp"
#include "contrast_asym/geometry.hpp"

namespace contrast_asym {

inline constexpr double kBoundedSlopeTol = 0.05;

struct AssumptionRow {
  int n = 0;
  double l1_dn = 0.0;
  double l1_a = 0.0;
  double l1_b = 0.0;
  double lp_a = 0.0;
  double lp_b = 0.0;
  double separation = 0.0;
  double boundary_distance = 0.0;  ///< dist(∪(Aₙ∪Bₙ), ∂Ω)
  double k_margin = 0.0;           ///< signed distance of the inclusions to ∂K, > 0 inside
  bool disjoint = true;
  bool ordered = true;
  bool separated = false;          ///< separation > ‖dₙ‖_{L¹(Aₙ)}^τ
};

struct AssumptionReport {
  double p = 0.0;
  double tau = 0.0;
  int d = 2;
  std::vector<AssumptionRow> rows;
  bool well_within = false;   // 1
  bool vanishing = false;     // 2
  bool ordered = false;       // 3
  bool integrable = false;    // 4 (any of a, b, c, or vacuous)
  bool vacuous4 = false;
  bool mixed4a = false;
  bool planar4b = false;
  bool intertwined4c = false;
  double l1_slope = 0.0;
  double lp_a_slope = 0.0;
  double lp_b_slope = 0.0;
  std::vector<std::string> notes;

  bool all() const { return well_within && vanishing && ordered && integrable; }
};

namespace detail {

inline double slope_vs_n(const std::vector<AssumptionRow>& rows, double AssumptionRow::*field) {
  std::vector<std::pair<double, double>> s;
  for (const auto& r : rows)
    if (r.*field > 0.0) s.emplace_back(double(r.n), r.*field);
  if (s.size() < 3) return 0.0;
  return fit_rate(s).slope;
}

inline bool bounded_series(const std::vector<AssumptionRow>& rows, double AssumptionRow::*field) {
  bool any = false;
  for (const auto& r : rows) any = any || r.*field > 0.0;
  if (!any) return true;
  if (rows.size() < 3) return rows.back().*field <= (1.0 + kBoundedSlopeTol) * rows.front().*field;
  return slope_vs_n(rows, field) <= kBoundedSlopeTol;
}

}  // namespace detail

/// Evaluates hypotheses 1–4 over n_list. With audit = false, overlapping A/B throws.
inline AssumptionReport assumption_report(const InclusionFamily& f, const std::vector<int>& n_list,
                                          double p, double tau, bool audit = true) {
  if (n_list.empty()) throw Error(ErrorCode::config, "n_list must not be empty");
  if (!std::is_sorted(n_list.begin(), n_list.end()) ||
      std::adjacent_find(n_list.begin(), n_list.end()) != n_list.end())
    throw Error(ErrorCode::config, "n_list must be strictly ascending");
  if (!(p > 1.0) || !(tau > 0.0)) throw Error(ErrorCode::config, "need p > 1 and tau > 0");

  AssumptionReport rep;
  rep.p = p;
  rep.tau = tau;
  rep.d = family_dim(f);
  const double d = rep.d;
  bool any_a_empty = false;
  bool all_a_empty = true;

  for (int n : n_list) {
    const auto ps = pieces(f, n);
    AssumptionRow row;
    row.n = n;
    row.boundary_distance = std::numeric_limits<double>::infinity();
    row.k_margin = std::numeric_limits<double>::infinity();
    double sum_a = 0.0, sum_b = 0.0;
    bool has_a = false;
    for (const Piece& pc : ps) {
      const double mass = pc.dn_frob * pc.measure;
      row.l1_dn += mass;
      if (pc.tag == Region::A) {
        has_a = true;
        row.l1_a += mass;
        sum_a += std::pow(pc.dn_frob, p) * pc.measure;
      } else {
        row.l1_b += mass;
        sum_b += std::pow(pc.dn_frob, p) * pc.measure;
      }
      row.ordered = row.ordered && pc.ordered;
      for (const auto& loop : pc.loops)
        for (const Point& v : loop) {
          const double db = boundary_distance(f.domain.outer, v);
          row.boundary_distance = std::min(row.boundary_distance, contains(f.domain.outer, v) ? db : -db);
          const double dk = boundary_distance(f.domain.k, v);
          row.k_margin = std::min(row.k_margin, contains(f.domain.k, v) ? dk : -dk);
        }
    }
    any_a_empty = any_a_empty || !has_a;
    all_a_empty = all_a_empty && !has_a;
    row.lp_a = std::pow(sum_a, 1.0 / p);
    row.lp_b = std::pow(sum_b, 1.0 / p);
    for (std::size_t i = 0; i < ps.size() && row.disjoint; ++i)
      for (std::size_t j = 0; j < ps.size(); ++j)
        if (ps[i].tag == Region::A && ps[j].tag == Region::B && detail::pieces_overlap(ps[i], ps[j])) {
          row.disjoint = false;
          break;
        }
    if (!row.disjoint && !audit)
      throw Error(ErrorCode::overlapping_regions, "A and B overlap at n = " + std::to_string(n));
    row.separation = row.disjoint ? separation(f, n) : 0.0;
    row.separated = row.separation > std::pow(row.l1_a, tau);
    rep.rows.push_back(row);
  }

  const auto& rows = rep.rows;
  rep.well_within = std::all_of(rows.begin(), rows.end(), [](const AssumptionRow& r) {
    return r.boundary_distance > 0.0 && r.k_margin > 0.0;
  });

  bool small = true, decreasing = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    small = small && rows[i].l1_dn <= 1.0;
    if (i > 0) decreasing = decreasing && rows[i].l1_dn < rows[i - 1].l1_dn;
  }
  rep.l1_slope = detail::slope_vs_n(rows, &AssumptionRow::l1_dn);
  const bool tail = rows.size() < 2 || rows.back().l1_dn < 0.1 * rows.front().l1_dn;
  rep.vanishing = small && decreasing && tail && (rows.size() < 3 || rep.l1_slope < 0.0);
  if (!small) rep.notes.push_back("||d_n||_L1 exceeds 1 for some n");
  if (!decreasing) rep.notes.push_back("||d_n||_L1 is not strictly decreasing over n_list");
  if (!tail) rep.notes.push_back("last ||d_n||_L1 is not below a tenth of the first");

  rep.ordered = std::all_of(rows.begin(), rows.end(),
                            [](const AssumptionRow& r) { return r.disjoint && r.ordered; });

  rep.lp_a_slope = detail::slope_vs_n(rows, &AssumptionRow::lp_a);
  rep.lp_b_slope = detail::slope_vs_n(rows, &AssumptionRow::lp_b);
  const bool a_bounded = detail::bounded_series(rows, &AssumptionRow::lp_a);
  const bool b_bounded = detail::bounded_series(rows, &AssumptionRow::lp_b);
  rep.vacuous4 = any_a_empty;
  rep.mixed4a = p > d && a_bounded;
  rep.planar4b = rep.d == 2 && p > 2.0 && b_bounded;
  const bool seps = std::all_of(rows.begin(), rows.end(), [](const AssumptionRow& r) { return r.separated; });
  rep.intertwined4c = p > 0.5 * d && tau < 1.0 / (d - 1.0) && a_bounded && seps;
  rep.integrable = rep.vacuous4 || rep.mixed4a || rep.planar4b || rep.intertwined4c;
  if (all_a_empty) rep.notes.push_back("A_n is empty for every n; hypothesis 4 is vacuous");
  return rep;
}

}  // namespace contrast_asym
