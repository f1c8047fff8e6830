#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "contrast_asym/assumptions.hpp"
#include "contrast_asym/asymptotics.hpp"
#include "contrast_asym/config.hpp"
#include "contrast_asym/error.hpp"
#include "contrast_asym/fem.hpp"
#include "contrast_asym/oracles.hpp"
#include "contrast_asym/polarization.hpp"
#include "contrast_asym/stream2d.hpp"

#ifndef CONTRAST_ASYM_VERSION
#define CONTRAST_ASYM_VERSION "0.1.0"
#endif

namespace contrast_asym {

enum class Status { pass, fail, skipped };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::skipped: return "skipped";
  }
  return "unknown";
}

struct CheckResult {
  std::string name;
  Status status = Status::skipped;
  std::string bound;   ///< the inequality or identity under test
  std::string reason;  ///< set for failures and skips
  std::vector<std::pair<std::string, double>> values;
  std::string csv;
};

struct RunManifest {
  RunConfig config;
  std::vector<CheckResult> checks;
  std::string version = CONTRAST_ASYM_VERSION;
  std::string timestamp;

  /// 0 when every check passes, 1 when one fails, 2 when one could not run.
  int exit_code() const {
    int code = 0;
    for (const auto& c : checks) {
      if (c.status == Status::skipped) return 2;
      if (c.status == Status::fail) code = 1;
    }
    return code;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    auto& cfg = j["config"];
    cfg = nlohmann::ordered_json::object();
    for (const auto& [k, v] : config.echo) cfg[k] = v;
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
      nlohmann::ordered_json e;
      e["name"] = c.name;
      e["status"] = to_string(c.status);
      e["bound"] = c.bound;
      if (!c.reason.empty()) e["reason"] = c.reason;
      e["values"] = nlohmann::ordered_json::object();
      for (const auto& [k, v] : c.values) e["values"][k] = std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json();
      j["checks"].push_back(e);
    }
    j["provenance"] = {{"tool", "contrast-asym"}, {"version", version}, {"timestamp", timestamp}};
    j["exit_code"] = exit_code();
    return j;
  }

  std::string summary() const {
    std::ostringstream os;
    os << "family " << config.kind << ", n = [";
    for (std::size_t i = 0; i < config.n_list.size(); ++i) os << (i ? ", " : "") << config.n_list[i];
    char hb[32];
    std::snprintf(hb, sizeof hb, "%g", config.h);
    os << "], h = " << hb << '\n';
    for (const auto& c : checks) {
      os << to_string(c.status) << "  " << c.name << "  (" << c.bound << ")";
      for (const auto& [k, v] : c.values) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", v);
        os << "  " << k << '=' << buf;
      }
      if (!c.reason.empty()) os << "  reason: " << c.reason;
      os << '\n';
    }
    return os.str();
  }
};

namespace detail {

inline std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

inline bool isotropic(const SymMat2& m) {
  return std::abs(m(0, 1)) <= 1e-14 * frobenius(m) && std::abs(m(0, 0) - m(1, 1)) <= 1e-12 * frobenius(m);
}

/// Meshes and solutions shared by the checks of one run.
class RunContext {
 public:
  explicit RunContext(const RunConfig& cfg) : cfg_(cfg), g0_(gamma_0(cfg.family)) {}

  const MatrixField& g0() const { return g0_; }
  MatrixField gn(int n) const { return gamma_n(cfg_.family, n); }

  const MeshPtr& mesh(int n) {
    auto it = meshes_.find(n);
    if (it == meshes_.end()) it = meshes_.emplace(n, share(build_mesh(cfg_.family, n, cfg_.h))).first;
    return it->second;
  }

  const ScalarField& u0(int n, const std::string& data) {
    const auto key = std::make_pair(n, data);
    auto it = u0_.find(key);
    if (it == u0_.end()) it = u0_.emplace(key, solve(mesh(n), g0_, DirichletData{boundary_data(data).f})).first;
    return it->second;
  }

  const ScalarField& w(int n, const std::string& data) {
    const auto key = std::make_pair(n, data);
    auto it = w_.find(key);
    if (it == w_.end())
      it = w_.emplace(key, solve_perturbation(mesh(n), g0_, gn(n), u0(n, data), Space::dirichlet)).first;
    return it->second;
  }

 private:
  const RunConfig& cfg_;
  MatrixField g0_;
  std::map<int, MeshPtr> meshes_;
  std::map<std::pair<int, std::string>, ScalarField> u0_, w_;
};

inline void check_assumptions(const RunConfig& cfg, CheckResult& r) {
  const auto rep = assumption_report(cfg.family, cfg.n_list, cfg.p, cfg.tau);
  std::ostringstream os;
  os << "n,l1_dn,l1_a,l1_b,lp_a,lp_b,separation,separated,disjoint,ordered,bound\n";
  for (const auto& row : rep.rows)
    os << row.n << ',' << fmt_double(row.l1_dn) << ',' << fmt_double(row.l1_a) << ',' << fmt_double(row.l1_b) << ','
       << fmt_double(row.lp_a) << ',' << fmt_double(row.lp_b) << ',' << fmt_double(row.separation) << ','
       << row.separated << ',' << row.disjoint << ',' << row.ordered << ',' << r.bound << '\n';
  r.csv = os.str();
  r.values = {{"well_within", rep.well_within}, {"vanishing", rep.vanishing},   {"ordered", rep.ordered},
              {"integrable", rep.integrable},   {"l1_slope", rep.l1_slope},     {"lp_a_slope", rep.lp_a_slope},
              {"lp_b_slope", rep.lp_b_slope}};
  r.status = rep.all() ? Status::pass : Status::fail;
  for (const auto& n : rep.notes) r.reason += (r.reason.empty() ? "" : "; ") + n;
}

/// Energy (power 2) or flux (power 1) ratio to ‖dₙ‖_{L¹}‖∇u₀‖^power_{L∞(K)} for every n and datum.
inline void check_ratio(const RunConfig& cfg, RunContext& ctx, CheckResult& r, bool flux) {
  const double limit = 1.0 + (flux ? cfg.tol.flux : cfg.tol.energy);
  std::ostringstream os;
  os << "n,data,l1_dn,grad_sup,value,ratio,bound\n";
  double worst = 0.0;
  for (int n : cfg.n_list)
    for (const auto& data : cfg.data) {
      const MeshPtr& mesh = ctx.mesh(n);
      const MatrixField gn = ctx.gn(n);
      const ScalarField& w = ctx.w(n, data);
      const double l1 = discrete_l1_dn(*mesh, ctx.g0(), gn);
      const double gs = grad_sup_on(ctx.u0(n, data), cfg.family.domain.k);
      const double value = flux ? flux_l1(mesh, ctx.g0(), gn, w) : energy(mesh, gn, w);
      const double ratio = value / (l1 * (flux ? gs : gs * gs));
      worst = std::max(worst, ratio);
      os << n << ',' << data << ',' << fmt_double(l1) << ',' << fmt_double(gs) << ',' << fmt_double(value) << ','
         << fmt_double(ratio) << ',' << r.bound << '\n';
    }
  r.csv = os.str();
  r.values = {{"max_ratio", worst}, {"limit", limit}};
  r.status = worst <= limit ? Status::pass : Status::fail;
}

inline void check_rate(const RunConfig& cfg, CheckResult& r, Quantity q, double threshold, bool decreasing) {
  RateOptions opt;
  opt.h = cfg.h;
  opt.data = cfg.data.front();
  const RateTable t = rate_harness(cfg.family, cfg.n_list, q, opt);
  std::ostringstream os;
  write_rate_csv(os, t);
  r.csv = os.str();
  std::vector<double> v;
  for (const auto& row : t.rows) v.push_back(row.value);
  const bool mono = !decreasing || strictly_decreasing(v);
  r.values = {{"slope", t.fit.slope}, {"residual", t.fit.residual}, {"threshold", threshold},
              {"theory_exponent", t.theory_exponent}};
  r.status = t.fit.slope >= threshold && mono ? Status::pass : Status::fail;
  if (!mono) r.reason = "values are not decreasing in n";
}

inline void check_representation(const RunConfig& cfg, CheckResult& r) {
  const auto st = representation_study(cfg.family, cfg.n_list, cfg.h, cfg.data, cfg.probes);
  std::ostringstream os;
  os << "n,data,y1,y2,exact,reciprocity,leading,remainder,l1_dn,scaled_remainder,bound\n";
  for (const auto& c : st.checks)
    os << c.n << ',' << c.data << ',' << fmt_double(c.y[0]) << ',' << fmt_double(c.y[1]) << ',' << fmt_double(c.exact)
       << ',' << fmt_double(c.reciprocity) << ',' << fmt_double(c.leading) << ',' << fmt_double(c.remainder) << ','
       << fmt_double(c.l1_dn) << ',' << fmt_double(c.scaled_remainder) << ',' << r.bound << '\n';
  r.csv = os.str();
  const double exponent = st.decay_fitted ? -st.decay.slope : std::nan("");
  const bool recip = st.max_reciprocity_defect <= cfg.tol.reciprocity;
  const bool mono = strictly_decreasing(st.worst_scaled);
  const bool decay = st.decay_fitted && exponent >= cfg.tol.representation;
  r.values = {{"max_reciprocity_defect", st.max_reciprocity_defect}, {"decay_exponent", exponent}};
  for (std::size_t i = 0; i < cfg.n_list.size(); ++i)
    r.values.emplace_back("scaled_remainder_n" + std::to_string(cfg.n_list[i]), st.worst_scaled[i]);
  r.status = recip && mono && decay ? Status::pass : Status::fail;
  if (!recip) r.reason = "reciprocity defect above tolerance";
  if (!mono) r.reason += std::string(r.reason.empty() ? "" : "; ") + "scaled remainder is not decreasing in n";
  if (mono && !decay) r.reason += std::string(r.reason.empty() ? "" : "; ") + "decay exponent below threshold";
}

inline void check_polarization(const RunConfig& cfg, RunContext& ctx, CheckResult& r) {
  std::ostringstream os;
  os << "n,l1_dn,M11,M12,M21,M22,W_min_eig,W_max_eig,W_bound,bound\n";
  bool ok = true;
  Mat2 last;
  for (int n : cfg.n_list) {
    const MeshPtr& mesh = ctx.mesh(n);
    const MatrixField gn = ctx.gn(n);
    const auto rec = tensor_densities(mesh, ctx.g0(), gn, correctors(mesh, ctx.g0(), gn, Space::dirichlet));
    const auto c0 = cell_values(*mesh, ctx.g0()), cn = cell_values(*mesh, gn);
    bool iso = true;
    for (std::size_t t : rec.triangle) iso = iso && isotropic(c0[t]) && isotropic(cn[t]);
    const WBounds wb = w_bounds_check(rec, iso, cfg.tol.w);
    ok = ok && wb.pass;
    if (!wb.pass) r.reason = "W eigenvalues leave the admissible range at n = " + std::to_string(n);
    last = rec.mean_M();
    os << n << ',' << fmt_double(rec.l1_dn) << ',' << fmt_double(last(0, 0)) << ',' << fmt_double(last(0, 1)) << ','
       << fmt_double(last(1, 0)) << ',' << fmt_double(last(1, 1)) << ',' << fmt_double(wb.min_eig) << ','
       << fmt_double(wb.max_eig) << ',' << fmt_double(wb.bound) << ',' << r.bound << '\n';
    r.values.emplace_back("W_max_eig_n" + std::to_string(n), wb.max_eig);
  }
  if (const auto* e = std::get_if<ConfocalEllipse>(&cfg.family.kind); e && e->q != 0.0) {
    const auto lim = elliptic_limit_tensors(e->q > 0 ? EllipticLimit::conductive : EllipticLimit::insulating);
    double dev = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) dev = std::max(dev, std::abs(last(i, j) - lim.M(i, j)));
    r.values.emplace_back("limit_deviation", dev);
    if (dev > cfg.tol.polarization) {
      ok = false;
      r.reason += std::string(r.reason.empty() ? "" : "; ") + "M at the largest n is not within tolerance of the limit";
    }
  }
  r.csv = os.str();
  r.status = ok ? Status::pass : Status::fail;
}

inline void check_stream(const RunConfig& cfg, RunContext& ctx, CheckResult& r) {
  std::ostringstream os;
  os << "n,duality_residual,dual_equation_residual,dual_gap,bound\n";
  const std::string& data = cfg.data.front();
  std::vector<double> gaps;
  double worst = 0.0;
  try {
    for (int n : cfg.n_list) {
      const MeshPtr& mesh = ctx.mesh(n);
      const MatrixField gn = ctx.gn(n);
      const ScalarField un = ctx.u0(n, data) + ctx.w(n, data);
      const ScalarField psi0 = stream_function(mesh, ctx.g0(), ctx.u0(n, data));
      const ScalarField psin = stream_function(mesh, gn, un);
      const double res = duality_residual(mesh, gn, un, psin);
      const double eq = dual_equation_residual(mesh, dual_field(gn), psin);
      const double gap = dual_gap(mesh, ctx.g0(), gn, psi0, psin);
      worst = std::max(worst, res);
      gaps.push_back(gap);
      os << n << ',' << fmt_double(res) << ',' << fmt_double(eq) << ',' << fmt_double(gap) << ',' << r.bound << '\n';
      r.values.emplace_back("dual_gap_n" + std::to_string(n), gap);
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::nonzero_flux) throw;
    r.csv = os.str();
    r.status = Status::fail;
    r.reason = e.what();
    return;
  }
  r.csv = os.str();
  r.values.insert(r.values.begin(), {"max_duality_residual", worst});
  const bool mono = strictly_decreasing(gaps);
  r.status = worst < cfg.tol.duality && mono ? Status::pass : Status::fail;
  if (worst >= cfg.tol.duality) r.reason = "duality residual above tolerance";
  if (!mono) r.reason += std::string(r.reason.empty() ? "" : "; ") + "dual gap is not decreasing in n";
}

inline const char* bound_name(const std::string& check) {
  static const std::map<std::string, const char*> names{
      {"assumptions", "hypotheses 1-4 on the inclusion family"},
      {"energy", "energy estimate E(w_n) <= |d_n|_L1 |grad u0|^2_Linf(K)"},
      {"bounds", "flux bound |(g_n-g_0) grad w_n|_L1 <= |d_n|_L1 |grad u0|_Linf(K)"},
      {"l2", "L2 rate of w_n against |d_n|_L1"},
      {"representation", "reciprocity identity and representation remainder"},
      {"polarization", "W eigenvalue bounds and limiting polarization tensor"},
      {"stream", "stream-function duality and dual gap"},
      {"bc_independence", "boundary-condition independence of correctors"},
  };
  return names.at(check);
}

}  // namespace detail

/// Runs every configured check; per-check errors are recorded as skips with their reason.
inline RunManifest run(const RunConfig& cfg) {
  RunManifest man;
  man.config = cfg;
  man.timestamp = detail::utc_timestamp();
  detail::RunContext ctx(cfg);
  for (const auto& name : cfg.checks) {
    CheckResult r;
    r.name = name;
    r.bound = detail::bound_name(name);
    try {
      if (name == "assumptions") detail::check_assumptions(cfg, r);
      else if (name == "energy") detail::check_ratio(cfg, ctx, r, false);
      else if (name == "bounds") detail::check_ratio(cfg, ctx, r, true);
      else if (name == "l2") detail::check_rate(cfg, r, Quantity::l2, cfg.tol.l2, false);
      else if (name == "bc_independence") detail::check_rate(cfg, r, Quantity::bc_gap, cfg.tol.bc_gap, true);
      else if (name == "representation") detail::check_representation(cfg, r);
      else if (name == "polarization") detail::check_polarization(cfg, ctx, r);
      else if (name == "stream") detail::check_stream(cfg, ctx, r);
    } catch (const std::exception& e) {
      r.status = Status::skipped;
      r.reason = e.what();
      r.values.clear();
      r.csv.clear();
    }
    man.checks.push_back(std::move(r));
  }
  return man;
}

/// Writes <check>.csv, summary.txt and manifest.json under the configured output directory.
inline void write_reports(const RunManifest& man) {
  namespace fs = std::filesystem;
  const fs::path dir(man.config.output);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::io, "cannot create " + dir.string() + ": " + ec.message());
  auto put = [&](const fs::path& p, const std::string& body) {
    std::ofstream f(p);
    if (!f || !(f << body)) throw Error(ErrorCode::io, "cannot write " + p.string());
  };
  for (const auto& c : man.checks)
    if (!c.csv.empty()) put(dir / (c.name + ".csv"), c.csv);
  put(dir / "summary.txt", man.summary());
  put(dir / "manifest.json", man.to_json().dump(2) + "\n");
}

}  // namespace contrast_asym
