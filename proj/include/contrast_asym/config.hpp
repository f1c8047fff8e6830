#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "contrast_asym/asymptotics.hpp"
#include "contrast_asym/error.hpp"
#include "contrast_asym/geometry.hpp"
#include "contrast_asym/polarization.hpp"

namespace contrast_asym {

inline const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names{"assumptions",    "energy", "l2",     "representation",
                                              "polarization", "bounds", "stream", "bc_independence"};
  return names;
}

inline const std::vector<std::string>& family_kinds() {
  static const std::vector<std::string> kinds{"radial_annuli", "strips", "confocal_ellipse", "disk_inclusion"};
  return kinds;
}

/// Overridable tolerances, keyed as in the [tolerances] section.
struct Tolerances {
  double energy = 0.05;          ///< E(wₙ) ≤ (1 + energy)·‖dₙ‖‖∇u₀‖²
  double flux = 0.05;            ///< ‖(γₙ−γ₀)∇wₙ‖ ≤ (1 + flux)·‖dₙ‖‖∇u₀‖
  double w = kWTolerance;        ///< margin on the W eigenvalue range
  double polarization = 0.1;     ///< entrywise distance of M to the limiting tensor
  double reciprocity = 1e-8;     ///< relative reciprocity defect
  double duality = 0.03;         ///< ‖γ∇u − J∇ψ‖ / ‖γ∇u‖
  double representation = 0.2;   ///< decay exponent of the scaled remainder
  double l2 = 0.55;              ///< fitted exponent of ‖wₙ‖_{L²}
  double bc_gap = 0.2;           ///< fitted exponent of the corrector discrepancy
};

struct RunConfig {
  std::string kind;
  InclusionFamily family;
  std::vector<int> n_list;
  double h = 0.0;
  std::vector<std::string> data{"x1"};
  std::vector<Point> probes;
  std::vector<std::string> checks;
  std::string output = "out";
  double p = 4.0;
  double tau = 0.5;
  Tolerances tol;
  std::vector<std::pair<std::string, std::string>> echo;  ///< section.key = value, in file order
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] inline void config_error(int line, const std::string& path, const std::string& msg) {
  std::string where = line > 0 ? "line " + std::to_string(line) + ": " : "";
  throw Error(ErrorCode::config, where + path + ": " + msg);
}

/// Top-level items of "[a, [b, c], d]".
inline std::vector<std::string> split_list(const std::string& text, int line, const std::string& path) {
  const std::string s = trim(text);
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') config_error(line, path, "expected a bracketed list");
  std::vector<std::string> items;
  std::string cur;
  int depth = 0;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const char c = s[i];
    if (c == '[') ++depth;
    if (c == ']' && --depth < 0) config_error(line, path, "unbalanced brackets");
    if (c == ',' && depth == 0) {
      items.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (depth != 0) config_error(line, path, "unbalanced brackets");
  if (!trim(cur).empty() || !items.empty()) items.push_back(trim(cur));
  for (const auto& it : items)
    if (it.empty()) config_error(line, path, "empty list item");
  return items;
}

inline double to_number(const std::string& s, int line, const std::string& path) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) config_error(line, path, "expected a number, got '" + s + "'");
  return v;
}

inline int to_int(const std::string& s, int line, const std::string& path) {
  const double v = to_number(s, line, path);
  if (v != std::floor(v) || v < 1 || v > 1e9) config_error(line, path, "expected a positive integer, got '" + s + "'");
  return int(v);
}

inline std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
  return s;
}

struct Entry {
  std::string value;
  int line = 0;
};

}  // namespace detail

/// Parses `key = value` lines grouped under [family], [run], [assumptions] and [tolerances].
inline RunConfig parse_config(const std::string& text) {
  using detail::config_error;
  static const std::map<std::string, std::set<std::string>> allowed{
      {"family", {"kind", "d", "alpha", "beta", "epsilon", "q", "rho", "lambda", "rho_exponent", "lambda_exponent"}},
      {"run", {"n_list", "h", "boundary_data", "probes", "checks", "output"}},
      {"assumptions", {"p", "tau"}},
      {"tolerances",
       {"energy", "flux", "w", "polarization", "reciprocity", "duality", "representation", "l2", "bc_gap"}},
  };
  std::map<std::string, detail::Entry> kv;
  RunConfig cfg;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw.substr(0, raw.find('#'));
    s = detail::trim(s);
    if (s.empty()) continue;
    if (s.front() == '[' && s.find('=') == std::string::npos) {
      if (s.back() != ']') config_error(line, "section", "unterminated section header");
      section = detail::trim(s.substr(1, s.size() - 2));
      if (!allowed.count(section)) config_error(line, section, "unknown section (family, run, assumptions, tolerances)");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) config_error(line, section.empty() ? "config" : section, "expected key = value");
    if (section.empty()) config_error(line, "config", "key outside of a section");
    const std::string key = detail::trim(s.substr(0, eq));
    const std::string value = detail::trim(s.substr(eq + 1));
    const std::string path = section + "." + key;
    if (!allowed.at(section).count(key)) config_error(line, path, "unknown key");
    if (value.empty()) config_error(line, path, "missing value");
    if (kv.count(path)) config_error(line, path, "duplicate key");
    kv[path] = {value, line};
    cfg.echo.emplace_back(path, value);
  }

  auto has = [&](const std::string& p) { return kv.count(p) > 0; };
  auto num = [&](const std::string& p, double fallback) {
    return has(p) ? detail::to_number(kv[p].value, kv[p].line, p) : fallback;
  };
  auto require = [&](const std::string& p) {
    if (!has(p)) config_error(0, p, "required key is missing");
  };

  require("family.kind");
  cfg.kind = kv["family.kind"].value;
  const int kline = kv["family.kind"].line;
  static const std::map<std::string, std::set<std::string>> family_keys{
      {"radial_annuli", {"d", "alpha", "beta"}},
      {"strips", {"epsilon"}},
      {"confocal_ellipse", {"q"}},
      {"disk_inclusion", {"rho", "lambda", "rho_exponent", "lambda_exponent"}},
  };
  const auto fk = family_keys.find(cfg.kind);
  if (fk == family_keys.end())
    config_error(kline, "family.kind", "unknown kind '" + cfg.kind + "' (supported: " + detail::join(family_kinds()) + ")");
  for (const auto& [path, e] : kv)
    if (path.rfind("family.", 0) == 0 && path != "family.kind" && !fk->second.count(path.substr(7)))
      config_error(e.line, path, "not a parameter of " + cfg.kind);

  if (cfg.kind == "radial_annuli") {
    const double d = num("family.d", 2.0);
    if (d != 2.0 && d != 3.0) config_error(kv["family.d"].line, "family.d", "must be 2 or 3");
    cfg.family = radial_annuli(num("family.alpha", 0.0), num("family.beta", 0.0), int(d));
  } else if (cfg.kind == "strips") {
    const double eps = num("family.epsilon", 0.5);
    if (!(eps > 0.0)) config_error(kv["family.epsilon"].line, "family.epsilon", "must be positive");
    cfg.family = strips(eps);
  } else if (cfg.kind == "confocal_ellipse") {
    cfg.family = confocal_ellipse(num("family.q", 0.5));
  } else {
    const double rho = num("family.rho", 0.2), lambda = num("family.lambda", 10.0);
    if (!(rho > 0.0) || rho >= 0.8) config_error(has("family.rho") ? kv["family.rho"].line : 0, "family.rho", "must lie in (0, 0.8)");
    if (!(lambda > 0.0)) config_error(has("family.lambda") ? kv["family.lambda"].line : 0, "family.lambda", "must be positive");
    cfg.family = disk_inclusion(rho, lambda, num("family.rho_exponent", 0.0), num("family.lambda_exponent", 0.0));
  }

  require("run.n_list");
  for (const auto& s : detail::split_list(kv["run.n_list"].value, kv["run.n_list"].line, "run.n_list"))
    cfg.n_list.push_back(detail::to_int(s, kv["run.n_list"].line, "run.n_list"));
  if (cfg.n_list.empty()) config_error(kv["run.n_list"].line, "run.n_list", "must not be empty");
  for (std::size_t i = 1; i < cfg.n_list.size(); ++i)
    if (cfg.n_list[i] <= cfg.n_list[i - 1]) config_error(kv["run.n_list"].line, "n_list", "must be strictly ascending");

  require("run.h");
  cfg.h = num("run.h", 0.0);
  if (!(cfg.h > 0.0)) config_error(kv["run.h"].line, "run.h", "must be positive");

  if (has("run.boundary_data")) {
    cfg.data = detail::split_list(kv["run.boundary_data"].value, kv["run.boundary_data"].line, "run.boundary_data");
    for (const auto& d : cfg.data) {
      bool known = false;
      for (const auto& r : boundary_data_registry()) known = known || r.name == d;
      if (!known) config_error(kv["run.boundary_data"].line, "run.boundary_data", "unknown boundary data '" + d + "'");
    }
    if (cfg.data.empty()) config_error(kv["run.boundary_data"].line, "run.boundary_data", "must not be empty");
  }

  if (has("run.probes")) {
    const int pl = kv["run.probes"].line;
    for (const auto& item : detail::split_list(kv["run.probes"].value, pl, "run.probes")) {
      const auto xy = detail::split_list(item, pl, "run.probes");
      if (xy.size() != 2) config_error(pl, "run.probes", "each probe is a pair [x, y]");
      cfg.probes.push_back({detail::to_number(xy[0], pl, "run.probes"), detail::to_number(xy[1], pl, "run.probes")});
    }
    for (const Point& y : cfg.probes)
      if (!contains(cfg.family.domain.outer, y) || contains(cfg.family.domain.k, y))
        config_error(pl, "run.probes", "probes must lie in the domain and outside K");
  } else if (family_dim(cfg.family) == 2) {
    cfg.probes = default_probes(cfg.family);
  }

  require("run.checks");
  cfg.checks = detail::split_list(kv["run.checks"].value, kv["run.checks"].line, "run.checks");
  if (cfg.checks.empty()) config_error(kv["run.checks"].line, "run.checks", "at least one check is required");
  for (const auto& c : cfg.checks)
    if (std::find(check_names().begin(), check_names().end(), c) == check_names().end())
      config_error(kv["run.checks"].line, "run.checks", "unknown check '" + c + "' (" + detail::join(check_names()) + ")");

  if (has("run.output")) cfg.output = kv["run.output"].value;
  cfg.p = num("assumptions.p", cfg.p);
  cfg.tau = num("assumptions.tau", cfg.tau);

  auto tol = [&](const char* key, double& slot) {
    const std::string p = std::string("tolerances.") + key;
    slot = num(p, slot);
    if (!(slot >= 0.0)) config_error(kv[p].line, p, "must be non-negative");
  };
  tol("energy", cfg.tol.energy);
  tol("flux", cfg.tol.flux);
  tol("w", cfg.tol.w);
  tol("polarization", cfg.tol.polarization);
  tol("reciprocity", cfg.tol.reciprocity);
  tol("duality", cfg.tol.duality);
  tol("representation", cfg.tol.representation);
  tol("l2", cfg.tol.l2);
  tol("bc_gap", cfg.tol.bc_gap);
  return cfg;
}

}  // namespace contrast_asym
