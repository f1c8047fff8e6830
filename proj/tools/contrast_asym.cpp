// contrast-asym: command line front end for the inclusion asymptotics toolkit.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "contrast_asym/assumptions.hpp"
#include "contrast_asym/config.hpp"
#include "contrast_asym/harness.hpp"
#include "contrast_asym/oracles.hpp"
#include "contrast_asym/plot.hpp"

namespace ca = contrast_asym;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ca::Error(ca::ErrorCode::io, "cannot read " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

int cmd_run(const std::string& path, const std::string& output) {
  ca::RunConfig cfg = ca::parse_config(slurp(path));
  if (!output.empty()) cfg.output = output;
  const ca::RunManifest man = ca::run(cfg);
  ca::write_reports(man);
  std::cout << man.summary();
  return man.exit_code();
}

int cmd_assumptions(const std::string& path) {
  const ca::RunConfig cfg = ca::parse_config(slurp(path));
  const auto rep = ca::assumption_report(cfg.family, cfg.n_list, cfg.p, cfg.tau);
  std::printf("%6s %14s %14s %14s %14s %14s %s\n", "n", "l1_dn", "l1_A", "lp_A", "lp_B", "separation", "separated");
  for (const auto& r : rep.rows)
    std::printf("%6d %14.6e %14.6e %14.6e %14.6e %14.6e %s\n", r.n, r.l1_dn, r.l1_a, r.lp_a, r.lp_b, r.separation,
                r.separated ? "yes" : "no");
  auto yn = [](bool b) { return b ? "pass" : "fail"; };
  std::printf("1 well within K: %s\n2 vanishing:      %s (slope %.3f)\n3 ordered:        %s\n", yn(rep.well_within),
              yn(rep.vanishing), rep.l1_slope, yn(rep.ordered));
  std::printf("4 integrability:  %s (vacuous %s, 4a %s, 4b %s, 4c %s)\n", yn(rep.integrable),
              rep.vacuous4 ? "yes" : "no", yn(rep.mixed4a), yn(rep.planar4b), yn(rep.intertwined4c));
  for (const auto& n : rep.notes) std::printf("note: %s\n", n.c_str());
  return rep.all() ? 0 : 1;
}

int cmd_oracle_radial(int d, double alpha, double beta, const std::vector<int>& ns) {
  std::cout << "n,alpha,beta,A1,A2,A3,A4,B2,B3,B4,sup,l1,l2,energy\n";
  for (int n : ns) {
    const auto s = ca::radial_solution(d, n, alpha, beta);
    std::ostringstream row;
    ca::write_radial_csv_row(row, s);
    std::string line = row.str();
    line.pop_back();
    const auto norms = ca::radial_perturbation(s);
    std::cout << line << ',' << ca::detail::fmt_double(norms.sup) << ',' << ca::detail::fmt_double(norms.l1) << ','
              << ca::detail::fmt_double(ca::radial_perturbation_l2(s)) << ','
              << ca::detail::fmt_double(ca::radial_perturbation_energy(s)) << '\n';
  }
  return 0;
}

int cmd_oracle_elliptic(double q, const std::vector<int>& ns) {
  std::cout << "n,lambda,D11,W11,W22,M11,M22\n";
  for (int n : ns) {
    const double lambda = std::pow(double(n), q);
    const auto t = ca::elliptic_densities(ca::elliptic_solution(n, lambda));
    std::cout << n << ',' << ca::detail::fmt_double(lambda);
    for (double v : {t.D(0, 0), t.W(0, 0), t.W(1, 1), t.M(0, 0), t.M(1, 1)}) std::cout << ',' << ca::detail::fmt_double(v);
    std::cout << '\n';
  }
  return 0;
}

int cmd_plot(const std::string& csv, const std::string& svg) {
  const std::string out = ca::render_svg(ca::read_rate_series(slurp(csv)));
  std::ofstream f(svg);
  if (!f || !(f << out)) throw ca::Error(ca::ErrorCode::io, "cannot write " + svg);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Small-inclusion asymptotics for the conductivity equation"};
  app.set_version_flag("--version", std::string(CONTRAST_ASYM_VERSION));
  app.require_subcommand(1);
  int code = 0;

  std::string config, output;
  auto* run = app.add_subcommand("run", "Run the checks listed in a configuration file");
  run->add_option("config", config, "Configuration file")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output", output, "Output directory (overrides run.output)");

  auto* assumptions = app.add_subcommand("check-assumptions", "Evaluate hypotheses 1-4 for a configured family");
  assumptions->add_option("config", config, "Configuration file")->required()->check(CLI::ExistingFile);

  auto* oracle = app.add_subcommand("oracle", "Closed-form reference solutions");
  oracle->require_subcommand(1);
  int d = 2;
  double alpha = 0.5, beta = -0.5, q = 0.5;
  std::vector<int> ns;
  auto* radial = oracle->add_subcommand("radial", "Layered radial solution coefficients and perturbation norms");
  radial->add_option("--d", d, "Dimension")->check(CLI::IsMember({2, 3}));
  radial->add_option("--alpha", alpha, "Exponent of the inner shell contrast");
  radial->add_option("--beta", beta, "Exponent of the outer shell contrast");
  radial->add_option("--n", ns, "Comma-separated n values")->delimiter(',')->required()->check(CLI::PositiveNumber);
  auto* elliptic = oracle->add_subcommand("elliptic", "Confocal elliptic inclusion tensors");
  elliptic->add_option("--q", q, "Contrast exponent, lambda = n^q");
  elliptic->add_option("--n", ns, "Comma-separated n values")->delimiter(',')->required()->check(CLI::PositiveNumber);

  std::string csv, svg;
  auto* plot = app.add_subcommand("plot", "Render a rate CSV as a log-log SVG");
  plot->add_option("csv", csv, "Rate CSV")->required()->check(CLI::ExistingFile);
  plot->add_option("-o,--output", svg, "SVG file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) code = cmd_run(config, output);
    else if (assumptions->parsed()) code = cmd_assumptions(config);
    else if (radial->parsed()) code = cmd_oracle_radial(d, alpha, beta, ns);
    else if (elliptic->parsed()) code = cmd_oracle_elliptic(q, ns);
    else if (plot->parsed()) code = cmd_plot(csv, svg);
  } catch (const std::exception& e) {
    std::cerr << "contrast-asym: " << e.what() << '\n';
    return 2;
  }
  return code;
}
