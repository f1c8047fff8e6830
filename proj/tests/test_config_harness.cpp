#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "contrast_asym/config.hpp"
#include "contrast_asym/harness.hpp"
#include "contrast_asym/plot.hpp"

namespace ca = contrast_asym;

namespace {

const char* kMinimal = R"(
[family]
kind = radial_annuli
alpha = 0.5
beta = 0.5

[run]
n_list = [8, 16]
h = 0.08
checks = [energy]
)";

std::string config_error_text(const std::string& text) {
  try {
    ca::parse_config(text);
  } catch (const ca::Error& e) {
    EXPECT_EQ(e.code(), ca::ErrorCode::config);
    return e.what();
  }
  ADD_FAILURE() << "config parsed without error";
  return {};
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto at = s.find(from);
  EXPECT_NE(at, std::string::npos);
  return s.replace(at, from.size(), to);
}

std::string body_without_comments(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line))
    if (line.empty() || line[0] != '#') out += line + '\n';
  return out;
}

}  // namespace

TEST(Config, MinimalConfigParses) {
  const auto cfg = ca::parse_config(kMinimal);
  EXPECT_EQ(cfg.kind, "radial_annuli");
  EXPECT_EQ(cfg.n_list, (std::vector<int>{8, 16}));
  EXPECT_DOUBLE_EQ(cfg.h, 0.08);
  EXPECT_EQ(cfg.checks, std::vector<std::string>{"energy"});
  EXPECT_EQ(cfg.data, std::vector<std::string>{"x1"});
  EXPECT_FALSE(cfg.probes.empty());
  EXPECT_EQ(cfg.echo.front().first, "family.kind");
}

TEST(Config, DescendingNListNamesKey) {
  const auto msg = config_error_text(replace(kMinimal, "[8, 16]", "[16, 8]"));
  EXPECT_NE(msg.find("n_list"), std::string::npos) << msg;
}

TEST(Config, UnknownKindListsSupportedKinds) {
  const auto msg = config_error_text(replace(kMinimal, "radial_annuli", "hexagons"));
  for (const auto& k : ca::family_kinds()) EXPECT_NE(msg.find(k), std::string::npos) << msg;
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
}

TEST(Config, UnknownAndDuplicateKeysRejected) {
  EXPECT_NE(config_error_text(replace(kMinimal, "h = 0.08", "h = 0.08\nmesh = fine")).find("unknown key"),
            std::string::npos);
  EXPECT_NE(config_error_text(replace(kMinimal, "h = 0.08", "h = 0.08\nh = 0.04")).find("duplicate"),
            std::string::npos);
  EXPECT_NE(config_error_text(replace(kMinimal, "[energy]", "[energy, magic]")).find("unknown check"),
            std::string::npos);
  EXPECT_NE(config_error_text(replace(kMinimal, "alpha = 0.5", "epsilon = 0.5")).find("not a parameter"),
            std::string::npos);
  EXPECT_NE(config_error_text(replace(kMinimal, "h = 0.08", "h = -1")).find("run.h"), std::string::npos);
  EXPECT_NE(config_error_text(replace(kMinimal, "h = 0.08\n", "")).find("required"), std::string::npos);
  EXPECT_NE(config_error_text(replace(kMinimal, "[run]", "[mesh]")).find("unknown section"), std::string::npos);
}

TEST(Config, ProbesMustAvoidK) {
  const auto msg = config_error_text(replace(kMinimal, "h = 0.08", "h = 0.08\nprobes = [[0.1, 0]]"));
  EXPECT_NE(msg.find("probes"), std::string::npos) << msg;
  const auto cfg = ca::parse_config(replace(kMinimal, "h = 0.08", "h = 0.08\nprobes = [[1.8, 0], [0, -1.7]]"));
  ASSERT_EQ(cfg.probes.size(), 2u);
  EXPECT_DOUBLE_EQ(cfg.probes[1][1], -1.7);
}

TEST(Config, TolerancesOverride) {
  const auto cfg = ca::parse_config(std::string(kMinimal) + "[tolerances]\nenergy = 0.2\n[assumptions]\np = 3\n");
  EXPECT_DOUBLE_EQ(cfg.tol.energy, 0.2);
  EXPECT_DOUBLE_EQ(cfg.tol.flux, 0.05);
  EXPECT_DOUBLE_EQ(cfg.p, 3.0);
}

TEST(Manifest, ExitCodes) {
  ca::RunManifest man;
  EXPECT_EQ(man.exit_code(), 0);
  man.checks.push_back({"energy", ca::Status::pass, "b", "", {}, ""});
  EXPECT_EQ(man.exit_code(), 0);
  man.checks.push_back({"bounds", ca::Status::fail, "b", "too big", {}, ""});
  EXPECT_EQ(man.exit_code(), 1);
  man.checks.push_back({"stream", ca::Status::skipped, "b", "no mesh", {}, ""});
  EXPECT_EQ(man.exit_code(), 2);
}

TEST(Harness, RadialEnergyPassesWithinBound) {
  auto cfg = ca::parse_config(replace(kMinimal, "[energy]", "[energy, bounds]"));
  const auto man = ca::run(cfg);
  ASSERT_EQ(man.checks.size(), 2u);
  for (const auto& c : man.checks) {
    EXPECT_EQ(c.status, ca::Status::pass) << c.name << ": " << c.reason;
    ASSERT_GE(c.values.size(), 1u);
    EXPECT_EQ(c.values[0].first, "max_ratio");
    EXPECT_LE(c.values[0].second, 1.05);
    EXPECT_GT(c.values[0].second, 0.0);
  }
  EXPECT_EQ(man.exit_code(), 0);
}

TEST(Harness, EveryCheckAppearsOnceInOrder) {
  auto cfg = ca::parse_config(replace(kMinimal, "[energy]", "[assumptions, bounds, energy]"));
  const auto man = ca::run(cfg);
  std::vector<std::string> names;
  for (const auto& c : man.checks) names.push_back(c.name);
  EXPECT_EQ(names, (std::vector<std::string>{"assumptions", "bounds", "energy"}));
  const auto j = man.to_json();
  EXPECT_EQ(j["checks"].size(), 3u);
  EXPECT_EQ(j["config"]["run.h"], "0.08");
  EXPECT_EQ(j["provenance"]["tool"], "contrast-asym");
  EXPECT_FALSE(j["provenance"]["timestamp"].get<std::string>().empty());
  EXPECT_EQ(j["exit_code"], man.exit_code());
}

TEST(Harness, CsvBodiesAreDeterministic) {
  auto cfg = ca::parse_config(replace(kMinimal, "[energy]", "[energy, assumptions]"));
  const auto a = ca::run(cfg), b = ca::run(cfg);
  ASSERT_EQ(a.checks.size(), b.checks.size());
  for (std::size_t i = 0; i < a.checks.size(); ++i) {
    EXPECT_FALSE(a.checks[i].csv.empty());
    EXPECT_EQ(body_without_comments(a.checks[i].csv), body_without_comments(b.checks[i].csv));
  }
}

TEST(Harness, EveryCsvRowCarriesBound) {
  const auto man = ca::run(ca::parse_config(kMinimal));
  std::istringstream in(man.checks.at(0).csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.substr(line.rfind(',') + 1), "bound");
  int rows = 0;
  while (std::getline(in, line)) {
    EXPECT_NE(line.find(man.checks[0].bound), std::string::npos);
    ++rows;
  }
  EXPECT_EQ(rows, 2);
}

TEST(Harness, UnresolvableStripsAreSkippedWithReason) {
  const auto cfg = ca::parse_config(R"(
[family]
kind = strips
[run]
n_list = [64, 128]
h = 0.1
checks = [energy, assumptions]
)");
  const auto man = ca::run(cfg);
  ASSERT_EQ(man.checks.size(), 2u);
  EXPECT_EQ(man.checks[0].status, ca::Status::skipped);
  EXPECT_FALSE(man.checks[0].reason.empty());
  EXPECT_NE(man.checks[1].status, ca::Status::skipped);
  EXPECT_EQ(man.exit_code(), 2);
  EXPECT_NE(man.summary().find("skipped"), std::string::npos);
}

TEST(Harness, WriteReportsCreatesFiles) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "contrast_asym_harness_test";
  fs::remove_all(dir);
  auto cfg = ca::parse_config(kMinimal);
  cfg.output = dir.string();
  ca::write_reports(ca::run(cfg));
  EXPECT_TRUE(fs::exists(dir / "energy.csv"));
  EXPECT_TRUE(fs::exists(dir / "summary.txt"));
  std::ifstream f(dir / "manifest.json");
  const auto j = nlohmann::json::parse(f);
  EXPECT_EQ(j["checks"][0]["name"], "energy");
  fs::remove_all(dir);
}

TEST(Plot, SvgHasFixedViewBox) {
  const std::string csv = "# slope=1\nn,l1_dn,value\n8,0.4,0.1\n16,0.2,0.05\n32,0.1,0.025\n";
  const auto s = ca::read_rate_series(csv);
  ASSERT_EQ(s.x.size(), 3u);
  const auto svg = ca::render_svg(s);
  EXPECT_NE(svg.find("viewBox=\"0 0 640 480\""), std::string::npos);
  std::size_t circles = 0;
  for (auto at = svg.find("<circle"); at != std::string::npos; at = svg.find("<circle", at + 1)) ++circles;
  EXPECT_EQ(circles, 3u);
}

TEST(Plot, BadInputsRejected) {
  auto code = [](const std::string& csv) {
    try {
      ca::read_rate_series(csv);
    } catch (const ca::Error& e) {
      return e.code();
    }
    return ca::ErrorCode::config;
  };
  EXPECT_EQ(code("n,value\n1,2\n2,3\n"), ca::ErrorCode::io);
  EXPECT_EQ(code("n,l1_dn,value\n8,0.4,0.1\n"), ca::ErrorCode::too_few_samples);
  EXPECT_EQ(code("n,l1_dn,value\n8,0.4,0\n16,0.2,0.1\n"), ca::ErrorCode::nonpositive_sample);
}
