#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "contrast_asym/error.hpp"

namespace contrast_asym {

struct PlotSeries {
  std::string x_label;
  std::string y_label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Reads the l1_dn and value columns of a rate CSV (lines starting with '#' are skipped).
inline PlotSeries read_rate_series(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::vector<std::string> header;
  PlotSeries s;
  int xi = -1, yi = -1;
  auto split = [](const std::string& l) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ls(l);
    while (std::getline(ls, cell, ',')) out.push_back(cell);
    return out;
  };
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split(line);
    if (header.empty()) {
      header = cells;
      for (std::size_t k = 0; k < header.size(); ++k) {
        if (header[k] == "l1_dn") xi = int(k);
        if (header[k] == "value") yi = int(k);
      }
      if (xi < 0 || yi < 0) throw Error(ErrorCode::io, "plot input needs l1_dn and value columns");
      s.x_label = header[xi];
      s.y_label = header[yi];
      continue;
    }
    if (int(cells.size()) <= std::max(xi, yi)) throw Error(ErrorCode::io, "short row in plot input");
    const double x = std::strtod(cells[xi].c_str(), nullptr), y = std::strtod(cells[yi].c_str(), nullptr);
    if (!(x > 0.0) || !(y > 0.0)) throw Error(ErrorCode::nonpositive_sample, "log-log plot needs positive samples");
    s.x.push_back(x);
    s.y.push_back(y);
  }
  if (s.x.size() < 2) throw Error(ErrorCode::too_few_samples, "plot needs at least 2 rows");
  return s;
}

/// Log-log scatter with connecting polyline in a 640x480 viewBox.
inline std::string render_svg(const PlotSeries& s) {
  constexpr double W = 640, H = 480, L = 80, R = 20, T = 20, B = 60;
  auto range = [](const std::vector<double>& v) {
    double lo = std::log10(*std::min_element(v.begin(), v.end()));
    double hi = std::log10(*std::max_element(v.begin(), v.end()));
    if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
    const double pad = 0.05 * (hi - lo);
    return std::pair{lo - pad, hi + pad};
  };
  const auto [x0, x1] = range(s.x);
  const auto [y0, y1] = range(s.y);
  auto px = [&](double x) { return L + (std::log10(x) - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (std::log10(y) - y0) / (y1 - y0) * (H - T - B); };
  char buf[160];
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 640 480\" width=\"640\" height=\"480\">\n";
  os << "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf, "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"black\"/>\n", L,
                T, W - L - R, H - T - B);
  os << buf;
  for (int d = int(std::ceil(x0)); d <= int(std::floor(x1)); ++d) {
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%g\" font-size=\"12\" text-anchor=\"middle\">1e%d</text>\n",
                  px(std::pow(10.0, d)), H - B + 18, d);
    os << buf;
  }
  for (int d = int(std::ceil(y0)); d <= int(std::floor(y1)); ++d) {
    std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%.1f\" font-size=\"12\" text-anchor=\"end\">1e%d</text>\n", L - 6,
                  py(std::pow(10.0, d)) + 4, d);
    os << buf;
  }
  os << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
  for (std::size_t k = 0; k < s.x.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%s%.1f,%.1f", k ? " " : "", px(s.x[k]), py(s.y[k]));
    os << buf;
  }
  os << "\"/>\n";
  for (std::size_t k = 0; k < s.x.size(); ++k) {
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"4\" fill=\"steelblue\"/>\n", px(s.x[k]),
                  py(s.y[k]));
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "<text x=\"%g\" y=\"%g\" font-size=\"14\" text-anchor=\"middle\">%s</text>\n",
                L + 0.5 * (W - L - R), H - 15, s.x_label.c_str());
  os << buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"20\" y=\"%g\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 20 %g)\">%s</text>\n",
                T + 0.5 * (H - T - B), T + 0.5 * (H - T - B), s.y_label.c_str());
  os << buf << "</svg>\n";
  return os.str();
}

}  // namespace contrast_asym
