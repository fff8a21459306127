#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "specrob/error.hpp"
#include "specrob/io/csv.hpp"
#include "specrob/spectral.hpp"

namespace specrob::io {

struct ScatterPoint {
  double x = 0.0;
  double y = 0.0;
  std::string group;
  double y_low = 0.0;
  double y_high = 0.0;
};

struct ScatterLine {
  std::string group;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

struct AxisLabels {
  std::string x = "probit(ID accuracy)";
  std::string y = "probit(OOD accuracy)";
};

inline constexpr double kMinLineOpacity = 0.1;

inline double line_opacity(double r2) { return std::clamp(r2, kMinLineOpacity, 1.0); }

namespace detail {

inline std::string fixed2(double v) {
  std::array<char, 48> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, 2);
  if (ec != std::errc{}) return "nan";
  return {buf.data(), end};
}

inline std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                        "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

}  // namespace detail

/// Standalone SVG scatter with vertical CI whiskers and one regression line
/// per group whose stroke opacity is R^2 (floored at 0.1).
inline std::string render_scatter_svg(const std::vector<ScatterPoint>& points,
                                      const std::vector<ScatterLine>& lines,
                                      const AxisLabels& labels = {}) {
  require(!points.empty(), "scatter plot needs at least one point");
  constexpr double width = 640, height = 480, left = 70, right = 150, top = 20, bottom = 60;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& p : points) {
    require(std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.y_low) && std::isfinite(p.y_high),
            "scatter plot values must be finite");
    xmin = std::min(xmin, p.x);
    xmax = std::max(xmax, p.x);
    ymin = std::min({ymin, p.y, p.y_low});
    ymax = std::max({ymax, p.y, p.y_high});
  }
  const auto pad = [](double& lo, double& hi) {
    const double span = hi - lo;
    const double m = span > 0.0 ? 0.05 * span : 0.5;
    lo -= m;
    hi += m;
  };
  pad(xmin, xmax);
  pad(ymin, ymax);
  const double pw = width - left - right, ph = height - top - bottom;
  const auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  const auto sy = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };
  const auto num = [](double v) { return format_double(std::round(v * 100.0) / 100.0); };

  std::map<std::string, std::string> colors;
  for (const auto& p : points) colors.emplace(p.group, "");
  for (const auto& l : lines) colors.emplace(l.group, "");
  std::size_t ci = 0;
  for (auto& [g, c] : colors) c = detail::kPalette[ci++ % detail::kPalette.size()];

  std::string s;
  s += R"(<svg xmlns="http://www.w3.org/2000/svg" width="640" height="480" viewBox="0 0 640 480">)" "\n";
  s += R"(<rect x="0" y="0" width="640" height="480" fill="white"/>)" "\n";
  s += "<defs><clipPath id=\"plot\"><rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(pw) +
       "\" height=\"" + num(ph) + "\"/></clipPath></defs>\n";
  s += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 4.0;
    const double yv = ymin + (ymax - ymin) * i / 4.0;
    s += "<text x=\"" + num(sx(xv)) + "\" y=\"" + num(top + ph + 18) +
         "\" font-size=\"11\" text-anchor=\"middle\">" + detail::fixed2(xv) + "</text>\n";
    s += "<text x=\"" + num(left - 6) + "\" y=\"" + num(sy(yv) + 4) +
         "\" font-size=\"11\" text-anchor=\"end\">" + detail::fixed2(yv) + "</text>\n";
  }
  s += "<text x=\"" + num(left + pw / 2) + "\" y=\"" + num(height - 15) +
       "\" font-size=\"13\" text-anchor=\"middle\">" + detail::escape_xml(labels.x) + "</text>\n";
  s += "<text x=\"18\" y=\"" + num(top + ph / 2) + "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
       num(top + ph / 2) + ")\">" + detail::escape_xml(labels.y) + "</text>\n";

  s += "<g clip-path=\"url(#plot)\">\n";
  for (const auto& l : lines) {
    s += "<line class=\"fit\" data-group=\"" + detail::escape_xml(l.group) + "\" x1=\"" + num(sx(xmin)) +
         "\" y1=\"" + num(sy(l.slope * xmin + l.intercept)) + "\" x2=\"" + num(sx(xmax)) + "\" y2=\"" +
         num(sy(l.slope * xmax + l.intercept)) + "\" stroke=\"" + colors[l.group] +
         "\" stroke-width=\"2\" stroke-opacity=\"" + format_double(line_opacity(l.r2)) + "\"/>\n";
  }
  for (const auto& p : points) {
    const std::string& c = colors[p.group];
    s += "<line class=\"ci\" x1=\"" + num(sx(p.x)) + "\" y1=\"" + num(sy(p.y_low)) + "\" x2=\"" + num(sx(p.x)) +
         "\" y2=\"" + num(sy(p.y_high)) + "\" stroke=\"" + c + "\" stroke-width=\"1\"/>\n";
    s += "<circle cx=\"" + num(sx(p.x)) + "\" cy=\"" + num(sy(p.y)) + "\" r=\"3.5\" fill=\"" + c + "\"/>\n";
  }
  s += "</g>\n";
  double ly = top + 10;
  for (const auto& [g, c] : colors) {
    s += "<rect x=\"" + num(width - right + 12) + "\" y=\"" + num(ly - 8) + "\" width=\"10\" height=\"10\" fill=\"" +
         c + "\"/>\n";
    s += "<text x=\"" + num(width - right + 28) + "\" y=\"" + num(ly + 1) + "\" font-size=\"12\">" +
         detail::escape_xml(g) + "</text>\n";
    ly += 18;
  }
  s += "</svg>\n";
  return s;
}

inline void emit_scatter_svg(const std::vector<ScatterPoint>& points, const std::vector<ScatterLine>& lines,
                             const AxisLabels& labels, const std::filesystem::path& out) {
  write_text(out, render_scatter_svg(points, lines, labels));
}

/// Plain PGM (P2, maxval 65535) of log10(|power| + 1e-12) rescaled to the
/// map's own log range, with DC moved to the center (row H/2, column W/2).
inline std::string render_pgm(const PsdMap& map) {
  require(map.height >= 1 && map.width >= 1 && map.power.size() == map.height * map.width,
          "PGM rendering needs a well-formed map");
  std::vector<double> logs(map.power.size());
  for (std::size_t i = 0; i < logs.size(); ++i) {
    require(std::isfinite(map.power[i]), "PGM rendering needs finite power values");
    logs[i] = std::log10(std::abs(map.power[i]) + 1e-12);
  }
  const auto [lo_it, hi_it] = std::minmax_element(logs.begin(), logs.end());
  const double lo = *lo_it, hi = *hi_it;
  std::vector<std::uint32_t> pixels(logs.size(), 0);
  for (std::size_t r = 0; r < map.height; ++r) {
    for (std::size_t c = 0; c < map.width; ++c) {
      const std::size_t dst = ((r + map.height / 2) % map.height) * map.width + (c + map.width / 2) % map.width;
      const double l = logs[r * map.width + c];
      pixels[dst] = hi > lo ? static_cast<std::uint32_t>(std::lround(65535.0 * (l - lo) / (hi - lo))) : 0u;
    }
  }
  std::string s = "P2\n" + std::to_string(map.width) + " " + std::to_string(map.height) + "\n65535\n";
  for (std::size_t r = 0; r < map.height; ++r) {
    for (std::size_t c = 0; c < map.width; ++c) {
      if (c) s += ' ';
      s += std::to_string(pixels[r * map.width + c]);
    }
    s += '\n';
  }
  return s;
}

inline void emit_pgm(const PsdMap& map, const std::filesystem::path& out) { write_text(out, render_pgm(map)); }

}  // namespace specrob::io
