#pragma once

// CSV and SVG writers for sweep output.
//
// CSV numbers are printed with 17 significant digits so every value reads back
// to the same double. Output depends only on the table contents.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gamma_qm/errors.hpp"

namespace gqm::io {

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

/// Short form for labels and metadata of user-supplied parameters.
inline std::string format_short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct CsvTable {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row) {
    if (row.size() != columns.size()) throw size_error("CsvTable: row width does not match header");
    rows.push_back(std::move(row));
  }
};

inline std::string to_csv(const CsvTable& t) {
  std::ostringstream os;
  for (const auto& [k, v] : t.metadata) os << "# " << k << " = " << v << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
    os << '\n';
  }
  return os.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline void write_csv(const std::filesystem::path& path, const CsvTable& t) { write_text(path, to_csv(t)); }

// ---------------------------------------------------------------------------
// SVG

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  bool log_y = false;
};

struct Heatmap {
  std::string title;
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<double> values;  ///< row-major, values[i * ny + j] at (x_i, y_j)
  double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
};

namespace detail {

inline std::string escape(const std::string& s) {
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

inline std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

inline const char* header() {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
         "<!DOCTYPE svg PUBLIC \"-//W3C//DTD SVG 1.1//EN\" \"http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd\">\n";
}

}  // namespace detail

inline std::string to_svg(const LinePlot& p) {
  const double W = 640, H = 420, left = 82, right = 150, top = 40, bottom = 55;
  const double pw = W - left - right, ph = H - top - bottom;
  auto ty = [&](double v) { return p.log_y ? std::log10(std::max(v, 1e-300)) : v; };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : p.series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  auto sx = [&](double v) { return left + (v - x0) / (x1 - x0) * pw; };
  auto sy = [&](double v) { return top + ph - (ty(v) - y0) / (y1 - y0) * ph; };

  std::ostringstream os;
  os << detail::header();
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W << "\" height=\"" << H
     << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
     << detail::escape(p.title) << "</text>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double vx = x0 + (x1 - x0) * k / 4.0, vy = y0 + (y1 - y0) * k / 4.0;
    const double px = left + pw * k / 4.0, py = top + ph - ph * k / 4.0;
    os << "<text x=\"" << detail::fixed(px) << "\" y=\"" << top + ph + 16
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << detail::tick(vx) << "</text>\n";
    os << "<text x=\"" << left - 6 << "\" y=\"" << detail::fixed(py + 4)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
       << detail::tick(p.log_y ? std::pow(10.0, vy) : vy) << "</text>\n";
  }
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 12
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << detail::escape(p.x_label)
     << "</text>\n";
  os << "<text x=\"16\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
     << "transform=\"rotate(-90 16 " << top + ph / 2 << ")\">" << detail::escape(p.y_label) << "</text>\n";

  for (std::size_t s = 0; s < p.series.size(); ++s) {
    const auto& ser = p.series[s];
    const char* color = detail::kPalette[s % std::size(detail::kPalette)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < ser.x.size() && i < ser.y.size(); ++i) {
      if (!std::isfinite(ser.x[i]) || !std::isfinite(ser.y[i])) continue;
      os << (first ? "" : " ") << detail::fixed(sx(ser.x[i])) << ',' << detail::fixed(sy(ser.y[i]));
      first = false;
    }
    os << "\"/>\n";
    const double ly = top + 14 + 18.0 * static_cast<double>(s);
    os << "<line x1=\"" << left + pw + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << left + pw + 30 << "\" y2=\"" << ly - 4
       << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << left + pw + 34 << "\" y=\"" << ly
       << "\" font-family=\"sans-serif\" font-size=\"11\">" << detail::escape(ser.name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

inline std::string to_svg(const Heatmap& m) {
  if (m.values.size() != m.nx * m.ny || m.nx == 0 || m.ny == 0) throw size_error("Heatmap: bad dimensions");
  const double W = 520, H = 520, left = 60, top = 40, side = 400;
  // Cap the number of drawn cells; larger maps are subsampled.
  const std::size_t cells = 200;
  const std::size_t si = std::max<std::size_t>(1, (m.nx + cells - 1) / cells);
  const std::size_t sj = std::max<std::size_t>(1, (m.ny + cells - 1) / cells);
  const std::size_t cx = (m.nx + si - 1) / si, cy = (m.ny + sj - 1) / sj;
  const double vmax = std::max(*std::max_element(m.values.begin(), m.values.end()), 1e-300);
  const double cw = side / static_cast<double>(cx), ch = side / static_cast<double>(cy);

  std::ostringstream os;
  os << detail::header();
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W << "\" height=\"" << H
     << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
     << detail::escape(m.title) << "</text>\n";
  for (std::size_t a = 0; a < cx; ++a) {
    for (std::size_t b = 0; b < cy; ++b) {
      const double v = m.values[(a * si) * m.ny + b * sj] / vmax;
      const int shade = static_cast<int>(std::lround(255.0 * (1.0 - std::clamp(v, 0.0, 1.0))));
      char color[16];
      std::snprintf(color, sizeof color, "#%02x%02xff", shade, shade);
      os << "<rect x=\"" << detail::fixed(left + cw * static_cast<double>(a)) << "\" y=\""
         << detail::fixed(top + side - ch * static_cast<double>(b + 1)) << "\" width=\"" << detail::fixed(cw + 0.3)
         << "\" height=\"" << detail::fixed(ch + 0.3) << "\" fill=\"" << color << "\"/>\n";
    }
  }
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << side << "\" height=\"" << side
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << left << "\" y=\"" << top + side + 18 << "\" font-family=\"sans-serif\" font-size=\"11\">"
     << detail::tick(m.x_lo) << "</text>\n";
  os << "<text x=\"" << left + side << "\" y=\"" << top + side + 18
     << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << detail::tick(m.x_hi) << "</text>\n";
  os << "<text x=\"" << left - 6 << "\" y=\"" << top + side
     << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << detail::tick(m.y_lo) << "</text>\n";
  os << "<text x=\"" << left - 6 << "\" y=\"" << top + 10
     << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << detail::tick(m.y_hi) << "</text>\n";
  os << "<text x=\"" << left + side / 2 << "\" y=\"" << top + side + 36
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">x</text>\n";
  os << "<text x=\"" << left - 30 << "\" y=\"" << top + side / 2
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">y</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace gqm::io
