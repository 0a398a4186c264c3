#pragma once

#include <qshape/error.hpp>
#include <qshape/geometry.hpp>

#include <algorithm>
#include <fstream>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace qshape {

namespace detail {

inline std::string xml_escape(const std::string& s) {
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

}  // namespace detail

// Closed SVG path of the polygon fitted into a size x size cell at (ox, oy), aspect preserved, y flipped.
inline std::string svg_path(std::span<const Point> pts, double ox, double oy, double size, double margin) {
  double minx = std::numeric_limits<double>::infinity(), miny = minx;
  double maxx = -minx, maxy = -minx;
  for (const Point& p : pts) {
    minx = std::min(minx, p.x);
    maxx = std::max(maxx, p.x);
    miny = std::min(miny, p.y);
    maxy = std::max(maxy, p.y);
  }
  const double span = std::max({maxx - minx, maxy - miny, 1e-12});
  const double inner = size * (1.0 - 2.0 * margin);
  const double scale = inner / span;
  const double cx = 0.5 * (minx + maxx);
  const double cy = 0.5 * (miny + maxy);
  std::ostringstream d;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double x = ox + size / 2 + (pts[i].x - cx) * scale;
    const double y = oy + size / 2 - (pts[i].y - cy) * scale;
    d << (i == 0 ? "M" : " L") << format_real(x) << ',' << format_real(y);
  }
  d << " Z";
  return d.str();
}

// A single polygon in a 512 x 512 viewBox with a 5% margin.
inline std::string polygon_svg(std::span<const Point> pts) {
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 512 512\" width=\"512\" height=\"512\">\n"
    << "  <path d=\"" << svg_path(pts, 0, 0, 512, 0.05) << "\" fill=\"#cfd8e3\" stroke=\"#1f2d3d\" stroke-width=\"2\"/>\n"
    << "</svg>\n";
  return s.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path + " for writing");
  out << text;
  if (!out) throw Error(ErrorCode::IoFailure, "failed writing " + path);
}

}  // namespace qshape
