#pragma once

// Random shape generators shared by the test suites and the `synth` CLI subcommand.

#include <qshape/geometry.hpp>
#include <qshape/outline.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace qshape::synthetic {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

/// Star-shaped polygon around the origin: strictly increasing angles, radii in [r_min, 1].
///
/// Increasing angles about an interior point make the chain simple and counter-clockwise.
inline std::vector<Point> star_polygon(Rng& rng, int n, double r_min = 0.35) {
  std::vector<double> angles(n);
  const double slot = 2.0 * std::numbers::pi / n;
  for (int i = 0; i < n; ++i) angles[i] = (i + uniform(rng, 0.15, 0.85)) * slot;
  std::vector<Point> pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double r = uniform(rng, r_min, 1.0);
    pts.push_back(Point{r * std::cos(angles[i]), r * std::sin(angles[i])});
  }
  return pts;
}

// Star whose radii alternate between an outer and an inner band, so every corner turns sharply.
inline std::vector<Point> alternating_star(Rng& rng, int n) {
  auto pts = star_polygon(rng, n);
  for (int i = 0; i < n; ++i) {
    const double r = i % 2 == 0 ? uniform(rng, 0.8, 1.0) : uniform(rng, 0.35, 0.55);
    pts[i] = (r / norm(pts[i])) * pts[i];
  }
  return pts;
}

// Inserts `per_edge` evenly spaced collinear points on every edge.
inline std::vector<Point> subdivide(std::span<const Point> pts, int per_edge) {
  std::vector<Point> out;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = pts[i];
    const Point b = pts[(i + 1) % n];
    out.push_back(a);
    for (int s = 1; s <= per_edge; ++s) {
      const double t = static_cast<double>(s) / (per_edge + 1);
      out.push_back(a + t * (b - a));
    }
  }
  return out;
}

// Moves every vertex uniformly inside a disc of radius frac * mean edge length.
inline std::vector<Point> jitter(Rng& rng, std::span<const Point> pts, double frac) {
  const double radius = frac * perimeter(pts) / static_cast<double>(pts.size());
  std::vector<Point> out;
  out.reserve(pts.size());
  for (const Point& p : pts) {
    const double a = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    const double r = radius * std::sqrt(uniform(rng, 0.0, 1.0));
    out.push_back(p + Point{r * std::cos(a), r * std::sin(a)});
  }
  return out;
}

// Rigid motion plus uniform scale.
inline std::vector<Point> transform(std::span<const Point> pts, double angle, double scale, Point offset) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  std::vector<Point> out;
  out.reserve(pts.size());
  for (const Point& p : pts) {
    out.push_back(Point{scale * (c * p.x - s * p.y) + offset.x, scale * (s * p.x + c * p.y) + offset.y});
  }
  return out;
}

inline bool contains(std::span<const Point> poly, Point q) {
  bool in = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point a = poly[i];
    const Point b = poly[j];
    if ((a.y > q.y) != (b.y > q.y) && q.x < (b.x - a.x) * (q.y - a.y) / (b.y - a.y) + a.x) in = !in;
  }
  return in;
}

/// Rasterises a polygon given in pixel units (y up, origin at the bottom-left image corner).
inline BinaryMask rasterize(std::span<const Point> poly, int width, int height) {
  BinaryMask mask(width, height);
  for (int row = 0; row < height; ++row) {
    for (int col = 0; col < width; ++col) {
      const Point centre{col + 0.5, height - row - 0.5};
      if (contains(poly, centre)) mask.set(col, row, true);
    }
  }
  return mask;
}

// Binary PBM (P4) encoding.
inline void write_pbm(std::ostream& out, const BinaryMask& mask) {
  out << "P4\n" << mask.width() << ' ' << mask.height() << '\n';
  const int stride = (mask.width() + 7) / 8;
  std::vector<char> row(stride);
  for (int y = 0; y < mask.height(); ++y) {
    std::fill(row.begin(), row.end(), 0);
    for (int x = 0; x < mask.width(); ++x) {
      if (mask.at(x, y)) row[x / 8] = static_cast<char>(row[x / 8] | (0x80 >> (x % 8)));
    }
    out.write(row.data(), stride);
  }
}

}  // namespace qshape::synthetic
