#pragma once

#include <qshape/error.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

namespace qshape {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Angles closer than this are treated as equal.
inline constexpr double kAngleEps = 1e-9;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point a, Point b) = default;
};

inline std::ostream& operator<<(std::ostream& os, Point p) { return os << '(' << p.x << ", " << p.y << ')'; }

inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(b - a); }

// Maps any finite angle into [0, 2pi).
inline double normalize_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

class OrientedPoint {
 public:
  OrientedPoint(Point position, double heading)
      : position_(position), heading_(normalize_angle(heading)) {}

  Point position() const { return position_; }
  double heading() const { return heading_; }

 private:
  Point position_;
  double heading_;
};

// Counter-clockwise angle from the origin's heading to the ray towards target, in [0, 2pi).
inline double relative_bearing(const OrientedPoint& origin, Point target) {
  const Point d = target - origin.position();
  if (d.x == 0.0 && d.y == 0.0) {
    throw Error(ErrorCode::CoincidentPoints, "bearing target coincides with origin");
  }
  return normalize_angle(std::atan2(d.y, d.x) - origin.heading());
}

// Shoelace formula; positive for counter-clockwise traversal.
inline double signed_area(std::span<const Point> pts) {
  double acc = 0.0;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    acc += cross(pts[i], pts[(i + 1) % n]);
  }
  return 0.5 * acc;
}

inline double perimeter(std::span<const Point> pts) {
  double acc = 0.0;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) acc += distance(pts[i], pts[(i + 1) % n]);
  return acc;
}

namespace detail {

// Relative collinearity tolerance; absorbs rounding in points interpolated along an edge.
inline constexpr double kCollinearRel = 1e-12;

inline int orientation(Point a, Point b, Point c) {
  const Point u = b - a;
  const Point w = c - a;
  const double v = cross(u, w);
  if (std::abs(v) <= kCollinearRel * norm(u) * norm(w)) return 0;
  return (v > 0.0) - (v < 0.0);
}

// c is known to be collinear with segment ab.
inline bool within_box(Point a, Point b, Point c) {
  return std::min(a.x, b.x) <= c.x && c.x <= std::max(a.x, b.x) &&
         std::min(a.y, b.y) <= c.y && c.y <= std::max(a.y, b.y);
}

}  // namespace detail

// Closed-segment intersection, touching and collinear overlap included.
inline bool segments_intersect(Point p1, Point p2, Point q1, Point q2) {
  using detail::orientation;
  using detail::within_box;
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && within_box(p1, p2, q1)) return true;
  if (o2 == 0 && within_box(p1, p2, q2)) return true;
  if (o3 == 0 && within_box(q1, q2, p1)) return true;
  if (o4 == 0 && within_box(q1, q2, p2)) return true;
  return false;
}

// Consecutive edges a->b and b->c overlap beyond their shared endpoint when they fold back.
inline bool adjacent_edges_overlap(Point a, Point b, Point c) {
  return detail::orientation(a, b, c) == 0 && dot(b - a, c - b) < 0.0;
}

struct EdgePair {
  std::size_t first;
  std::size_t second;
};

// Returns the first offending pair of edges (edge i runs from vertex i to vertex i+1), if any.
inline std::optional<EdgePair> find_self_intersection(std::span<const Point> pts) {
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = pts[i];
    const Point b = pts[(i + 1) % n];
    const Point c = pts[(i + 2) % n];
    if (n > 3 && adjacent_edges_overlap(a, b, c)) return EdgePair{i, (i + 1) % n};
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_intersect(a, b, pts[j], pts[(j + 1) % n])) return EdgePair{i, j};
    }
  }
  return std::nullopt;
}

// Keeps vertex 0 in place and reverses the traversal when the chain is clockwise.
inline std::vector<Point> ensure_ccw(std::vector<Point> pts) {
  if (pts.size() >= 3 && signed_area(pts) < 0.0) {
    std::reverse(pts.begin() + 1, pts.end());
  }
  return pts;
}

/// Closed, non-self-intersecting vertex chain stored counter-clockwise.
///
/// Only validate_polygon() constructs one, so every instance satisfies the invariants.
class SimplePolygon {
 public:
  const std::vector<Point>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  const Point& operator[](std::size_t i) const { return vertices_[i]; }
  auto begin() const { return vertices_.begin(); }
  auto end() const { return vertices_.end(); }

  friend bool operator==(const SimplePolygon&, const SimplePolygon&) = default;

 private:
  explicit SimplePolygon(std::vector<Point> v) : vertices_(std::move(v)) {}
  friend SimplePolygon validate_polygon(std::vector<Point> points);

  std::vector<Point> vertices_;
};

inline SimplePolygon validate_polygon(std::vector<Point> points) {
  const std::size_t n = points.size();
  if (n < 3) {
    throw Error(ErrorCode::TooFewVertices, "polygon needs at least 3 vertices, got " + std::to_string(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(points[i].x) || !std::isfinite(points[i].y)) {
      throw Error(ErrorCode::DegenerateEdge, "non-finite coordinate at vertex " + std::to_string(i));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (points[i] == points[(i + 1) % n]) {
      throw Error(ErrorCode::DegenerateEdge, "zero-length edge " + std::to_string(i));
    }
  }
  if (auto hit = find_self_intersection(points)) {
    throw Error(ErrorCode::SelfIntersecting,
                "edges " + std::to_string(hit->first) + " and " + std::to_string(hit->second) + " intersect");
  }
  if (signed_area(points) == 0.0) {
    throw Error(ErrorCode::DegenerateEdge, "polygon has zero area");
  }
  return SimplePolygon(ensure_ccw(std::move(points)));
}

inline SimplePolygon ensure_ccw(const SimplePolygon& polygon) { return polygon; }

// --- .poly text format -----------------------------------------------------

inline std::vector<Point> read_poly(std::istream& in) {
  long long count = 0;
  if (!(in >> count) || count < 0) {
    throw Error(ErrorCode::CorruptHeader, "missing or invalid vertex count");
  }
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(count));
  for (long long i = 0; i < count; ++i) {
    Point p;
    if (!(in >> p.x >> p.y)) {
      throw Error(ErrorCode::TruncatedData, "expected " + std::to_string(count) + " vertices, read " + std::to_string(i));
    }
    pts.push_back(p);
  }
  return pts;
}

// Shortest decimal that round-trips the double.
inline std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline void write_poly(std::ostream& out, std::span<const Point> pts) {
  out << pts.size() << '\n';
  for (const Point& p : pts) out << format_real(p.x) << ' ' << format_real(p.y) << '\n';
}

}  // namespace qshape
