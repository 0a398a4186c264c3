#pragma once

#include <qshape/error.hpp>
#include <qshape/geometry.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

namespace qshape {

// Relevances within this relative distance of the minimum count as tied.
inline constexpr double kRelevanceTieEps = 1e-9;

/// Discrete curve evolution cost of vertex v: turn angle times l1*l2/(l1+l2).
inline double relevance(Point prev, Point v, Point next) {
  const Point a = v - prev;
  const Point b = next - v;
  const double l1 = norm(a);
  const double l2 = norm(b);
  if (l1 == 0.0 || l2 == 0.0) throw Error(ErrorCode::DegenerateEdge, "relevance of a vertex with a zero-length side");
  const double beta = std::atan2(std::abs(cross(a, b)), dot(a, b));
  return beta * l1 * l2 / (l1 + l2);
}

namespace detail {

// Would dropping vertex i of the cyclic chain keep it simple?
inline bool removal_keeps_simple(const std::vector<Point>& pts, std::size_t i, double area) {
  const std::size_t n = pts.size();
  if (n <= 3) return false;
  const std::size_t prev = (i + n - 1) % n;
  const std::size_t next = (i + 1) % n;
  const Point a = pts[prev];
  const Point b = pts[next];
  if (a == b) return false;
  // Orientation must survive: the cut-off triangle may not swallow the whole area.
  const double cut = -0.5 * cross(pts[i] - a, b - a);
  if (!(area + cut > 0.0)) return false;
  const std::size_t prev2 = (prev + n - 1) % n;
  const std::size_t next2 = (next + 1) % n;
  if (n - 1 == 3) return cross(b - a, pts[next2] - a) > 0.0;
  if (adjacent_edges_overlap(pts[prev2], a, b) || adjacent_edges_overlap(a, b, pts[next2])) return false;
  // New edge a->b against every edge not touching a or b.
  for (std::size_t e = 0; e < n; ++e) {
    const std::size_t e2 = (e + 1) % n;
    if (e == prev2 || e == prev || e == i || e == next) continue;
    if (segments_intersect(a, b, pts[e], pts[e2])) return false;
  }
  return true;
}

}  // namespace detail

/// Reduces the polygon to k vertices by repeatedly dropping the least relevant vertex.
///
/// Neighbour relevances are refreshed after each removal. Ties go to the lowest current index. A vertex
/// whose removal would break simplicity is skipped in favour of the next candidate.
inline SimplePolygon simplify(const SimplePolygon& polygon, std::size_t k) {
  if (k < 3) throw Error(ErrorCode::TargetTooSmall, "simplification target must be at least 3");
  if (polygon.size() <= k) return polygon;

  std::vector<Point> pts = polygon.vertices();
  std::vector<double> score(pts.size());
  auto rescore = [&](std::size_t i) {
    const std::size_t n = pts.size();
    score[i] = relevance(pts[(i + n - 1) % n], pts[i], pts[(i + 1) % n]);
  };
  for (std::size_t i = 0; i < pts.size(); ++i) rescore(i);
  double area = signed_area(pts);

  std::vector<std::size_t> order;
  while (pts.size() > k) {
    const std::size_t n = pts.size();
    order.resize(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] < score[b]; });

    std::size_t chosen = n;
    std::vector<bool> tried(n, false);
    for (std::size_t pos = 0; pos < n && chosen == n; ++pos) {
      if (tried[order[pos]]) continue;
      // Lowest index among the untried candidates tied with the current minimum.
      const double floor_score = score[order[pos]];
      const double limit = floor_score + kRelevanceTieEps * floor_score;
      std::vector<std::size_t> tied;
      for (std::size_t q = pos; q < n && score[order[q]] <= limit; ++q) {
        if (!tried[order[q]]) tied.push_back(order[q]);
      }
      std::sort(tied.begin(), tied.end());
      for (std::size_t cand : tied) {
        tried[cand] = true;
        if (detail::removal_keeps_simple(pts, cand, area)) {
          chosen = cand;
          break;
        }
      }
    }
    if (chosen == n) throw Error(ErrorCode::SimplificationStuck, "no vertex can be removed without self-intersection");

    {
      const Point a = pts[(chosen + n - 1) % n];
      const Point b = pts[(chosen + 1) % n];
      area -= 0.5 * cross(pts[chosen] - a, b - a);
    }
    pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(chosen));
    score.erase(score.begin() + static_cast<std::ptrdiff_t>(chosen));
    const std::size_t m = pts.size();
    rescore((chosen + m - 1) % m);
    rescore(chosen % m);
  }
  return validate_polygon(std::move(pts));
}

}  // namespace qshape
