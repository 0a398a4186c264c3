#pragma once

#include <qshape/error.hpp>
#include <qshape/geometry.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace qshape {

// Distance ratios within this many binary orders of a class boundary snap to the upper class.
inline constexpr double kDistEps = 1e-9;

inline constexpr int kSentinel = -1;

/// Direction sector of a relative bearing at granularity m.
///
/// Sectors are numbered 0..4m-1 counter-clockwise from straight ahead. Even ids are the rays at i*pi/m,
/// odd ids the open wedges between them. Bearings within kAngleEps of a ray snap onto it.
inline int sector_of(int m, double phi) {
  if (m < 1) throw Error(ErrorCode::InvalidParams, "granularity must be at least 1");
  const int sectors = 4 * m;
  const double width = std::numbers::pi / m;
  const double t = phi / width;
  const double nearest = std::round(t);
  if (std::abs(phi - nearest * width) <= kAngleEps) {
    const int i = static_cast<int>(nearest);
    return ((2 * i) % sectors + sectors) % sectors;
  }
  const int i = static_cast<int>(std::floor(t));
  return ((2 * i + 1) % sectors + sectors) % sectors;
}

// Power-of-two distance bins: class k holds ratios in [2^(k-m), 2^(k-m+1)), both ends open-tailed.
inline int dist_class_of(int m, double ratio) {
  if (m < 1) throw Error(ErrorCode::InvalidParams, "granularity must be at least 1");
  if (!(ratio > 0.0) || !std::isfinite(ratio)) {
    throw Error(ErrorCode::NonPositiveRatio, "distance ratio must be finite and positive");
  }
  const double k = m + std::floor(std::log2(ratio) + kDistEps);
  return static_cast<int>(std::clamp(k, 0.0, 2.0 * m - 1.0));
}

// Mean edge length.
inline double ref_length(std::span<const Point> pts) { return perimeter(pts) / static_cast<double>(pts.size()); }
inline double ref_length(const SimplePolygon& polygon) { return ref_length(std::span<const Point>(polygon.vertices())); }

/// eOPRA_m descriptor: direction sector and distance class for every ordered vertex pair.
///
/// Matrices are n x n, row-major, with kSentinel on the diagonal.
class QualShape {
 public:
  QualShape(int m, int n, std::vector<int> dir, std::vector<int> dist)
      : m_(m), n_(n), dir_(std::move(dir)), dist_(std::move(dist)) {
    validate();
  }

  int m() const { return m_; }
  int n() const { return n_; }
  int sector_count() const { return 4 * m_; }
  int class_count() const { return 2 * m_; }

  int dir(int i, int j) const { return dir_[static_cast<std::size_t>(i) * n_ + j]; }
  int dist(int i, int j) const { return dist_[static_cast<std::size_t>(i) * n_ + j]; }
  const std::vector<int>& dir_matrix() const { return dir_; }
  const std::vector<int>& dist_matrix() const { return dist_; }

  friend bool operator==(const QualShape&, const QualShape&) = default;

 private:
  void validate() const {
    if (m_ < 1) throw Error(ErrorCode::InvalidDescriptor, "granularity must be at least 1");
    if (n_ < 3) throw Error(ErrorCode::InvalidDescriptor, "descriptor needs at least 3 vertices");
    const std::size_t cells = static_cast<std::size_t>(n_) * n_;
    if (dir_.size() != cells || dist_.size() != cells) {
      throw Error(ErrorCode::InvalidDescriptor, "matrix size does not match n");
    }
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) {
        const int d = dir(i, j);
        const int c = dist(i, j);
        if (i == j) {
          if (d != kSentinel || c != kSentinel) throw Error(ErrorCode::InvalidDescriptor, "diagonal must hold -1");
        } else if (d < 0 || d >= 4 * m_ || c < 0 || c >= 2 * m_) {
          throw Error(ErrorCode::InvalidDescriptor,
                      "entry (" + std::to_string(i) + "," + std::to_string(j) + ") out of range");
        }
      }
    }
  }

  int m_;
  int n_;
  std::vector<int> dir_;
  std::vector<int> dist_;
};

/// Describes an arbitrary vertex chain, each vertex headed along its outgoing edge.
///
/// Throws CoincidentPoints when two vertices share a position.
inline QualShape describe_points(std::span<const Point> pts, int m) {
  const int n = static_cast<int>(pts.size());
  if (n < 3) throw Error(ErrorCode::TooFewVertices, "descriptor needs at least 3 vertices");
  if (m < 1) throw Error(ErrorCode::InvalidParams, "granularity must be at least 1");
  const double ref = ref_length(pts);
  std::vector<int> dir(static_cast<std::size_t>(n) * n, kSentinel);
  std::vector<int> dist(static_cast<std::size_t>(n) * n, kSentinel);
  for (int i = 0; i < n; ++i) {
    const Point here = pts[i];
    const Point ahead = pts[(i + 1) % n] - here;
    if (ahead.x == 0.0 && ahead.y == 0.0) {
      throw Error(ErrorCode::CoincidentPoints, "zero-length edge " + std::to_string(i));
    }
    const OrientedPoint origin(here, std::atan2(ahead.y, ahead.x));
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const std::size_t cell = static_cast<std::size_t>(i) * n + j;
      dir[cell] = sector_of(m, relative_bearing(origin, pts[j]));
      dist[cell] = dist_class_of(m, distance(here, pts[j]) / ref);
    }
  }
  return QualShape(m, n, std::move(dir), std::move(dist));
}

inline QualShape describe(const SimplePolygon& polygon, int m) {
  return describe_points(polygon.vertices(), m);
}

// Relabels vertex j as j-k (mod n).
inline QualShape rotate_labels(const QualShape& shape, int k) {
  const int n = shape.n();
  if (k < 0 || k >= n) throw Error(ErrorCode::ShiftOutOfRange, "shift " + std::to_string(k) + " outside [0, n)");
  std::vector<int> dir(static_cast<std::size_t>(n) * n);
  std::vector<int> dist(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::size_t cell = static_cast<std::size_t>(i) * n + j;
      dir[cell] = shape.dir((i + k) % n, (j + k) % n);
      dist[cell] = shape.dist((i + k) % n, (j + k) % n);
    }
  }
  return QualShape(shape.m(), n, std::move(dir), std::move(dist));
}

// --- descriptor JSON -------------------------------------------------------

inline nlohmann::json to_json(const QualShape& shape) {
  const int n = shape.n();
  auto rows = [n](const std::vector<int>& flat) {
    nlohmann::json out = nlohmann::json::array();
    for (int i = 0; i < n; ++i) {
      out.push_back(std::vector<int>(flat.begin() + static_cast<std::ptrdiff_t>(i) * n,
                                     flat.begin() + static_cast<std::ptrdiff_t>(i + 1) * n));
    }
    return out;
  };
  nlohmann::json j;
  j["m"] = shape.m();
  j["n"] = n;
  j["dir"] = rows(shape.dir_matrix());
  j["dist"] = rows(shape.dist_matrix());
  return j;
}

inline QualShape qualshape_from_json(const nlohmann::json& j) {
  try {
    const int m = j.at("m").get<int>();
    const int n = j.at("n").get<int>();
    if (n < 3 || m < 1) throw Error(ErrorCode::InvalidDescriptor, "m must be >= 1 and n >= 3");
    auto flatten = [n](const nlohmann::json& rows, const char* name) {
      if (!rows.is_array() || static_cast<int>(rows.size()) != n) {
        throw Error(ErrorCode::InvalidDescriptor, std::string(name) + " must have n rows");
      }
      std::vector<int> flat;
      flat.reserve(static_cast<std::size_t>(n) * n);
      for (const auto& row : rows) {
        if (!row.is_array() || static_cast<int>(row.size()) != n) {
          throw Error(ErrorCode::InvalidDescriptor, std::string(name) + " rows must have n entries");
        }
        for (const auto& v : row) flat.push_back(v.get<int>());
      }
      return flat;
    };
    return QualShape(m, n, flatten(j.at("dir"), "dir"), flatten(j.at("dist"), "dist"));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidDescriptor, e.what());
  }
}

}  // namespace qshape
