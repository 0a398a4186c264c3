#pragma once

#include <qshape/error.hpp>
#include <qshape/qualshape.hpp>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace qshape {

struct PairComparison {
  int a = 0;
  int b = 0;
  int shift = 0;
  double dir_err = 0.0;
  double dist_err = 0.0;
};

struct Weights {
  double dst2dir = 1.0;
  double w_dir = 0.5;
  double w_dist = 0.5;
};

/// All unordered pairs (a < b) of a corpus, ordered by (a, b).
struct ErrorMatrix {
  int n_shapes = 0;
  std::vector<PairComparison> entries;

  // Position of pair (a, b), a != b, in row-major upper-triangle order.
  static std::size_t index_of(int n_shapes, int a, int b) {
    if (a > b) std::swap(a, b);
    const auto n = static_cast<std::size_t>(n_shapes);
    const auto i = static_cast<std::size_t>(a);
    return i * n - i * (i + 1) / 2 + static_cast<std::size_t>(b - a - 1);
  }

  const PairComparison& at(int a, int b) const { return entries.at(index_of(n_shapes, a, b)); }
};

inline std::uint64_t unique_pairs(std::uint64_t n_shapes) {
  return n_shapes < 2 ? 0 : (n_shapes * n_shapes - n_shapes) / 2;
}

// Circular distance between two sector ids on a ring of `ring` sectors.
inline int circular_gap(int x, int y, int ring) {
  const int d = std::abs(x - y);
  return std::min(d, ring - d);
}

namespace detail {

inline void require_compatible(const QualShape& a, const QualShape& b) {
  if (a.n() != b.n() || a.m() != b.m()) {
    throw Error(ErrorCode::ShapeMismatch, "shapes differ in vertex count or granularity (n " + std::to_string(a.n()) +
                                              " vs " + std::to_string(b.n()) + ", m " + std::to_string(a.m()) + " vs " +
                                              std::to_string(b.m()) + ")");
  }
}

// Integer error sums of a against b relabelled by `shift`.
struct ShiftTotals {
  std::int64_t dir = 0;
  std::int64_t dist = 0;
};

inline ShiftTotals totals_at_shift(const QualShape& a, const QualShape& b, int shift) {
  const int n = a.n();
  const int ring = a.sector_count();
  ShiftTotals t;
  for (int i = 0; i < n; ++i) {
    const int bi = (i + shift) % n;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const int bj = (j + shift) % n;
      t.dir += circular_gap(a.dir(i, j), b.dir(bi, bj), ring);
      t.dist += std::abs(a.dist(i, j) - b.dist(bi, bj));
    }
  }
  return t;
}

inline double dir_fraction(const QualShape& s, std::int64_t total) {
  const double pairs = static_cast<double>(s.n()) * (s.n() - 1);
  return static_cast<double>(total) / (2.0 * s.m() * pairs);
}

inline double dist_fraction(const QualShape& s, std::int64_t total) {
  const double pairs = static_cast<double>(s.n()) * (s.n() - 1);
  return static_cast<double>(total) / ((2.0 * s.m() - 1.0) * pairs);
}

}  // namespace detail

// Mean circular sector gap over ordered pairs, normalised by the antipodal gap 2m.
inline double dir_error(const QualShape& a, const QualShape& b) {
  detail::require_compatible(a, b);
  return detail::dir_fraction(a, detail::totals_at_shift(a, b, 0).dir);
}

// Mean distance-class gap over ordered pairs, normalised by the widest gap 2m-1.
inline double dist_error(const QualShape& a, const QualShape& b) {
  detail::require_compatible(a, b);
  return detail::dist_fraction(a, detail::totals_at_shift(a, b, 0).dist);
}

/// Tries all n cyclic relabellings of b and keeps the one minimising dir_err + dist_err.
///
/// Ties prefer the smaller direction error, then the smaller shift. Candidate shifts are compared on exact
/// integer sums. `shift_evaluations`, when given, is incremented once per evaluated shift.
inline PairComparison best_alignment(const QualShape& a, const QualShape& b,
                                     std::uint64_t* shift_evaluations = nullptr) {
  detail::require_compatible(a, b);
  const std::int64_t dir_scale = 2 * a.m() - 1;
  const std::int64_t dist_scale = 2 * a.m();
  std::int64_t best_key = std::numeric_limits<std::int64_t>::max();
  detail::ShiftTotals best{};
  int best_shift = 0;
  for (int s = 0; s < a.n(); ++s) {
    const auto t = detail::totals_at_shift(a, b, s);
    const std::int64_t key = t.dir * dir_scale + t.dist * dist_scale;
    if (key < best_key || (key == best_key && t.dir < best.dir)) {
      best_key = key;
      best = t;
      best_shift = s;
    }
  }
  if (shift_evaluations) *shift_evaluations += static_cast<std::uint64_t>(a.n());
  PairComparison out;
  out.shift = best_shift;
  out.dir_err = detail::dir_fraction(a, best.dir);
  out.dist_err = detail::dist_fraction(a, best.dist);
  return out;
}

/// Weights that equalise the weighted corpus means: w_dir * mean_dir == w_dist * mean_dist.
inline Weights compute_weights(double mean_dir, double mean_dist) {
  if (!(mean_dir > 0.0)) throw Error(ErrorCode::ZeroDirectionError, "mean direction error is zero; weights undefined");
  if (!(mean_dist >= 0.0)) throw Error(ErrorCode::InvalidParams, "mean distance error must be non-negative");
  Weights w;
  w.dst2dir = mean_dist / mean_dir;
  w.w_dir = w.dst2dir / (w.dst2dir + 1.0);
  w.w_dist = 1.0 - w.w_dir;
  return w;
}

inline double combined_error(const PairComparison& pair, const Weights& weights) {
  return weights.w_dir * pair.dir_err + weights.w_dist * pair.dist_err;
}

inline std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

// Header `a,b,shift,dir_err,dist_err,combined`; one row per unordered pair in (a, b) order.
inline void write_pairs_csv(std::ostream& out, const ErrorMatrix& matrix, const Weights& weights) {
  out << "a,b,shift,dir_err,dist_err,combined\n";
  for (const auto& p : matrix.entries) {
    out << p.a << ',' << p.b << ',' << p.shift << ',' << fixed6(p.dir_err) << ',' << fixed6(p.dist_err) << ','
        << fixed6(combined_error(p, weights)) << '\n';
  }
}

}  // namespace qshape
