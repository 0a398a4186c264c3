#pragma once

#include <qshape/error.hpp>
#include <qshape/geometry.hpp>
#include <qshape/qualshape.hpp>
#include <qshape/similarity.hpp>

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace qshape {

struct SearchParams {
  double initial_step = 0.5;       // fraction of the reference length
  double min_step = 1.0 / 64.0;    // fraction of the reference length
  std::int64_t eval_budget = 10000;
};

struct ReconstructionResult {
  std::vector<Point> vertices;
  double initial_score = 0.0;
  double final_score = 0.0;
  std::int64_t evaluations = 0;
  bool exact_match = false;
  bool simple = false;
  std::vector<double> score_trace;  // score after each applied move
  std::vector<std::string> warnings;
};

// Geometric midpoint of distance class k, in units of the reference length.
inline double representative_distance(int m, int k) { return std::exp2(k - m + 0.5); }

// Midpoint of an open sector, or the exact ray for a linear one.
inline double representative_angle(int m, int sector) { return sector * std::numbers::pi / (2.0 * m); }

/// Initial prototype: walk the hull, each edge length from dist[i][i+1] and each turn from the
/// backward sector dir[i+1][i]. Closure is left to the implicit last edge.
inline std::vector<Point> trace_prototype(const QualShape& shape) {
  const int n = shape.n();
  const int m = shape.m();
  std::vector<Point> pts;
  pts.reserve(n);
  Point v{0.0, 0.0};
  double heading = 0.0;
  pts.push_back(v);
  for (int i = 0; i + 1 < n; ++i) {
    const double len = representative_distance(m, shape.dist(i, i + 1));
    v = v + len * Point{std::cos(heading), std::sin(heading)};
    pts.push_back(v);
    heading = normalize_angle(heading + std::numbers::pi - representative_angle(m, shape.dir(i + 1, i)));
  }
  return pts;
}

namespace detail {

struct Mismatch {
  std::int64_t dir = 0;
  std::int64_t dist = 0;

  // Common-denominator form of dir/(2m) + dist/(2m-1), exact for comparisons.
  std::int64_t key(int m) const { return dir * (2 * m - 1) + dist * (2 * m); }
  double score(int m) const { return dir / (2.0 * m) + dist / (2.0 * m - 1.0); }
};

inline std::optional<Mismatch> try_mismatch(std::span<const Point> candidate, const QualShape& target) {
  std::optional<QualShape> described;
  try {
    described.emplace(describe_points(candidate, target.m()));
  } catch (const Error&) {
    return std::nullopt;
  }
  const auto t = totals_at_shift(*described, target, 0);
  return Mismatch{t.dir, t.dist};
}

inline void check_candidate_size(std::span<const Point> candidate, const QualShape& target) {
  if (static_cast<int>(candidate.size()) != target.n()) {
    throw Error(ErrorCode::ShapeMismatch, "candidate has " + std::to_string(candidate.size()) + " vertices, target " +
                                              std::to_string(target.n()));
  }
}

// Margins keep projected relations strictly inside open sectors and distance bins.
struct ProjectionSettings {
  double angle_margin = 0.1;  // fraction of an open sector's width
  double dist_margin = 0.05;  // binary orders of magnitude
  int max_iterations = 200;
};

/// Signed violation of every qualitative relation of the target by the candidate.
///
/// Zero for relations already satisfied with margin. Linear sectors are equalities, open sectors and
/// distance bins are hinge intervals. Consecutive-pair sectors hold by construction and are skipped.
inline void relation_residuals(std::span<const Point> pts, const QualShape& target, const ProjectionSettings& cfg,
                               std::vector<double>& out) {
  constexpr double kFar = 1e3;
  const int n = target.n();
  const int m = target.m();
  const double wedge = std::numbers::pi / m;
  const double half_open = 0.5 * wedge * (1.0 - 2.0 * cfg.angle_margin);
  const double ref = ref_length(pts);
  out.clear();
  for (int i = 0; i < n; ++i) {
    const Point here = pts[i];
    const Point ahead = pts[(i + 1) % n] - here;
    const double heading = std::atan2(ahead.y, ahead.x);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const Point d = pts[j] - here;
      const double len = norm(d);
      if (len == 0.0 || ref == 0.0 || norm(ahead) == 0.0) {
        out.push_back(kFar);
        out.push_back(kFar);
        continue;
      }
      if (j != (i + 1) % n) {
        const int sector = target.dir(i, j);
        const double centre = representative_angle(m, sector);
        double delta = std::remainder(std::atan2(d.y, d.x) - heading - centre, 2.0 * std::numbers::pi);
        if (sector % 2 == 1) {
          const double excess = std::abs(delta) - half_open;
          delta = excess > 0.0 ? std::copysign(excess, delta) : 0.0;
        }
        out.push_back(delta);
      }
      const int cls = target.dist(i, j);
      const double level = std::log2(len / ref);
      // Bins are closed below, so only the upper edge needs a margin.
      const double lo = cls == 0 ? -std::numeric_limits<double>::infinity() : cls - m;
      const double hi = cls == 2 * m - 1 ? std::numeric_limits<double>::infinity() : cls - m + 1 - cfg.dist_margin;
      out.push_back(level < lo ? level - lo : (level > hi ? level - hi : 0.0));
    }
  }
}

/// Levenberg-Marquardt on relation_residuals with a central-difference Jacobian.
inline std::vector<Point> project_onto_relations(std::vector<Point> pts, const QualShape& target,
                                                 const ProjectionSettings& cfg = {}) {
  const int n = target.n();
  const int vars = 2 * n;
  std::vector<double> r0, rp, rm;
  relation_residuals(pts, target, cfg, r0);
  const int rows = static_cast<int>(r0.size());
  auto to_vec = [](const std::vector<double>& v) { return Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()); };
  auto coord = [&](std::vector<Point>& p, int k) -> double& { return k % 2 == 0 ? p[k / 2].x : p[k / 2].y; };

  double cost = to_vec(r0).squaredNorm();
  double lambda = 1e-3;
  Eigen::MatrixXd jac(rows, vars);
  for (int it = 0; it < cfg.max_iterations && cost > 1e-28; ++it) {
    const double h = 1e-7 * std::max(ref_length(pts), 1e-12);
    for (int k = 0; k < vars; ++k) {
      const double saved = coord(pts, k);
      coord(pts, k) = saved + h;
      relation_residuals(pts, target, cfg, rp);
      coord(pts, k) = saved - h;
      relation_residuals(pts, target, cfg, rm);
      coord(pts, k) = saved;
      jac.col(k) = (to_vec(rp) - to_vec(rm)) / (2.0 * h);
    }
    const Eigen::VectorXd grad = jac.transpose() * to_vec(r0);
    const Eigen::MatrixXd normal = jac.transpose() * jac;
    bool accepted = false;
    while (!accepted && lambda < 1e12) {
      Eigen::MatrixXd damped = normal;
      damped.diagonal() += lambda * (normal.diagonal().array() + 1e-9).matrix();
      const Eigen::VectorXd step = damped.ldlt().solve(-grad);
      std::vector<Point> trial = pts;
      for (int k = 0; k < vars; ++k) coord(trial, k) += step[k];
      relation_residuals(trial, target, cfg, rp);
      const double trial_cost = to_vec(rp).squaredNorm();
      if (std::isfinite(trial_cost) && trial_cost < cost) {
        pts = std::move(trial);
        r0 = rp;
        cost = trial_cost;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
      } else {
        lambda *= 4.0;
      }
    }
    if (!accepted) break;
  }
  return pts;
}

}  // namespace detail

/// Sum over ordered pairs of circular sector gap / 2m plus distance-class gap / (2m-1).
inline double mismatch_score(std::span<const Point> candidate, const QualShape& target) {
  detail::check_candidate_size(candidate, target);
  auto mm = detail::try_mismatch(candidate, target);
  if (!mm) throw Error(ErrorCode::DegenerateCandidate, "candidate has coincident vertices");
  return mm->score(target.m());
}

/// Steepest-descent refinement of a candidate polygon towards a target descriptor.
///
/// Each round tries every vertex moved by the current step along the 8 compass directions (vertex index
/// ascending, then direction ascending) and applies the single best strictly improving move. When no compass
/// move improves, a projection move is tried: a least-squares solve that pulls every relation into its
/// sector and distance bin, which is the only way to land on exact-angle (linear) sectors. If that does not
/// improve either, the step is halved. Stops once the step falls below min_step * ref or the evaluation
/// budget runs out; the best improving move of an interrupted round is still applied. Every move, projection
/// included, costs one evaluation.
inline ReconstructionResult greedy_refine(std::vector<Point> candidate, const QualShape& target,
                                          const SearchParams& params = {}) {
  if (params.eval_budget < 1) throw Error(ErrorCode::BudgetTooSmall, "evaluation budget must be at least 1");
  if (!(params.min_step > 0.0) || !(params.min_step < params.initial_step)) {
    throw Error(ErrorCode::InvalidParams, "need 0 < min_step < initial_step");
  }
  detail::check_candidate_size(candidate, target);
  const int m = target.m();
  const int n = target.n();

  ReconstructionResult result;
  auto current = detail::try_mismatch(candidate, target);
  result.evaluations = 1;
  if (!current) throw Error(ErrorCode::DegenerateCandidate, "initial candidate has coincident vertices");
  result.initial_score = current->score(m);

  static const std::array<Point, 8> kCompass = [] {
    std::array<Point, 8> dirs{};
    for (int d = 0; d < 8; ++d) {
      const double a = d * std::numbers::pi / 4.0;
      dirs[d] = d % 2 == 0 ? Point{std::round(std::cos(a)), std::round(std::sin(a))}
                           : Point{std::cos(a), std::sin(a)};
    }
    return dirs;
  }();

  const double ref = ref_length(candidate);
  double step = params.initial_step * ref;
  const double min_step = params.min_step * ref;
  std::int64_t current_key = current->key(m);

  while (current_key > 0 && step >= min_step && result.evaluations < params.eval_budget) {
    std::int64_t best_key = current_key;
    std::optional<detail::Mismatch> best;
    int best_vertex = -1;
    int best_dir = -1;
    bool exhausted = false;
    for (int v = 0; v < n && !exhausted; ++v) {
      const Point origin = candidate[v];
      for (int d = 0; d < 8; ++d) {
        if (result.evaluations >= params.eval_budget) {
          exhausted = true;
          break;
        }
        candidate[v] = origin + step * kCompass[d];
        auto mm = detail::try_mismatch(candidate, target);
        ++result.evaluations;
        if (mm && mm->key(m) < best_key) {
          best_key = mm->key(m);
          best = mm;
          best_vertex = v;
          best_dir = d;
        }
      }
      candidate[v] = origin;
    }
    if (best) {
      candidate[best_vertex] = candidate[best_vertex] + step * kCompass[best_dir];
      current = best;
      current_key = best_key;
      result.score_trace.push_back(best->score(m));
    } else if (!exhausted) {
      auto projected = detail::project_onto_relations(candidate, target);
      auto mm = detail::try_mismatch(projected, target);
      ++result.evaluations;
      if (mm && mm->key(m) < current_key) {
        candidate = std::move(projected);
        current = mm;
        current_key = mm->key(m);
        result.score_trace.push_back(mm->score(m));
      } else {
        step *= 0.5;
      }
    }
  }

  result.final_score = current->score(m);
  result.simple = !find_self_intersection(candidate).has_value() && signed_area(candidate) != 0.0;
  if (!result.simple) result.warnings.emplace_back("NonSimpleResult: refined polygon self-intersects");
  result.exact_match = current_key == 0 && result.simple;
  result.vertices = std::move(candidate);
  return result;
}

}  // namespace qshape
