#include <qshape/dce.hpp>
#include <qshape/similarity.hpp>
#include <qshape/synthetic.hpp>

#include <gtest/gtest.h>

#include <sstream>

using namespace qshape;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::IoFailure;
}

QualShape uniform_shape(int m, int n, int dir_value, int dist_value) {
  std::vector<int> dir(n * n, dir_value), dist(n * n, dist_value);
  for (int i = 0; i < n; ++i) dir[i * n + i] = dist[i * n + i] = -1;
  return QualShape(m, n, dir, dist);
}

QualShape random_shape(synthetic::Rng& rng, int n, int m = 4) {
  return describe(validate_polygon(synthetic::star_polygon(rng, n)), m);
}

// Reference per-pair errors: sector gaps via modular arithmetic on both ring directions.
double oracle_dir(const QualShape& a, const QualShape& b) {
  const int ring = 4 * a.m();
  double sum = 0;
  int pairs = 0;
  for (int i = 0; i < a.n(); ++i) {
    for (int j = 0; j < a.n(); ++j) {
      if (i == j) continue;
      const int fwd = ((a.dir(i, j) - b.dir(i, j)) % ring + ring) % ring;
      const int back = ((b.dir(i, j) - a.dir(i, j)) % ring + ring) % ring;
      sum += std::min(fwd, back) / (2.0 * a.m());
      ++pairs;
    }
  }
  return sum / pairs;
}

double oracle_dist(const QualShape& a, const QualShape& b) {
  double sum = 0;
  int pairs = 0;
  for (int i = 0; i < a.n(); ++i) {
    for (int j = 0; j < a.n(); ++j) {
      if (i == j) continue;
      sum += std::abs(a.dist(i, j) - b.dist(i, j)) / (2.0 * a.m() - 1);
      ++pairs;
    }
  }
  return sum / pairs;
}

// Exhaustive shift search over explicitly relabelled copies; ties resolved as documented.
int oracle_shift(const QualShape& a, const QualShape& b) {
  int best = 0;
  double best_sum = 1e9, best_dir = 1e9;
  for (int s = 0; s < a.n(); ++s) {
    const auto rb = rotate_labels(b, s);
    const double d = oracle_dir(a, rb);
    const double sum = d + oracle_dist(a, rb);
    if (sum < best_sum - 1e-12 || (std::abs(sum - best_sum) <= 1e-12 && d < best_dir - 1e-12)) {
      best = s;
      best_sum = sum;
      best_dir = d;
    }
  }
  return best;
}

}  // namespace

TEST(DirError, IdentityAndAntipodal) {
  const auto a = uniform_shape(4, 5, 1, 2);
  EXPECT_EQ(dir_error(a, a), 0.0);
  EXPECT_EQ(dir_error(a, uniform_shape(4, 5, 9, 2)), 1.0);
  EXPECT_EQ(dir_error(uniform_shape(3, 4, 11, 0), uniform_shape(3, 4, 5, 0)), 1.0);
}

TEST(DirError, WrapsAroundTheRing) {
  // 15 and 1 are two sectors apart across zero at m = 4.
  EXPECT_DOUBLE_EQ(dir_error(uniform_shape(4, 3, 15, 0), uniform_shape(4, 3, 1, 0)), 2.0 / 8.0);
}

TEST(DirError, NoisySquareMatchesOracle) {
  synthetic::Rng rng(41);
  const std::vector<Point> square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const auto clean = describe(validate_polygon(synthetic::subdivide(square, 2)), 4);
  const auto noisy_pts = synthetic::jitter(rng, synthetic::subdivide(square, 9), 0.2);
  const auto noisy = describe(simplify(validate_polygon(noisy_pts), 12), 4);
  const double e = dir_error(clean, noisy);
  EXPECT_GT(e, 0.0);
  EXPECT_LT(e, 1.0);
  EXPECT_NEAR(e, oracle_dir(clean, noisy), 1e-15);
}

TEST(DistError, IdentityAndMaximal) {
  const auto a = uniform_shape(4, 6, 3, 0);
  EXPECT_EQ(dist_error(a, a), 0.0);
  EXPECT_EQ(dist_error(a, uniform_shape(4, 6, 3, 7)), 1.0);
}

TEST(DistError, SquareVersusRectangleMatchesOracle) {
  const auto sq = describe(validate_polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}), 4);
  const auto rect = describe(validate_polygon({{0, 0}, {2, 0}, {2, 1}, {0, 1}}), 4);
  EXPECT_NEAR(dist_error(sq, rect), oracle_dist(sq, rect), 1e-15);
  EXPECT_NEAR(dir_error(sq, rect), oracle_dir(sq, rect), 1e-15);
}

TEST(PairErrors, RejectMismatchedShapes) {
  const auto a = uniform_shape(4, 5, 1, 1);
  EXPECT_EQ(code_of([&] { dir_error(a, uniform_shape(4, 6, 1, 1)); }), ErrorCode::ShapeMismatch);
  EXPECT_EQ(code_of([&] { dist_error(a, uniform_shape(3, 5, 1, 1)); }), ErrorCode::ShapeMismatch);
  EXPECT_EQ(code_of([&] { best_alignment(a, uniform_shape(3, 5, 1, 1)); }), ErrorCode::ShapeMismatch);
}

TEST(BestAlignment, RecoversRelabelShift) {
  synthetic::Rng rng(42);
  const auto a = random_shape(rng, 12);
  const auto r = best_alignment(a, rotate_labels(a, 3));
  // b relabelled by 3 realigns to a when shifted by n - 3.
  EXPECT_EQ(rotate_labels(rotate_labels(a, 3), r.shift), a);
  EXPECT_EQ(r.dir_err, 0.0);
  EXPECT_EQ(r.dist_err, 0.0);
  const auto self = best_alignment(a, a);
  EXPECT_EQ(self.shift, 0);
  EXPECT_EQ(self.dir_err, 0.0);
  EXPECT_EQ(self.dist_err, 0.0);
}

TEST(BestAlignment, MatchesExhaustiveOracle) {
  synthetic::Rng rng(43);
  for (int t = 0; t < 200; ++t) {
    const auto a = random_shape(rng, 12);
    const auto b = random_shape(rng, 12);
    std::uint64_t evals = 0;
    const auto r = best_alignment(a, b, &evals);
    EXPECT_EQ(evals, 12u);
    EXPECT_EQ(r.shift, oracle_shift(a, b));
    const auto rb = rotate_labels(b, r.shift);
    EXPECT_NEAR(r.dir_err, oracle_dir(a, rb), 1e-15);
    EXPECT_NEAR(r.dist_err, oracle_dist(a, rb), 1e-15);
  }
}

TEST(BestAlignment, SymmetricAndRelabelInvariant) {
  synthetic::Rng rng(44);
  for (int t = 0; t < 200; ++t) {
    const auto a = random_shape(rng, 12);
    const auto b = random_shape(rng, 12);
    const auto ab = best_alignment(a, b);
    const auto ba = best_alignment(b, a);
    EXPECT_NEAR(ab.dir_err + ab.dist_err, ba.dir_err + ba.dist_err, 1e-12);
    const auto moved = best_alignment(rotate_labels(a, t % 12), rotate_labels(b, (t * 5) % 12));
    EXPECT_NEAR(ab.dir_err + ab.dist_err, moved.dir_err + moved.dist_err, 1e-12);
    for (double e : {ab.dir_err, ab.dist_err}) {
      EXPECT_GE(e, 0.0);
      EXPECT_LE(e, 1.0);
    }
  }
}

TEST(UniquePairs, Counts) {
  EXPECT_EQ(unique_pairs(97), 4656u);
  EXPECT_EQ(unique_pairs(2), 1u);
  EXPECT_EQ(unique_pairs(12), 66u);
  EXPECT_EQ(unique_pairs(0), 0u);
  EXPECT_EQ(unique_pairs(1), 0u);
}

TEST(ErrorMatrixIndex, RowMajorUpperTriangle) {
  std::size_t expected = 0;
  for (int a = 0; a < 9; ++a) {
    for (int b = a + 1; b < 9; ++b) {
      EXPECT_EQ(ErrorMatrix::index_of(9, a, b), expected);
      EXPECT_EQ(ErrorMatrix::index_of(9, b, a), expected);
      ++expected;
    }
  }
  EXPECT_EQ(expected, unique_pairs(9));
}

TEST(ComputeWeights, ReferenceCorpusMeans) {
  const auto w = compute_weights(0.0926, 0.2837);
  EXPECT_NEAR(w.dst2dir, 3.0637, 0.01);
  EXPECT_NEAR(w.w_dir, 0.754, 0.005);
  EXPECT_NEAR(w.w_dist, 0.246, 0.005);
  EXPECT_NEAR(w.w_dir * 0.0926, 0.0698, 0.0005);
  EXPECT_NEAR(w.w_dist * 0.2837, 0.0698, 0.0005);
}

TEST(ComputeWeights, EdgeCases) {
  const auto eq = compute_weights(0.3, 0.3);
  EXPECT_DOUBLE_EQ(eq.dst2dir, 1.0);
  EXPECT_DOUBLE_EQ(eq.w_dir, 0.5);
  EXPECT_DOUBLE_EQ(eq.w_dist, 0.5);
  const auto zero = compute_weights(0.2, 0.0);
  EXPECT_EQ(zero.dst2dir, 0.0);
  EXPECT_EQ(zero.w_dir, 0.0);
  EXPECT_EQ(zero.w_dist, 1.0);
  EXPECT_EQ(code_of([] { compute_weights(0.0, 0.1); }), ErrorCode::ZeroDirectionError);
}

TEST(ComputeWeights, BalancesWeightedMeans) {
  synthetic::Rng rng(45);
  for (int t = 0; t < 1000; ++t) {
    const double dir = synthetic::uniform(rng, 1e-6, 1.0);
    const double dist = synthetic::uniform(rng, 0.0, 1.0);
    const auto w = compute_weights(dir, dist);
    EXPECT_NEAR(w.w_dir + w.w_dist, 1.0, 1e-15);
    const double lhs = w.w_dir * dir;
    EXPECT_LE(std::abs(lhs - w.w_dist * dist), 1e-12 * std::max(lhs, 1e-300));
  }
}

TEST(CombinedError, Arithmetic) {
  EXPECT_DOUBLE_EQ(combined_error(PairComparison{0, 1, 0, 0.2, 0.4}, Weights{1.0, 0.5, 0.5}), 0.3);
  EXPECT_NEAR(combined_error(PairComparison{0, 1, 0, 0.0926, 0.2837}, Weights{3.0, 0.75, 0.25}), 0.1404, 5e-5);
}

TEST(PairsCsv, Format) {
  ErrorMatrix m{3, {{0, 1, 2, 0.125, 0.5}, {0, 2, 0, 0.0, 1.0 / 3.0}, {1, 2, 11, 1.0, 0.0}}};
  std::ostringstream out;
  write_pairs_csv(out, m, Weights{1.0, 0.5, 0.5});
  EXPECT_EQ(out.str(),
            "a,b,shift,dir_err,dist_err,combined\n"
            "0,1,2,0.125000,0.500000,0.312500\n"
            "0,2,0,0.000000,0.333333,0.166667\n"
            "1,2,11,1.000000,0.000000,0.500000\n");
}
