#include <qshape/geometry.hpp>
#include <qshape/synthetic.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace qshape;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::IoFailure;
}

}  // namespace

TEST(ValidatePolygon, AcceptsCcwSquare) {
  const auto sq = validate_polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  ASSERT_EQ(sq.size(), 4u);
  EXPECT_EQ(sq[0], (Point{0, 0}));
  EXPECT_EQ(sq[1], (Point{1, 0}));
  EXPECT_GT(signed_area(sq.vertices()), 0.0);
}

TEST(ValidatePolygon, RejectsBowtie) {
  EXPECT_EQ(code_of([] { validate_polygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}); }), ErrorCode::SelfIntersecting);
}

TEST(ValidatePolygon, RejectsTooFewVertices) {
  EXPECT_EQ(code_of([] { validate_polygon({{0, 0}, {1, 0}}); }), ErrorCode::TooFewVertices);
}

TEST(ValidatePolygon, RejectsRepeatedVertex) {
  EXPECT_EQ(code_of([] { validate_polygon({{0, 0}, {1, 0}, {1, 0}, {0, 1}}); }), ErrorCode::DegenerateEdge);
  EXPECT_EQ(code_of([] { validate_polygon({{0, 0}, {1, 0}, {0, 1}, {0, 0}}); }), ErrorCode::DegenerateEdge);
}

TEST(ValidatePolygon, RejectsCollinearChain) {
  EXPECT_EQ(code_of([] { validate_polygon({{0, 0}, {1, 0}, {2, 0}}); }), ErrorCode::DegenerateEdge);
}

TEST(ValidatePolygon, RejectsFoldBackAndTouchingVertex) {
  // Spike doubling back along its incoming edge.
  EXPECT_EQ(code_of([] { validate_polygon({{0, 0}, {2, 0}, {1, 0}, {1, 1}}); }), ErrorCode::SelfIntersecting);
  // Vertex 4 touches edge 1 without crossing it.
  EXPECT_EQ(code_of([] { validate_polygon({{0, 0}, {4, 0}, {4, 4}, {2, 4}, {4, 2}, {0, 4}}); }),
            ErrorCode::SelfIntersecting);
}

TEST(ValidatePolygon, KeepsCollinearContinuation) {
  const auto p = validate_polygon({{0, 0}, {1, 0}, {2, 0}, {2, 2}, {0, 2}});
  EXPECT_EQ(p.size(), 5u);
}

TEST(ValidatePolygon, ReorientsClockwiseInput) {
  const auto p = validate_polygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  const std::vector<Point> expected{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  EXPECT_EQ(p.vertices(), expected);
}

TEST(EnsureCcw, IdentityOnCcw) {
  const std::vector<Point> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  EXPECT_EQ(ensure_ccw(sq), sq);
}

TEST(EnsureCcw, ReversesClockwiseKeepingFirstVertex) {
  const std::vector<Point> cw{{0, 0}, {0, 1}, {1, 1}, {1, 0}};
  const std::vector<Point> ccw{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  EXPECT_EQ(ensure_ccw(cw), ccw);
}

TEST(EnsureCcw, FlipsTriangleAreaSign) {
  const std::vector<Point> cw{{0, 0}, {0, 2}, {3, 0}};
  EXPECT_LT(signed_area(cw), 0.0);
  const auto fixed = ensure_ccw(cw);
  EXPECT_DOUBLE_EQ(signed_area(fixed), -signed_area(cw));
  EXPECT_EQ(fixed[0], cw[0]);
}

TEST(RelativeBearing, SpecExamples) {
  EXPECT_DOUBLE_EQ(relative_bearing(OrientedPoint({0, 0}, 0.0), {0, 1}), kPi / 2);
  EXPECT_DOUBLE_EQ(relative_bearing(OrientedPoint({0, 0}, kPi / 2), {0, 1}), 0.0);
  EXPECT_DOUBLE_EQ(relative_bearing(OrientedPoint({1, 1}, kPi / 4), {2, 2}), 0.0);
}

TEST(RelativeBearing, RangeAndCoincidence) {
  const double b = relative_bearing(OrientedPoint({0, 0}, 0.0), {1, -1e-300});
  EXPECT_GE(b, 0.0);
  EXPECT_LT(b, kTwoPi);
  EXPECT_EQ(code_of([] { relative_bearing(OrientedPoint({3, 4}, 1.0), {3, 4}); }), ErrorCode::CoincidentPoints);
}

TEST(RelativeBearing, InvariantUnderRigidRotation) {
  synthetic::Rng rng(11);
  for (int t = 0; t < 500; ++t) {
    const Point o{synthetic::uniform(rng, -5, 5), synthetic::uniform(rng, -5, 5)};
    const Point q{synthetic::uniform(rng, -5, 5), synthetic::uniform(rng, -5, 5)};
    const double h = synthetic::uniform(rng, 0, kTwoPi);
    const double theta = synthetic::uniform(rng, -kPi, kPi);
    const auto moved = synthetic::transform(std::vector<Point>{o, q}, theta, 1.0, {0, 0});
    const double before = relative_bearing(OrientedPoint(o, h), q);
    const double after = relative_bearing(OrientedPoint(moved[0], h + theta), moved[1]);
    EXPECT_NEAR(std::remainder(before - after, kTwoPi), 0.0, 1e-9);
  }
}

TEST(RelativeBearing, DecreasesWithHeadingRotation) {
  synthetic::Rng rng(12);
  for (int t = 0; t < 500; ++t) {
    const Point o{synthetic::uniform(rng, -5, 5), synthetic::uniform(rng, -5, 5)};
    const Point q{synthetic::uniform(rng, -5, 5), synthetic::uniform(rng, -5, 5)};
    const double h = synthetic::uniform(rng, 0, kTwoPi);
    const double theta = synthetic::uniform(rng, 0, kTwoPi);
    const double before = relative_bearing(OrientedPoint(o, h), q);
    const double after = relative_bearing(OrientedPoint(o, h + theta), q);
    EXPECT_NEAR(std::remainder(before - theta - after, kTwoPi), 0.0, 1e-9);
  }
}

TEST(ValidatePolygon, RandomStarPolygonsBecomeCcw) {
  synthetic::Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    auto pts = synthetic::star_polygon(rng, 3 + t % 40);
    if (t % 2 == 1) pts = synthetic::transform(pts, 0.0, -1.0, {0, 0});  // point reflection keeps CCW
    if (t % 3 == 0) std::reverse(pts.begin(), pts.end());
    EXPECT_GT(signed_area(validate_polygon(ensure_ccw(pts)).vertices()), 0.0);
  }
}

TEST(PolyFormat, ReadsAndWrites) {
  std::istringstream in("3\n0 0\n1.5 0\n0 2.25\n");
  const auto pts = read_poly(in);
  ASSERT_EQ(pts.size(), 3u);
  EXPECT_EQ(pts[2], (Point{0, 2.25}));
  std::ostringstream out;
  write_poly(out, pts);
  EXPECT_EQ(out.str(), "3\n0 0\n1.5 0\n0 2.25\n");
}

TEST(PolyFormat, ReportsTruncationAndBadHeader) {
  std::istringstream short_in("4\n0 0\n1 0\n");
  EXPECT_EQ(code_of([&] { read_poly(short_in); }), ErrorCode::TruncatedData);
  std::istringstream bad("abc\n");
  EXPECT_EQ(code_of([&] { read_poly(bad); }), ErrorCode::CorruptHeader);
}

TEST(PolyFormat, RoundTripsArbitraryDoubles) {
  synthetic::Rng rng(3);
  const auto pts = synthetic::star_polygon(rng, 25);
  std::stringstream io;
  write_poly(io, pts);
  EXPECT_EQ(read_poly(io), pts);
}
