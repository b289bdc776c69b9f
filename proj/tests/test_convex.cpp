#include <random>

#include "doctest.h"

#include "mink/convex.hpp"
#include "mink/nets.hpp"

using namespace mink;

namespace {

StructuringElement unit_square_hull() {
  return StructuringElement::polytope({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
}

}  // namespace

TEST_CASE("support functions match closed forms") {
  const auto sq = unit_square_hull();
  CHECK(sq.support({1, 0}) == doctest::Approx(1).epsilon(1e-14));
  CHECK(sq.support({-1, 0}) == doctest::Approx(0).epsilon(1e-14));
  CHECK(sq.support({1, 1}) == doctest::Approx(2).epsilon(1e-14));
  CHECK(sq.support({-3, 2}) == doctest::Approx(2).epsilon(1e-14));

  const auto seg = StructuringElement::segment({0, 0}, {2, 1});
  CHECK(seg.support({1, 0}) == doctest::Approx(2));
  CHECK(seg.support({-1, 0}) == doctest::Approx(0));
  CHECK(seg.support({0, -1}) == doctest::Approx(0));

  const auto ball = StructuringElement::ball({0.5, -1, 0}, 2.0);
  for (const auto& v : fibonacci_sphere(200)) {
    const double expect = 0.5 * v[0] - v[1] + 2.0;
    CHECK(ball.support(v) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("planar disk in R^3 projects before measuring") {
  const auto disk = StructuringElement::ball(
      {0, 0, 0}, 1.0, {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}});
  CHECK(disk.support({0, 0, 5}) == doctest::Approx(0).epsilon(1e-14));
  CHECK(disk.support({3, 4, 0}) == doctest::Approx(5).epsilon(1e-12));
  CHECK(disk.support({1, 0, 1}) == doctest::Approx(1).epsilon(1e-12));
  CHECK(disk.diameter() == doctest::Approx(2).epsilon(1e-12));
}

TEST_CASE("support is positively homogeneous and subadditive") {
  const std::vector<StructuringElement> bodies = {
      unit_square_hull(), StructuringElement::segment({-1, 2}, {3, 0}),
      StructuringElement::ball({0.2, -0.1}, 0.7),
      StructuringElement::singleton({0.3, 0.4})};
  const auto net = circle_net(90);
  for (const auto& q : bodies) {
    for (const auto& v : net) {
      CHECK(q.support(scaled(v, 2.5)) ==
            doctest::Approx(2.5 * q.support(v)).epsilon(1e-12));
      for (const auto& w : {net[7], net[31]}) {
        CHECK(q.support(add(v, w)) <= q.support(v) + q.support(w) + 1e-12);
      }
      CHECK(q.support_star(v) == doctest::Approx(std::max(0.0, q.support(v))));
    }
  }
}

TEST_CASE("symmetral satisfies the support identity on the net") {
  const std::vector<StructuringElement> bodies2 = {
      unit_square_hull(), StructuringElement::segment({-1, 2}, {3, 0}),
      StructuringElement::ball({0.2, -0.1}, 0.7),
      StructuringElement::singleton({0.3, 0.4})};
  for (const auto& q : bodies2) {
    const auto s = symmetral(q);
    for (const auto& v : circle_net(360)) {
      const double expect = 0.5 * (q.support(v) + q.support(negated(v)));
      CHECK(s.support(v) == doctest::Approx(expect).epsilon(1e-10));
      CHECK(s.support(v) == doctest::Approx(s.support(negated(v))).epsilon(1e-10));
    }
  }
  const auto disk = StructuringElement::ball(
      {0.5, 0.0, -0.25}, 1.0, {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}});
  const auto s3 = symmetral(disk);
  for (const auto& v : fibonacci_sphere(400)) {
    const double expect = 0.5 * (disk.support(v) + disk.support(negated(v)));
    CHECK(s3.support(v) == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("scaling and translation act on support functions") {
  const auto sq = unit_square_hull();
  const auto r = scale(sq, 0.25);
  const auto t = translate(sq, {2, -1});
  for (const auto& v : circle_net(64)) {
    CHECK(r.support(v) == doctest::Approx(0.25 * sq.support(v)).epsilon(1e-13));
    CHECK(t.support(v) ==
          doctest::Approx(sq.support(v) + 2 * v[0] - v[1]).epsilon(1e-12));
  }
  // 0*Q collapses to {0} for every variant, keeping r -> rQ continuous.
  const auto z = scale(StructuringElement::ball({3, 3}, 2.0), 0.0);
  CHECK(z.kind() == BodyKind::Singleton);
  CHECK(z.support({1, 0}) == 0);
  CHECK(z.support({-1, 0}) == 0);
}

TEST_CASE("minkowski sum adds support functions") {
  const auto sq = unit_square_hull();
  const auto tri = StructuringElement::polytope({{0, 0}, {1, 0}, {0, 1}});
  const auto sum = minkowski_sum_hull(sq, tri);
  for (const auto& v : circle_net(128))
    CHECK(sum.support(v) ==
          doctest::Approx(sq.support(v) + tri.support(v)).epsilon(1e-12));
}

TEST_CASE("degenerate constructor input is rejected") {
  CHECK_THROWS_AS(StructuringElement::polytope({}), ConfigError);
  CHECK_THROWS_AS(StructuringElement::ball({0, 0}, -1.0), ConfigError);
  CHECK_THROWS_AS(
      StructuringElement::ball({0, 0, 0}, 1.0,
                               {{1.0, 0.0, 0.0}, {2.0, 0.0, 0.0}}),
      ConfigError);
  CHECK_THROWS_AS(scale(unit_square_hull(), -1.0), ConfigError);
}

TEST_CASE("axis extents and diameter bound the body") {
  const auto seg = StructuringElement::segment({0, 0}, {3, 4});
  CHECK(seg.diameter() == doctest::Approx(5));
  CHECK(seg.axis_extent(0) == doctest::Approx(3));
  CHECK(seg.axis_extent(1) == doctest::Approx(4));
  const auto b = StructuringElement::ball({1, 1}, 0.5);
  CHECK(b.axis_extent(0) == doctest::Approx(1.5));
}
