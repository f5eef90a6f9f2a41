#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "tdmp/geokin.hpp"

using namespace tdmp;
using std::numbers::pi;

TEST_CASE("distance examples") {
  CHECK(distance({0, 0}, {0, 0}) == 0.0);
  CHECK(distance({0, 0}, {3, 4}) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(distance({1.5, -2}, {-0.5, 1}) == doctest::Approx(std::sqrt(13.0)).epsilon(1e-15));
}

TEST_CASE("distance is symmetric and obeys the triangle inequality") {
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const auto p = oracle::random_points(rng, 3, 1000, 1000);
    CHECK(distance(p[0], p[1]) == distance(p[1], p[0]));
    CHECK(distance(p[0], p[2]) <= distance(p[0], p[1]) + distance(p[1], p[2]) + 1e-9);
  }
}

TEST_CASE("direction angle examples") {
  CHECK(direction_angle(0.0, 5.0, {0, 0}, {10, 0}) == doctest::Approx(0.0));
  CHECK(direction_angle(pi / 2, 5.0, {0, 0}, {10, 0}) == doctest::Approx(pi / 2));
  CHECK(direction_angle(0.0, 1.0, {0, 0}, {-1, 1}) == doctest::Approx(3 * pi / 4));
}

TEST_CASE("direction angle errors") {
  auto code_of = [](auto&& f) {
    try {
      f();
    } catch (const GeometryError& e) {
      return e.code();
    }
    FAIL("no error");
    return GeoErrc::InvalidFactors;
  };
  CHECK(code_of([] { direction_angle(0.0, 0.0, {0, 0}, {1, 0}); }) == GeoErrc::ZeroVelocity);
  CHECK(code_of([] { direction_angle(0.0, 1.0, {2, 2}, {2, 2}); }) == GeoErrc::CoincidentPoints);
}

TEST_CASE("predict position examples") {
  Kinematics k;
  k.position = {3, -4};
  CHECK(predict_position(k, 7.0) == k.position);

  k = {{0, 0}, 10.0, 0.0, 0.0};
  const Point2 a = predict_position(k, 1.0);
  CHECK(a.x == doctest::Approx(10.0));
  CHECK(a.y == doctest::Approx(0.0));

  k = {{0, 0}, 10.0, 2.0, pi / 2};
  const Point2 b = predict_position(k, 1.0);
  CHECK(b.x == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(b.y == doctest::Approx(11.0));
}

TEST_CASE("a decelerating vehicle does not reverse") {
  const Kinematics k{{5, 5}, 2.0, -2.6, 0.0};
  // 2*10 - 1.3*100 < 0: clamped to no displacement.
  CHECK(predict_position(k, 10.0) == Point2{5, 5});
  CHECK(predict_kinematics(k, 10.0).speed == 0.0);
}

TEST_CASE("prediction at zero horizon is the identity") {
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    Kinematics k{{rng.uniform(-1e3, 1e3), rng.uniform(-1e3, 1e3)}, rng.uniform(0, 31), rng.uniform(-2.6, 4.5),
                 rng.uniform(0, 2 * pi)};
    CHECK(predict_position(k, 0.0) == k.position);
  }
}

TEST_CASE("predicted distance examples") {
  const Kinematics a{{0, 0}, 0, 0, 0};
  const Kinematics b{{3, 4}, 0, 0, 0};
  CHECK(predicted_distance(a, b, 1.0) == doctest::Approx(5.0));
  const Kinematics c{{1, 2}, 12, 1, 1.0};
  CHECK(predicted_distance(c, c, 1.0) == 0.0);
}

TEST_CASE("target angle examples") {
  CHECK(target_angle({0, 0}, {4, 4}, {4, 4}) == doctest::Approx(0.0));
  CHECK(target_angle({0, 0}, {-3, 0}, {5, 0}) == doctest::Approx(pi));
  CHECK(target_angle({0, 0}, {1, 0}, {0, 1}) == doctest::Approx(pi / 2));
  CHECK_THROWS_AS(target_angle({1, 1}, {1, 1}, {0, 1}), GeometryError);
  CHECK(target_cosine({1, 1}, {1, 1}, {0, 1}) == 0.0);
}

TEST_CASE("neighbor weight examples") {
  const WeightFactors thirds = WeightFactors::normalized(0.333, 0.333, 0.333);
  CHECK(neighbor_weight(WeightFactors{0.333, 0.333, 0.333}, 100.0, 0.0, 1.0, 1.0) == doctest::Approx(0.999));
  CHECK(neighbor_weight(thirds, 100.0, 0.0, 1.0, 1.0) == doctest::Approx(1.0));
  CHECK(neighbor_weight(thirds, 100.0, 100.0, 0.0, 0.0) == doctest::Approx(0.0));
  CHECK(neighbor_weight(WeightFactors{0.4, 0.3, 0.3}, 200.0, 100.0, 0.8, -0.5) == doctest::Approx(0.29));
  CHECK_THROWS_AS(neighbor_weight(thirds, 0.0, 0.0, 1.0, 1.0), GeometryError);
}

TEST_CASE("weights of strictly closer neighbours stay within bounds") {
  Rng rng(17);
  for (int i = 0; i < 1000; ++i) {
    const double a = rng.uniform01(), b = rng.uniform01(), c = rng.uniform01();
    const WeightFactors f = WeightFactors::normalized(a, b, c + 1e-9);
    const double dsd = rng.uniform(1.0, 500.0);
    const double did = rng.uniform(0.0, dsd * (1 - 1e-9));
    const double w = neighbor_weight(f, dsd, did, rng.uniform(-1, 1), rng.uniform(-1, 1));
    CHECK(w <= 1.0 + 1e-12);
    CHECK(w > -f.q1 - f.q2);
  }
}

TEST_CASE("stationary neighbour has no velocity evidence") {
  CHECK(velocity_cosine(Kinematics{{0, 0}, 0.0, 0.0, 1.0}, {10, 0}) == 0.0);
  CHECK(velocity_cosine(Kinematics{{0, 0}, 3.0, 0.0, 0.0}, {10, 0}) == doctest::Approx(1.0));
}

TEST_CASE("angles are invariant under rotation and translation") {
  Rng rng(23);
  for (int i = 0; i < 500; ++i) {
    const auto p = oracle::random_points(rng, 4, 600, 600);
    const double heading = rng.uniform(0, 2 * pi);
    const double rot = rng.uniform(0, 2 * pi);
    const Point2 shift{rng.uniform(-1e4, 1e4), rng.uniform(-1e4, 1e4)};
    auto tf = [&](Point2 q) {
      return Point2{q.x * std::cos(rot) - q.y * std::sin(rot) + shift.x, q.x * std::sin(rot) + q.y * std::cos(rot) + shift.y};
    };
    CHECK(direction_angle(normalize_heading(heading + rot), 7.0, tf(p[0]), tf(p[1])) ==
          doctest::Approx(direction_angle(heading, 7.0, p[0], p[1])).epsilon(1e-9));
    CHECK(target_angle(tf(p[0]), tf(p[2]), tf(p[3])) ==
          doctest::Approx(target_angle(p[0], p[2], p[3])).epsilon(1e-9));
  }
}

TEST_CASE("factor validation") {
  CHECK(WeightFactors{}.is_valid());
  CHECK_FALSE((WeightFactors{0.5, 0.5, 0.5}).is_valid());
  CHECK_FALSE((WeightFactors{1.2, -0.1, -0.1}).is_valid());
  CHECK_THROWS_AS((WeightFactors{0.5, 0.5, 0.5}).validate(), GeometryError);
  const WeightFactors n = WeightFactors::normalized(2, 1, 1);
  CHECK(n.p == doctest::Approx(0.5));
  CHECK(n.is_valid());
}

TEST_CASE("heading normalization") {
  CHECK(normalize_heading(-pi / 2) == doctest::Approx(3 * pi / 2));
  CHECK(normalize_heading(5 * pi) == doctest::Approx(pi));
  const double h = normalize_heading(2 * pi);
  CHECK(h >= 0.0);
  CHECK(h < 2 * pi);
}
