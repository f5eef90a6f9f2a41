#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "mobility_checks.hpp"
#include "tdmp/mobility.hpp"
#include "tdmp/rng.hpp"

using namespace tdmp;

TEST_CASE("krauss safe speed") {
  CHECK(krauss_safe_speed(10, 10, 20, 1, 2.6) == doctest::Approx(10.0 + 10.0 / (20.0 / 5.2 + 1.0)).epsilon(1e-12));
  CHECK(krauss_safe_speed(10, 10, 20, 1, 2.6) == doctest::Approx(12.0634).epsilon(1e-4));
  CHECK(krauss_safe_speed(12, 7, 12, 1, 2.6) == doctest::Approx(12.0));
  CHECK(krauss_safe_speed(0, 0, 0, 1, 2.6) == 0.0);
  CHECK(krauss_safe_speed(0, 15, 0, 1, 2.6) == 0.0);
}

TEST_CASE("safe speed grows with the gap") {
  Rng rng(3);
  for (int i = 0; i < 500; ++i) {
    const double vl = rng.uniform(0, 31), vf = rng.uniform(0, 31), g = rng.uniform(0, 200);
    CHECK(krauss_safe_speed(vl, vf, g + 1.0, 1, 2.6) >= krauss_safe_speed(vl, vf, g, 1, 2.6));
  }
}

namespace {

RoadNetwork strip(double length, double limit) {
  RoadNetwork n;
  n.add_node(0, {0, 0});
  n.add_node(1, {length, 0});
  n.add_edge(0, 0, 1, limit);
  return n;
}

Trip trip_on(const RoadNetwork& n, VehicleId id, double dep, double vmax) {
  Trip t;
  t.vehicle_id = id;
  t.departure_time = dep;
  t.origin = 0;
  t.destination = 1;
  t.route = {0};
  t.target = n.node(1).position;
  t.max_speed = vmax;
  return t;
}

}  // namespace

TEST_CASE("empty state is unchanged by a step") {
  const RoadNetwork n = strip(100, 10);
  MobilityParams p;
  MobilityState s(n, {}, p);
  s.advance(n, p);
  CHECK(s.vehicles().empty());
  CHECK(s.arrivals().empty());
  CHECK(s.time() == 1.0);
}

TEST_CASE("a lone vehicle accelerates at the bound") {
  const RoadNetwork n = strip(5000, 31.1);
  MobilityParams p;
  MobilityState s(n, {trip_on(n, 0, 0.0, 31.1)}, p);
  REQUIRE(s.vehicles().size() == 1);
  double v = 0.0;
  for (int i = 0; i < 6; ++i) {
    s.advance(n, p);
    const RoadVehicle& veh = s.vehicles().front();
    CHECK(veh.speed == doctest::Approx(std::min(v + 4.5, 31.1)));
    CHECK(veh.acceleration == doctest::Approx(std::min(v + 4.5, 31.1) - v));
    v = veh.speed;
  }
  CHECK(v == doctest::Approx(27.0));
  s.advance(n, p);
  CHECK(s.vehicles().front().speed == doctest::Approx(31.1));
}

TEST_CASE("speed never exceeds the edge limit or the vehicle maximum") {
  const RoadNetwork n = strip(3000, 13.9);
  MobilityParams p;
  MobilityState s(n, {trip_on(n, 0, 0.0, 31.1), trip_on(n, 1, 0.5, 10.0)}, p);
  for (int i = 0; i < 100; ++i) {
    s.advance(n, p);
    for (const auto& v : s.vehicles()) CHECK(v.speed <= std::min(13.9, v.max_speed) + 1e-12);
  }
}

TEST_CASE("vehicles reach the end and are logged once") {
  const RoadNetwork n = strip(200, 13.9);
  MobilityParams p;
  MobilityState s(n, {trip_on(n, 0, 0.0, 31.1), trip_on(n, 1, 2.0, 31.1), trip_on(n, 2, 2.0, 31.1)}, p);
  for (int i = 0; i < 200; ++i) s.advance(n, p);
  CHECK(s.vehicles().empty());
  CHECK(s.pending() == 0);
  CHECK(s.inserted() == 3);
  std::set<VehicleId> ids;
  for (const auto& a : s.arrivals()) ids.insert(a.id);
  CHECK(ids.size() == 3);
}

TEST_CASE("queued platoon behind a blocked junction never collides") {
  // Heavy demand onto a small grid forces stop-line braking and queues.
  const RoadNetwork g = build_grid(2, 2, 100.0, 13.9);
  ODMatrix od;
  od.period = 50.0;
  for (NodeId o : {0, 2, 6, 8}) od.entries[{o, 4}] = 15;
  od.entries[{0, 8}] = 15;
  od.entries[{8, 0}] = 15;
  const MobilityParams p;
  MobilityState s(g, generate_trips(g, od, 7), p);
  std::map<VehicleId, double> prev;
  oracle::MobilityAudit audit;
  for (int i = 0; i < 1000; ++i) {
    s.advance(g, p);
    oracle::audit_state(s, g, p, prev, audit);
  }
  CHECK(audit.collisions == 0);
  CHECK(audit.offset_violations == 0);
  CHECK(audit.speed_violations == 0);
  CHECK(audit.accel_violations == 0);
  CHECK(s.inserted() == s.trips_total());
  CHECK(s.arrivals().size() == s.trips_total());
}

TEST_CASE("trajectories are deterministic") {
  const RoadNetwork g = build_grid(3, 3, 150.0, 13.9);
  const ODMatrix od = uniform_od(g, 100.0).scaled_to(60);
  const MobilityParams p;
  MobilityState a(g, generate_trips(g, od, 9), p), b(g, generate_trips(g, od, 9), p);
  for (int i = 0; i < 150; ++i) {
    a.advance(g, p);
    b.advance(g, p);
    REQUIRE(a.vehicles().size() == b.vehicles().size());
    for (std::size_t k = 0; k < a.vehicles().size(); ++k) {
      CHECK(a.vehicles()[k].id == b.vehicles()[k].id);
      CHECK(a.vehicles()[k].offset == b.vehicles()[k].offset);
      CHECK(a.vehicles()[k].speed == b.vehicles()[k].speed);
    }
  }
}

TEST_CASE("kinematics follow the edge geometry") {
  const RoadNetwork g = build_grid(1, 1, 100.0, 13.9);
  ODMatrix od;
  od.period = 1e-6;
  od.entries[{3, 0}] = 1;
  const MobilityParams p;
  MobilityState s(g, generate_trips(g, od, 1), p);
  s.advance(g, p);
  REQUIRE(s.vehicles().size() == 1);
  const RoadVehicle& v = s.vehicles().front();
  const Kinematics k = s.kinematics(g, v);
  const RoadEdge& e = g.edge(v.edge());
  const Point2 a = g.node(e.from).position, b = g.node(e.to).position;
  CHECK(distance(a, k.position) == doctest::Approx(v.offset));
  CHECK(distance(k.position, b) == doctest::Approx(e.length - v.offset));
  CHECK(k.heading >= 0.0);
  CHECK(k.heading < 2 * 3.141592653589793);
}

TEST_CASE("invalid parameters are rejected") {
  MobilityParams p;
  p.dt = 0.0;
  CHECK_THROWS(p.validate());
  p = MobilityParams{};
  p.max_decel = -1.0;
  CHECK_THROWS(p.validate());
}
