#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <sstream>
#include <string>

#include "layouts.hpp"
#include "oracles.hpp"
#include "tdmp/engine.hpp"

using namespace tdmp;

namespace {

Scenario grid_scenario(std::int64_t vehicles, double sim_time, Protocol protocol = Protocol::Tdmp) {
  Scenario s;
  s.network = build_grid(3, 3, 150.0, 13.9);
  s.od = uniform_od(s.network, sim_time).scaled_to(vehicles);
  s.sim_time = sim_time;
  s.protocol = protocol;
  return s;
}

struct LogLine {
  double time;
  std::string kind;
  std::string ids;
};

std::vector<LogLine> parse_log(const std::string& text) {
  std::vector<LogLine> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream f(line);
    LogLine l;
    std::string t;
    std::getline(f, t, '\t');
    std::getline(f, l.kind, '\t');
    std::getline(f, l.ids, '\t');
    l.time = std::stod(t);
    out.push_back(l);
  }
  return out;
}

std::string packet_of(const std::string& ids) { return ids.substr(0, ids.find(':')); }

}  // namespace

TEST_CASE("no traffic leaves PDR undefined") {
  Scenario s = layouts::static_scenario(layouts::greedy_chain(), 0, 4, Protocol::Gpsr);
  s.traffic.start = 10.0;
  const RunResult r = run(s, 1);
  CHECK(r.metrics.n_generated == 0);
  CHECK_FALSE(pdr(r.metrics).has_value());
  CHECK(r.metrics.delay_samples.empty());
}

TEST_CASE("one-hop delivery") {
  const std::vector<layouts::Named> pair{{"S", {0, 0}}, {"D", {120, 30}}};
  Scenario s = layouts::static_scenario(pair, 0, 1, Protocol::Tdmp, 1.5);
  const RunResult r = run(s, 1);
  REQUIRE(r.metrics.n_generated == 1);
  CHECK(*pdr(r.metrics) == 1.0);
  CHECK(ahc(r.metrics) == 1.0);
  CHECK(e2ed(r.metrics) == doctest::Approx(hop_transmission_delay(s.radio)).epsilon(1e-12));
}

TEST_CASE("greedy chain is delivered in four hops") {
  const auto nodes = layouts::greedy_chain();
  for (Protocol p : {Protocol::Gpsr, Protocol::Tdmp, Protocol::Ablation}) {
    std::ostringstream log;
    const RunResult r = run(layouts::static_scenario(nodes, 0, 4, p, 1.5), 1, &log);
    REQUIRE(r.metrics.n_received == 1);
    CHECK(ahc(r.metrics) == 4.0);
    CHECK(e2ed(r.metrics) == doctest::Approx(4 * hop_transmission_delay(RadioConfig{})).epsilon(1e-12));
    std::string path = "A";
    for (const auto& l : parse_log(log.str()))
      if (l.kind == "Hop") {
        const auto gt = l.ids.find('>');
        path += ">" + layouts::name_of(nodes, std::stoul(l.ids.substr(gt + 1)));
      }
    CHECK(path == "A>B>D>E>Z");
  }
  const StaticRoute sr =
      route_on_snapshot(layouts::snapshot_of(nodes), 0, 4, Protocol::Gpsr, RoutingParams{}, RadioConfig{});
  CHECK(layouts::path_string(nodes, sr.path) == "A>B>D>E>Z");
  CHECK_FALSE(sr.entered_perimeter);
}

TEST_CASE("snapshot adjacency matches the distance oracle") {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pts = oracle::random_points(rng, 40, 1000, 1000);
    std::vector<std::pair<VehicleId, Point2>> pos;
    for (std::size_t i = 0; i < pts.size(); ++i) pos.emplace_back(static_cast<VehicleId>(pts.size() - 1 - i), pts[i]);
    const Snapshot s = make_snapshot(0.0, pos, RadioConfig{});
    for (std::size_t i = 0; i < s.positions.size(); ++i) {
      CHECK(s.positions[i].first == i);
      std::vector<std::size_t> expected;
      for (std::size_t j = 0; j < s.positions.size(); ++j)
        if (j != i && oracle::dist(s.positions[i].second, s.positions[j].second) <= 300.0) expected.push_back(j);
      CHECK(s.adjacency[i] == expected);
    }
  }
}

TEST_CASE("snapshots at the same time are identical") {
  Simulation sim(grid_scenario(50, 60), 3);
  sim.advance_to(30.0);
  const Snapshot a = sim.freeze_snapshot();
  const Snapshot b = sim.freeze_snapshot();
  CHECK(a.time == b.time);
  CHECK(a.positions == b.positions);
  CHECK(a.adjacency == b.adjacency);
}

TEST_CASE("initial static snapshot holds the placements") {
  const auto nodes = layouts::void_detour();
  Simulation sim(layouts::static_scenario(nodes, 0, 5, Protocol::Gpsr), 1);
  const Snapshot s = sim.freeze_snapshot();
  REQUIRE(s.positions.size() == nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) CHECK(s.positions[i].second == nodes[i].position);
}

TEST_CASE("packets are conserved and the log is causal") {
  for (Protocol p : {Protocol::Tdmp, Protocol::Gpsr, Protocol::Ablation}) {
    for (std::uint64_t seed : {1, 2, 3}) {
      std::ostringstream log;
      const RunResult r = run(grid_scenario(60, 120, p), seed, &log);
      const MetricsRecord& m = r.metrics;
      CHECK(m.n_generated > 0);
      CHECK(m.accounted() == m.n_generated);
      CHECK(m.delay_samples.size() == m.n_received);
      double last = 0.0;
      bool ordered = true;
      for (const auto& l : parse_log(log.str())) {
        ordered = ordered && l.time >= last;
        last = l.time;
      }
      CHECK(ordered);
      for (int h : m.hop_samples) CHECK(h <= RoutingParams{}.hop_limit);
    }
  }
}

TEST_CASE("runs are deterministic") {
  std::ostringstream a, b;
  const RunResult ra = run(grid_scenario(80, 100), 9, &a);
  const RunResult rb = run(grid_scenario(80, 100), 9, &b);
  CHECK(a.str() == b.str());
  CHECK(ra.metrics.delay_samples == rb.metrics.delay_samples);
  std::ostringstream c;
  run(grid_scenario(80, 100), 10, &c);
  CHECK(a.str() != c.str());
}

TEST_CASE("metrics match a replay of the event log") {
  std::ostringstream log;
  const RunResult r = run(grid_scenario(100, 150), 4, &log);
  std::map<std::string, double> sent;
  std::size_t generated = 0, delivered = 0;
  double delay_sum = 0.0, hop_sum = 0.0;
  for (const auto& l : parse_log(log.str())) {
    if (l.kind == "PacketSend") {
      sent[packet_of(l.ids)] = l.time;
      ++generated;
    } else if (l.kind == "Deliver") {
      ++delivered;
      delay_sum += l.time - sent.at(packet_of(l.ids));
      hop_sum += std::stod(l.ids.substr(l.ids.find("hops=") + 5));
    }
  }
  REQUIRE(delivered > 0);
  CHECK(generated == r.metrics.n_generated);
  CHECK(delivered == r.metrics.n_received);
  // The log keeps microseconds.
  CHECK(e2ed(r.metrics) == doctest::Approx(delay_sum / delivered).epsilon(1e-5));
  CHECK(ahc(r.metrics) == doctest::Approx(hop_sum / delivered).epsilon(1e-12));
}

TEST_CASE("invalid scenarios are rejected") {
  Scenario s = grid_scenario(10, 50);
  s.sim_time = 0.0;
  CHECK_THROWS_AS(Simulation(s, 1), ConfigError);
  s = grid_scenario(10, 50);
  s.routing.factors = WeightFactors{0.5, 0.5, 0.5};
  CHECK_THROWS_AS(Simulation(s, 1), ConfigError);
  s = layouts::static_scenario(layouts::greedy_chain(), 0, 9, Protocol::Gpsr);
  CHECK_THROWS_AS(Simulation(s, 1), ConfigError);
}

TEST_CASE("retry mode re-decides after a failed link") {
  Scenario s = grid_scenario(100, 150);
  s.link_failure = LinkFailure::Retry;
  const RunResult r = run(s, 2);
  CHECK(r.metrics.accounted() == r.metrics.n_generated);
}
