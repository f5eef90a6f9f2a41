#pragma once

// Small hand-built static topologies with 300 m radio range.

#include <string>
#include <vector>

#include "tdmp/engine.hpp"

namespace layouts {

using tdmp::Point2;

struct Named {
  std::string name;
  Point2 position;
};

/// A greedy chain: each node only hears its chain neighbours, so greedy
/// forwarding from A towards Z visits A, B, D, E, Z.
inline std::vector<Named> greedy_chain() {
  return {{"A", {0, 0}}, {"B", {250, 50}}, {"D", {500, -50}}, {"E", {750, 40}}, {"Z", {1000, 0}}};
}

/// A void in front of A. Both of A's neighbours are farther from Z than A is
/// (|AZ| < |CZ| < |BZ|) and only C leads onward, via D and E.
inline std::vector<Named> void_detour() {
  return {{"A", {0, 0}},     {"B", {-150, -200}}, {"C", {-100, 250}},
          {"D", {150, 400}}, {"E", {400, 250}},   {"Z", {500, 0}}};
}

inline std::string name_of(const std::vector<Named>& nodes, tdmp::VehicleId id) {
  return id < nodes.size() ? nodes[id].name : "?";
}

inline std::string path_string(const std::vector<Named>& nodes, const std::vector<tdmp::VehicleId>& path) {
  std::string s;
  for (auto id : path) {
    if (!s.empty()) s += ">";
    s += name_of(nodes, id);
  }
  return s;
}

inline tdmp::Snapshot snapshot_of(const std::vector<Named>& nodes, const tdmp::RadioConfig& radio = {}) {
  std::vector<std::pair<tdmp::VehicleId, Point2>> pos;
  for (std::size_t i = 0; i < nodes.size(); ++i) pos.emplace_back(static_cast<tdmp::VehicleId>(i), nodes[i].position);
  return tdmp::make_snapshot(0.0, pos, radio);
}

/// A short static scenario that sends one packet per second from `src` to
/// `dst` after the first beacon round.
inline tdmp::Scenario static_scenario(const std::vector<Named>& nodes, tdmp::VehicleId src, tdmp::VehicleId dst,
                                      tdmp::Protocol protocol, double sim_time = 3.0) {
  tdmp::Scenario s;
  s.name = "static";
  s.sim_time = sim_time;
  s.protocol = protocol;
  for (const auto& n : nodes) s.static_nodes.push_back({n.position, n.position});
  s.traffic.fixed_pairs = {{src, dst}};
  s.traffic.start = 1.0;
  return s;
}

}  // namespace layouts
