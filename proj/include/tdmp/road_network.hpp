#pragma once

// Directed road graph, origin/destination demand and trip generation.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tdmp/geokin.hpp"
#include "tdmp/radio.hpp"

namespace tdmp {

using NodeId = std::int64_t;
using EdgeId = std::int64_t;

struct RoadNode {
  NodeId id = 0;
  Point2 position;
};

struct RoadEdge {
  EdgeId id = 0;
  NodeId from = 0;
  NodeId to = 0;
  double length = 0.0;       // m
  double speed_limit = 0.0;  // m/s
  int lane_count = 1;
  double weight = 0.0;       // routing cost; the length unless overridden
};

enum class NetErrc { InvalidDimension, UnknownNode, DuplicateId, BadEdge, Unreachable, Parse, InvalidDemand };

class NetworkError : public std::runtime_error {
 public:
  NetworkError(NetErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  NetErrc code() const noexcept { return code_; }

 private:
  NetErrc code_;
};

class RoadNetwork {
 public:
  void add_node(NodeId id, Point2 position);
  /// Length is the straight-line distance between the endpoints.
  void add_edge(EdgeId id, NodeId from, NodeId to, double speed_limit, int lane_count = 1);

  const std::vector<RoadNode>& nodes() const { return nodes_; }
  const std::vector<RoadEdge>& edges() const { return edges_; }

  bool has_node(NodeId id) const { return node_index_.contains(id); }
  const RoadNode& node(NodeId id) const;
  const RoadEdge& edge(EdgeId id) const;
  /// Edge ids leaving `id`, in insertion order.
  const std::vector<EdgeId>& out_edges(NodeId id) const;
  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  void set_edge_weight(EdgeId id, double weight);

  /// Axis-aligned bounding box extent (width, height).
  std::pair<double, double> extent() const;

 private:
  std::vector<RoadNode> nodes_;
  std::vector<RoadEdge> edges_;
  std::unordered_map<NodeId, std::size_t> node_index_;
  std::unordered_map<EdgeId, std::size_t> edge_index_;
  std::unordered_map<NodeId, std::vector<EdgeId>> out_;
};

/// Bidirectional Manhattan grid of blocks_x x blocks_y square blocks. Node id
/// j*(blocks_x+1)+i sits at (i*block_len, j*block_len).
RoadNetwork build_grid(int blocks_x, int blocks_y, double block_len, double speed_limit);

/// Parses `node <id> <x> <y>` / `edge <id> <from> <to> <speed_limit> <lanes>`.
RoadNetwork parse_network(const std::string& text);
RoadNetwork load_network(const std::string& path);

struct ODMatrix {
  std::map<std::pair<NodeId, NodeId>, std::int64_t> entries;
  double period = 400.0;  // s

  std::int64_t total() const;
  /// Largest-remainder rescaling so that total() == target.
  ODMatrix scaled_to(std::int64_t target) const;
};

/// `period <s>` header plus `od <origin> <destination> <count>` lines.
ODMatrix parse_od(const std::string& text);
ODMatrix load_od(const std::string& path);

/// One unit of demand for every ordered pair of distinct nodes.
ODMatrix uniform_od(const RoadNetwork& net, double period);

struct Trip {
  VehicleId vehicle_id = 0;
  double departure_time = 0.0;
  NodeId origin = 0;
  NodeId destination = 0;
  std::vector<EdgeId> route;
  Point2 target;
  double max_speed = 0.0;  // vehicle-type maximum, m/s
};

/// Minimum-weight route (Dijkstra). Ties are broken by taking, at every
/// junction, the outgoing edge whose head has the smallest node id among
/// those on some optimal path. Empty when origin == destination.
std::vector<EdgeId> shortest_route(const RoadNetwork& net, NodeId origin, NodeId destination);

double route_length(const RoadNetwork& net, const std::vector<EdgeId>& route);

struct TripOptions {
  double min_vehicle_speed = 13.3;  // m/s
  double max_vehicle_speed = 31.1;  // m/s
};

/// One trip per unit of demand, departures uniform on [0, od.period].
/// Vehicle ids are assigned in departure order.
std::vector<Trip> generate_trips(const RoadNetwork& net, const ODMatrix& od, std::uint64_t seed,
                                 const TripOptions& options = {});

}  // namespace tdmp
