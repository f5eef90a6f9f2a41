#pragma once

// Discrete-event coupling of traffic, beaconing and hop-by-hop forwarding.
// A run is a pure function of (scenario, seed).

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "tdmp/forwarding.hpp"
#include "tdmp/metrics.hpp"
#include "tdmp/mobility.hpp"
#include "tdmp/neighbor_table.hpp"
#include "tdmp/packet.hpp"
#include "tdmp/radio.hpp"
#include "tdmp/rng.hpp"
#include "tdmp/road_network.hpp"

namespace tdmp {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A node that never moves, used for hand-built layouts. Static nodes take
/// ids 0..n-1 in declaration order.
struct StaticNode {
  Point2 position;
  Point2 target;
};

struct TrafficPattern {
  double rate_pps = 1.0;   // send ticks per second
  double start = 1.0;      // s, first tick
  std::optional<double> end;  // s, exclusive; defaults to the run length
  /// When non-empty, every tick sends one packet per pair instead of one
  /// packet between a random pair of live vehicles.
  std::vector<std::pair<VehicleId, VehicleId>> fixed_pairs;
};

/// What happens when the selected relay cannot receive the transmission.
enum class LinkFailure {
  Drop,   // the packet is lost (counted with local-maximum drops)
  Retry,  // the holder forgets the relay and decides again one hop delay later
};

struct Scenario {
  std::string name = "grid";
  RoadNetwork network;
  ODMatrix od;
  TripOptions trip_options;
  std::vector<StaticNode> static_nodes;  // when non-empty, replaces road traffic

  double sim_time = 400.0;
  MobilityParams mobility;
  RadioConfig radio;
  RoutingParams routing;
  Protocol protocol = Protocol::Tdmp;

  double beacon_interval = 1.0;
  /// Phase of the beacon rounds within each interval.
  double beacon_offset = 0.5;
  std::size_t rssi_window = 5;
  double neighbor_ttl = 3.0;  // s; three beacon intervals

  TrafficPattern traffic;
  LinkFailure link_failure = LinkFailure::Drop;

  /// Throws ConfigError.
  void validate() const;
};

enum class EventKind { MobilityStep, BeaconRound, PacketSend, PacketArriveAtHop };
std::string to_string(EventKind k);

struct Event {
  double time = 0.0;
  std::uint64_t sequence = 0;
  EventKind kind = EventKind::MobilityStep;
  std::size_t packet_slot = 0;  // PacketArriveAtHop
  VehicleId holder = 0;         // PacketArriveAtHop

  bool operator>(const Event& o) const {
    return time != o.time ? time > o.time : sequence > o.sequence;
  }
};

struct Snapshot {
  double time = 0.0;
  std::vector<std::pair<VehicleId, Point2>> positions;  // ordered by id
  std::vector<std::vector<std::size_t>> adjacency;      // indices into positions, ascending
};

/// Positions are connected iff can_receive over their distance.
Snapshot make_snapshot(double time, std::vector<std::pair<VehicleId, Point2>> positions,
                       const RadioConfig& radio);

struct RunResult {
  MetricsRecord metrics;
  std::size_t trips_total = 0;
  std::size_t vehicles_inserted = 0;
  std::size_t vehicles_arrived = 0;
  std::uint64_t events_processed = 0;
};

class Simulation {
 public:
  /// Validates the scenario; throws ConfigError.
  Simulation(Scenario scenario, std::uint64_t seed);

  /// Tab-separated event log: time, kind, ids, x, y.
  void set_event_log(std::ostream* out) { log_ = out; }

  /// Processes every event with time <= t (capped at the run length).
  void advance_to(double t);
  /// Runs to the end, counts packets still in flight, and returns metrics.
  RunResult finish();

  double now() const { return now_; }
  double end_time() const { return scenario_.sim_time; }
  Snapshot freeze_snapshot() const;

  const MobilityState& mobility() const { return mobility_; }
  const Scenario& scenario() const { return scenario_; }
  const MetricsRecord& metrics() const { return metrics_; }
  const NeighborTable* table_of(VehicleId id) const;

  /// Ids of live vehicles (static nodes, or inserted and not yet arrived).
  std::vector<VehicleId> live_ids() const;
  std::optional<Kinematics> kinematics_of(VehicleId id) const;

 private:
  struct InFlight {
    DataPacket packet;
    bool active = false;
  };

  void schedule(double time, EventKind kind, std::size_t slot = 0, VehicleId holder = 0);
  void handle(const Event& e);
  void on_mobility_step();
  void on_beacon_round();
  void on_packet_send();
  void send_packet(VehicleId src, VehicleId dst);
  void on_hop(std::size_t slot, VehicleId holder);
  void retire(std::size_t slot);
  Point2 target_of(VehicleId id) const;
  void log_line(const std::string& kind, const std::string& ids, std::optional<Point2> pos);

  Scenario scenario_;
  std::uint64_t seed_;
  Rng traffic_rng_;
  Rng loss_rng_;
  MobilityState mobility_;
  std::map<VehicleId, NeighborTable> tables_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
  std::uint64_t next_sequence_ = 0;
  double now_ = 0.0;
  std::uint64_t events_processed_ = 0;
  std::vector<InFlight> packets_;
  std::uint64_t next_packet_id_ = 0;
  MetricsRecord metrics_;
  std::ostream* log_ = nullptr;
  bool finished_ = false;
};

/// Convenience wrapper: Simulation(scenario, seed).finish().
RunResult run(const Scenario& scenario, std::uint64_t seed, std::ostream* event_log = nullptr);

struct StaticRoute {
  bool delivered = false;
  std::vector<VehicleId> path;  // holders visited, source first
  std::optional<HopAction> drop;
  PacketMode final_mode = PacketMode::Greedy;
  bool entered_perimeter = false;
};

/// Routes one packet on a frozen topology with fresh, exact neighbour tables
/// (every node stationary at its snapshot position).
StaticRoute route_on_snapshot(const Snapshot& snap, VehicleId source, VehicleId destination,
                              Protocol protocol, const RoutingParams& params, const RadioConfig& radio);

}  // namespace tdmp
