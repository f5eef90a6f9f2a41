#pragma once

// Microscopic traffic: Krauss car-following on single-lane edges, first-order
// Euler position updates, and a one-holder-per-edge junction clearance so that
// vehicles merging from different approaches never collide.

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "tdmp/geokin.hpp"
#include "tdmp/road_network.hpp"

namespace tdmp {

struct MobilityParams {
  double dt = 1.0;               // s
  double reaction_time = 1.0;    // s, Krauss t_r
  double max_accel = 4.5;        // m/s^2
  double max_decel = 2.6;        // m/s^2
  double vehicle_length = 5.0;   // m
  double min_gap = 2.5;          // m, standstill spacing kept by the follower
  double speed_cap = 31.1;       // m/s, absolute vehicle maximum

  void validate() const;
};

/// Krauss safe speed, floored at zero.
double krauss_safe_speed(double v_lead, double v_follow, double gap, double reaction, double a_max);

/// Largest speed that, held for one step of dt and followed by braking at
/// `decel`, still halts within `gap`.
double stop_line_speed(double gap, double dt, double decel);

struct RoadVehicle {
  VehicleId id = 0;
  std::vector<EdgeId> route;
  std::size_t route_pos = 0;  // index of the current edge
  double offset = 0.0;        // front bumper, m from the edge start
  double speed = 0.0;
  double acceleration = 0.0;  // realized over the last step, clamped to the bounds
  double max_speed = 0.0;
  Point2 target;
  bool cleared = false;  // holds the clearance into route[route_pos + 1]

  EdgeId edge() const { return route[route_pos]; }
  bool on_last_edge() const { return route_pos + 1 == route.size(); }
};

struct Arrival {
  VehicleId id = 0;
  double time = 0.0;
};

class MobilityState {
 public:
  MobilityState() = default;
  /// Queues the trips and inserts every departure due at t = 0.
  MobilityState(const RoadNetwork& net, std::vector<Trip> trips, const MobilityParams& params);

  double time() const { return time_; }
  /// Active vehicles, ordered by id.
  const std::vector<RoadVehicle>& vehicles() const { return vehicles_; }
  const RoadVehicle* find(VehicleId id) const;
  const std::vector<Arrival>& arrivals() const { return arrivals_; }

  std::size_t trips_total() const { return trips_total_; }
  std::size_t inserted() const { return inserted_; }
  std::size_t pending() const { return pending_.size(); }

  Kinematics kinematics(const RoadNetwork& net, const RoadVehicle& v) const;

  /// Advances one Euler step of length dt.
  void advance(const RoadNetwork& net, const MobilityParams& params);

 private:
  struct Constraint {
    double gap;
    double v_lead;
    bool stop_line = false;  // fixed point to halt at rather than a vehicle
  };

  void insert_departures(const RoadNetwork& net, const MobilityParams& params);
  std::optional<Constraint> beyond_junction(const RoadNetwork& net, const MobilityParams& params,
                                            const RoadVehicle& v,
                                            const std::map<EdgeId, std::vector<std::size_t>>& on_edge) const;

  double time_ = 0.0;
  std::vector<RoadVehicle> vehicles_;
  std::vector<Trip> pending_;  // departure order
  std::vector<Arrival> arrivals_;
  std::map<EdgeId, VehicleId> clearance_;  // target edge -> holder
  std::size_t trips_total_ = 0;
  std::size_t inserted_ = 0;
};

/// Value form of MobilityState::advance.
MobilityState step(MobilityState state, const RoadNetwork& net, const MobilityParams& params);

}  // namespace tdmp
