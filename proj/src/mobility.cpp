#include "tdmp/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tdmp {

void MobilityParams::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("mobility.dt must be > 0");
  if (!(reaction_time > 0.0)) throw std::invalid_argument("mobility.reaction_time must be > 0");
  if (!(max_accel > 0.0) || !(max_decel > 0.0)) throw std::invalid_argument("acceleration bounds must be > 0");
  if (!(vehicle_length > 0.0)) throw std::invalid_argument("mobility.vehicle_length must be > 0");
  if (!(min_gap >= 0.0)) throw std::invalid_argument("mobility.min_gap must be >= 0");
  if (!(speed_cap > 0.0)) throw std::invalid_argument("mobility.speed_cap must be > 0");
}

double krauss_safe_speed(double v_lead, double v_follow, double gap, double reaction, double a_max) {
  const double vs = v_lead + (gap - v_lead * reaction) / ((v_lead + v_follow) / (2.0 * a_max) + reaction);
  return std::max(0.0, vs);
}

double stop_line_speed(double gap, double dt, double decel) {
  const double bt = decel * dt;
  return std::max(0.0, -bt + std::sqrt(bt * bt + 2.0 * decel * std::max(0.0, gap)));
}

MobilityState::MobilityState(const RoadNetwork& net, std::vector<Trip> trips, const MobilityParams& params)
    : pending_(std::move(trips)), trips_total_(pending_.size()) {
  params.validate();
  std::stable_sort(pending_.begin(), pending_.end(),
                   [](const Trip& a, const Trip& b) { return a.departure_time < b.departure_time; });
  for (const Trip& t : pending_) {
    if (t.route.empty()) throw std::invalid_argument("trip " + std::to_string(t.vehicle_id) + " has an empty route");
  }
  insert_departures(net, params);
}

const RoadVehicle* MobilityState::find(VehicleId id) const {
  auto it = std::lower_bound(vehicles_.begin(), vehicles_.end(), id,
                             [](const RoadVehicle& v, VehicleId x) { return v.id < x; });
  return (it != vehicles_.end() && it->id == id) ? &*it : nullptr;
}

Kinematics MobilityState::kinematics(const RoadNetwork& net, const RoadVehicle& v) const {
  const RoadEdge& e = net.edge(v.edge());
  const Point2 a = net.node(e.from).position;
  const Point2 b = net.node(e.to).position;
  const double f = v.offset / e.length;
  Kinematics k;
  k.position = a + f * (b - a);
  k.speed = v.speed;
  k.acceleration = v.acceleration;
  k.heading = normalize_heading(std::atan2(b.y - a.y, b.x - a.x));
  return k;
}

void MobilityState::insert_departures(const RoadNetwork& net, const MobilityParams& params) {
  std::vector<Trip> waiting;
  std::vector<EdgeId> blocked;  // keeps insertion FIFO per edge
  bool any = false;
  for (Trip& t : pending_) {
    const EdgeId first = t.route.front();
    bool ok = t.departure_time <= time_ &&
              std::find(blocked.begin(), blocked.end(), first) == blocked.end() &&
              !clearance_.contains(first);
    if (ok) {
      for (const RoadVehicle& other : vehicles_) {
        if (other.edge() == first && other.offset - params.vehicle_length < params.vehicle_length + params.min_gap) {
          ok = false;
          break;
        }
      }
    }
    if (!ok) {
      if (t.departure_time <= time_) blocked.push_back(first);
      waiting.push_back(std::move(t));
      continue;
    }
    RoadVehicle v;
    v.id = t.vehicle_id;
    v.route = std::move(t.route);
    v.offset = std::min(params.vehicle_length, net.edge(first).length);
    v.max_speed = std::min(t.max_speed, params.speed_cap);
    v.target = t.target;
    vehicles_.push_back(std::move(v));
    ++inserted_;
    any = true;
  }
  pending_ = std::move(waiting);
  if (any) {
    std::sort(vehicles_.begin(), vehicles_.end(),
              [](const RoadVehicle& a, const RoadVehicle& b) { return a.id < b.id; });
  }
}

std::optional<MobilityState::Constraint> MobilityState::beyond_junction(
    const RoadNetwork& net, const MobilityParams& params, const RoadVehicle& v,
    const std::map<EdgeId, std::vector<std::size_t>>& on_edge) const {
  const double remaining = net.edge(v.edge()).length - v.offset;
  const EdgeId next = v.route[v.route_pos + 1];
  if (auto it = on_edge.find(next); it != on_edge.end() && !it->second.empty()) {
    const RoadVehicle& tail = vehicles_[it->second.back()];
    return Constraint{remaining + tail.offset - params.vehicle_length - params.min_gap, tail.speed};
  }
  if (v.route_pos + 2 == v.route.size()) return std::nullopt;  // next edge ends at the sink
  return Constraint{remaining + net.edge(next).length, 0.0, true};
}

void MobilityState::advance(const RoadNetwork& net, const MobilityParams& params) {
  const double dt = params.dt;
  const double L = params.vehicle_length;

  std::map<EdgeId, std::vector<std::size_t>> on_edge;  // front-most first
  for (std::size_t i = 0; i < vehicles_.size(); ++i) on_edge[vehicles_[i].edge()].push_back(i);
  for (auto& [_, lane] : on_edge) {
    std::sort(lane.begin(), lane.end(), [&](std::size_t a, std::size_t b) {
      if (vehicles_[a].offset != vehicles_[b].offset) return vehicles_[a].offset > vehicles_[b].offset;
      return vehicles_[a].id < vehicles_[b].id;
    });
  }

  // Vehicles follow Krauss; stop lines use the exact one-step stopping
  // speed, which keeps braking within max_decel on approach.
  auto safe = [&](const Constraint& c, double v_follow) {
    if (c.stop_line) return stop_line_speed(c.gap, dt, params.max_decel);
    return krauss_safe_speed(c.v_lead, v_follow, std::max(0.0, c.gap), params.reaction_time, params.max_decel);
  };

  // Lanes are visited front-first so that a follower only asks for a
  // junction once every vehicle ahead of it has been granted one.
  std::vector<double> new_speed(vehicles_.size());
  for (const auto& [edge_id, lane] : on_edge) {
    const RoadEdge& e = net.edge(edge_id);
    bool ahead_cleared = true;
    for (std::size_t rank = 0; rank < lane.size(); ++rank) {
      RoadVehicle& v = vehicles_[lane[rank]];
      const double vmax = std::min({e.speed_limit, v.max_speed, params.speed_cap});
      double vn = std::min(vmax, v.speed + params.max_accel * dt);

      if (rank > 0) {
        const RoadVehicle& leader = vehicles_[lane[rank - 1]];
        vn = std::min(vn, safe(Constraint{leader.offset - L - v.offset - params.min_gap, leader.speed}, v.speed));
      }
      if (!v.on_last_edge()) {
        const double remaining = e.length - v.offset;
        const Constraint stop_line{remaining, 0.0, true};
        std::optional<Constraint> c = stop_line;
        if (v.cleared) {
          c = beyond_junction(net, params, v, on_edge);
        } else if (ahead_cleared) {
          const double reach = v.speed * v.speed / (2.0 * params.max_decel) +
                               v.speed * (dt + params.reaction_time) + 2.0 * (L + params.min_gap);
          const EdgeId next = v.route[v.route_pos + 1];
          if (remaining <= reach && !clearance_.contains(next)) {
            const auto beyond = beyond_junction(net, params, v, on_edge);
            const double through = beyond ? safe(*beyond, v.speed) : std::numeric_limits<double>::infinity();
            if (through >= safe(stop_line, v.speed)) {
              clearance_[next] = v.id;
              v.cleared = true;
              c = beyond;
            }
          }
        }
        if (c) vn = std::min(vn, safe(*c, v.speed));
        ahead_cleared = ahead_cleared && v.cleared;
      }
      new_speed[lane[rank]] = std::max(0.0, vn);
    }
  }

  const double t_next = time_ + dt;
  std::vector<RoadVehicle> kept;
  kept.reserve(vehicles_.size());
  for (std::size_t i = 0; i < vehicles_.size(); ++i) {
    RoadVehicle& v = vehicles_[i];
    const double vn = new_speed[i];
    v.acceleration = std::clamp((vn - v.speed) / dt, -params.max_decel, params.max_accel);
    v.speed = vn;
    v.offset += vn * dt;
    bool arrived = false;
    for (;;) {
      const double len = net.edge(v.edge()).length;
      if (v.on_last_edge()) {
        arrived = v.offset >= len;
        break;
      }
      if (v.offset <= len) break;
      if (!v.cleared) {
        v.offset = len;
        break;
      }
      clearance_.erase(v.route[v.route_pos + 1]);
      v.cleared = false;
      v.offset -= len;
      ++v.route_pos;
    }
    if (arrived) {
      arrivals_.push_back({v.id, t_next});
    } else {
      kept.push_back(std::move(v));
    }
  }
  vehicles_ = std::move(kept);
  time_ = t_next;
  insert_departures(net, params);
}

MobilityState step(MobilityState state, const RoadNetwork& net, const MobilityParams& params) {
  state.advance(net, params);
  return state;
}

}  // namespace tdmp
