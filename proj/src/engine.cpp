#include "tdmp/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace tdmp {

namespace {

// Received power is evaluated no closer than this; two vehicles can share a
// junction point.
constexpr double kMinRadioDistance = 1.0;

}  // namespace

std::string to_string(EventKind k) {
  switch (k) {
    case EventKind::MobilityStep: return "MobilityStep";
    case EventKind::BeaconRound: return "BeaconRound";
    case EventKind::PacketSend: return "PacketSend";
    case EventKind::PacketArriveAtHop: return "PacketArriveAtHop";
  }
  return "Unknown";
}

void Scenario::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (!(sim_time > 0.0)) fail("sim.time must be > 0");
  if (!(beacon_interval > 0.0)) fail("beacon.interval_s must be > 0");
  if (!(beacon_offset >= 0.0 && beacon_offset < beacon_interval)) fail("beacon.offset_s must be in [0, interval)");
  if (!(neighbor_ttl > 0.0)) fail("routing.neighbor_ttl_s must be > 0");
  if (rssi_window < 1) fail("routing.rssi_window must be >= 1");
  if (!(routing.horizon >= 0.0)) fail("routing.horizon_s must be >= 0");
  if (!(routing.rssi_gate >= 0.0 && routing.rssi_gate <= 1.0)) fail("routing.rssi_gate must be in [0, 1]");
  if (!(routing.range_limit > 0.0)) fail("routing range must be > 0");
  if (routing.hop_limit < 1) fail("routing.hop_limit must be >= 1");
  if (!routing.factors.is_valid()) fail("tdmp factors violate p + q1 + q2 = 1 with each >= 0");
  if (!(traffic.rate_pps > 0.0)) fail("traffic.rate_pps must be > 0");
  if (!(traffic.start >= 0.0)) fail("traffic.start_s must be >= 0");
  try {
    radio.validate();
    mobility.validate();
  } catch (const std::exception& e) {
    fail(e.what());
  }
  if (static_nodes.empty()) {
    if (network.num_nodes() == 0) fail("scenario has neither a road network nor static nodes");
  } else {
    for (const auto& [s, d] : traffic.fixed_pairs) {
      if (s >= static_nodes.size() || d >= static_nodes.size()) fail("traffic.pairs references an unknown node");
    }
  }
  for (const auto& [s, d] : traffic.fixed_pairs) {
    if (s == d) fail("traffic.pairs entry with source == destination");
  }
}

Snapshot make_snapshot(double time, std::vector<std::pair<VehicleId, Point2>> positions,
                       const RadioConfig& radio) {
  std::sort(positions.begin(), positions.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  Snapshot s;
  s.time = time;
  s.positions = std::move(positions);
  const std::size_t n = s.positions.size();
  s.adjacency.assign(n, {});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && can_receive(radio, distance(s.positions[i].second, s.positions[j].second)))
        s.adjacency[i].push_back(j);
  return s;
}

Simulation::Simulation(Scenario scenario, std::uint64_t seed)
    : scenario_(std::move(scenario)),
      seed_(seed),
      traffic_rng_(Rng::stream(seed, 2)),
      loss_rng_(Rng::stream(seed, 3)) {
  scenario_.validate();
  scenario_.routing.range_limit = scenario_.radio.range_limit_m;
  if (scenario_.static_nodes.empty()) {
    mobility_ = MobilityState(scenario_.network,
                              generate_trips(scenario_.network, scenario_.od, seed_, scenario_.trip_options),
                              scenario_.mobility);
    schedule(scenario_.mobility.dt, EventKind::MobilityStep);
  }
  schedule(scenario_.beacon_offset, EventKind::BeaconRound);
  schedule(scenario_.traffic.start, EventKind::PacketSend);
}

void Simulation::schedule(double time, EventKind kind, std::size_t slot, VehicleId holder) {
  if (time > scenario_.sim_time) return;
  queue_.push(Event{time, next_sequence_++, kind, slot, holder});
}

void Simulation::advance_to(double t) {
  const double until = std::min(t, scenario_.sim_time);
  while (!queue_.empty() && queue_.top().time <= until) {
    const Event e = queue_.top();
    queue_.pop();
    now_ = e.time;
    ++events_processed_;
    handle(e);
  }
  now_ = std::max(now_, until);
}

RunResult Simulation::finish() {
  if (!finished_) {
    advance_to(scenario_.sim_time);
    for (const auto& p : packets_)
      if (p.active) ++metrics_.inflight;
    finished_ = true;
  }
  RunResult r;
  r.metrics = metrics_;
  r.trips_total = mobility_.trips_total();
  r.vehicles_inserted = mobility_.inserted();
  r.vehicles_arrived = mobility_.arrivals().size();
  r.events_processed = events_processed_;
  return r;
}

void Simulation::handle(const Event& e) {
  switch (e.kind) {
    case EventKind::MobilityStep: on_mobility_step(); break;
    case EventKind::BeaconRound: on_beacon_round(); break;
    case EventKind::PacketSend: on_packet_send(); break;
    case EventKind::PacketArriveAtHop: on_hop(e.packet_slot, e.holder); break;
  }
}

std::vector<VehicleId> Simulation::live_ids() const {
  std::vector<VehicleId> ids;
  if (!scenario_.static_nodes.empty()) {
    for (std::size_t i = 0; i < scenario_.static_nodes.size(); ++i) ids.push_back(static_cast<VehicleId>(i));
  } else {
    for (const auto& v : mobility_.vehicles()) ids.push_back(v.id);
  }
  return ids;
}

std::optional<Kinematics> Simulation::kinematics_of(VehicleId id) const {
  if (!scenario_.static_nodes.empty()) {
    if (id >= scenario_.static_nodes.size()) return std::nullopt;
    Kinematics k;
    k.position = scenario_.static_nodes[id].position;
    return k;
  }
  const RoadVehicle* v = mobility_.find(id);
  if (v == nullptr) return std::nullopt;
  return mobility_.kinematics(scenario_.network, *v);
}

Point2 Simulation::target_of(VehicleId id) const {
  if (!scenario_.static_nodes.empty()) return scenario_.static_nodes.at(id).target;
  const RoadVehicle* v = mobility_.find(id);
  return v != nullptr ? v->target : Point2{};
}

const NeighborTable* Simulation::table_of(VehicleId id) const {
  auto it = tables_.find(id);
  return it == tables_.end() ? nullptr : &it->second;
}

Snapshot Simulation::freeze_snapshot() const {
  std::vector<std::pair<VehicleId, Point2>> pos;
  for (VehicleId id : live_ids()) pos.emplace_back(id, kinematics_of(id)->position);
  return make_snapshot(now_, std::move(pos), scenario_.radio);
}

void Simulation::log_line(const std::string& kind, const std::string& ids, std::optional<Point2> pos) {
  if (log_ == nullptr) return;
  char buf[160];
  if (pos) {
    std::snprintf(buf, sizeof buf, "%.6f\t%s\t%s\t%.3f\t%.3f\n", now_, kind.c_str(), ids.c_str(), pos->x, pos->y);
  } else {
    std::snprintf(buf, sizeof buf, "%.6f\t%s\t%s\t\t\n", now_, kind.c_str(), ids.c_str());
  }
  *log_ << buf;
}

void Simulation::on_mobility_step() {
  mobility_.advance(scenario_.network, scenario_.mobility);
  std::erase_if(tables_, [&](const auto& kv) { return mobility_.find(kv.first) == nullptr; });
  log_line("MobilityStep", "n=" + std::to_string(mobility_.vehicles().size()), std::nullopt);
  const auto steps = static_cast<std::uint64_t>(std::llround(now_ / scenario_.mobility.dt));
  schedule(static_cast<double>(steps + 1) * scenario_.mobility.dt, EventKind::MobilityStep);
}

void Simulation::on_beacon_round() {
  const auto ids = live_ids();
  std::vector<Kinematics> kin;
  kin.reserve(ids.size());
  for (VehicleId id : ids) kin.push_back(*kinematics_of(id));
  for (VehicleId id : ids) tables_.try_emplace(id, scenario_.rssi_window).first->second.purge_stale(now_, scenario_.neighbor_ttl);

  const double p_loss = scenario_.radio.drop_probability;
  for (std::size_t s = 0; s < ids.size(); ++s) {
    const Beacon b{ids[s], now_, kin[s], target_of(ids[s])};
    for (std::size_t r = 0; r < ids.size(); ++r) {
      if (r == s) continue;
      const double d = distance(kin[s].position, kin[r].position);
      if (!can_receive(scenario_.radio, d)) continue;
      if (p_loss > 0.0 && loss_rng_.uniform01() < p_loss) continue;
      tables_.at(ids[r]).on_beacon(b, received_power(scenario_.radio, std::max(d, kMinRadioDistance)), now_);
    }
  }
  log_line("BeaconRound", "n=" + std::to_string(ids.size()), std::nullopt);
  const auto rounds = static_cast<std::uint64_t>(
      std::llround((now_ - scenario_.beacon_offset) / scenario_.beacon_interval));
  schedule(scenario_.beacon_offset + static_cast<double>(rounds + 1) * scenario_.beacon_interval,
           EventKind::BeaconRound);
}

void Simulation::on_packet_send() {
  const double end = scenario_.traffic.end.value_or(scenario_.sim_time);
  if (now_ < end) {
    const auto ids = live_ids();
    if (!scenario_.traffic.fixed_pairs.empty()) {
      for (const auto& [s, d] : scenario_.traffic.fixed_pairs) {
        if (kinematics_of(s) && kinematics_of(d)) send_packet(s, d);
      }
    } else if (ids.size() >= 2) {
      const auto si = traffic_rng_.below(ids.size());
      auto di = traffic_rng_.below(ids.size() - 1);
      if (di >= si) ++di;
      send_packet(ids[si], ids[di]);
    }
  }
  const double period = 1.0 / scenario_.traffic.rate_pps;
  const auto ticks = static_cast<std::uint64_t>(std::llround((now_ - scenario_.traffic.start) / period));
  const double next = scenario_.traffic.start + static_cast<double>(ticks + 1) * period;
  if (next < end) schedule(next, EventKind::PacketSend);
}

void Simulation::send_packet(VehicleId src, VehicleId dst) {
  ++metrics_.n_generated;
  DataPacket p;
  p.packet_id = next_packet_id_++;
  p.source_id = src;
  p.destination_id = dst;
  p.destination_pos = kinematics_of(dst)->position;
  p.destination_target = target_of(dst);
  p.created_at = now_;
  const std::size_t slot = packets_.size();
  packets_.push_back({p, true});
  log_line("PacketSend", "p" + std::to_string(p.packet_id) + ":" + std::to_string(src) + ">" + std::to_string(dst),
           kinematics_of(src)->position);
  on_hop(slot, src);
}

void Simulation::retire(std::size_t slot) { packets_[slot].active = false; }

void Simulation::on_hop(std::size_t slot, VehicleId holder) {
  DataPacket& pkt = packets_[slot].packet;
  const std::string pid = "p" + std::to_string(pkt.packet_id);

  if (holder == pkt.destination_id) {
    metrics_.record_delivery(now_ - pkt.created_at, pkt.hop_count);
    log_line("Deliver", pid + ":" + std::to_string(holder) + " hops=" + std::to_string(pkt.hop_count),
             kinematics_of(holder).value_or(Kinematics{}).position);
    retire(slot);
    return;
  }

  const auto self_kin = kinematics_of(holder);
  if (!self_kin) {
    // The holder left the road network with the packet.
    ++metrics_.drop_localmax;
    log_line("Drop", pid + ":" + std::to_string(holder) + " cause=departed", std::nullopt);
    retire(slot);
    return;
  }

  NeighborTable& table = tables_.try_emplace(holder, scenario_.rssi_window).first->second;
  table.purge_stale(now_, scenario_.neighbor_ttl);

  const DataPacket before = pkt;
  const HopDecision d = decide_next_hop(scenario_.protocol, scenario_.routing, SelfView{holder, *self_kin}, table, pkt);
  const double delay = hop_transmission_delay(scenario_.radio);

  switch (d.action) {
    case HopAction::Forward: {
      const auto next_kin = kinematics_of(d.next);
      const double dist = next_kin ? distance(self_kin->position, next_kin->position) : 0.0;
      bool ok = next_kin.has_value() && can_receive(scenario_.radio, dist);
      if (ok && scenario_.radio.drop_probability > 0.0 && loss_rng_.uniform01() < scenario_.radio.drop_probability) {
        ok = false;
      }
      if (ok) {
        ++pkt.hop_count;
        if (auto it = tables_.find(d.next); it != tables_.end()) {
          it->second.record_rssi(holder, received_power(scenario_.radio, std::max(dist, kMinRadioDistance)), now_);
        }
        log_line("Hop", pid + ":" + std::to_string(holder) + ">" + std::to_string(d.next) +
                            (pkt.mode == PacketMode::Perimeter ? " perimeter" : " greedy"),
                 self_kin->position);
        schedule(now_ + delay, EventKind::PacketArriveAtHop, slot, d.next);
      } else if (scenario_.link_failure == LinkFailure::Drop) {
        // The chosen relay is no longer reachable and the packet is lost.
        ++metrics_.drop_localmax;
        log_line("Drop", pid + ":" + std::to_string(holder) + ">" + std::to_string(d.next) + " cause=link",
                 self_kin->position);
        retire(slot);
      } else {
        // Unacknowledged unicast: forget the neighbour and decide again.
        pkt = before;
        table.erase(d.next);
        log_line("LinkFail", pid + ":" + std::to_string(holder) + ">" + std::to_string(d.next), self_kin->position);
        schedule(now_ + delay, EventKind::PacketArriveAtHop, slot, holder);
      }
      return;
    }
    case HopAction::DropLocalMax: ++metrics_.drop_localmax; break;
    case HopAction::DropPerimeter: ++metrics_.drop_perimeter; break;
    case HopAction::DropHopLimit: ++metrics_.drop_hoplimit; break;
  }
  static const char* causes[] = {"forward", "localmax", "perimeter", "hoplimit"};
  log_line("Drop", pid + ":" + std::to_string(holder) + " cause=" + causes[static_cast<int>(d.action)],
           self_kin->position);
  retire(slot);
}

RunResult run(const Scenario& scenario, std::uint64_t seed, std::ostream* event_log) {
  Simulation sim(scenario, seed);
  sim.set_event_log(event_log);
  return sim.finish();
}

StaticRoute route_on_snapshot(const Snapshot& snap, VehicleId source, VehicleId destination,
                              Protocol protocol, const RoutingParams& params, const RadioConfig& radio) {
  const std::size_t n = snap.positions.size();
  std::map<VehicleId, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index[snap.positions[i].first] = i;
  if (!index.contains(source) || !index.contains(destination)) {
    throw std::invalid_argument("route_on_snapshot: unknown endpoint");
  }

  std::vector<NeighborTable> tables(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j : snap.adjacency[i]) {
      Beacon b;
      b.sender_id = snap.positions[j].first;
      b.timestamp = snap.time;
      b.kinematics.position = snap.positions[j].second;
      b.target = snap.positions[j].second;
      const double d = distance(snap.positions[i].second, snap.positions[j].second);
      tables[i].on_beacon(b, received_power(radio, std::max(d, kMinRadioDistance)), snap.time);
    }
  }

  RoutingParams rp = params;
  rp.range_limit = radio.range_limit_m;
  DataPacket pkt;
  pkt.source_id = source;
  pkt.destination_id = destination;
  pkt.destination_pos = snap.positions[index[destination]].second;
  pkt.destination_target = pkt.destination_pos;

  StaticRoute out;
  VehicleId holder = source;
  out.path.push_back(holder);
  for (;;) {
    if (holder == destination) {
      out.delivered = true;
      break;
    }
    const std::size_t hi = index[holder];
    SelfView self{holder, Kinematics{snap.positions[hi].second, 0.0, 0.0, 0.0}};
    const HopDecision d = decide_next_hop(protocol, rp, self, tables[hi], pkt);
    if (pkt.mode == PacketMode::Perimeter) out.entered_perimeter = true;
    if (d.action != HopAction::Forward) {
      out.drop = d.action;
      break;
    }
    ++pkt.hop_count;
    holder = d.next;
    out.path.push_back(holder);
  }
  out.final_mode = pkt.mode;
  return out;
}

}  // namespace tdmp
