#include "tdmp/forwarding.hpp"

#include <stdexcept>

namespace tdmp {

std::string to_string(Protocol p) {
  switch (p) {
    case Protocol::Tdmp: return "tdmp";
    case Protocol::Gpsr: return "gpsr";
    case Protocol::Ablation: return "ablation";
  }
  return "unknown";
}

Pfg build_pfg(const NeighborTable& table, const Kinematics& self_kin, Point2 dest,
              const RoutingParams& params) {
  Pfg pfg;
  if (table.empty()) return pfg;
  const double threshold = params.rssi_gate * table.max_rssi();
  const Point2 self_pred = predict_position(self_kin, params.horizon);
  const double self_to_dest = distance(self_pred, dest);
  for (const auto& [id, entry] : table.entries()) {
    const double avg = entry.mean_rssi();
    if (avg < threshold) continue;
    const Kinematics pred = predict_kinematics(entry.last_beacon.kinematics, params.horizon);
    if (distance(pred.position, self_pred) > params.range_limit) continue;
    if (!(distance(pred.position, dest) < self_to_dest)) continue;
    pfg.push_back({id, pred, entry.last_beacon.target, avg});
  }
  return pfg;
}

std::vector<double> tdmp_scores(const Pfg& pfg, const Kinematics& self_kin, Point2 dest,
                                Point2 dest_target, const WeightFactors& factors, double horizon) {
  std::vector<double> scores;
  if (pfg.empty()) return scores;
  const double d_sd = distance(predict_position(self_kin, horizon), dest);
  scores.reserve(pfg.size());
  for (const PfgMember& m : pfg) {
    const double d_id = distance(m.predicted.position, dest);
    scores.push_back(neighbor_weight(factors, d_sd, d_id, velocity_cosine(m.predicted, dest),
                                     target_cosine(m.predicted.position, m.target, dest_target)));
  }
  return scores;
}

std::optional<VehicleId> tdmp_select(const Pfg& pfg, const Kinematics& self_kin, Point2 dest,
                                     Point2 dest_target, const WeightFactors& factors,
                                     double horizon) {
  if (pfg.empty()) return std::nullopt;
  const auto scores = tdmp_scores(pfg, self_kin, dest, dest_target, factors, horizon);
  std::size_t best = 0;
  for (std::size_t i = 1; i < pfg.size(); ++i) {
    if (scores[i] > scores[best] || (scores[i] == scores[best] && pfg[i].id < pfg[best].id)) best = i;
  }
  return pfg[best].id;
}

std::optional<VehicleId> gpsr_select(const NeighborTable& table, Point2 self_pos, Point2 dest) {
  std::optional<VehicleId> best;
  double best_dist = distance(self_pos, dest);
  for (const auto& [id, entry] : table.entries()) {
    const double d = distance(entry.last_beacon.kinematics.position, dest);
    if (d < best_dist) {  // id order makes the first of equals win
      best_dist = d;
      best = id;
    }
  }
  return best;
}

WeightFactors ablation_factors(const WeightFactors& factors) {
  return WeightFactors::normalized(factors.p, factors.q1, 0.0);
}

std::optional<VehicleId> ablation_select(const Pfg& pfg, const Kinematics& self_kin, Point2 dest,
                                         Point2 dest_target, const WeightFactors& factors,
                                         double horizon) {
  return tdmp_select(pfg, self_kin, dest, dest_target, ablation_factors(factors), horizon);
}

HopDecision decide_next_hop(Protocol protocol, const RoutingParams& params, const SelfView& self,
                            const NeighborTable& table, DataPacket& packet) {
  if (packet.hop_count >= params.hop_limit) return {HopAction::DropHopLimit, 0};

  const bool predictive = protocol != Protocol::Gpsr;
  const Point2 self_pos =
      predictive ? predict_position(self.kinematics, params.horizon) : self.kinematics.position;
  const Point2 dest = packet.destination_pos;

  auto forward = [&](VehicleId next) {
    packet.previous_hop = PreviousHop{self.id, self_pos};
    return HopDecision{HopAction::Forward, next};
  };

  if (table.contains(packet.destination_id)) {
    if (packet.mode == PacketMode::Perimeter && packet.perimeter_entry &&
        distance(self_pos, dest) < distance(packet.perimeter_entry->entry_point, dest)) {
      packet.mode = PacketMode::Greedy;
      packet.perimeter_entry.reset();
    }
    return forward(packet.destination_id);
  }

  auto greedy = [&]() -> std::optional<VehicleId> {
    if (!predictive) return gpsr_select(table, self.kinematics.position, dest);
    const Pfg pfg = build_pfg(table, self.kinematics, dest, params);
    if (protocol == Protocol::Tdmp) {
      return tdmp_select(pfg, self.kinematics, dest, packet.destination_target, params.factors, params.horizon);
    }
    return ablation_select(pfg, self.kinematics, dest, packet.destination_target, params.factors, params.horizon);
  };

  // Recovery runs over every neighbour believed in range; no RSSI gate.
  std::vector<PlanarNode> candidates;
  for (const auto& [id, entry] : table.entries()) {
    if (predictive) {
      const Point2 p = predict_position(entry.last_beacon.kinematics, params.horizon);
      if (distance(p, self_pos) <= params.range_limit) candidates.push_back({id, p});
    } else {
      candidates.push_back({id, entry.last_beacon.kinematics.position});
    }
  }
  const PlanarNode me{self.id, self_pos};

  // nullopt when the packet leaves perimeter mode at this node.
  auto perimeter_step = [&]() -> std::optional<HopDecision> {
    const auto planar = planarize_rng(candidates, me);
    const PerimeterStep step = perimeter_next_hop(packet, planar, me);
    switch (step.verdict) {
      case PerimeterVerdict::Forward: return forward(step.next);
      case PerimeterVerdict::Drop: return HopDecision{HopAction::DropPerimeter, 0};
      case PerimeterVerdict::ReturnToGreedy: break;
    }
    return std::nullopt;
  };

  if (packet.mode == PacketMode::Perimeter) {
    if (auto d = perimeter_step()) return *d;
  }
  if (auto next = greedy()) return forward(*next);
  if (candidates.empty()) return {HopAction::DropLocalMax, 0};
  enter_perimeter(packet, self_pos);
  // Cannot return to greedy here: self is the entry point.
  return perimeter_step().value_or(HopDecision{HopAction::DropPerimeter, 0});
}

}  // namespace tdmp
