#pragma once

// Next-hop selection: the target-driven predictive scheme, plain GPSR greedy
// forwarding, and the prediction-only ablation, plus the per-hop decision
// procedure that combines greedy selection with perimeter recovery.

#include <optional>
#include <string>
#include <vector>

#include "tdmp/geokin.hpp"
#include "tdmp/neighbor_table.hpp"
#include "tdmp/packet.hpp"
#include "tdmp/perimeter.hpp"

namespace tdmp {

enum class Protocol { Tdmp, Gpsr, Ablation };

std::string to_string(Protocol p);

struct RoutingParams {
  double horizon = 1.0;          // prediction window, one beacon interval
  double rssi_gate = 0.6;        // fraction of the strongest recorded sample
  double range_limit = 300.0;    // m
  int hop_limit = 64;
  WeightFactors factors;         // equal thirds
};

struct PfgMember {
  VehicleId id = 0;
  Kinematics predicted;  // extrapolated over the horizon
  Point2 target;
  double avg_rssi = 0.0;  // mW
};

/// Potential forwarders, ordered by id.
using Pfg = std::vector<PfgMember>;

/// Neighbours that pass the RSSI gate, stay within range of the predicted
/// self position, and are predicted strictly closer to dest than self.
Pfg build_pfg(const NeighborTable& table, const Kinematics& self_kin, Point2 dest,
              const RoutingParams& params);

/// nullopt signals a local maximum (empty PFG). Ties go to the smaller id.
std::optional<VehicleId> tdmp_select(const Pfg& pfg, const Kinematics& self_kin, Point2 dest,
                                     Point2 dest_target, const WeightFactors& factors,
                                     double horizon);

/// Score of every member under `factors`, in PFG order.
std::vector<double> tdmp_scores(const Pfg& pfg, const Kinematics& self_kin, Point2 dest,
                                Point2 dest_target, const WeightFactors& factors, double horizon);

/// Closest advertised neighbour strictly closer to dest than self_pos.
std::optional<VehicleId> gpsr_select(const NeighborTable& table, Point2 self_pos, Point2 dest);

/// The target term dropped and the remaining two factors renormalized.
WeightFactors ablation_factors(const WeightFactors& factors);

std::optional<VehicleId> ablation_select(const Pfg& pfg, const Kinematics& self_kin, Point2 dest,
                                         Point2 dest_target, const WeightFactors& factors,
                                         double horizon);

/// What the packet holder knows about itself.
struct SelfView {
  VehicleId id = 0;
  Kinematics kinematics;
};

enum class HopAction { Forward, DropLocalMax, DropPerimeter, DropHopLimit };

struct HopDecision {
  HopAction action = HopAction::DropLocalMax;
  VehicleId next = 0;
};

/// Full per-hop procedure at the current holder. Mutates the packet's mode,
/// perimeter bookkeeping and previous-hop record; never touches hop_count.
HopDecision decide_next_hop(Protocol protocol, const RoutingParams& params, const SelfView& self,
                            const NeighborTable& table, DataPacket& packet);

}  // namespace tdmp
