#pragma once

// Recovery from local maxima: relative-neighbourhood-graph planarization of
// the one-hop neighbourhood and right-hand-rule face traversal with face
// changes on the line towards the destination.

#include <optional>
#include <span>
#include <vector>

#include "tdmp/geokin.hpp"
#include "tdmp/packet.hpp"

namespace tdmp {

struct PlanarNode {
  VehicleId id = 0;
  Point2 position;
};

/// Keeps neighbour v iff no other neighbour w satisfies
/// max(|self w|, |v w|) < |self v|. Result ordered by id.
std::vector<PlanarNode> planarize_rng(std::span<const PlanarNode> neighbors, const PlanarNode& self);

/// Interior crossing point of segments a and b; nullopt when they are
/// disjoint, parallel, or only touch at an endpoint.
std::optional<Point2> proper_intersection(Point2 a1, Point2 a2, Point2 b1, Point2 b2);

/// Switches a greedy packet into perimeter mode at `self_position`.
void enter_perimeter(DataPacket& packet, Point2 self_position);

enum class PerimeterVerdict { Forward, ReturnToGreedy, Drop };

struct PerimeterStep {
  PerimeterVerdict verdict = PerimeterVerdict::Drop;
  VehicleId next = 0;  // valid for Forward
};

/// One right-hand-rule step. The packet must be in perimeter mode. Updates
/// the face bookkeeping in place. ReturnToGreedy means `self` is strictly
/// closer to the destination than the perimeter entry point and the packet
/// has been switched back to greedy mode.
PerimeterStep perimeter_next_hop(DataPacket& packet, std::span<const PlanarNode> rng_adj,
                                 const PlanarNode& self);

}  // namespace tdmp
