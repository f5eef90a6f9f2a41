#include "tdmp/perimeter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tdmp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double orient(Point2 a, Point2 b, Point2 c) { return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x); }

double bearing(Point2 from, Point2 to) { return std::atan2(to.y - from.y, to.x - from.x); }

// Counter-clockwise sweep in (0, 2pi] from the reference bearing, so that a
// neighbour lying exactly on the reference ray comes last.
double ccw_sweep(double reference, double b) {
  double d = std::fmod(b - reference, kTwoPi);
  if (d <= 0.0) d += kTwoPi;
  return d;
}

}  // namespace

std::vector<PlanarNode> planarize_rng(std::span<const PlanarNode> neighbors, const PlanarNode& self) {
  std::vector<PlanarNode> kept;
  for (const PlanarNode& v : neighbors) {
    if (v.id == self.id) continue;
    const double uv = distance(self.position, v.position);
    bool witnessed = false;
    for (const PlanarNode& w : neighbors) {
      if (w.id == v.id || w.id == self.id) continue;
      if (std::max(distance(self.position, w.position), distance(v.position, w.position)) < uv) {
        witnessed = true;
        break;
      }
    }
    if (!witnessed) kept.push_back(v);
  }
  std::sort(kept.begin(), kept.end(), [](const PlanarNode& a, const PlanarNode& b) { return a.id < b.id; });
  return kept;
}

std::optional<Point2> proper_intersection(Point2 a1, Point2 a2, Point2 b1, Point2 b2) {
  const double o1 = orient(a1, a2, b1);
  const double o2 = orient(a1, a2, b2);
  const double o3 = orient(b1, b2, a1);
  const double o4 = orient(b1, b2, a2);
  if (!((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0))) return std::nullopt;
  if (!((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0))) return std::nullopt;
  const double t = o3 / (o3 - o4);
  return a1 + t * (a2 - a1);
}

void enter_perimeter(DataPacket& packet, Point2 self_position) {
  packet.mode = PacketMode::Perimeter;
  packet.perimeter_entry = PerimeterState{self_position, self_position, std::nullopt};
}

PerimeterStep perimeter_next_hop(DataPacket& packet, std::span<const PlanarNode> rng_adj,
                                 const PlanarNode& self) {
  if (packet.mode != PacketMode::Perimeter || !packet.perimeter_entry) {
    throw std::logic_error("perimeter_next_hop: packet is not in perimeter mode");
  }
  PerimeterState& st = *packet.perimeter_entry;
  const Point2 dest = packet.destination_pos;

  if (distance(self.position, dest) < distance(st.entry_point, dest)) {
    packet.mode = PacketMode::Greedy;
    packet.perimeter_entry.reset();
    return {PerimeterVerdict::ReturnToGreedy, 0};
  }

  // First hop on a fresh face sweeps from the line towards the destination;
  // afterwards from the edge the packet arrived on.
  // The previous hop is located where this node last heard it, so that it
  // sorts last in the sweep even when its own reported position differs.
  const bool fresh = !st.first_edge.has_value();
  double reference = bearing(self.position, dest);
  if (!fresh && packet.previous_hop) {
    Point2 prev = packet.previous_hop->position;
    for (const PlanarNode& n : rng_adj)
      if (n.id == packet.previous_hop->id) prev = n.position;
    if (!(prev == self.position)) reference = bearing(self.position, prev);
  }

  struct Candidate {
    double sweep;
    double dist;
    const PlanarNode* node;
  };
  std::vector<Candidate> order;
  order.reserve(rng_adj.size());
  for (const PlanarNode& n : rng_adj) {
    if (n.id == self.id || n.position == self.position) continue;
    order.push_back({ccw_sweep(reference, bearing(self.position, n.position)),
                     distance(self.position, n.position), &n});
  }
  std::sort(order.begin(), order.end(), [](const Candidate& a, const Candidate& b) {
    if (a.sweep != b.sweep) return a.sweep < b.sweep;
    if (a.dist != b.dist) return a.dist < b.dist;
    return a.node->id < b.node->id;
  });

  const PlanarNode* chosen = nullptr;
  for (const Candidate& c : order) {
    const auto cross = proper_intersection(self.position, c.node->position, st.face_point, dest);
    if (cross && distance(*cross, dest) < distance(st.face_point, dest)) {
      // Face change: the edge crosses the line towards the destination closer
      // than where this face was entered.
      st.face_point = *cross;
      st.first_edge.reset();
      continue;
    }
    chosen = c.node;
    break;
  }
  if (chosen == nullptr) return {PerimeterVerdict::Drop, 0};

  const DirectedEdge edge{self.id, chosen->id};
  if (st.first_edge && *st.first_edge == edge) return {PerimeterVerdict::Drop, 0};
  if (!st.first_edge) st.first_edge = edge;
  return {PerimeterVerdict::Forward, chosen->id};
}

}  // namespace tdmp
