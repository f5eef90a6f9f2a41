#pragma once

#include <cstdint>
#include <optional>

#include "tdmp/geokin.hpp"
#include "tdmp/radio.hpp"

namespace tdmp {

enum class PacketMode { Greedy, Perimeter };

struct DirectedEdge {
  VehicleId from = 0;
  VehicleId to = 0;
  friend bool operator==(const DirectedEdge&, const DirectedEdge&) = default;
};

/// Recovery bookkeeping carried while a packet is in perimeter mode.
struct PerimeterState {
  Point2 entry_point;                     // where greedy failed
  Point2 face_point;                      // where the packet entered the current face
  std::optional<DirectedEdge> first_edge; // first edge traversed on the current face
};

struct PreviousHop {
  VehicleId id = 0;
  Point2 position;  // as advertised by the sender when it forwarded
};

struct DataPacket {
  std::uint64_t packet_id = 0;
  VehicleId source_id = 0;
  VehicleId destination_id = 0;
  Point2 destination_pos;     // snapshot taken at send time
  Point2 destination_target;  // destination vehicle's trip target
  double created_at = 0.0;
  int hop_count = 0;
  PacketMode mode = PacketMode::Greedy;
  std::optional<PerimeterState> perimeter_entry;
  std::optional<PreviousHop> previous_hop;
};

}  // namespace tdmp
