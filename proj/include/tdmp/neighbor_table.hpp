#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <vector>

#include "tdmp/geokin.hpp"
#include "tdmp/radio.hpp"

namespace tdmp {

/// Periodic one-hop advertisement of a vehicle's motion and trip target.
struct Beacon {
  VehicleId sender_id = 0;
  double timestamp = 0.0;
  Kinematics kinematics;
  Point2 target;
};

/// Canonical little-endian encoding used for size accounting:
///   u32 sender_id | f64 timestamp | f64 x | f64 y | f64 speed |
///   f64 acceleration | f64 heading | f64 target_x | f64 target_y
inline constexpr std::size_t kBeaconWireSize = 4 + 8 * 8;
std::array<std::uint8_t, kBeaconWireSize> encode_beacon(const Beacon& b);
Beacon decode_beacon(const std::array<std::uint8_t, kBeaconWireSize>& bytes);

struct NeighborEntry {
  VehicleId neighbor_id = 0;
  Beacon last_beacon;
  std::deque<RssiSample> rssi_window;  // oldest first
  double last_heard = 0.0;

  double mean_rssi() const;
};

class NeighborTable {
 public:
  explicit NeighborTable(std::size_t window = 5) : window_(window == 0 ? 1 : window) {}

  /// Upserts the sender's entry. Returns false, leaving the table untouched,
  /// when rssi_mw is not positive.
  bool on_beacon(const Beacon& b, double rssi_mw, double now);

  /// Adds a link-quality sample from a non-beacon reception; ignored for
  /// unknown senders.
  void record_rssi(VehicleId sender, double rssi_mw, double now);

  /// Drops entries with now - last_heard > ttl.
  void purge_stale(double now, double ttl);

  void erase(VehicleId id) { entries_.erase(id); }

  const NeighborEntry* find(VehicleId id) const;
  bool contains(VehicleId id) const { return entries_.contains(id); }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::size_t window() const { return window_; }

  /// Ordered by neighbour id.
  const std::map<VehicleId, NeighborEntry>& entries() const { return entries_; }

  /// Largest single sample across every window; 0 for an empty table.
  double max_rssi() const;

 private:
  void push_sample(NeighborEntry& e, const RssiSample& s);

  std::size_t window_;
  std::map<VehicleId, NeighborEntry> entries_;
};

}  // namespace tdmp
