#include "tdmp/neighbor_table.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <stdexcept>

namespace tdmp {

namespace {

template <typename T>
void put_le(std::uint8_t*& out, T value) {
  static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
  std::memcpy(out, raw, sizeof(T));
  out += sizeof(T);
}

template <typename T>
T get_le(const std::uint8_t*& in) {
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, in, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
  T value;
  std::memcpy(&value, raw, sizeof(T));
  in += sizeof(T);
  return value;
}

}  // namespace

std::array<std::uint8_t, kBeaconWireSize> encode_beacon(const Beacon& b) {
  std::array<std::uint8_t, kBeaconWireSize> bytes{};
  std::uint8_t* out = bytes.data();
  put_le<std::uint32_t>(out, b.sender_id);
  put_le(out, b.timestamp);
  put_le(out, b.kinematics.position.x);
  put_le(out, b.kinematics.position.y);
  put_le(out, b.kinematics.speed);
  put_le(out, b.kinematics.acceleration);
  put_le(out, b.kinematics.heading);
  put_le(out, b.target.x);
  put_le(out, b.target.y);
  return bytes;
}

Beacon decode_beacon(const std::array<std::uint8_t, kBeaconWireSize>& bytes) {
  const std::uint8_t* in = bytes.data();
  Beacon b;
  b.sender_id = get_le<std::uint32_t>(in);
  b.timestamp = get_le<double>(in);
  b.kinematics.position.x = get_le<double>(in);
  b.kinematics.position.y = get_le<double>(in);
  b.kinematics.speed = get_le<double>(in);
  b.kinematics.acceleration = get_le<double>(in);
  b.kinematics.heading = get_le<double>(in);
  b.target.x = get_le<double>(in);
  b.target.y = get_le<double>(in);
  return b;
}

double NeighborEntry::mean_rssi() const {
  if (rssi_window.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : rssi_window) sum += s.power_mw;
  return sum / static_cast<double>(rssi_window.size());
}

void NeighborTable::push_sample(NeighborEntry& e, const RssiSample& s) {
  e.rssi_window.push_back(s);
  while (e.rssi_window.size() > window_) e.rssi_window.pop_front();
}

bool NeighborTable::on_beacon(const Beacon& b, double rssi_mw, double now) {
  if (!(rssi_mw > 0.0)) return false;
  auto [it, fresh] = entries_.try_emplace(b.sender_id);
  NeighborEntry& e = it->second;
  if (fresh) e.neighbor_id = b.sender_id;
  e.last_beacon = b;
  e.last_heard = now;
  push_sample(e, {b.sender_id, now, rssi_mw});
  return true;
}

void NeighborTable::record_rssi(VehicleId sender, double rssi_mw, double now) {
  if (!(rssi_mw > 0.0)) return;
  auto it = entries_.find(sender);
  if (it == entries_.end()) return;
  push_sample(it->second, {sender, now, rssi_mw});
}

void NeighborTable::purge_stale(double now, double ttl) {
  if (!(ttl > 0.0)) throw std::invalid_argument("purge_stale: ttl must be > 0");
  std::erase_if(entries_, [&](const auto& kv) { return now - kv.second.last_heard > ttl; });
}

const NeighborEntry* NeighborTable::find(VehicleId id) const {
  auto it = entries_.find(id);
  return it == entries_.end() ? nullptr : &it->second;
}

double NeighborTable::max_rssi() const {
  double best = 0.0;
  for (const auto& [_, e] : entries_)
    for (const auto& s : e.rssi_window) best = std::max(best, s.power_mw);
  return best;
}

}  // namespace tdmp
