#pragma once

// Deterministic physical layer: two-ray ground propagation, a hard range
// cutoff and a receiver sensitivity floor. No fading, no MAC contention.

#include <cstdint>
#include <stdexcept>

namespace tdmp {

using VehicleId = std::uint32_t;

struct RadioConfig {
  double tx_power_mw = 15.0;
  double frequency_hz = 5.89e9;
  double range_limit_m = 300.0;
  double sensitivity_dbm = -89.0;
  double antenna_height_tx_m = 1.5;
  double antenna_height_rx_m = 1.5;
  double antenna_gain_tx = 1.0;
  double antenna_gain_rx = 1.0;
  double channel_capacity_bps = 18e6;
  std::uint32_t packet_size_bytes = 1024;
  double processing_delay_s = 1e-3;
  /// Independent per-reception loss probability; 0 keeps reception exact.
  double drop_probability = 0.0;

  /// Throws std::invalid_argument on a physically meaningless field.
  void validate() const;
};

struct RssiSample {
  VehicleId neighbor_id = 0;
  double timestamp = 0.0;  // s
  double power_mw = 0.0;   // > 0
};

class RadioError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);

double wavelength(const RadioConfig& cfg);
/// Distance where the two-ray model switches from Friis to the d^-4 law.
double crossover_distance(const RadioConfig& cfg);

/// Received power in mW at separation d > 0. Throws RadioError otherwise.
double received_power(const RadioConfig& cfg, double d);

bool can_receive(const RadioConfig& cfg, double d);

/// Airtime of one data packet plus per-hop processing.
double hop_transmission_delay(const RadioConfig& cfg);

}  // namespace tdmp
