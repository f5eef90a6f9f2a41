#include "tdmp/radio.hpp"

#include <cmath>
#include <numbers>

namespace tdmp {

namespace {
constexpr double kSpeedOfLight = 299792458.0;
}

void RadioConfig::validate() const {
  if (!(tx_power_mw > 0.0)) throw RadioError("radio.tx_power_mw must be > 0");
  if (!(frequency_hz > 0.0)) throw RadioError("radio.frequency_hz must be > 0");
  if (!(range_limit_m > 0.0)) throw RadioError("radio.range_m must be > 0");
  if (!(sensitivity_dbm < 0.0)) throw RadioError("radio.sensitivity_dbm must be < 0");
  if (!(antenna_height_tx_m > 0.0) || !(antenna_height_rx_m > 0.0))
    throw RadioError("antenna heights must be > 0");
  if (!(antenna_gain_tx > 0.0) || !(antenna_gain_rx > 0.0))
    throw RadioError("antenna gains must be > 0");
  if (!(channel_capacity_bps > 0.0)) throw RadioError("radio.capacity_bps must be > 0");
  if (!(processing_delay_s >= 0.0)) throw RadioError("radio.processing_delay_s must be >= 0");
  if (!(drop_probability >= 0.0 && drop_probability <= 1.0))
    throw RadioError("radio.drop_probability must be in [0, 1]");
}

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

double wavelength(const RadioConfig& cfg) { return kSpeedOfLight / cfg.frequency_hz; }

double crossover_distance(const RadioConfig& cfg) {
  return 4.0 * std::numbers::pi * cfg.antenna_height_tx_m * cfg.antenna_height_rx_m / wavelength(cfg);
}

double received_power(const RadioConfig& cfg, double d) {
  if (!(d > 0.0)) throw RadioError("received_power: distance must be > 0");
  const double gains = cfg.tx_power_mw * cfg.antenna_gain_tx * cfg.antenna_gain_rx;
  if (d >= crossover_distance(cfg)) {
    const double hh = cfg.antenna_height_tx_m * cfg.antenna_height_rx_m;
    return gains * hh * hh / (d * d * d * d);
  }
  const double lambda = wavelength(cfg);
  const double four_pi_d = 4.0 * std::numbers::pi * d;
  return gains * lambda * lambda / (four_pi_d * four_pi_d);
}

bool can_receive(const RadioConfig& cfg, double d) {
  if (d > cfg.range_limit_m) return false;
  if (d <= 0.0) return true;
  return received_power(cfg, d) >= dbm_to_mw(cfg.sensitivity_dbm);
}

double hop_transmission_delay(const RadioConfig& cfg) {
  return static_cast<double>(cfg.packet_size_bytes) * 8.0 / cfg.channel_capacity_bps +
         cfg.processing_delay_s;
}

}  // namespace tdmp
