#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tdmp/config.hpp"
#include "tdmp/metrics.hpp"

namespace tdmp {

class SweepError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SweepCell {
  std::int64_t vehicle_count = 0;
  std::size_t protocol_index = 0;  // into ScenarioConfig::protocols
  std::uint64_t seed = 0;
};

struct SweepRow {
  std::string scenario;
  std::string protocol;
  std::size_t protocol_index = 0;
  std::uint64_t seed = 0;
  std::int64_t n_vehicles = 0;
  MetricsRecord metrics;
};

/// Every (count, protocol, seed) cell of the config, in output order.
std::vector<SweepCell> sweep_cells(const ScenarioConfig& cfg);

/// Runs the cells on up to `jobs` worker threads. The result order is the
/// order of `cells` whatever the parallelism. Throws SweepError naming the
/// first failing cell.
std::vector<SweepRow> run_cells(const ScenarioConfig& cfg, const std::vector<SweepCell>& cells, unsigned jobs);

inline std::vector<SweepRow> run_sweep(const ScenarioConfig& cfg, unsigned jobs) {
  return run_cells(cfg, sweep_cells(cfg), jobs);
}

extern const char* const kCsvHeader;

/// Header, then per (count, protocol) group its per-seed rows followed by a
/// `mean` row when the group has at least two seeds.
void write_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// Per-count table of mean PDR / E2ED / AHC with percentage differences
/// against the baseline protocol (gpsr when present, else the first listed).
void write_summary(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace tdmp
