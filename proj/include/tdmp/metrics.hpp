#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tdmp {

struct MetricsRecord {
  std::uint64_t n_generated = 0;
  std::uint64_t n_received = 0;
  std::vector<double> delay_samples;  // s, one per delivery
  std::vector<int> hop_samples;       // one per delivery
  std::uint64_t drop_localmax = 0;
  std::uint64_t drop_hoplimit = 0;
  std::uint64_t drop_perimeter = 0;
  std::uint64_t inflight = 0;

  void record_delivery(double delay, int hops);
  std::uint64_t accounted() const {
    return n_received + drop_localmax + drop_hoplimit + drop_perimeter + inflight;
  }
};

class MetricsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Delivered / generated; nullopt when nothing was generated.
std::optional<double> pdr(const MetricsRecord& m);
/// Mean delay over delivered packets. Throws MetricsError (NoDeliveries).
double e2ed(const MetricsRecord& m);
/// Mean hop count over delivered packets. Throws MetricsError (NoDeliveries).
double ahc(const MetricsRecord& m);

struct Summary {
  std::size_t n = 0;      // records with the metric defined
  double mean = 0.0;
  double stddev = 0.0;    // unbiased sample estimate
  double ci95 = 0.0;      // half-width, normal approximation
};

struct Aggregate {
  std::optional<Summary> pdr;
  std::optional<Summary> e2ed;
  std::optional<Summary> ahc;
};

/// Summary of plain samples. Throws MetricsError (InsufficientSamples) for
/// fewer than two values.
Summary summarize(std::span<const double> values);

/// Per-metric summaries over runs where the metric is defined; a metric
/// defined in fewer than two runs stays empty. Throws MetricsError
/// (InsufficientSamples) for fewer than two records.
Aggregate aggregate(std::span<const MetricsRecord> records);

/// `%.6g`, or an empty string for nullopt.
std::string format_g6(std::optional<double> v);

}  // namespace tdmp
