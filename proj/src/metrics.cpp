#include "tdmp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace tdmp {

void MetricsRecord::record_delivery(double delay, int hops) {
  ++n_received;
  delay_samples.push_back(delay);
  hop_samples.push_back(hops);
}

std::optional<double> pdr(const MetricsRecord& m) {
  if (m.n_generated == 0) return std::nullopt;
  return static_cast<double>(m.n_received) / static_cast<double>(m.n_generated);
}

double e2ed(const MetricsRecord& m) {
  if (m.delay_samples.empty()) throw MetricsError("NoDeliveries: e2ed undefined");
  double sum = 0.0;
  for (double d : m.delay_samples) sum += d;
  return sum / static_cast<double>(m.delay_samples.size());
}

double ahc(const MetricsRecord& m) {
  if (m.hop_samples.empty()) throw MetricsError("NoDeliveries: ahc undefined");
  double sum = 0.0;
  for (int h : m.hop_samples) sum += h;
  return sum / static_cast<double>(m.hop_samples.size());
}

Summary summarize(std::span<const double> values) {
  if (values.size() < 2) throw MetricsError("InsufficientSamples: need at least two values");
  // Sorted accumulation makes the result independent of input order.
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  double sum = 0.0;
  for (double x : v) sum += x;
  const double n = static_cast<double>(v.size());
  const double mean = sum / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  Summary s;
  s.n = v.size();
  s.mean = mean;
  s.stddev = std::sqrt(ss / (n - 1.0));
  s.ci95 = 1.96 * s.stddev / std::sqrt(n);
  return s;
}

Aggregate aggregate(std::span<const MetricsRecord> records) {
  if (records.size() < 2) throw MetricsError("InsufficientSamples: need at least two records");
  std::vector<double> p, d, h;
  for (const auto& r : records) {
    if (auto x = pdr(r)) p.push_back(*x);
    if (r.n_received > 0) {
      d.push_back(e2ed(r));
      h.push_back(ahc(r));
    }
  }
  Aggregate a;
  if (p.size() >= 2) a.pdr = summarize(p);
  if (d.size() >= 2) a.e2ed = summarize(d);
  if (h.size() >= 2) a.ahc = summarize(h);
  return a;
}

std::string format_g6(std::optional<double> v) {
  if (!v) return {};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", *v);
  return buf;
}

}  // namespace tdmp
