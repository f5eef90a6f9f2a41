#include "tdmp/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <thread>

#include "tdmp/engine.hpp"

namespace tdmp {

const char* const kCsvHeader =
    "scenario,protocol,seed,n_vehicles,n_generated,n_received,pdr,e2ed_s,ahc,drop_localmax,drop_hoplimit,"
    "drop_perimeter,inflight";

namespace {

std::string cell_name(const ScenarioConfig& cfg, const SweepCell& c) {
  return "(n_vehicles=" + std::to_string(c.vehicle_count) + ", protocol=" + cfg.protocols[c.protocol_index].label +
         ", seed=" + std::to_string(c.seed) + ")";
}

std::optional<double> mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

struct GroupMeans {
  std::optional<double> pdr, e2ed, ahc;
};

GroupMeans group_means(const std::vector<const SweepRow*>& rows) {
  std::vector<double> p, d, h;
  for (const SweepRow* r : rows) {
    if (auto x = pdr(r->metrics)) p.push_back(*x);
    if (r->metrics.n_received > 0) {
      d.push_back(e2ed(r->metrics));
      h.push_back(ahc(r->metrics));
    }
  }
  return {mean_of(p), mean_of(d), mean_of(h)};
}

std::string percent(std::optional<double> x, std::optional<double> base) {
  if (!x || !base || *base == 0.0) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.1f%%", 100.0 * (*x - *base) / *base);
  return buf;
}

}  // namespace

std::vector<SweepCell> sweep_cells(const ScenarioConfig& cfg) {
  std::vector<SweepCell> cells;
  // Static layouts have a fixed population; a single count column suffices.
  std::vector<std::int64_t> counts = cfg.vehicle_counts;
  if (!cfg.base.static_nodes.empty()) counts = {static_cast<std::int64_t>(cfg.base.static_nodes.size())};
  for (auto n : counts)
    for (std::size_t p = 0; p < cfg.protocols.size(); ++p)
      for (auto seed : cfg.seeds) cells.push_back({n, p, seed});
  return cells;
}

std::vector<SweepRow> run_cells(const ScenarioConfig& cfg, const std::vector<SweepCell>& cells, unsigned jobs) {
  std::vector<SweepRow> rows(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const SweepCell& c = cells[i];
      try {
        const ProtocolSpec& ps = cfg.protocols.at(c.protocol_index);
        const Scenario s = scenario_for(cfg, c.vehicle_count, ps);
        SweepRow& r = rows[i];
        r.scenario = s.name;
        r.protocol = ps.label;
        r.protocol_index = c.protocol_index;
        r.seed = c.seed;
        r.n_vehicles = c.vehicle_count;
        r.metrics = run(s, c.seed).metrics;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(cells.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw SweepError("run " + cell_name(cfg, cells[i]) + " failed: " + e.what());
    }
  }
  return rows;
}

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kCsvHeader << '\n';
  auto line = [&](const std::string& scenario, const std::string& protocol, const std::string& seed,
                  std::int64_t n_vehicles, std::uint64_t gen, std::uint64_t rec, std::optional<double> p,
                  std::optional<double> d, std::optional<double> h, std::uint64_t lm, std::uint64_t hl,
                  std::uint64_t pm, std::uint64_t inf) {
    out << scenario << ',' << protocol << ',' << seed << ',' << n_vehicles << ',' << gen << ',' << rec << ','
        << format_g6(p) << ',' << format_g6(d) << ',' << format_g6(h) << ',' << lm << ',' << hl << ',' << pm << ','
        << inf << '\n';
  };

  std::size_t i = 0;
  while (i < rows.size()) {
    std::size_t j = i;
    while (j < rows.size() && rows[j].n_vehicles == rows[i].n_vehicles &&
           rows[j].protocol_index == rows[i].protocol_index) {
      ++j;
    }
    MetricsRecord total;
    std::vector<const SweepRow*> group;
    for (std::size_t k = i; k < j; ++k) {
      const SweepRow& r = rows[k];
      const MetricsRecord& m = r.metrics;
      std::optional<double> d, h;
      if (m.n_received > 0) {
        d = e2ed(m);
        h = ahc(m);
      }
      line(r.scenario, r.protocol, std::to_string(r.seed), r.n_vehicles, m.n_generated, m.n_received, pdr(m), d, h,
           m.drop_localmax, m.drop_hoplimit, m.drop_perimeter, m.inflight);
      total.n_generated += m.n_generated;
      total.n_received += m.n_received;
      total.drop_localmax += m.drop_localmax;
      total.drop_hoplimit += m.drop_hoplimit;
      total.drop_perimeter += m.drop_perimeter;
      total.inflight += m.inflight;
      group.push_back(&r);
    }
    if (j - i >= 2) {
      const GroupMeans g = group_means(group);
      line(rows[i].scenario, rows[i].protocol, "mean", rows[i].n_vehicles, total.n_generated, total.n_received, g.pdr,
           g.e2ed, g.ahc, total.drop_localmax, total.drop_hoplimit, total.drop_perimeter, total.inflight);
    }
    i = j;
  }
}

void write_summary(std::ostream& out, const std::vector<SweepRow>& rows) {
  // (count, protocol index) -> rows
  std::map<std::pair<std::int64_t, std::size_t>, std::vector<const SweepRow*>> groups;
  std::map<std::size_t, std::string> labels;
  for (const SweepRow& r : rows) {
    groups[{r.n_vehicles, r.protocol_index}].push_back(&r);
    labels[r.protocol_index] = r.protocol;
  }
  if (labels.empty()) return;
  std::size_t baseline = labels.begin()->first;
  for (const auto& [idx, label] : labels)
    if (label == "gpsr") {
      baseline = idx;
      break;
    }

  char buf[256];
  std::snprintf(buf, sizeof buf, "%-10s %-24s %9s %9s %7s %9s %9s %9s\n", "n_vehicles", "protocol", "pdr", "e2ed_s",
                "ahc", "d_pdr", "d_e2ed", "d_ahc");
  out << buf;
  std::optional<std::int64_t> current;
  std::optional<GroupMeans> base;
  for (const auto& [key, group] : groups) {
    if (current != key.first) {
      current = key.first;
      const auto it = groups.find({key.first, baseline});
      base = it != groups.end() ? std::optional<GroupMeans>(group_means(it->second)) : std::nullopt;
    }
    const GroupMeans g = group_means(group);
    auto cell = [](std::optional<double> v, const char* fmt) {
      if (!v) return std::string("n/a");
      char b[32];
      std::snprintf(b, sizeof b, fmt, *v);
      return std::string(b);
    };
    const bool is_base = key.second == baseline;
    std::snprintf(buf, sizeof buf, "%-10lld %-24s %9s %9s %7s %9s %9s %9s\n", static_cast<long long>(key.first),
                  labels[key.second].c_str(), cell(g.pdr, "%.4f").c_str(), cell(g.e2ed, "%.5f").c_str(),
                  cell(g.ahc, "%.3f").c_str(), is_base ? "base" : percent(g.pdr, base ? base->pdr : std::nullopt).c_str(),
                  is_base ? "base" : percent(g.e2ed, base ? base->e2ed : std::nullopt).c_str(),
                  is_base ? "base" : percent(g.ahc, base ? base->ahc : std::nullopt).c_str());
    out << buf;
  }
}

}  // namespace tdmp
