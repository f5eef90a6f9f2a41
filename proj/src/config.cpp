#include "tdmp/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace tdmp {

namespace {

// Factor triples written with three decimals are accepted and renormalized.
constexpr double kFactorInputTolerance = 1e-3;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

double to_double(const std::string& s) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
    throw ConfigError("expected a number, got '" + s + "'");
  }
  return v;
}

std::int64_t to_int(const std::string& s) {
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
    throw ConfigError("expected an integer, got '" + s + "'");
  }
  return v;
}

std::int64_t to_positive_int(const std::string& s) {
  const auto v = to_int(s);
  if (v <= 0) throw ConfigError("expected a positive integer, got '" + s + "'");
  return v;
}

WeightFactors checked_factors(double p, double q1, double q2) {
  const double sum = p + q1 + q2;
  if (p < 0.0 || q1 < 0.0 || q2 < 0.0 || std::abs(sum - 1.0) > kFactorInputTolerance) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "weight factors must be non-negative with p + q1 + q2 = 1 (got %g + %g + %g = %g)",
                  p, q1, q2, sum);
    throw ConfigError(buf);
  }
  return WeightFactors::normalized(p, q1, q2);
}

std::string factor_label(const std::string& name, double p, double q1, double q2) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s(%g/%g/%g)", name.c_str(), p, q1, q2);
  return buf;
}

std::string resolve(const std::string& base_dir, const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
  if (!std::filesystem::exists(p)) throw ConfigError("file not found: " + p.string());
  return p.string();
}

}  // namespace

ProtocolSpec parse_protocol(const std::string& token, const WeightFactors& defaults) {
  const auto colon = token.find(':');
  const std::string name = trim(token.substr(0, colon));
  ProtocolSpec spec;
  if (name == "tdmp") {
    spec.protocol = Protocol::Tdmp;
  } else if (name == "gpsr") {
    spec.protocol = Protocol::Gpsr;
  } else if (name == "ablation") {
    spec.protocol = Protocol::Ablation;
  } else {
    throw ConfigError("unknown protocol '" + name + "' (expected tdmp, gpsr or ablation)");
  }
  spec.factors = defaults;
  spec.label = name;
  if (colon != std::string::npos) {
    if (spec.protocol == Protocol::Gpsr) throw ConfigError("gpsr takes no weight factors");
    const auto parts = split(token.substr(colon + 1), '/');
    if (parts.size() != 3) throw ConfigError("expected " + name + ":p/q1/q2, got '" + token + "'");
    const double p = to_double(parts[0]), q1 = to_double(parts[1]), q2 = to_double(parts[2]);
    spec.factors = checked_factors(p, q1, q2);
    spec.label = factor_label(name, p, q1, q2);
  }
  return spec;
}

ScenarioConfig parse_config_text(const std::string& text, const std::string& base_dir) {
  ScenarioConfig cfg;
  Scenario& s = cfg.base;

  int blocks_x = 3, blocks_y = 3;
  double block_len = 150.0, speed_limit = 13.9;
  std::optional<std::string> network_file, od_file;
  std::optional<double> fp, fq1, fq2;
  std::vector<std::string> protocol_tokens{"tdmp", "gpsr"};
  bool name_set = false;

  using Setter = std::function<void(const std::string&)>;
  const auto num = [](double& field) -> Setter { return [&field](const std::string& v) { field = to_double(v); }; };
  const std::map<std::string, Setter> setters = {
      {"scenario.name", [&](const std::string& v) { s.name = v; name_set = true; }},
      {"network.blocks_x", [&](const std::string& v) { blocks_x = static_cast<int>(to_positive_int(v)); }},
      {"network.blocks_y", [&](const std::string& v) { blocks_y = static_cast<int>(to_positive_int(v)); }},
      {"network.block_length_m", num(block_len)},
      {"network.speed_limit_mps", num(speed_limit)},
      {"network.file", [&](const std::string& v) { network_file = resolve(base_dir, v); }},
      {"od.file", [&](const std::string& v) { od_file = resolve(base_dir, v); }},
      {"vehicles.counts",
       [&](const std::string& v) {
         cfg.vehicle_counts.clear();
         for (const auto& t : split(v, ',')) cfg.vehicle_counts.push_back(to_positive_int(t));
         if (cfg.vehicle_counts.empty()) throw ConfigError("empty list");
       }},
      {"vehicles.min_speed_mps", num(s.trip_options.min_vehicle_speed)},
      {"vehicles.max_speed_mps", num(s.trip_options.max_vehicle_speed)},
      {"sim.time_s", num(s.sim_time)},
      {"sim.dt_s", num(s.mobility.dt)},
      {"mobility.accel_mps2", num(s.mobility.max_accel)},
      {"mobility.decel_mps2", num(s.mobility.max_decel)},
      {"mobility.reaction_s", num(s.mobility.reaction_time)},
      {"mobility.vehicle_length_m", num(s.mobility.vehicle_length)},
      {"mobility.min_gap_m", num(s.mobility.min_gap)},
      {"mobility.max_speed_mps", num(s.mobility.speed_cap)},
      {"radio.tx_power_mw", num(s.radio.tx_power_mw)},
      {"radio.frequency_hz", num(s.radio.frequency_hz)},
      {"radio.range_m", num(s.radio.range_limit_m)},
      {"radio.sensitivity_dbm", num(s.radio.sensitivity_dbm)},
      {"radio.tx_height_m", num(s.radio.antenna_height_tx_m)},
      {"radio.rx_height_m", num(s.radio.antenna_height_rx_m)},
      {"radio.tx_gain", num(s.radio.antenna_gain_tx)},
      {"radio.rx_gain", num(s.radio.antenna_gain_rx)},
      {"radio.bitrate_bps", num(s.radio.channel_capacity_bps)},
      {"radio.packet_size_bytes",
       [&](const std::string& v) { s.radio.packet_size_bytes = static_cast<std::uint32_t>(to_positive_int(v)); }},
      {"radio.processing_delay_s", num(s.radio.processing_delay_s)},
      {"radio.drop_probability", num(s.radio.drop_probability)},
      {"beacon.interval_s", num(s.beacon_interval)},
      {"beacon.offset_s", num(s.beacon_offset)},
      {"routing.horizon_s", num(s.routing.horizon)},
      {"routing.rssi_gate", num(s.routing.rssi_gate)},
      {"routing.hop_limit", [&](const std::string& v) { s.routing.hop_limit = static_cast<int>(to_positive_int(v)); }},
      {"routing.rssi_window",
       [&](const std::string& v) { s.rssi_window = static_cast<std::size_t>(to_positive_int(v)); }},
      {"routing.neighbor_ttl_s", num(s.neighbor_ttl)},
      {"routing.link_failure",
       [&](const std::string& v) {
         if (v == "drop") {
           s.link_failure = LinkFailure::Drop;
         } else if (v == "retry") {
           s.link_failure = LinkFailure::Retry;
         } else {
           throw ConfigError("expected drop or retry, got '" + v + "'");
         }
       }},
      {"tdmp.p", [&](const std::string& v) { fp = to_double(v); }},
      {"tdmp.q1", [&](const std::string& v) { fq1 = to_double(v); }},
      {"tdmp.q2", [&](const std::string& v) { fq2 = to_double(v); }},
      {"protocols",
       [&](const std::string& v) {
         protocol_tokens = split(v, ',');
         if (protocol_tokens.empty()) throw ConfigError("empty list");
       }},
      {"seeds",
       [&](const std::string& v) {
         cfg.seeds.clear();
         for (const auto& t : split(v, ',')) {
           const auto x = to_int(t);
           if (x < 0) throw ConfigError("seeds must be non-negative");
           cfg.seeds.push_back(static_cast<std::uint64_t>(x));
         }
         if (cfg.seeds.empty()) throw ConfigError("empty list");
       }},
      {"traffic.rate_pps", num(s.traffic.rate_pps)},
      {"traffic.start_s", num(s.traffic.start)},
      {"traffic.end_s", [&](const std::string& v) { s.traffic.end = to_double(v); }},
      {"traffic.pairs",
       [&](const std::string& v) {
         s.traffic.fixed_pairs.clear();
         for (const auto& t : split(v, ',')) {
           const auto gt = t.find('>');
           if (gt == std::string::npos) throw ConfigError("expected src>dst, got '" + t + "'");
           const auto a = to_int(trim(t.substr(0, gt))), b = to_int(trim(t.substr(gt + 1)));
           if (a < 0 || b < 0) throw ConfigError("negative id in '" + t + "'");
           s.traffic.fixed_pairs.emplace_back(static_cast<VehicleId>(a), static_cast<VehicleId>(b));
         }
       }},
      {"static.nodes",
       [&](const std::string& v) {
         s.static_nodes.clear();
         for (const auto& t : split(v, ';')) {
           std::istringstream in(t);
           std::vector<double> xs;
           std::string w;
           while (in >> w) xs.push_back(to_double(w));
           if (xs.size() != 2 && xs.size() != 4) throw ConfigError("expected 'x y' or 'x y tx ty', got '" + t + "'");
           StaticNode n;
           n.position = {xs[0], xs[1]};
           n.target = xs.size() == 4 ? Point2{xs[2], xs[3]} : n.position;
           s.static_nodes.push_back(n);
         }
       }},
      {"output.path", [&](const std::string& v) { cfg.output_path = v; }},
  };

  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(line_no);
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError(where + ": unknown key '" + key + "'");
    if (auto [prev, fresh] = seen.emplace(key, line_no); !fresh) {
      throw ConfigError(where + ": key '" + key + "' already set on line " + std::to_string(prev->second));
    }
    try {
      it->second(value);
    } catch (const std::exception& e) {
      throw ConfigError(where + ": key '" + key + "': " + e.what());
    }
  }

  auto at_key = [&](const std::string& key, const std::function<void()>& f) {
    try {
      f();
    } catch (const std::exception& e) {
      const auto l = seen.find(key);
      const std::string where = l != seen.end() ? "line " + std::to_string(l->second) + ": " : "";
      throw ConfigError(where + "key '" + key + "': " + e.what());
    }
  };

  const WeightFactors defaults;
  WeightFactors factors = defaults;
  if (fp || fq1 || fq2) {
    at_key("tdmp.p", [&] { factors = checked_factors(fp.value_or(defaults.p), fq1.value_or(defaults.q1),
                                                     fq2.value_or(defaults.q2)); });
  }
  s.routing.factors = factors;
  at_key("protocols", [&] {
    for (const auto& t : protocol_tokens) cfg.protocols.push_back(parse_protocol(t, factors));
  });

  at_key(network_file ? "network.file" : "network.blocks_x", [&] {
    s.network = network_file ? load_network(*network_file) : build_grid(blocks_x, blocks_y, block_len, speed_limit);
  });
  if (!name_set && network_file) s.name = std::filesystem::path(*network_file).stem().string();
  at_key("od.file", [&] { s.od = od_file ? load_od(*od_file) : uniform_od(s.network, s.sim_time); });
  if (s.static_nodes.empty() && s.od.total() <= 0) throw ConfigError("demand matrix is empty");
  if (!(s.trip_options.min_vehicle_speed > 0.0 &&
        s.trip_options.min_vehicle_speed <= s.trip_options.max_vehicle_speed)) {
    throw ConfigError("vehicles.min_speed_mps must be in (0, vehicles.max_speed_mps]");
  }
  s.routing.range_limit = s.radio.range_limit_m;
  s.validate();
  return cfg;
}

ScenarioConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_config_text(ss.str(), dir.empty() ? "." : dir.string());
}

Scenario scenario_for(const ScenarioConfig& cfg, std::int64_t vehicle_count, const ProtocolSpec& protocol) {
  Scenario s = cfg.base;
  s.protocol = protocol.protocol;
  s.routing.factors = protocol.factors;
  if (s.static_nodes.empty()) s.od = s.od.scaled_to(vehicle_count);
  return s;
}

}  // namespace tdmp
