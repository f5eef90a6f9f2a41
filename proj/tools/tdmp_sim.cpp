// Command-line front end: run, sweep and validate scenario files.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <thread>

#include "tdmp/config.hpp"
#include "tdmp/engine.hpp"
#include "tdmp/sweep.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Output {
  std::unique_ptr<std::ofstream> file;
  std::ostream* stream = &std::cout;

  explicit Output(const std::string& path) {
    if (path.empty()) return;
    file = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file) throw std::runtime_error("cannot open " + path + " for writing");
    stream = file.get();
  }
};

int run_command(const tdmp::ScenarioConfig& cfg, std::optional<std::uint64_t> seed, const std::string& out_path,
                const std::string& log_path) {
  const std::uint64_t s = seed.value_or(cfg.seeds.front());
  std::vector<tdmp::SweepCell> cells;
  for (const auto& c : tdmp::sweep_cells(cfg))
    if (c.seed == cfg.seeds.front()) cells.push_back({c.vehicle_count, c.protocol_index, s});

  std::vector<tdmp::SweepRow> rows;
  if (log_path.empty()) {
    rows = tdmp::run_cells(cfg, cells, 1);
  } else {
    std::ofstream log(log_path, std::ios::binary);
    if (!log) throw std::runtime_error("cannot open " + log_path + " for writing");
    for (const auto& c : cells) {
      const auto& ps = cfg.protocols[c.protocol_index];
      const tdmp::Scenario sc = tdmp::scenario_for(cfg, c.vehicle_count, ps);
      log << "# n_vehicles=" << c.vehicle_count << " protocol=" << ps.label << " seed=" << c.seed << '\n';
      tdmp::SweepRow r;
      r.scenario = sc.name;
      r.protocol = ps.label;
      r.protocol_index = c.protocol_index;
      r.seed = c.seed;
      r.n_vehicles = c.vehicle_count;
      r.metrics = tdmp::run(sc, c.seed, &log).metrics;
      rows.push_back(std::move(r));
    }
  }
  Output out(out_path.empty() ? cfg.output_path.value_or("") : out_path);
  tdmp::write_csv(*out.stream, rows);
  return 0;
}

int sweep_command(const tdmp::ScenarioConfig& cfg, unsigned jobs, const std::string& out_path, bool summary) {
  const auto rows = tdmp::run_sweep(cfg, jobs);
  const std::string path = out_path.empty() ? cfg.output_path.value_or("") : out_path;
  {
    Output out(path);
    tdmp::write_csv(*out.stream, rows);
  }
  if (summary) {
    if (path.empty()) std::cout << '\n';
    tdmp::write_summary(std::cout, rows);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vehicular routing simulator: TDMP, GPSR and ablation on a road grid"};
  app.require_subcommand(1);

  std::string config_path, out_path, log_path;
  std::optional<std::uint64_t> seed;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  bool summary = false;

  auto* run = app.add_subcommand("run", "Run every count and protocol once with one seed");
  run->add_option("config", config_path, "Scenario file")->required();
  run->add_option("--seed", seed, "Seed (default: first configured seed)");
  run->add_option("--out", out_path, "CSV output path (default: stdout)");
  run->add_option("--log-events", log_path, "Write the tab-separated event log here");

  auto* sweep = app.add_subcommand("sweep", "Run every (count, protocol, seed) cell");
  sweep->add_option("config", config_path, "Scenario file")->required();
  sweep->add_option("--jobs,-j", jobs, "Worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("--out", out_path, "CSV output path (default: stdout)");
  sweep->add_flag("--summary", summary, "Print the per-count comparison table");

  auto* validate = app.add_subcommand("validate", "Check a scenario file without running it");
  validate->add_option("config", config_path, "Scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return e.get_exit_code() == 0 ? app.exit(e) : (app.exit(e), kExitConfig);
  }

  tdmp::ScenarioConfig cfg;
  try {
    cfg = tdmp::parse_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (*validate) {
      std::cout << "ok: " << tdmp::sweep_cells(cfg).size() << " runs\n";
      return 0;
    }
    if (*run) return run_command(cfg, seed, out_path, log_path);
    return sweep_command(cfg, jobs, out_path, summary);
  } catch (const tdmp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
