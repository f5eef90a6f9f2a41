#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kDir = fs::temp_directory_path() / "tdmp_cli_test";

int sh(const std::string& args) {
  const std::string cmd = std::string("\"") + TDMP_SIM_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string write(const std::string& name, const std::string& text) {
  fs::create_directories(kDir);
  const fs::path p = kDir / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::size_t mean_rows(const std::vector<std::string>& ls) {
  std::size_t n = 0;
  for (const auto& l : ls) n += l.find(",mean,") != std::string::npos;
  return n;
}

const char* kSmall =
    "sim.time_s = 40\n"
    "vehicles.counts = 20, 30\n"
    "protocols = tdmp, gpsr\n"
    "seeds = 1, 2, 3, 4, 5\n";

}  // namespace

TEST_CASE("validate reports the run count") {
  const auto cfg = write("small.conf", kSmall);
  CHECK(sh("validate " + cfg) == 0);
  const std::string out = (kDir / "validate.txt").string();
  REQUIRE(std::system(("\"" + std::string(TDMP_SIM_PATH) + "\" validate " + cfg + " > " + out).c_str()) == 0);
  CHECK(slurp(out) == "ok: 20 runs\n");
}

TEST_CASE("exit codes") {
  CHECK(sh("") == 2);
  CHECK(sh("frobnicate x") == 2);
  CHECK(sh("validate " + (kDir / "absent.conf").string()) == 2);
  CHECK(sh("validate " + write("bad.conf", "tdmp.p = 0.5\ntdmp.q1 = 0.5\ntdmp.q2 = 0.5\n")) == 2);
  CHECK(sh("validate " + write("typo.conf", "sim.tme_s = 4\n")) == 2);
  CHECK(sh("run " + write("one.conf", "sim.time_s = 10\nvehicles.counts = 5\nprotocols = gpsr\nseeds = 1\n") +
           " --out /nonexistent/dir/out.csv") == 3);
}

TEST_CASE("one cell gives one row and no aggregate") {
  const auto cfg = write("one.conf", "sim.time_s = 20\nvehicles.counts = 10\nprotocols = gpsr\nseeds = 1\n");
  const std::string out = (kDir / "one.csv").string();
  REQUIRE(sh("sweep " + cfg + " --out " + out) == 0);
  const auto ls = lines(slurp(out));
  CHECK(ls.size() == 2);
  CHECK(ls[0] == "scenario,protocol,seed,n_vehicles,n_generated,n_received,pdr,e2ed_s,ahc,drop_localmax,drop_hoplimit,drop_perimeter,inflight");
  CHECK(mean_rows(ls) == 0);
}

TEST_CASE("sweep cardinality and determinism across job counts") {
  const auto cfg = write("small.conf", kSmall);
  const std::string a = (kDir / "a.csv").string(), b = (kDir / "b.csv").string(), c = (kDir / "c.csv").string();
  REQUIRE(sh("sweep " + cfg + " --jobs 1 --out " + a) == 0);
  REQUIRE(sh("sweep " + cfg + " --jobs 1 --out " + b) == 0);
  REQUIRE(sh("sweep " + cfg + " --jobs 4 --out " + c) == 0);
  const auto ls = lines(slurp(a));
  CHECK(ls.size() == 1 + 20 + 4);
  CHECK(mean_rows(ls) == 4);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a) == slurp(c));
}

TEST_CASE("run writes one row per count and protocol plus an event log") {
  const auto cfg = write("small.conf", kSmall);
  const std::string out = (kDir / "run.csv").string(), log = (kDir / "run.log").string();
  REQUIRE(sh("run " + cfg + " --seed 7 --out " + out + " --log-events " + log) == 0);
  const auto ls = lines(slurp(out));
  CHECK(ls.size() == 1 + 4);
  CHECK(ls[1].find(",7,") != std::string::npos);
  const std::string events = slurp(log);
  CHECK(events.find("# n_vehicles=20 protocol=tdmp seed=7") != std::string::npos);
  CHECK(events.find("\tPacketSend\t") != std::string::npos);
}

TEST_CASE("summary table") {
  const auto cfg = write("small.conf", kSmall);
  const std::string out = (kDir / "summary.txt").string();
  const std::string cmd = std::string("\"") + TDMP_SIM_PATH + "\" sweep " + cfg + " --out " +
                          (kDir / "s.csv").string() + " --summary > " + out;
  REQUIRE(std::system(cmd.c_str()) == 0);
  const std::string text = slurp(out);
  CHECK(text.find("gpsr") != std::string::npos);
  CHECK(text.find("base") != std::string::npos);
  fs::remove_all(kDir);
}
