#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const std::string kCli = TORUSLAB_CLI;
const std::string kConfigs = TORUSLAB_CONFIGS;

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("toruslab_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(const std::string& args) {
  std::string cmd = kCli + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json report(const fs::path& dir) {
  std::ifstream in(dir / "report.json");
  return json::parse(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("flat run passes every verdict") {
  auto out = scratch("flat");
  CHECK(run("run --config " + kConfigs + "/flat.json --grid 16 --out " + out.string()) == 0);
  auto r = report(out);
  CHECK(r["all_pass"] == true);
  CHECK(fs::exists(out / "omega.csv"));
  CHECK(fs::exists(out / "sweep.csv"));
}

TEST_CASE("sigma above the systole exits 2") {
  auto out = scratch("sigma");
  CHECK(run("run --config " + kConfigs + "/sigma10.json --out " + out.string()) == 2);
  auto r = report(out);
  CHECK(r["all_pass"] == false);
  bool osc_failed = false;
  for (const auto& v : r["verdicts"])
    if (v["anchor"].get<std::string>().rfind("u_bounded_fund_domain", 0) == 0 && v["pass"] == false) osc_failed = true;
  CHECK(osc_failed);
}

TEST_CASE("bad input exits 1") {
  auto dir = scratch("bad");
  std::ofstream(dir / "broken.json") << "{\"grid\": 8, \"metric\": ";
  CHECK(run("run --config " + (dir / "broken.json").string() + " --out " + dir.string()) == 1);
  CHECK(run("run --config " + (dir / "missing.json").string()) == 1);
  CHECK(run("run") == 1);
  CHECK(run("frobnicate") == 1);
  CHECK(run("run --config " + kConfigs + "/flat.json --grid 2") == 1);
}

TEST_CASE("lattice from a bare gram") {
  auto out = scratch("lattice");
  CHECK(run("lattice --gram " + kConfigs + "/diag6_1.5_0.667.json --out " + out.string()) == 0);
  auto r = report(out);
  auto lam = r["lattice"]["minima"]["lambda"];
  CHECK(lam[0].get<double>() == doctest::Approx(std::sqrt(2.0 / 3.0)));
  CHECK(lam[1].get<double>() == doctest::Approx(std::sqrt(1.5)));
  CHECK(lam[2].get<double>() == doctest::Approx(std::sqrt(6.0)));
  CHECK(r["all_pass"] == true);
}

TEST_CASE("cover reports kappa 8 on the flat torus") {
  auto out = scratch("cover");
  CHECK(run("cover --config " + kConfigs + "/flat.json --grid 16 --eta 0.1 --out " + out.string()) == 0);
  auto r = report(out);
  CHECK(r["cover"]["kappa_cube"] == 8);
}

TEST_CASE("sweep writes one row per eps") {
  auto out = scratch("sweep");
  CHECK(run("sweep --config " + kConfigs + "/conformal.json --grid 8 --out " + out.string()) != 1);
  auto csv = slurp(out / "sweep.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
}
