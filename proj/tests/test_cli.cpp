#include "mmswitch/cli.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mmswitch;
namespace fs = std::filesystem;

namespace {

std::string config_path(const char* name) {
  return std::string(MMSWITCH_CONFIG_DIR) + "/" + name;
}

fs::path fresh_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("mmswitch_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SwitchingModel load_valid(const char* name) {
  SwitchingModel m = load_model(config_path(name));
  ensure_valid(m);
  return m;
}

}  // namespace

TEST_CASE("surface CSV round-trips exactly") {
  SwitchingModel model = load_valid("onoff.cfg");
  SolverConfig cfg;
  cfg.dt = 0.02;
  cfg.grid_n = 30;
  SolveResult res = solve_finite(model, 0.4, cfg);
  fs::path dir = fresh_dir("roundtrip");
  write_values_csv(dir / "values.csv", res.surface);
  ValueSurface back = read_values_csv(dir / "values.csv", model, 30, res.surface.dt,
                                      res.surface.horizon, false);
  REQUIRE(back.num_layers() == res.surface.num_layers());
  for (int l = 0; l < back.num_layers(); ++l)
    REQUIRE(back.layers[l] == res.surface.layers[l]);
}

TEST_CASE("solve command writes the full artifact set") {
  fs::path dir = fresh_dir("solve");
  const int rc = cli_main({"solve", config_path("onoff.cfg"), "--horizon", "0.5",
                           "--dt", "0.01", "--grid", "50", "--out", dir.string()});
  REQUIRE(rc == 0);
  for (const char* f :
       {"values.csv", "strategy.csv", "boundaries.csv", "regions.svg", "value.svg",
        "manifest.json"})
    REQUIRE(fs::exists(dir / f));

  json manifest = read_manifest(dir);
  CHECK(manifest["command"] == "solve");
  CHECK(manifest["params"]["mode"] == "finite");
  CHECK(manifest["params"]["grid_n"] == 50);
  CHECK(manifest["model_hash"] ==
        hash_hex(model_hash(load_valid("onoff.cfg"))));

  // The boundary CSV uses the two-policy (tau, lower, upper) layout.
  std::string header = slurp(dir / "boundaries.csv").substr(0, 23);
  CHECK(header == "tau,lower_pi1,upper_pi1");
}

TEST_CASE("solve rejects bad configs with exit code 2") {
  fs::path dir = fresh_dir("badcfg");
  fs::path bad = dir / "bad.cfg";
  {
    std::ofstream out(bad);
    out << R"({"states":["a","b"],"Q":[[-1.0,1.0],[3.0,-2.0]],"lambda":[1.0,4.0],)"
        << R"("policies":["1","2"],"c":[[1.0,0.0],[0.0,1.0]],"K":0.05,"rho":0.0})";
  }
  CHECK(cli_main({"solve", bad.string(), "--horizon", "1"}) == 2);
  CHECK(cli_main({"solve", config_path("onoff.cfg")}) == 2);  // no horizon
}

TEST_CASE("simulate against solve artifacts, with hash guarding") {
  fs::path dir = fresh_dir("sim_solve");
  REQUIRE(cli_main({"solve", config_path("onoff.cfg"), "--horizon", "0.5", "--dt",
                    "0.01", "--grid", "50", "--out", dir.string(), "--no-svg"}) == 0);

  fs::path sim = fresh_dir("sim_out");
  const int rc = cli_main({"simulate", config_path("onoff.cfg"), "--strategy",
                           "optimal", "--solve-dir", dir.string(), "--paths", "200",
                           "--seed", "5", "--pi0", "0.5,0.5", "--a0", "1", "--out",
                           sim.string()});
  REQUIRE(rc == 0);
  REQUIRE(fs::exists(sim / "mc_estimate.csv"));
  REQUIRE(fs::exists(sim / "paths.txt"));

  // A different model against the same artifacts is a hash mismatch.
  CHECK(cli_main({"simulate", config_path("fed.cfg"), "--strategy", "optimal",
                  "--solve-dir", dir.string(), "--out", sim.string(), "--horizon",
                  "0.5"}) == 4);
  // Missing artifacts are reported the same way.
  fs::path empty = fresh_dir("empty");
  CHECK(cli_main({"simulate", config_path("onoff.cfg"), "--strategy", "optimal",
                  "--solve-dir", empty.string(), "--out", sim.string(), "--horizon",
                  "0.5"}) == 4);
}

TEST_CASE("simulate is reproducible for a fixed seed") {
  fs::path a = fresh_dir("repro_a"), b = fresh_dir("repro_b");
  auto run = [&](const fs::path& dir) {
    return cli_main({"simulate", config_path("onoff.cfg"), "--strategy", "none",
                     "--paths", "1", "--seed", "7", "--horizon", "1", "--keep-paths",
                     "1", "--out", dir.string()});
  };
  REQUIRE(run(a) == 0);
  REQUIRE(run(b) == 0);
  CHECK(slurp(a / "paths.txt") == slurp(b / "paths.txt"));
  CHECK(slurp(a / "mc_estimate.csv") == slurp(b / "mc_estimate.csv"));
}

TEST_CASE("replay reports switch placement") {
  fs::path dir = fresh_dir("replay");
  const int rc =
      cli_main({"simulate", config_path("callcenter.cfg"), "--strategy", "none",
                "--replay", "0.51:2,0.66:3,1.44:1,2.23:2", "--pi0", "0,1,0", "--a0",
                "1", "--horizon", "4", "--out", dir.string()});
  REQUIRE(rc == 0);
  const std::string trace = slurp(dir / "paths.txt");
  CHECK(trace.find("ARRIVAL") != std::string::npos);
  CHECK(trace.find("SWITCH") == std::string::npos);  // never-switch strategy
}

TEST_CASE("check command passes on bundled configs and fails loudly on bad ones") {
  CHECK(cli_main({"check", config_path("onoff.cfg"), "--paths", "800"}) == 0);

  fs::path dir = fresh_dir("checkbad");
  fs::path bad = dir / "triangle.cfg";
  {
    // Triangle-inequality violation: K(1,2) + K(2,3) < K(1,3).
    std::ofstream out(bad);
    out << R"({"states":["s"],"Q":[[0.0]],"lambda":[1.0],"policies":["1","2","3"],)"
        << R"("c":[[0.0,0.0,0.0]],)"
        << R"("K":[[0.0,1.0,5.0],[1.0,0.0,1.0],[5.0,1.0,0.0]],"rho":0.0})";
  }
  CHECK(cli_main({"check", bad.string()}) == 2);
}

TEST_CASE("single-state toy model sails through the degenerate paths") {
  fs::path dir = fresh_dir("toy");
  fs::path cfg = dir / "toy.cfg";
  {
    std::ofstream out(cfg);
    out << R"({"states":["only"],"Q":[[0.0]],"lambda":[2.0],"policies":["a","b"],)"
        << R"("c":[[1.0,0.0]],"K":0.5,"rho":0.0})";
  }
  CHECK(cli_main({"check", cfg.string(), "--paths", "400"}) == 0);
  CHECK(cli_main({"solve", cfg.string(), "--horizon", "1", "--dt", "0.02", "--out",
                  (dir / "out").string()}) == 0);
}
