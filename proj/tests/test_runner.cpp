#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "attractor/config.hpp"
#include "attractor/runner.hpp"

using namespace attractor;
namespace fs = std::filesystem;

namespace {

json base_config() {
  json j;
  j["experiment"] = "simulate";
  j["seed"] = 42;
  j["basis"] = {{"dim", 1}, {"modes", 8}, {"lengths", {3.141592653589793}}};
  j["damping"] = {{"name", "linear"}, {"k", 1.0}};
  j["nonlinearity"] = {{"name", "zero"}};
  j["forcing"] = {{"kind", "zero"}};
  j["solver"] = {{"dt", 1e-3}, {"record_stride", 100}};
  j["simulate"] = {{"tau", 0.0}, {"t_end", 1.0}, {"initial_radius", 1.0}};
  return j;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("attractor_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("config validation") {
  SECTION("missing solver.dt names the field") {
    json j = base_config();
    j["solver"].erase("dt");
    try {
      parse_config(j);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      const std::string msg = e.what();
      REQUIRE(msg.find("solver.dt") != std::string::npos);
      REQUIRE(msg.find("missing required field") != std::string::npos);
    }
  }
  SECTION("unknown experiment kind") {
    json j = base_config();
    j["experiment"] = "meditate";
    REQUIRE_THROWS_AS(parse_config(j), ConfigError);
  }
  SECTION("seed is mandatory for randomized experiments") {
    json j = base_config();
    j.erase("seed");
    REQUIRE_THROWS_AS(parse_config(j), ConfigError);
    // ... but not when the initial data is explicit,
    j["simulate"]["initial_u"] = {1.0, 0.0};
    REQUIRE_NOTHROW(parse_config(j));
    // ... and not for audits.
    json a = base_config();
    a.erase("seed");
    a["experiment"] = "audit";
    REQUIRE_NOTHROW(parse_config(a));
  }
  SECTION("field-level range checks") {
    json j = base_config();
    j["solver"]["dt"] = -1.0;
    REQUIRE_THROWS_AS(parse_config(j), ConfigError);
    j = base_config();
    j["basis"]["dim"] = 3;
    REQUIRE_THROWS_AS(parse_config(j), ConfigError);
    j = base_config();
    j["solver"]["scheme"] = "leapfrog";
    REQUIRE_THROWS_AS(parse_config(j), ConfigError);
  }
}

TEST_CASE("simulate run writes three artifacts plus the manifest") {
  const fs::path dir = fresh_dir("simulate");
  ExperimentConfig cfg = parse_config(base_config());
  cfg.output_dir = dir.string();
  std::string err;
  REQUIRE(run_experiment(cfg, "2026-01-01T00:00:00Z", &err) == 0);
  REQUIRE(fs::exists(dir / "trajectory.csv"));
  REQUIRE(fs::exists(dir / "energy.csv"));
  REQUIRE(fs::exists(dir / "summary.txt"));
  REQUIRE(fs::exists(dir / "manifest.txt"));

  // Manifest lists exactly the three artifacts with hashes.
  const std::string manifest = slurp(dir / "manifest.txt");
  int file_lines = 0;
  std::stringstream ss(manifest);
  std::string line;
  while (std::getline(ss, line))
    if (!line.empty() && line[0] != '#') ++file_lines;
  REQUIRE(file_lines == 3);
  REQUIRE(manifest.find("trajectory.csv") != std::string::npos);

  // Provenance headers on every CSV.
  const std::string traj = slurp(dir / "trajectory.csv");
  REQUIRE(traj.rfind("# attractor-lab", 0) == 0);
  REQUIRE(traj.find("# config_hash: ") != std::string::npos);
  REQUIRE(traj.find("# seed: 42") != std::string::npos);
}

TEST_CASE("identical config and seed give byte-identical CSVs") {
  const fs::path d1 = fresh_dir("repro1");
  const fs::path d2 = fresh_dir("repro2");
  ExperimentConfig cfg = parse_config(base_config());
  cfg.output_dir = d1.string();
  REQUIRE(run_experiment(cfg, "2026-01-01T00:00:00Z") == 0);
  cfg.output_dir = d2.string();
  REQUIRE(run_experiment(cfg, "2026-02-02T02:02:02Z") == 0);
  REQUIRE(slurp(d1 / "trajectory.csv") == slurp(d2 / "trajectory.csv"));
  REQUIRE(slurp(d1 / "energy.csv") == slurp(d2 / "energy.csv"));
  REQUIRE(slurp(d1 / "summary.txt") == slurp(d2 / "summary.txt"));
}

TEST_CASE("run_experiment exit codes") {
  SECTION("bad spec name after parsing maps to 2") {
    ExperimentConfig cfg = parse_config(base_config());
    cfg.damping.name = "bogus";
    cfg.output_dir = fresh_dir("badspec").string();
    std::string err;
    REQUIRE(run_experiment(cfg, "t", &err) == 2);
    REQUIRE(err.find("damping.name") != std::string::npos);
  }
  SECTION("numerical blow-up maps to 3") {
    json j = base_config();
    j["simulate"]["initial_u"] = {1e13};
    ExperimentConfig cfg = parse_config(j);
    cfg.output_dir = fresh_dir("blowup").string();
    std::string err;
    REQUIRE(run_experiment(cfg, "t", &err) == 3);
    REQUIRE(err.find("blow-up") != std::string::npos);
  }
}

TEST_CASE("audit run reports failures without aborting") {
  json j = base_config();
  j["experiment"] = "audit";
  j["damping"] = {{"name", "zero"}};
  j.erase("seed");
  ExperimentConfig cfg = parse_config(j);
  const fs::path dir = fresh_dir("audit");
  cfg.output_dir = dir.string();
  REQUIRE(run_experiment(cfg, "t") == 0);
  const std::string summary = slurp(dir / "summary.txt");
  REQUIRE(summary.find("FAILED") != std::string::npos);   // h = 0 is not strictly increasing
  REQUIRE(fs::exists(dir / "audit.csv"));
}

TEST_CASE("plots") {
  const fs::path dir = fresh_dir("plot");
  ExperimentConfig cfg = parse_config(base_config());
  cfg.output_dir = dir.string();
  REQUIRE(run_experiment(cfg, "t") == 0);

  SECTION("energy plot is deterministic SVG") {
    const std::string svg = plot_csv((dir / "energy.csv").string(), "energy");
    REQUIRE(svg.rfind("<svg", 0) == 0);
    REQUIRE(svg.find("<polyline") != std::string::npos);
    REQUIRE(svg == plot_csv((dir / "energy.csv").string(), "energy"));
  }
  SECTION("unknown kind is rejected") {
    REQUIRE_THROWS_AS(plot_csv((dir / "energy.csv").string(), "sculpture"), Error);
  }
  SECTION("read_csv skips provenance headers") {
    const CsvData data = read_csv((dir / "energy.csv").string());
    REQUIRE(data.column("time") == 0);
    REQUIRE(data.column("e0") == 1);
    REQUIRE_FALSE(data.rows.empty());
    REQUIRE(data.rows[0][0] == 0.0);
  }
}

TEST_CASE("attractor and pullback runs produce cloud artifacts") {
  json j = base_config();
  j["experiment"] = "attractor";
  j["nonlinearity"] = {{"name", "linear"}};
  j["attractor"] = {{"samples", 2}, {"ball_radius", 1.0}, {"sample_times", {1.0, 2.0}}};
  j["solver"] = {{"dt", 5e-3}};
  ExperimentConfig cfg = parse_config(j);
  const fs::path dir = fresh_dir("cloud");
  cfg.output_dir = dir.string();
  REQUIRE(run_experiment(cfg, "t") == 0);
  REQUIRE(fs::exists(dir / "cloud.csv"));
  REQUIRE(fs::exists(dir / "semidist.csv"));
  const std::string svg = plot_csv((dir / "cloud.csv").string(), "cloud");
  REQUIRE(svg.find("<circle") != std::string::npos);

  json p = base_config();
  p["experiment"] = "pullback";
  p["nonlinearity"] = {{"name", "linear"}};
  p["pullback"] = {{"phase", 0.0}, {"horizons", {1.0, 2.0}}, {"samples", 2},
                   {"ball_radius", 1.0}};
  p["solver"] = {{"dt", 5e-3}};
  ExperimentConfig pc = parse_config(p);
  const fs::path pdir = fresh_dir("pullback");
  pc.output_dir = pdir.string();
  REQUIRE(run_experiment(pc, "t") == 0);
  REQUIRE(fs::exists(pdir / "cloud_T1.csv"));
  REQUIRE(fs::exists(pdir / "cloud_T2.csv"));
  REQUIRE(fs::exists(pdir / "semidist.csv"));
}
