// Command-line front end.
//
//   attractor-lab run <config.json>     run an experiment, write artifacts
//   attractor-lab plot <csv> --kind k   render an SVG next to the CSV
//   attractor-lab audit <config.json>   print hypothesis checks
//
// Exit codes: 0 success, 2 config/schema violation, 3 numerical abort.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "attractor/config.hpp"
#include "attractor/runner.hpp"

namespace {

std::string now_utc() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int cmd_run(const std::string& config_path, const std::string& output_override) {
  attractor::ExperimentConfig cfg;
  try {
    cfg = attractor::load_config(config_path);
  } catch (const attractor::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const attractor::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  if (!output_override.empty()) {
    cfg.output_dir = output_override;
  } else if (const char* env = std::getenv("ATTRACTOR_LAB_OUT")) {
    cfg.output_dir = std::string(env) + "/" + cfg.output_dir;
  }
  std::string err;
  const int rc = attractor::run_experiment(cfg, now_utc(), &err);
  if (rc != 0) {
    std::cerr << "error: " << err << "\n";
    return rc;
  }
  std::cout << "wrote artifacts to " << cfg.output_dir << "\n";
  return 0;
}

int cmd_plot(const std::string& csv_path, const std::string& kind, std::string out_path) {
  try {
    const std::string svg = attractor::plot_csv(csv_path, kind);
    if (out_path.empty()) {
      out_path = csv_path;
      const auto pos = out_path.rfind(".csv");
      if (pos != std::string::npos) out_path.erase(pos);
      out_path += ".svg";
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw attractor::Error("cannot write " + out_path);
    out << svg;
    std::cout << "wrote " << out_path << "\n";
    return 0;
  } catch (const attractor::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_audit(const std::string& config_path) {
  attractor::ExperimentConfig cfg;
  try {
    cfg = attractor::load_config(config_path);
  } catch (const attractor::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  try {
    const attractor::RunContext ctx = attractor::make_context(cfg);
    const auto& a = cfg.audit;
    const attractor::AuditReport dr =
        attractor::audit_damping(ctx.damping, a.s_max, a.s0, a.grid_points);
    const attractor::AuditReport nr = attractor::audit_nonlinearity(
        ctx.nonlin, ctx.basis.lambda1(), a.s_max, a.s0, a.grid_points);
    auto print = [](const std::string& target, const attractor::AuditReport& rep) {
      for (const auto& c : rep.checks)
        std::cout << target << "." << c.name << ": " << (c.pass ? "pass" : "FAILED")
                  << " (margin " << attractor::fmt(c.margin) << ")\n";
      for (const auto& [k, v] : rep.fitted)
        std::cout << target << " fitted " << k << " = " << attractor::fmt(v) << "\n";
    };
    print("damping", dr);
    print("nonlinearity", nr);
    return 0;
  } catch (const attractor::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral simulator and analysis toolkit for the damped wave equation"};
  app.require_subcommand(1);

  std::string config_path, output_override, csv_path, kind = "energy", out_path;

  CLI::App* run = app.add_subcommand("run", "run an experiment from a config file");
  run->add_option("config", config_path, "path to the JSON config")->required();
  run->add_option("--output", output_override, "override the output directory");

  CLI::App* plot = app.add_subcommand("plot", "render an SVG from a result CSV");
  plot->add_option("csv", csv_path, "path to the CSV")->required();
  plot->add_option("--kind", kind, "plot kind: energy, semidist, cloud");
  plot->add_option("-o,--output", out_path, "output SVG path");

  CLI::App* audit = app.add_subcommand("audit", "check structural hypotheses of a config");
  audit->add_option("config", config_path, "path to the JSON config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (run->parsed()) return cmd_run(config_path, output_override);
  if (plot->parsed()) return cmd_plot(csv_path, kind, out_path);
  return cmd_audit(config_path);
}
