#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "msap/config.hpp"
#include "msap/errors.hpp"
#include "msap/experiment.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kIoFailure = 1;
constexpr int kConfigError = 2;
constexpr int kSolverError = 3;

struct Options {
  std::string config;
  std::string out;
  std::string cache = ".msap-cache";
  int threads = 1;
  bool no_cache = false;
};

msap::RunOptions run_options(const Options& o) {
  msap::RunOptions r;
  if (!o.no_cache) r.cache_dir = o.cache;
  r.threads = o.threads;
  return r;
}

std::filesystem::path output_dir(const Options& o, const msap::ExperimentConfig& c) {
  return o.out.empty() ? std::filesystem::path(c.output) : std::filesystem::path(o.out);
}

void print_report(const msap::RunReport& report) {
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& run : report.runs) {
    std::cout << run.params.value("snapshot", "") << "  eps=" << run.params["epsilon"].get<double>()
              << "  delta=" << run.params["delta"].get<double>()
              << "  cells=" << run.params["coarse_cells"].get<int>() << "  "
              << run.params["formulation"].get<std::string>();
    for (const auto& [name, value] : run.errors) std::cout << "  " << name << '=' << value;
    std::cout << '\n';
  }
  for (const auto& rate : report.rates) {
    std::cout << "rate " << rate.name << ": slope " << rate.slope << " (residual " << rate.residual
              << ")\n";
  }
  for (const auto& [name, value] : report.summary) std::cout << name << ": " << value << '\n';
  std::cout << "cache hits: " << report.cache_hits << '\n';
}

int run_and_export(const Options& o, msap::ExperimentConfig config) {
  const msap::RunReport report = msap::run_experiment(config, run_options(o));
  const auto dir = output_dir(o, config);
  msap::export_report(report, dir);
  print_report(report);
  std::cout << "wrote " << (dir / "report.json").string() << '\n';
  return kOk;
}

int cmd_assemble(const Options& o) {
  const auto config = msap::load_config(o.config);
  const auto summary = msap::assemble_experiment(config, run_options(o));
  const auto dir = output_dir(o, config);
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "assembly.json") << summary.dump(2) << '\n';
  for (const auto& s : summary["systems"]) {
    std::cout << s["key"].get<std::string>() << "  " << s["media"].get<std::string>()
              << "  cells=" << s["coarse_cells"].get<int>() << "  size=" << s["size"].get<int>()
              << (s["cache_hit"].get<bool>() ? "  (cached)" : "") << '\n';
  }
  return kOk;
}

int cmd_solve(const Options& o) {
  auto config = msap::load_config(o.config);
  config.reference = config.effective_reference();
  config.kind = msap::ExperimentKind::SingleRun;
  return run_and_export(o, config);
}

int cmd_sweep(const Options& o) {
  const auto config = msap::load_config(o.config);
  if (config.kind != msap::ExperimentKind::EpsSweep &&
      config.kind != msap::ExperimentKind::DeltaSweep &&
      config.kind != msap::ExperimentKind::ResolutionConsistency) {
    throw msap::ConfigError("sweep needs kind eps_sweep, delta_sweep or resolution_consistency, got " +
                            msap::to_string(config.kind));
  }
  return run_and_export(o, config);
}

int cmd_compare(const Options& o) {
  auto config = msap::load_config(o.config);
  config.kind = msap::ExperimentKind::FormulationCompare;
  return run_and_export(o, config);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiscale asymptotic-preserving transport solver"};
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  app.add_option("--config", o.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  app.add_option("--out", o.out, "Output directory (defaults to the config's output)");
  app.add_option("--cache", o.cache, "Matrix cache directory")->capture_default_str();
  app.add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--no-cache", o.no_cache, "Assemble without reading or writing the cache");

  auto* assemble = app.add_subcommand("assemble", "Assemble and cache the spatial matrices");
  auto* solve = app.add_subcommand("solve", "Run each epsilon of the config as a single run");
  auto* sweep = app.add_subcommand("sweep", "Run an epsilon, delta or resolution sweep");
  auto* compare = app.add_subcommand("compare", "Compare the symmetric and asymmetric formulations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (assemble->parsed()) return cmd_assemble(o);
    if (solve->parsed()) return cmd_solve(o);
    if (sweep->parsed()) return cmd_sweep(o);
    if (compare->parsed()) return cmd_compare(o);
  } catch (const msap::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const msap::InvalidMediaError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const msap::SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kSolverError;
  } catch (const msap::AssemblyError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return kSolverError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoFailure;
  }
  return kOk;
}
