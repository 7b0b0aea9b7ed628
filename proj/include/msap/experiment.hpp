#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "msap/config.hpp"
#include "msap/media.hpp"
#include "msap/mesh.hpp"
#include "msap/types.hpp"

namespace msap {

struct RunOptions {
  std::optional<std::filesystem::path> cache_dir;  // no caching when empty
  int threads = 1;
};

/// Final coarse-node density of one run.
struct Snapshot {
  std::string label;
  int dimension = 1;
  std::vector<Point> nodes;
  Vector values;
};

struct RunRecord {
  nlohmann::json params;
  std::map<std::string, Real> errors;
  Real assemble_seconds = 0;
  Real reference_seconds = 0;
  Real solve_seconds = 0;
  bool cache_hit = false;
  Real max_residual = 0;
};

struct RateRecord {
  std::string name;
  Real slope = 0;
  Real residual = 0;
};

struct RunReport {
  ExperimentConfig config;
  std::string fingerprint;
  std::vector<RunRecord> runs;
  std::vector<RateRecord> rates;
  std::map<std::string, Real> summary;
  std::vector<std::string> warnings;
  std::vector<Snapshot> snapshots;
  int cache_hits = 0;

  nlohmann::json to_json() const;
};

/// Media named by the config; `delta` overrides the configured period.
MediaSpec make_media(const ExperimentConfig& config, std::optional<Real> delta = std::nullopt);

/// Regime checks that do not invalidate a config: eps > delta/4 and h > delta/8.
std::vector<std::string> regime_warnings(const ExperimentConfig& config);

/// Runs every member of the experiment (in a worker pool of
/// `options.threads`) and collects errors, fitted rates and snapshots.
/// Deterministic given the config, apart from timings and cache hits.
RunReport run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Assembles (and caches) the spatial systems the config needs without
/// time stepping. Returns a JSON summary of matrix shapes and keys.
nlohmann::json assemble_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// CSV with header x[,y],value and 17 significant digits per float.
void write_snapshot_csv(const std::filesystem::path& path, const Snapshot& snapshot);

/// report.json plus one CSV per snapshot in `directory`.
void export_report(const RunReport& report, const std::filesystem::path& directory);

/// Nodes of `fine` that coincide with the nodes of `coarse` (node order of
/// `coarse`). Both meshes must span the same domain and nest.
std::vector<int> shared_nodes(const NestedMesh& coarse, const NestedMesh& fine);

/// Index map of the reflection x -> 2 x0 - x on the coarse nodes. Throws
/// ConfigError when the reflection does not map nodes onto nodes.
std::vector<int> mirror_map(const NestedMesh& mesh, Real x0);

}  // namespace msap
