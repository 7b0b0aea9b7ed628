#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "msap/msfem_basis.hpp"
#include "msap/solvers.hpp"
#include "msap/types.hpp"

namespace msap {

enum class ExperimentKind { SingleRun, EpsSweep, DeltaSweep, ResolutionConsistency, FormulationCompare };

/// What a run's density is measured against.
enum class Reference {
  Auto,              // chosen by the experiment kind
  None,
  ResolvedHeat,      // oscillatory heat equation on a refined mesh
  HomogenizedHeat,   // heat equation with a_hom on the same coarse mesh
  LimitScheme,       // discrete limit of the transport scheme
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::SingleRun;
  std::string media = "sine20";
  std::optional<Real> delta;
  std::optional<std::string> media_file;  // CSV table, overrides `media`
  int dimension = 1;
  std::vector<int> coarse_cells{100};
  int refinement_ratio = 8;
  int order = 4;
  std::optional<int> quadrature;
  std::vector<Real> epsilons{1e-2};
  std::vector<Real> deltas;
  Real dt = 1e-3;
  Real final_time = 0.1;
  std::string initial = "cosine";
  BasisMode basis = BasisMode::Multiscale;
  Formulation formulation = Formulation::Symmetric;
  Reference reference = Reference::Auto;
  Real mirror_x = 0.0;  // reflection axis x = mirror_x for formulation_compare
  Real tolerance = 1e-10;
  int homogenization_resolution = 128;
  std::string output = "out";
  bool snapshots = true;

  int steps() const;
  Reference effective_reference() const;
};

/// Throws ConfigError on unknown keys, wrong types and violated ranges.
ExperimentConfig parse_config(const nlohmann::json& value);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& config);
void validate(const ExperimentConfig& config);

std::string to_string(ExperimentKind kind);
std::string to_string(Reference reference);

/// Initial density by name: "cosine" (1 + cos(pi x)/2, times cos(pi y) in
/// 2D), "shifted_cosine" (same profile centred on x = shift) and "constant".
DensityFunction initial_density(const std::string& name, int dimension, Real shift = 0.0);

}  // namespace msap
