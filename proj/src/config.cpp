#include "msap/config.hpp"

#include <cmath>
#include <algorithm>
#include <fstream>
#include <set>

#include "msap/errors.hpp"
#include "msap/media.hpp"

namespace msap {

using nlohmann::json;

namespace {

template <class Enum>
struct Names {
  Enum value;
  const char* name;
};

constexpr Names<ExperimentKind> kKinds[] = {
    {ExperimentKind::SingleRun, "single_run"},
    {ExperimentKind::EpsSweep, "eps_sweep"},
    {ExperimentKind::DeltaSweep, "delta_sweep"},
    {ExperimentKind::ResolutionConsistency, "resolution_consistency"},
    {ExperimentKind::FormulationCompare, "formulation_compare"},
};

constexpr Names<Reference> kReferences[] = {
    {Reference::Auto, "auto"},
    {Reference::None, "none"},
    {Reference::ResolvedHeat, "resolved_heat"},
    {Reference::HomogenizedHeat, "homogenized_heat"},
    {Reference::LimitScheme, "limit"},
};

constexpr Names<BasisMode> kBases[] = {
    {BasisMode::Multiscale, "multiscale"},
    {BasisMode::Affine, "affine"},
};

constexpr Names<Formulation> kFormulations[] = {
    {Formulation::Symmetric, "symmetric"},
    {Formulation::Asymmetric, "asymmetric"},
};

template <class Enum, std::size_t K>
Enum lookup(const Names<Enum> (&table)[K], const std::string& name, const char* field) {
  for (const auto& entry : table) {
    if (name == entry.name) return entry.value;
  }
  throw ConfigError(std::string("unknown ") + field + " '" + name + "'");
}

template <class Enum, std::size_t K>
std::string name_of(const Names<Enum> (&table)[K], Enum value) {
  for (const auto& entry : table) {
    if (entry.value == value) return entry.name;
  }
  return "?";
}

const std::set<std::string> kKeys = {
    "kind",        "media",       "delta",         "media_file", "dimension",
    "coarse_cells", "refinement_ratio", "order",   "quadrature", "epsilons",
    "deltas",      "dt",          "final_time",    "initial",    "basis",
    "formulation", "reference",   "mirror_x",      "tolerance",  "homogenization_resolution",
    "output",      "snapshots",
};

template <class T>
void read(const json& j, const char* key, T& target) {
  if (!j.contains(key)) return;
  try {
    target = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

template <class T>
void read(const json& j, const char* key, std::optional<T>& target) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  T value{};
  read(j, key, value);
  target = value;
}

}  // namespace

std::string to_string(ExperimentKind kind) { return name_of(kKinds, kind); }
std::string to_string(Reference reference) { return name_of(kReferences, reference); }

int ExperimentConfig::steps() const {
  return static_cast<int>(std::lround(final_time / dt));
}

Reference ExperimentConfig::effective_reference() const {
  if (reference != Reference::Auto) return reference;
  switch (kind) {
    case ExperimentKind::EpsSweep:
      return Reference::ResolvedHeat;
    case ExperimentKind::DeltaSweep:
      return Reference::HomogenizedHeat;
    default:
      return Reference::None;
  }
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& item : j.items()) {
    if (!kKeys.count(item.key())) throw ConfigError("unknown config key '" + item.key() + "'");
  }
  ExperimentConfig c;
  std::string text;

  if (j.contains("kind")) {
    read(j, "kind", text);
    c.kind = lookup(kKinds, text, "experiment kind");
  }
  read(j, "media", c.media);
  read(j, "delta", c.delta);
  read(j, "media_file", c.media_file);
  read(j, "dimension", c.dimension);
  if (j.contains("coarse_cells") && j.at("coarse_cells").is_number_integer()) {
    c.coarse_cells = {j.at("coarse_cells").get<int>()};
  } else {
    read(j, "coarse_cells", c.coarse_cells);
  }
  read(j, "refinement_ratio", c.refinement_ratio);
  read(j, "order", c.order);
  read(j, "quadrature", c.quadrature);
  read(j, "epsilons", c.epsilons);
  read(j, "deltas", c.deltas);
  read(j, "dt", c.dt);
  read(j, "final_time", c.final_time);
  read(j, "initial", c.initial);
  if (j.contains("basis")) {
    read(j, "basis", text);
    c.basis = lookup(kBases, text, "basis mode");
  }
  if (j.contains("formulation")) {
    read(j, "formulation", text);
    c.formulation = lookup(kFormulations, text, "formulation");
  }
  if (j.contains("reference")) {
    read(j, "reference", text);
    c.reference = lookup(kReferences, text, "reference");
  }
  read(j, "mirror_x", c.mirror_x);
  read(j, "tolerance", c.tolerance);
  read(j, "homogenization_resolution", c.homogenization_resolution);
  read(j, "output", c.output);
  read(j, "snapshots", c.snapshots);
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("malformed config " + path + ": " + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
  json j = {
      {"kind", to_string(c.kind)},
      {"media", c.media},
      {"dimension", c.dimension},
      {"coarse_cells", c.coarse_cells},
      {"refinement_ratio", c.refinement_ratio},
      {"order", c.order},
      {"epsilons", c.epsilons},
      {"deltas", c.deltas},
      {"dt", c.dt},
      {"final_time", c.final_time},
      {"initial", c.initial},
      {"basis", name_of(kBases, c.basis)},
      {"formulation", name_of(kFormulations, c.formulation)},
      {"reference", to_string(c.reference)},
      {"mirror_x", c.mirror_x},
      {"tolerance", c.tolerance},
      {"homogenization_resolution", c.homogenization_resolution},
      {"output", c.output},
      {"snapshots", c.snapshots},
  };
  if (c.delta) j["delta"] = *c.delta;
  if (c.media_file) j["media_file"] = *c.media_file;
  if (c.quadrature) j["quadrature"] = *c.quadrature;
  return j;
}

void validate(const ExperimentConfig& c) {
  if (c.dimension != 1 && c.dimension != 2) throw ConfigError("dimension must be 1 or 2");
  if (c.coarse_cells.empty()) throw ConfigError("coarse_cells must not be empty");
  for (int n : c.coarse_cells) {
    if (n < 2) throw ConfigError("coarse_cells entries must be at least 2");
  }
  if (c.refinement_ratio < 2) throw ConfigError("refinement_ratio must be at least 2");
  if (c.order < 1) throw ConfigError("order must be at least 1");
  if (c.quadrature && *c.quadrature < c.order + 2) {
    throw ConfigError("quadrature must be at least order + 2");
  }
  if (c.epsilons.empty()) throw ConfigError("epsilons must not be empty");
  for (Real e : c.epsilons) {
    if (!(e > 0)) throw ConfigError("epsilons must be positive");
  }
  for (Real d : c.deltas) {
    if (!(d > 0)) throw ConfigError("deltas must be positive");
  }
  if (!(c.dt > 0) || !(c.final_time > 0)) throw ConfigError("dt and final_time must be positive");
  if (std::abs(c.steps() * c.dt - c.final_time) > 1e-9 * c.final_time || c.steps() < 1) {
    throw ConfigError("final_time must be a positive multiple of dt");
  }
  if (!(c.tolerance > 0)) throw ConfigError("tolerance must be positive");
  if (c.homogenization_resolution < 16) {
    throw ConfigError("homogenization_resolution must be at least 16");
  }
  if (c.initial != "cosine" && c.initial != "shifted_cosine" && c.initial != "constant") {
    throw ConfigError("unknown initial density '" + c.initial + "'");
  }
  if (!c.media_file) {
    const auto& names = builtin_media_names();
    if (std::find(names.begin(), names.end(), c.media) == names.end()) {
      throw ConfigError("unknown media '" + c.media + "'");
    }
  }

  switch (c.kind) {
    case ExperimentKind::EpsSweep:
      if (c.epsilons.size() < 3) throw ConfigError("eps_sweep needs at least three epsilons");
      break;
    case ExperimentKind::DeltaSweep:
      if (c.deltas.size() < 3) throw ConfigError("delta_sweep needs at least three deltas");
      if (c.media_file) throw ConfigError("delta_sweep needs a builtin media");
      break;
    case ExperimentKind::ResolutionConsistency:
      if (c.coarse_cells.size() < 2) {
        throw ConfigError("resolution_consistency needs at least two coarse_cells entries");
      }
      break;
    default:
      break;
  }
  if (c.kind != ExperimentKind::ResolutionConsistency && c.coarse_cells.size() != 1) {
    throw ConfigError("coarse_cells must have a single entry for this experiment kind");
  }
}

DensityFunction initial_density(const std::string& name, int dimension, Real shift) {
  if (name == "constant") return [](Point) { return 1.0; };
  if (name != "cosine" && name != "shifted_cosine") {
    throw ConfigError("unknown initial density '" + name + "'");
  }
  const Real x0 = name == "shifted_cosine" ? shift : 0.0;
  if (dimension == 1) {
    return [x0](Point p) { return 1.0 + 0.5 * std::cos(kPi * (p.x - x0)); };
  }
  return [x0](Point p) { return 1.0 + 0.5 * std::cos(kPi * (p.x - x0)) * std::cos(kPi * p.y); };
}

}  // namespace msap
