#include "msap/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include "fine_element.hpp"
#include "msap/assembly.hpp"
#include "msap/errors.hpp"
#include "msap/matrix_cache.hpp"
#include "msap/metrics.hpp"
#include "msap/msfem_basis.hpp"
#include "msap/solvers.hpp"
#include "msap/velocity_basis.hpp"

namespace msap {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

Real seconds_since(Clock::time_point start) {
  return std::chrono::duration<Real>(Clock::now() - start).count();
}

Real heat_constant(int dimension) { return dimension == 1 ? 1.0 / 3.0 : 0.5; }

VelocityMode velocity_mode(int dimension) {
  return dimension == 1 ? VelocityMode::Slab1D : VelocityMode::Circle2D;
}

std::string label_for(int index) {
  std::ostringstream out;
  out << "run_" << (index < 10 ? "0" : "") << index;
  return out.str();
}

struct Context {
  const ExperimentConfig& config;
  const MatrixCache* cache;
  VelocitySystem velocity;
  std::atomic<int> hits{0};
};

struct Prepared {
  SpatialSystem system;
  bool hit = false;
  Real seconds = 0;
};

Prepared prepare(Context& ctx, const MediaSpec& media, const NestedMesh& mesh, int threads) {
  const auto start = Clock::now();
  Prepared p;
  p.system = cached_spatial_system(ctx.cache, media, mesh, ctx.config.basis, ctx.config.order,
                                   ctx.velocity.rule.size(), threads, &p.hit);
  if (p.hit) ++ctx.hits;
  p.seconds = seconds_since(start);
  return p;
}

struct Transport {
  KineticState state;
  Real max_residual = 0;
  Real seconds = 0;
};

Transport run_transport(const Context& ctx, const SpatialSystem& sys, const NestedMesh& mesh,
                        Real epsilon, Formulation formulation, const DensityFunction& rho0) {
  const auto start = Clock::now();
  StepperConfig cfg{epsilon, ctx.config.dt, formulation, ctx.config.tolerance};
  Transport out;
  try {
    const TransportStepper stepper(sys, ctx.velocity, cfg);
    out.state = project_initial(rho0, mesh, ctx.velocity);
    for (int n = 0; n < ctx.config.steps(); ++n) {
      out.state = stepper.step(out.state);
      out.max_residual = std::max(out.max_residual, stepper.last_residual());
    }
  } catch (const SolverError& e) {
    std::ostringstream what;
    what << "transport run with epsilon " << epsilon << " on " << mesh.coarse_cells_per_axis()
         << " coarse cells failed: " << e.what();
    throw SolverError(what.str(), e.residual());
  }
  out.seconds = seconds_since(start);
  return out;
}

// Coarse refinement factor and fine ratio with H <= delta/4 and h <= delta/16.
std::pair<int, int> resolved_levels(const NestedMesh& mesh, Real delta) {
  const Real n = mesh.coarse_cells_per_axis();
  const Real len = mesh.length();
  const int factor = std::max(1, static_cast<int>(std::ceil(4.0 * len / (n * delta) - 1e-9)));
  const int ratio = std::max(
      mesh.ratio(), static_cast<int>(std::ceil(16.0 * len / (n * factor * delta) - 1e-9)));
  return {factor, ratio};
}

struct ReferenceResult {
  Vector values;  // at the coarse nodes of the run mesh
  Real seconds = 0;
};

ReferenceResult reference_density(Context& ctx, Reference kind, const MediaSpec& media,
                                  const NestedMesh& mesh, const SpatialSystem& sys,
                                  const DensityFunction& rho0, int threads) {
  const auto start = Clock::now();
  const ExperimentConfig& c = ctx.config;
  const Real constant = heat_constant(mesh.dimension());
  ReferenceResult out;
  switch (kind) {
    case Reference::None:
    case Reference::Auto:
      return out;
    case Reference::ResolvedHeat: {
      const auto [factor, ratio] = resolved_levels(mesh, media.delta());
      const NestedMesh fine(mesh.dimension(), mesh.coarse_cells_per_axis() * factor, ratio,
                            mesh.lower(), mesh.upper());
      bool hit = false;
      const SpatialSystem ref = cached_spatial_system(ctx.cache, media, fine, BasisMode::Multiscale,
                                                      c.order, ctx.velocity.rule.size(), threads,
                                                      &hit);
      if (hit) ++ctx.hits;
      const HeatStepper stepper(ref.mass, ref.stiffness, c.dt, constant);
      ScalarState s = interpolate_density(rho0, fine);
      for (int n = 0; n < c.steps(); ++n) s = stepper.step(s);
      const auto nodes = shared_nodes(mesh, fine);
      out.values.resize(static_cast<Eigen::Index>(nodes.size()));
      for (std::size_t i = 0; i < nodes.size(); ++i) out.values(i) = s.values(nodes[i]);
      break;
    }
    case Reference::HomogenizedHeat: {
      const Matrix a_hom = homogenized_coefficient(media, c.homogenization_resolution).a_hom;
      const BasisSet affine = build_global_basis(mesh, media, BasisMode::Affine, threads);
      const SparseMatrix mass = assemble_spatial(affine, a_hom, threads).mass;
      const SparseMatrix stiffness = assemble_heat(affine, a_hom);
      const HeatStepper stepper(mass, stiffness, c.dt, constant);
      ScalarState s = interpolate_density(rho0, mesh);
      for (int n = 0; n < c.steps(); ++n) s = stepper.step(s);
      out.values = s.values;
      break;
    }
    case Reference::LimitScheme: {
      const LimitStepper stepper(sys.mass, velocity_weighted_limit(sys, ctx.velocity), c.dt, 1.0);
      ScalarState s = interpolate_density(rho0, mesh);
      for (int n = 0; n < c.steps(); ++n) s = stepper.step(s);
      out.values = s.values;
      break;
    }
  }
  out.seconds = seconds_since(start);
  return out;
}

Snapshot make_snapshot(const std::string& label, const NestedMesh& mesh, const Vector& values) {
  Snapshot s;
  s.label = label;
  s.dimension = mesh.dimension();
  s.nodes.reserve(static_cast<std::size_t>(mesh.num_coarse_nodes()));
  for (int m = 0; m < mesh.num_coarse_nodes(); ++m) s.nodes.push_back(mesh.coarse_node(m));
  s.values = values;
  return s;
}

void record_reference_errors(RunRecord& run, const Transport& t, const ReferenceResult& ref,
                             const NestedMesh& mesh) {
  if (ref.values.size() == 0) return;
  run.errors["density_l2"] = error_norm(density(t.state), ref.values, mesh);
  run.errors["kinetic_l2"] = kinetic_error_norm(t.state, ref.values, mesh);
  run.reference_seconds = ref.seconds;
}

void add_rates(RunReport& report, const std::string& parameter,
               const std::vector<Real>& parameters) {
  for (const char* name : {"density_l2", "kinetic_l2"}) {
    std::vector<std::pair<Real, Real>> pairs;
    for (std::size_t i = 0; i < report.runs.size(); ++i) {
      const auto it = report.runs[i].errors.find(name);
      if (it == report.runs[i].errors.end()) break;
      pairs.emplace_back(parameters[i], it->second);
    }
    if (pairs.size() < 3 || pairs.size() != report.runs.size()) continue;
    const RateFit fit = fit_rate(pairs);
    report.rates.push_back({std::string(name) + "_vs_" + parameter, fit.slope, fit.residual});
  }
}

json run_params(const ExperimentConfig& c, const NestedMesh& mesh, const MediaSpec& media,
                Real epsilon, Formulation formulation) {
  return {{"epsilon", epsilon},
          {"delta", media.delta()},
          {"media", media.name()},
          {"coarse_cells", mesh.coarse_cells_per_axis()},
          {"refinement_ratio", mesh.ratio()},
          {"formulation", formulation == Formulation::Symmetric ? "symmetric" : "asymmetric"},
          {"steps", c.steps()}};
}

void check_dimension(const MediaSpec& media, const ExperimentConfig& c) {
  if (media.dimension() != c.dimension) {
    throw ConfigError("media '" + media.name() + "' is " + std::to_string(media.dimension()) +
                      "D but the config asks for dimension " + std::to_string(c.dimension));
  }
}

}  // namespace

MediaSpec make_media(const ExperimentConfig& c, std::optional<Real> delta) {
  if (c.media_file) {
    const std::string name = fs::path(*c.media_file).stem().string();
    try {
      return MediaSpec::tabulated(name, read_media_table(*c.media_file));
    } catch (const IoError& e) {
      throw ConfigError(e.what());
    }
  }
  return builtin_media(c.media, delta ? delta : c.delta);
}

std::vector<std::string> regime_warnings(const ExperimentConfig& c) {
  std::vector<std::string> out;
  std::vector<Real> deltas = c.deltas;
  if (deltas.empty()) deltas.push_back(make_media(c).delta());
  const Real max_eps = *std::max_element(c.epsilons.begin(), c.epsilons.end());
  for (Real delta : deltas) {
    if (max_eps > delta / 4) {
      std::ostringstream w;
      w << "epsilon " << max_eps << " exceeds delta/4 = " << delta / 4
        << "; the scheme targets eps << delta";
      out.push_back(w.str());
    }
    for (int n : c.coarse_cells) {
      const Real h = 2.0 / (n * c.refinement_ratio);
      if (h > delta / 8) {
        std::ostringstream w;
        w << "fine size " << h << " on " << n << " coarse cells exceeds delta/8 = " << delta / 8
          << "; local problems are under-resolved";
        out.push_back(w.str());
      }
    }
  }
  return out;
}

std::vector<int> shared_nodes(const NestedMesh& coarse, const NestedMesh& fine) {
  const int nc = coarse.coarse_cells_per_axis();
  const int nf = fine.coarse_cells_per_axis();
  if (coarse.dimension() != fine.dimension() || nf % nc != 0 ||
      coarse.lower() != fine.lower() || coarse.upper() != fine.upper()) {
    throw ConfigError("meshes with " + std::to_string(nc) + " and " + std::to_string(nf) +
                      " coarse cells do not nest");
  }
  const int k = nf / nc;
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(coarse.num_coarse_nodes()));
  for (int m = 0; m < coarse.num_coarse_nodes(); ++m) {
    const int i = m % nc;
    const int j = m / nc;
    out.push_back(coarse.dimension() == 1 ? i * k : (j * k) * nf + i * k);
  }
  return out;
}

std::vector<int> mirror_map(const NestedMesh& mesh, Real x0) {
  const int n = mesh.coarse_cells_per_axis();
  const Real shift = 2.0 * (x0 - mesh.lower()) / mesh.coarse_size();
  const long s = std::lround(shift);
  if (std::abs(shift - static_cast<Real>(s)) > 1e-9) {
    std::ostringstream what;
    what << "reflection about x = " << x0 << " does not map the coarse nodes onto themselves";
    throw ConfigError(what.str());
  }
  std::vector<int> out(static_cast<std::size_t>(mesh.num_coarse_nodes()));
  for (int m = 0; m < mesh.num_coarse_nodes(); ++m) {
    const int i = m % n;
    const int j = m / n;
    const int mirrored = static_cast<int>(((s - i) % n + n) % n);
    out[static_cast<std::size_t>(m)] = j * n + mirrored;
  }
  return out;
}

json RunReport::to_json() const {
  json cfg = msap::to_json(config);
  json runs_json = json::array();
  for (const RunRecord& r : runs) {
    json errors = json::object();
    for (const auto& [k, v] : r.errors) errors[k] = v;
    runs_json.push_back({{"params", r.params},
                         {"errors", errors},
                         {"timings",
                          {{"assemble_seconds", r.assemble_seconds},
                           {"reference_seconds", r.reference_seconds},
                           {"solve_seconds", r.solve_seconds}}},
                         {"cache_hit", r.cache_hit},
                         {"max_residual", r.max_residual}});
  }
  json rates_json = json::array();
  for (const RateRecord& r : rates) {
    rates_json.push_back({{"name", r.name}, {"slope", r.slope}, {"residual", r.residual}});
  }
  json summary_json = json::object();
  for (const auto& [k, v] : summary) summary_json[k] = v;
  return {{"config", cfg},        {"fingerprint", fingerprint},
          {"runs", runs_json},    {"rates", rates_json},
          {"summary", summary_json}, {"warnings", warnings},
          {"cache_hits", cache_hits}};
}

RunReport run_experiment(const ExperimentConfig& c, const RunOptions& options) {
  validate(c);
  std::unique_ptr<MatrixCache> cache;
  if (options.cache_dir) cache = std::make_unique<MatrixCache>(*options.cache_dir);
  Context ctx{c, cache.get(),
              make_velocity_system(c.order, velocity_mode(c.dimension), c.quadrature)};
  const int threads = std::max(1, options.threads);

  RunReport report;
  report.config = c;
  json identity = to_json(c);
  identity.erase("output");
  report.fingerprint = msap::fingerprint(identity);
  report.warnings = regime_warnings(c);

  const Reference ref_kind = c.effective_reference();
  const DensityFunction rho0 = initial_density(c.initial, c.dimension, c.mirror_x);

  switch (c.kind) {
    case ExperimentKind::SingleRun:
    case ExperimentKind::EpsSweep: {
      const MediaSpec media = make_media(c);
      check_dimension(media, c);
      const NestedMesh mesh(c.dimension, c.coarse_cells.front(), c.refinement_ratio);
      const Prepared prep = prepare(ctx, media, mesh, threads);
      const ReferenceResult ref =
          reference_density(ctx, ref_kind, media, mesh, prep.system, rho0, threads);
      const int count = static_cast<int>(c.epsilons.size());
      report.runs.resize(static_cast<std::size_t>(count));
      report.snapshots.resize(static_cast<std::size_t>(count));
      detail::parallel_for(count, threads, [&](int i) {
        const Real eps = c.epsilons[static_cast<std::size_t>(i)];
        const Transport t = run_transport(ctx, prep.system, mesh, eps, c.formulation, rho0);
        RunRecord& run = report.runs[static_cast<std::size_t>(i)];
        run.params = run_params(c, mesh, media, eps, c.formulation);
        run.assemble_seconds = prep.seconds;
        run.solve_seconds = t.seconds;
        run.cache_hit = prep.hit;
        run.max_residual = t.max_residual;
        record_reference_errors(run, t, ref, mesh);
        report.snapshots[static_cast<std::size_t>(i)] =
            make_snapshot(label_for(i), mesh, density(t.state));
      });
      if (c.kind == ExperimentKind::EpsSweep) add_rates(report, "epsilon", c.epsilons);
      break;
    }
    case ExperimentKind::DeltaSweep: {
      const int count = static_cast<int>(c.deltas.size());
      const Real eps = c.epsilons.front();
      report.runs.resize(static_cast<std::size_t>(count));
      report.snapshots.resize(static_cast<std::size_t>(count));
      const NestedMesh mesh(c.dimension, c.coarse_cells.front(), c.refinement_ratio);
      const int inner = count >= threads ? 1 : threads;
      detail::parallel_for(count, threads, [&](int i) {
        const MediaSpec media = make_media(c, c.deltas[static_cast<std::size_t>(i)]);
        check_dimension(media, c);
        const Prepared prep = prepare(ctx, media, mesh, inner);
        const ReferenceResult ref =
            reference_density(ctx, ref_kind, media, mesh, prep.system, rho0, inner);
        const Transport t = run_transport(ctx, prep.system, mesh, eps, c.formulation, rho0);
        RunRecord& run = report.runs[static_cast<std::size_t>(i)];
        run.params = run_params(c, mesh, media, eps, c.formulation);
        run.assemble_seconds = prep.seconds;
        run.solve_seconds = t.seconds;
        run.cache_hit = prep.hit;
        run.max_residual = t.max_residual;
        record_reference_errors(run, t, ref, mesh);
        report.snapshots[static_cast<std::size_t>(i)] =
            make_snapshot(label_for(i), mesh, density(t.state));
      });
      add_rates(report, "delta", c.deltas);
      break;
    }
    case ExperimentKind::ResolutionConsistency: {
      const MediaSpec media = make_media(c);
      check_dimension(media, c);
      const int count = static_cast<int>(c.coarse_cells.size());
      const Real eps = c.epsilons.front();
      const int coarsest = *std::min_element(c.coarse_cells.begin(), c.coarse_cells.end());
      const int finest = *std::max_element(c.coarse_cells.begin(), c.coarse_cells.end());
      const NestedMesh base(c.dimension, coarsest, c.refinement_ratio);
      std::vector<Vector> on_base(static_cast<std::size_t>(count));
      report.runs.resize(static_cast<std::size_t>(count));
      report.snapshots.resize(static_cast<std::size_t>(count));
      for (int n : c.coarse_cells) shared_nodes(base, NestedMesh(c.dimension, n, 1));
      const int inner = count >= threads ? 1 : threads;
      detail::parallel_for(count, threads, [&](int i) {
        const NestedMesh mesh(c.dimension, c.coarse_cells[static_cast<std::size_t>(i)],
                              c.refinement_ratio);
        const Prepared prep = prepare(ctx, media, mesh, inner);
        const ReferenceResult ref =
            reference_density(ctx, ref_kind, media, mesh, prep.system, rho0, inner);
        const Transport t = run_transport(ctx, prep.system, mesh, eps, c.formulation, rho0);
        RunRecord& run = report.runs[static_cast<std::size_t>(i)];
        run.params = run_params(c, mesh, media, eps, c.formulation);
        run.assemble_seconds = prep.seconds;
        run.solve_seconds = t.seconds;
        run.cache_hit = prep.hit;
        run.max_residual = t.max_residual;
        record_reference_errors(run, t, ref, mesh);
        const Vector rho = density(t.state);
        const auto nodes = shared_nodes(base, mesh);
        Vector sampled(static_cast<Eigen::Index>(nodes.size()));
        for (std::size_t k = 0; k < nodes.size(); ++k) sampled(k) = rho(nodes[k]);
        on_base[static_cast<std::size_t>(i)] = sampled;
        report.snapshots[static_cast<std::size_t>(i)] = make_snapshot(label_for(i), mesh, rho);
      });
      const auto fine_it = std::find(c.coarse_cells.begin(), c.coarse_cells.end(), finest);
      const Vector& target = on_base[static_cast<std::size_t>(fine_it - c.coarse_cells.begin())];
      Real worst = 0;
      for (int i = 0; i < count; ++i) {
        const Vector diff = on_base[static_cast<std::size_t>(i)] - target;
        auto& errors = report.runs[static_cast<std::size_t>(i)].errors;
        errors["max_difference_to_finest"] = diff.cwiseAbs().maxCoeff();
        errors["l2_difference_to_finest"] =
            error_norm(on_base[static_cast<std::size_t>(i)], target, base);
        worst = std::max(worst, diff.cwiseAbs().maxCoeff());
      }
      report.summary["max_difference"] = worst;
      break;
    }
    case ExperimentKind::FormulationCompare: {
      const MediaSpec media = make_media(c);
      check_dimension(media, c);
      const NestedMesh mesh(c.dimension, c.coarse_cells.front(), c.refinement_ratio);
      const std::vector<int> mirror = mirror_map(mesh, c.mirror_x);
      const Prepared prep = prepare(ctx, media, mesh, threads);
      const Real eps = c.epsilons.front();
      const Formulation forms[2] = {Formulation::Symmetric, Formulation::Asymmetric};
      std::vector<Vector> rhos(2);
      report.runs.resize(2);
      report.snapshots.resize(2);
      detail::parallel_for(2, threads, [&](int i) {
        const Transport t = run_transport(ctx, prep.system, mesh, eps, forms[i], rho0);
        RunRecord& run = report.runs[static_cast<std::size_t>(i)];
        run.params = run_params(c, mesh, media, eps, forms[i]);
        run.assemble_seconds = prep.seconds;
        run.solve_seconds = t.seconds;
        run.cache_hit = prep.hit;
        run.max_residual = t.max_residual;
        const Vector rho = density(t.state);
        Vector reflected(rho.size());
        for (Eigen::Index m = 0; m < rho.size(); ++m) reflected(m) = rho(mirror[m]);
        const Real asym = error_norm(rho, reflected, mesh);
        run.errors["asymmetry_l2"] = asym;
        run.errors["asymmetry_relative"] = asym / error_norm(rho, Vector::Zero(rho.size()), mesh);
        rhos[static_cast<std::size_t>(i)] = rho;
        report.snapshots[static_cast<std::size_t>(i)] = make_snapshot(label_for(i), mesh, rho);
      });
      const Real sym = report.runs[0].errors["asymmetry_l2"];
      const Real asym = report.runs[1].errors["asymmetry_l2"];
      report.summary["symmetric_asymmetry"] = sym;
      report.summary["asymmetric_asymmetry"] = asym;
      report.summary["asymmetry_ratio"] = sym > 0 ? asym / sym : 0.0;
      report.summary["formulation_difference_l2"] = error_norm(rhos[0], rhos[1], mesh);
      break;
    }
  }
  report.cache_hits = ctx.hits.load();
  for (std::size_t i = 0; i < report.runs.size(); ++i) {
    report.runs[i].params["snapshot"] = report.snapshots[i].label + ".csv";
  }
  return report;
}

json assemble_experiment(const ExperimentConfig& c, const RunOptions& options) {
  validate(c);
  std::unique_ptr<MatrixCache> cache;
  if (options.cache_dir) cache = std::make_unique<MatrixCache>(*options.cache_dir);
  Context ctx{c, cache.get(),
              make_velocity_system(c.order, velocity_mode(c.dimension), c.quadrature)};
  std::vector<std::optional<Real>> deltas;
  if (c.kind == ExperimentKind::DeltaSweep) {
    for (Real d : c.deltas) deltas.emplace_back(d);
  } else {
    deltas.emplace_back(std::nullopt);
  }
  json out = json::array();
  for (const auto& delta : deltas) {
    const MediaSpec media = make_media(c, delta);
    check_dimension(media, c);
    for (int n : c.coarse_cells) {
      const NestedMesh mesh(c.dimension, n, c.refinement_ratio);
      const Prepared prep = prepare(ctx, media, mesh, std::max(1, options.threads));
      out.push_back({{"key", fingerprint(spatial_identity(media, mesh, c.basis, c.order,
                                                          ctx.velocity.rule.size()))},
                     {"media", media.name()},
                     {"delta", media.delta()},
                     {"coarse_cells", n},
                     {"size", prep.system.size()},
                     {"mass_nonzeros", prep.system.mass.nonZeros()},
                     {"cache_hit", prep.hit},
                     {"seconds", prep.seconds}});
    }
  }
  return {{"config", to_json(c)}, {"systems", out}};
}

void write_snapshot_csv(const fs::path& path, const Snapshot& s) {
  std::ostringstream out;
  out.precision(17);
  out << (s.dimension == 1 ? "x,value\n" : "x,y,value\n");
  for (std::size_t m = 0; m < s.nodes.size(); ++m) {
    out << s.nodes[m].x << ',';
    if (s.dimension == 2) out << s.nodes[m].y << ',';
    out << s.values(static_cast<Eigen::Index>(m)) << '\n';
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write snapshot " + path.string());
  file << out.str();
  if (!file) throw IoError("short write to " + path.string());
}

void export_report(const RunReport& report, const fs::path& directory) {
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw IoError("cannot create output directory " + directory.string());
  if (report.config.snapshots) {
    for (const Snapshot& s : report.snapshots) {
      write_snapshot_csv(directory / (s.label + ".csv"), s);
    }
  }
  const fs::path path = directory / "report.json";
  std::ofstream file(path, std::ios::trunc);
  if (!file) throw IoError("cannot write report " + path.string());
  file << report.to_json().dump(2) << '\n';
  if (!file) throw IoError("short write to " + path.string());
}

}  // namespace msap
