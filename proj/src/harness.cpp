#include "partrans/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "partrans/kernel.hpp"
#include "partrans/landscape.hpp"
#include "partrans/log.hpp"
#include "partrans/neighbor.hpp"
#include "partrans/reconstruct.hpp"

namespace partrans {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

constexpr double kHChar = 1.0 / 40.0;

void report_failure(const std::string& stage, const std::exception& e, const std::string& out_dir) {
  nlohmann::json rec = {{"status", "error"}, {"stage", stage}, {"message", e.what()}};
  std::cerr << rec.dump() << '\n';
  if (!out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    std::ofstream(fs::path(out_dir) / "error.json") << rec.dump(2) << '\n';
  }
}

}  // namespace

CaseSetup build_case(const RunConfig& cfg) {
  CaseSetup s;
  s.domain = cfg.domain;
  switch (cfg.kind) {
    case CaseKind::flat:
    case CaseKind::flat_source: s.surface = std::make_shared<FlatSurface>(); break;
    case CaseKind::z1: s.surface = make_z1(cfg.u0, cfg.domain.Ly); break;
    case CaseKind::z2: s.surface = make_z2(cfg.u0, cfg.domain.Lx); break;
    case CaseKind::z3: s.surface = make_z3(cfg.u0, cfg.domain.Ly); break;
    case CaseKind::custom_grid:
      s.surface = std::make_shared<GridSurface>(
          read_grid_csv(cfg.surface_path, cfg.surface_nx, cfg.surface_ny, cfg.domain.Lx, cfg.domain.Ly),
          "grid:" + cfg.surface_path);
      break;
    case CaseKind::landscape: throw std::invalid_argument("the landscape case runs through cmd_landscape");
  }
  TiltedPlaneSpec spec;
  spec.theta = cfg.theta();
  spec.u0 = cfg.u0;
  if (const double r = cfg.effective_rain(); r != 0.0) spec.rain = [r](Vec2) { return r; };
  s.fields = make_tilted_plane_field(spec, s.surface, s.domain);
  return s;
}

ParticleSolution solve_particles(const FieldSet& fields, const DomainSpec& domain, const SolverParams& params,
                                 const ProbeGrid& probes, FailurePolicy policy) {
  params.validate();
  if (params.ds * fields.max_abs_divergence >= 1.0) {
    std::ostringstream os;
    os << "ds * sup|div a| = " << params.ds * fields.max_abs_divergence << " >= 1: weights may change sign";
    throw std::invalid_argument(os.str());
  }
  double max_ax = 0.0;
  for (int i = 0; i <= 100; ++i)
    for (int j = 0; j < 25; ++j)
      max_ax = std::max(max_ax, fields.velocity({domain.Lx * i / 100.0, domain.Ly * j / 25.0}).x);
  if (params.ds * max_ax >= params.h) {
    std::ostringstream os;
    os << "ds * sup a_x = " << params.ds * max_ax << " >= h = " << params.h
       << ": consecutive particles farther apart than the kernel radius";
    log_warn(os.str());
  }

  ParticleSolution out;
  auto t0 = Clock::now();
  TraceSummary traced = trace_all(domain, params, fields, policy);
  out.seeds = traced.seeds;
  out.failed = traced.failed;
  out.store = collect_particles(traced.trajectories);
  out.trace_seconds = seconds_since(t0);

  t0 = Clock::now();
  const KernelSpec kernel(params.h);
  const CellGrid cells = build_cell_list(out.store.pos, params.h, domain);
  out.u = evaluate(out.store, cells, kernel, probes);
  out.reconstruct_seconds = seconds_since(t0);
  return out;
}

std::optional<ScalarGrid> reference_solution(const RunConfig& cfg, const CaseSetup& setup) {
  const bool flat = cfg.kind == CaseKind::flat || cfg.kind == CaseKind::flat_source;
  ReferenceKind kind = cfg.reference;
  if (kind == ReferenceKind::automatic) kind = flat ? ReferenceKind::exact : cfg.kind == CaseKind::z3 ? ReferenceKind::none : ReferenceKind::fv;
  switch (kind) {
    case ReferenceKind::exact:
      if (!flat) throw std::invalid_argument("exact reference exists only for the flat cases");
      return exact_flat(cfg.u0, cfg.effective_rain(), cfg.theta(), cfg.probes, cfg.domain);
    case ReferenceKind::fv: {
      if (cfg.reference_nx % cfg.probes.nx != 0 || cfg.reference_ny % cfg.probes.ny != 0)
        throw std::invalid_argument("reference grid must refine the probe grid by whole factors");
      const FvResult fv = solve_fv_march(setup.fields, setup.domain, cfg.reference_nx, cfg.reference_ny);
      return restrict_to(fv.u, cfg.probes.nx, cfg.probes.ny);
    }
    default: return std::nullopt;
  }
}

ErrorRecord solve_error(const RunConfig& cfg, const CaseSetup& setup, const ScalarGrid& reference,
                        const std::string& label) {
  ErrorRecord rec{cfg.solver.h, cfg.solver.eps, cfg.solver.ds, 0.0, 0.0, label.empty() ? to_string(cfg.kind) : label};
  const auto t0 = Clock::now();
  const ParticleSolution sol = solve_particles(setup.fields, setup.domain, cfg.solver, cfg.probes);
  rec.error = linf_relative_error(sol.u, reference);
  rec.runtime = seconds_since(t0);
  return rec;
}

std::vector<SolverParams> sweep_points(const RunConfig& cfg) {
  const SweepAxes& ax = cfg.sweep;
  auto or_default = [](const std::vector<double>& v, std::vector<double> d) { return v.empty() ? d : v; };
  const std::vector<double> h_default{kHChar / 4, kHChar / 2, kHChar, 2 * kHChar, 4 * kHChar};
  std::vector<SolverParams> pts;
  auto point = [&](double h, double eps, double ds) {
    SolverParams p = cfg.solver;
    p.h = h;
    p.eps = eps;
    p.ds = ds;
    pts.push_back(p);
  };
  switch (ax.protocol) {
    case 'a': {
      const double er = or_default(ax.eps_ratio, {10.0}).front(), dr = or_default(ax.ds_ratio, {4.0}).front();
      for (double h : or_default(ax.h, h_default)) point(h, h / er, dr * h / er);
      break;
    }
    case 'b':
      for (double h : or_default(ax.h, h_default)) point(h, cfg.solver.eps, cfg.solver.ds);
      break;
    case 'c': {
      const double dr = or_default(ax.ds_ratio, {4.0}).front();
      for (double er : or_default(ax.eps_ratio, {5.0, 10.0, 20.0, 40.0}))
        point(cfg.solver.h, cfg.solver.h / er, dr * cfg.solver.h / er);
      break;
    }
    case 'd': {
      const double eps = cfg.solver.h / or_default(ax.eps_ratio, {10.0}).front();
      for (double dr : or_default(ax.ds_ratio, {8.0, 4.0, 2.0, 1.0, 0.5, 0.25})) point(cfg.solver.h, eps, dr * eps);
      break;
    }
    default: throw std::invalid_argument("unknown sweep protocol");
  }
  return pts;
}

std::vector<ErrorRecord> run_sweep(const RunConfig& cfg) {
  cfg.validate();
  const CaseSetup setup = build_case(cfg);
  const auto ref = reference_solution(cfg, setup);
  if (!ref) throw std::invalid_argument("sweep needs a reference; case " + to_string(cfg.kind) + " has none");
  const std::string label = to_string(cfg.kind) + "/" + cfg.sweep.protocol;
  std::vector<ErrorRecord> out;
  // runs are sequential; tracing and reconstruction inside each run use all threads
  for (const SolverParams& p : sweep_points(cfg)) {
    RunConfig run = cfg;
    run.solver = p;
    try {
      out.push_back(solve_error(run, setup, *ref, label));
    } catch (const std::exception& e) {
      log_warn(std::string("sweep point failed: ") + e.what());
      out.push_back({p.h, p.eps, p.ds, std::numeric_limits<double>::quiet_NaN(), 0.0, label});
    }
  }
  return out;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope fit needs two or more points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0 && y[i] > 0)) throw std::domain_error("log-log fit needs positive data");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

KneeReport knee_report(std::span<const ErrorRecord> records) {
  KneeReport k;
  k.min_error = std::numeric_limits<double>::infinity();
  for (const auto& r : records)
    if (std::isfinite(r.error)) k.min_error = std::min(k.min_error, r.error);
  bool any = false;
  for (const auto& r : records) {
    if (r.ds > 2.0 * r.eps * (1 + 1e-12)) continue;
    any = true;
    k.worst_ratio = std::max(k.worst_ratio, std::isfinite(r.error) ? r.error / k.min_error
                                                                   : std::numeric_limits<double>::infinity());
  }
  k.ok = any && k.worst_ratio <= 2.0;
  return k;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
  std::string stage = "config";
  try {
    cfg.validate();
    stage = "fields";
    const CaseSetup setup = build_case(cfg);
    stage = "particles";
    const auto t0 = Clock::now();
    const ParticleSolution sol = solve_particles(setup.fields, setup.domain, cfg.solver, cfg.probes);
    stage = "reference";
    const auto ref = reference_solution(cfg, setup);

    stage = "output";
    fs::create_directories(cfg.out_dir);
    const fs::path dir(cfg.out_dir);
    write_grid_csv(sol.u, (dir / "u.csv").string());
    write_particles_csv(sol.store, (dir / "particles.csv").string());

    std::map<std::string, std::string> extra{
        {"version", kVersion},
        {"field", setup.fields.descriptor},
        {"seeds", std::to_string(sol.seeds)},
        {"failed_trajectories", std::to_string(sol.failed)},
        {"particles", std::to_string(sol.store.size())},
        {"trace_seconds", format_real(sol.trace_seconds)},
        {"reconstruct_seconds", format_real(sol.reconstruct_seconds)},
        {"potential_dry_areas", setup.fields.potential_dry_areas ? "true" : "false"},
    };
    int status = 0;
    out << "case " << to_string(cfg.kind) << ": " << sol.store.size() << " particles on " << sol.seeds
        << " characteristics, " << seconds_since(t0) << " s\n";
    if (ref) {
      const double err = linf_relative_error(sol.u, *ref);
      extra["error_linf"] = format_real(err);
      out << "linf relative error = " << format_real(err) << '\n';
      if (cfg.threshold > 0.0 && !(err <= cfg.threshold)) {
        out << "error above threshold " << cfg.threshold << '\n';
        status = 1;
      }
    }
    write_meta(cfg, extra, (dir / "meta").string());
    return status;
  } catch (const std::exception& e) {
    report_failure(stage, e, cfg.out_dir);
    return 2;
  }
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  try {
    const auto t0 = Clock::now();
    const std::vector<ErrorRecord> recs = run_sweep(cfg);
    fs::create_directories(cfg.out_dir);
    write_sweep_csv(recs, (fs::path(cfg.out_dir) / "sweep.csv").string());

    int status = 0;
    std::vector<double> xs, ys;
    for (const auto& r : recs) {
      out << "h=" << r.h << " eps=" << r.eps << " ds=" << r.ds << " error=" << r.error << " (" << r.runtime << " s)\n";
      if (!std::isfinite(r.error)) status = 1;
      else if (cfg.threshold > 0.0 && r.error > cfg.threshold) status = 1;
      if (std::isfinite(r.error) && r.error > 0) {
        xs.push_back(cfg.sweep.protocol == 'c' ? r.eps : cfg.sweep.protocol == 'd' ? r.ds : r.h);
        ys.push_back(r.error);
      }
    }
    std::map<std::string, std::string> extra{{"version", kVersion}, {"runs", std::to_string(recs.size())},
                                             {"seconds", format_real(seconds_since(t0))}};
    if (xs.size() >= 2) {
      const double slope = loglog_slope(xs, ys);
      extra["loglog_slope"] = format_real(slope);
      out << "log-log slope = " << slope << '\n';
    }
    if (cfg.sweep.protocol == 'd') {
      const KneeReport k = knee_report(recs);
      extra["knee_worst_ratio"] = format_real(k.worst_ratio);
      out << "knee: worst error / min error for ds <= 2 eps = " << k.worst_ratio << '\n';
    }
    write_meta(cfg, extra, (fs::path(cfg.out_dir) / "meta").string());
    return status;
  } catch (const std::exception& e) {
    report_failure("sweep", e, cfg.out_dir);
    return 2;
  }
}

int cmd_landscape(const RunConfig& cfg, std::ostream& out) {
  try {
    cfg.validate();
    Perturbation pert = cfg.perturbation;
    pert.rng_seed = cfg.seed;
    const auto t0 = Clock::now();
    fs::create_directories(cfg.out_dir);
    const EvolutionResult res = run_evolution(cfg.landscape, pert, cfg.landscape_steps, cfg.snapshot_every, cfg.out_dir);
    const double a0 = res.series.front().amplitude, a1 = res.series.back().amplitude;
    out << "steps " << cfg.landscape_steps << ", amplitude " << a0 << " -> " << a1;
    if (a0 > 0) out << " (ratio " << a1 / a0 << ")";
    out << '\n';
    std::map<std::string, std::string> extra{{"version", kVersion},
                                             {"seconds", format_real(seconds_since(t0))},
                                             {"amplitude_initial", format_real(a0)},
                                             {"amplitude_final", format_real(a1)}};
    write_meta(cfg, extra, (fs::path(cfg.out_dir) / "meta").string());
    return 0;
  } catch (const LandscapeStepError& e) {
    report_failure("landscape_step " + std::to_string(e.state.step), e, cfg.out_dir);
    if (e.state.z.nx() > 0) {
      std::error_code ec;
      const fs::path dir = fs::path(cfg.out_dir) / ("aborted_step_" + std::to_string(e.state.step));
      fs::create_directories(dir, ec);
      write_grid_csv(e.state.z, (dir / "z.csv").string());
      write_grid_csv(e.state.h, (dir / "h.csv").string());
      write_grid_csv(e.state.c, (dir / "c.csv").string());
    }
    return 2;
  } catch (const std::exception& e) {
    report_failure("landscape", e, cfg.out_dir);
    return 2;
  }
}

}  // namespace partrans
