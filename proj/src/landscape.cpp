#include "partrans/landscape.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "partrans/fields.hpp"
#include "partrans/kernel.hpp"
#include "partrans/log.hpp"
#include "partrans/neighbor.hpp"
#include "partrans/reconstruct.hpp"

namespace partrans {

void LandscapeParams::validate() const {
  if (!(Lx > 0 && Ly > 0 && V > 0 && m > 0 && n > 0 && rho_s > 0 && c_sat > 0 && e >= 0 && s >= 0 && h0 > 0 &&
        c0 >= 0 && K >= 0 && H > 0 && dt > 0 && kernel_h > 0 && eps > 0 && ds > 0))
    throw std::invalid_argument("landscape parameters must be positive");
  if (nx < 4 || ny < 3) throw std::invalid_argument("landscape grid needs nx >= 4, ny >= 3");
  if (!(std::tan(theta) > 0.0)) throw std::invalid_argument("plane angle must give tan(theta) > 0");
}

SolverParams LandscapeParams::solver() const {
  SolverParams p;
  p.h = kernel_h;
  p.eps = eps;
  p.ds = ds;
  p.seed_offset = seed_offset;
  return p;
}

double LandscapeParams::diffusion_dt_limit() const {
  if (K <= 0.0) return std::numeric_limits<double>::infinity();
  const double dx = Lx / static_cast<double>(nx), dy = Ly / static_cast<double>(ny);
  return 1.0 / (2.0 * K * (1.0 / (dx * dx) + 1.0 / (dy * dy)));
}

LandscapeState init_state(const LandscapeParams& params, const Perturbation& pert) {
  params.validate();
  if (std::fabs(pert.amplitude) > 0.5 * params.h0)
    log_warn("perturbation amplitude is not small compared with h0");
  const DomainSpec d = params.domain();

  std::mt19937_64 rng(pert.rng_seed);
  std::uniform_real_distribution<double> pick(0.0, d.Ly);
  std::vector<double> centres(pert.n_channels);
  for (double& c : centres) c = pick(rng);

  LandscapeState st;
  const double a = pert.amplitude, w2 = 2.0 * pert.width * pert.width;
  st.z = ScalarGrid::sample(params.nx, params.ny, d.Lx, d.Ly, [&](double, double y) {
    if (a == 0.0) return 0.0;
    double z = 0.0;
    for (double c : centres) {
      const double dist = d.min_image_dy(y - c);
      z -= a * std::exp(-dist * dist / w2);
    }
    return z;
  });
  st.h = ScalarGrid(params.nx, params.ny, d.Lx, d.Ly);
  for (std::size_t n = 0; n < st.h.values().size(); ++n) {
    st.h.values()[n] = params.h0 - st.z.values()[n];
    if (st.h.values()[n] < 0.0) throw std::invalid_argument("perturbation makes the initial water height negative");
  }
  st.c = ScalarGrid(params.nx, params.ny, d.Lx, d.Ly, params.c0);
  return st;
}

double amplitude(const ScalarGrid& z) { return z.max() - z.min(); }

LandscapeState landscape_step(const LandscapeState& state, const LandscapeParams& params,
                              StepDiagnostics* diagnostics, ParticleStore* particles) {
  params.validate();
  const DomainSpec dom = params.domain();
  const std::size_t nx = params.nx, ny = params.ny;
  const double V = params.V, slope = std::tan(params.theta);

  // velocity v_i = V (tan theta, 0) - V grad(h_i + z_i)
  ScalarGrid eta = state.h;
  for (std::size_t k = 0; k < eta.values().size(); ++k) eta.values()[k] += state.z.values()[k];
  auto [ex, ey] = grad_fd(eta);
  ScalarGrid vx(nx, ny, dom.Lx, dom.Ly), vy(nx, ny, dom.Lx, dom.Ly), speed(nx, ny, dom.Lx, dom.Ly);
  for (std::size_t k = 0; k < vx.values().size(); ++k) {
    vx.values()[k] = V * (slope - ex.values()[k]);
    vy.values()[k] = -V * ey.values()[k];
    speed.values()[k] = std::hypot(vx.values()[k], vy.values()[k]);
  }
  for (std::size_t j = 0; j < ny; ++j)
    if (!(vx(0, j) > 0.0)) {
      std::ostringstream os;
      os << "characteristic boundary at step " << state.step << ": v_x(0, " << vx.y(j) << ") = " << vx(0, j);
      throw LandscapeStepError(os.str(), state);
    }
  ScalarGrid div = laplacian_fd(eta);
  for (double& v : div.values()) v *= -V;

  // erosion E = e (h/H)^m (|v|/V)^n and deposition D = s c / c_sat on the previous state
  const double h_dry = params.h_dry();
  ScalarGrid erosion(nx, ny, dom.Lx, dom.Ly), deposition(nx, ny, dom.Lx, dom.Ly);
  ScalarGrid sed_source(nx, ny, dom.Lx, dom.Ly);
  for (std::size_t k = 0; k < erosion.values().size(); ++k) {
    const double h = state.h.values()[k];
    const double E = h > h_dry ? params.e * std::pow(h / params.H, params.m) * std::pow(speed.values()[k] / V, params.n)
                               : 0.0;
    const double D = params.s * state.c.values()[k] / params.c_sat;
    erosion.values()[k] = E;
    deposition.values()[k] = D;
    sed_source.values()[k] = params.rho_s * (E - D);
  }

  GridFieldSpec water_spec;
  water_spec.velocity_x = vx;
  water_spec.velocity_y = vy;
  water_spec.divergence = div;
  if (params.r != 0.0) water_spec.source = ScalarGrid(nx, ny, dom.Lx, dom.Ly, params.r);
  water_spec.outside_speed = V * slope;
  water_spec.boundary_value = params.h0;
  water_spec.descriptor = "landscape_water";
  FieldSet water;
  FieldSet sediment;
  try {
    water = make_grid_field(water_spec);
    GridFieldSpec sed_spec = std::move(water_spec);
    sed_spec.source = sed_source;
    sed_spec.boundary_value = params.c0 * params.h0;
    sed_spec.descriptor = "landscape_sediment";
    sediment = make_grid_field(std::move(sed_spec));
  } catch (const std::exception& ex_) {
    throw LandscapeStepError(ex_.what(), state);
  }

  const SolverParams sp = params.solver();
  TraceSummary traced;
  try {
    traced = trace_all(dom, sp, water, FailurePolicy::skip);
  } catch (const std::exception& ex_) {
    throw LandscapeStepError(std::string("particle solve failed: ") + ex_.what(), state);
  }
  if (traced.trajectories.empty()) throw LandscapeStepError("no trajectory could be traced", state);

  ParticleStore store = collect_particles(traced.trajectories);
  std::vector<double> q_mass;
  q_mass.reserve(store.size());
  for (const Trajectory& t : traced.trajectories) {
    const auto rho = carry_mass(t, sediment, sp.ds);
    q_mass.insert(q_mass.end(), rho.begin(), rho.end());
  }

  const KernelSpec kernel(sp.h);
  const CellGrid cells = build_cell_list(store.pos, sp.h, dom);
  const ProbeGrid probes{nx, ny};

  LandscapeState next;
  next.h = evaluate(store, cells, kernel, store.mass, probes);
  const ScalarGrid q = evaluate(store, cells, kernel, q_mass, probes);
  next.c = ScalarGrid(nx, ny, dom.Lx, dom.Ly);
  for (std::size_t k = 0; k < q.values().size(); ++k) {
    const double h = next.h.values()[k];
    next.c.values()[k] = h > h_dry ? q.values()[k] / h : 0.0;
  }

  // z: creep sub-stepped if needed, then erosion and deposition over dt
  std::size_t nsub = 1;
  const double limit = params.diffusion_dt_limit();
  if (params.dt > limit) {
    nsub = static_cast<std::size_t>(std::ceil(params.dt / limit));
    if (state.step == 0) {
      std::ostringstream os;
      os << "dt = " << params.dt << " s exceeds the creep stability limit " << limit << " s; using " << nsub
         << " diffusion sub-steps";
      log_warn(os.str());
    }
  }
  next.z = state.z;
  if (params.K > 0.0) {
    const double sub = params.dt / static_cast<double>(nsub);
    for (std::size_t k = 0; k < nsub; ++k) {
      const ScalarGrid lap = laplacian_neumann(next.z);
      for (std::size_t n = 0; n < lap.values().size(); ++n) next.z.values()[n] += sub * params.K * lap.values()[n];
    }
  }
  for (std::size_t k = 0; k < next.z.values().size(); ++k)
    next.z.values()[k] += params.dt * (deposition.values()[k] - erosion.values()[k]);

  next.step = state.step + 1;
  next.time = static_cast<double>(next.step) * params.dt;

  if (diagnostics) {
    diagnostics->particles = store.size();
    diagnostics->failed_trajectories = traced.failed;
    diagnostics->diffusion_substeps = nsub;
    diagnostics->inflow_water_flux = V * slope * params.h0 * dom.Ly;
    double out = 0.0;
    for (std::size_t j = 0; j < ny; ++j) out += next.h(nx - 1, j) * vx(nx - 1, j) * vx.dy();
    diagnostics->outflow_water_flux = out;
    diagnostics->min_h = next.h.min();
    diagnostics->min_q = q.min();
  }
  if (particles) *particles = std::move(store);
  return next;
}

void write_amplitude_csv(const std::vector<AmplitudeSample>& series, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  std::fputs("step,time_s,amplitude_m\n", f);
  for (const auto& a : series) std::fprintf(f, "%zu,%.17g,%.17g\n", a.step, a.time, a.amplitude);
  std::fclose(f);
}

namespace {

void write_snapshot(const std::filesystem::path& root, const LandscapeState& st, const ParticleStore* particles,
                    const LandscapeParams& p) {
  namespace fs = std::filesystem;
  const fs::path dir = root / ("step_" + std::to_string(st.step));
  fs::create_directories(dir);
  write_grid_csv(st.z, (dir / "z.csv").string());
  write_grid_csv(st.h, (dir / "h.csv").string());
  write_grid_csv(st.c, (dir / "c.csv").string());
  if (particles) write_particles_csv(*particles, (dir / "particles.csv").string());
  std::ofstream meta(dir / "meta");
  meta.precision(17);
  meta << "step = " << st.step << "\ntime_s = " << st.time << "\ngrid.nx = " << p.nx << "\ngrid.ny = " << p.ny
       << "\ndomain.Lx = " << p.Lx << "\ndomain.Ly = " << p.Ly << "\namplitude_m = " << amplitude(st.z)
       << "\nparticles = " << (particles ? particles->size() : 0) << "\n";
}

}  // namespace

EvolutionResult run_evolution(const LandscapeParams& params, const Perturbation& perturbation, std::size_t n_steps,
                              std::size_t snapshot_every, const std::optional<std::string>& out_dir) {
  EvolutionResult res;
  LandscapeState st = init_state(params, perturbation);
  res.series.push_back({0, 0.0, amplitude(st.z)});
  if (out_dir) write_snapshot(*out_dir, st, nullptr, params);

  for (std::size_t i = 0; i < n_steps; ++i) {
    StepDiagnostics diag;
    ParticleStore store;
    const bool snap = out_dir && snapshot_every > 0 && ((i + 1) % snapshot_every == 0 || i + 1 == n_steps);
    st = landscape_step(st, params, &diag, snap ? &store : nullptr);
    res.series.push_back({st.step, st.time, amplitude(st.z)});
    res.diagnostics.push_back(diag);
    if (snap) write_snapshot(*out_dir, st, &store, params);
    if (std::fabs(diag.outflow_water_flux - diag.inflow_water_flux) > 0.05 * diag.inflow_water_flux) {
      std::ostringstream os;
      os << "step " << st.step << ": outflow water flux " << diag.outflow_water_flux << " vs inflow "
         << diag.inflow_water_flux;
      log_info(os.str());
    }
  }
  if (out_dir) write_amplitude_csv(res.series, (std::filesystem::path(*out_dir) / "amplitude.csv").string());
  res.final_state = std::move(st);
  return res;
}

}  // namespace partrans
