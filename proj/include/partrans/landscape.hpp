#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "partrans/grid.hpp"
#include "partrans/particles.hpp"

namespace partrans {

/// Physical and numerical parameters of the erosion model, SI units (m, s, g).
struct LandscapeParams {
  double Lx = 0.40;
  double Ly = 0.10;
  double V = 1.0;         // characteristic speed, m/s
  double m = 1.6;         // exponent on h / H
  double n = 3.2;         // exponent on |v| / V
  double rho_s = 2.17e6;  // sediment density, g/m^3
  double c_sat = 3.17e5;  // saturation concentration, g/m^3
  double e = 0.5e-3 / 3600.0;  // erosion speed, m/s
  double s = 0.5e-3 / 3600.0 / 2000.0;  // sedimentation speed, m/s
  double theta = 39.0 * 3.14159265358979323846 / 180.0;
  double h0 = 0.5e-3;   // inflow water height, m
  double c0 = 317.0;    // inflow concentration, g/m^3
  double K = 5e-4 / 3600.0;  // creep, m^2/s
  double H = 0.5e-3;    // characteristic height, m
  double r = 0.0;       // water source
  double dt = 4.5;      // s
  std::size_t nx = 400;
  std::size_t ny = 100;

  // particle solver, per step
  double kernel_h = 0.025;  // Ly / 4
  double eps = 0.0025;      // kernel_h / 10
  double ds = 0.005;        // s
  double seed_offset = 0.0;
  double dry_fraction = 1e-3;  // h_dry = dry_fraction * h0

  static double creep_reference() { return 5e-4 / 3600.0; }  // K_e

  void validate() const;
  DomainSpec domain() const { return {Lx, Ly}; }
  SolverParams solver() const;
  double h_dry() const { return dry_fraction * h0; }
  /// Largest explicit step for K * 5-point Laplacian.
  double diffusion_dt_limit() const;
};

struct Perturbation {
  double amplitude = 0.0;  // groove depth, m
  std::size_t n_channels = 0;
  double width = 0.005;    // transverse Gaussian width, m
  std::uint64_t rng_seed = 1;
};

struct LandscapeState {
  ScalarGrid z;
  ScalarGrid h;
  ScalarGrid c;
  std::size_t step = 0;
  double time = 0.0;
};

/// Step failure; carries the state the step started from.
class LandscapeStepError : public std::runtime_error {
 public:
  LandscapeStepError(const std::string& what, LandscapeState snapshot)
      : std::runtime_error(what), state(std::move(snapshot)) {}
  LandscapeState state;
};

/// z = -amplitude * sum of Gaussian grooves along x (centres uniform in y from rng_seed),
/// h = h0 - z, c = c0.
LandscapeState init_state(const LandscapeParams& params, const Perturbation& perturbation);

struct StepDiagnostics {
  std::size_t particles = 0;
  std::size_t failed_trajectories = 0;
  std::size_t diffusion_substeps = 1;
  double inflow_water_flux = 0.0;   // V tan(theta) h0 Ly
  double outflow_water_flux = 0.0;  // int h_{i+1} v_x dy on the last column
  double min_h = 0.0;
  double min_q = 0.0;
};

/// One lagged step: velocity from grad(h_i + z_i), particle solves for h_{i+1} and
/// (c h)_{i+1}, explicit update of z with creep, erosion and deposition.
LandscapeState landscape_step(const LandscapeState& state, const LandscapeParams& params,
                              StepDiagnostics* diagnostics = nullptr, ParticleStore* particles = nullptr);

/// max z - min z.
double amplitude(const ScalarGrid& z);

struct AmplitudeSample {
  std::size_t step = 0;
  double time = 0.0;
  double amplitude = 0.0;
};

struct EvolutionResult {
  LandscapeState final_state;
  std::vector<AmplitudeSample> series;  // step 0 .. n_steps
  std::vector<StepDiagnostics> diagnostics;
};

/// Runs n_steps from init_state. When out_dir is set, writes amplitude.csv and
/// step_<i>/{z,h,c,particles}.csv + meta every snapshot_every steps.
EvolutionResult run_evolution(const LandscapeParams& params, const Perturbation& perturbation, std::size_t n_steps,
                              std::size_t snapshot_every, const std::optional<std::string>& out_dir = std::nullopt);

void write_amplitude_csv(const std::vector<AmplitudeSample>& series, const std::string& path);

}  // namespace partrans
