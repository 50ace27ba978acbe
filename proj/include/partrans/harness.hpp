#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "partrans/config.hpp"
#include "partrans/fields.hpp"
#include "partrans/particles.hpp"
#include "partrans/reference.hpp"

namespace partrans {

inline constexpr const char* kVersion = "0.1.0";

struct CaseSetup {
  FieldSet fields;
  DomainSpec domain;
  std::shared_ptr<const Surface> surface;
};

/// Field and domain of a transport case (every kind except landscape).
CaseSetup build_case(const RunConfig& config);

struct ParticleSolution {
  ScalarGrid u;
  ParticleStore store;
  std::size_t seeds = 0;
  std::size_t failed = 0;
  double trace_seconds = 0.0;
  double reconstruct_seconds = 0.0;
};

/// seed -> trace -> reconstruct. Refuses ds * sup|div a| >= 1; warns when ds * sup a_x >= h.
ParticleSolution solve_particles(const FieldSet& fields, const DomainSpec& domain, const SolverParams& params,
                                 const ProbeGrid& probes, FailurePolicy policy = FailurePolicy::abort);

/// Reference on the probe grid: exact for flat cases, FV (reference_nx x reference_ny,
/// sampled onto the probes) otherwise; none for z3 under the automatic choice.
std::optional<ScalarGrid> reference_solution(const RunConfig& config, const CaseSetup& setup);

/// One solve of the configured case against its reference.
ErrorRecord solve_error(const RunConfig& config, const CaseSetup& setup, const ScalarGrid& reference,
                        const std::string& label = "");

/// Parameter points of the configured protocol, defaults filled in when axes are empty.
std::vector<SolverParams> sweep_points(const RunConfig& config);
std::vector<ErrorRecord> run_sweep(const RunConfig& config);

/// Least-squares slope of log y against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

struct KneeReport {
  double min_error = 0.0;
  double worst_ratio = 0.0;  // max error / min error over ds <= 2 eps
  bool ok = false;
};
/// Protocol (d): every run with ds <= 2 eps within factor 2 of the minimum error.
KneeReport knee_report(std::span<const ErrorRecord> records);

int cmd_solve(const RunConfig& config, std::ostream& out);
int cmd_sweep(const RunConfig& config, std::ostream& out);
int cmd_landscape(const RunConfig& config, std::ostream& out);

}  // namespace partrans
