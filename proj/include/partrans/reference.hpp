#pragma once

#include <string>
#include <vector>

#include "partrans/fields.hpp"
#include "partrans/grid.hpp"
#include "partrans/reconstruct.hpp"

namespace partrans {

/// One solve of a convergence sweep.
struct ErrorRecord {
  double h = 0.0;
  double eps = 0.0;
  double ds = 0.0;
  double error = 0.0;  // l-infinity relative; NaN marks a failed run
  double runtime = 0.0;  // seconds
  std::string label;
};

/// u0 + r x / tan(theta) on the probe nodes (flat bottom, uniform rain r).
ScalarGrid exact_flat(double u0, double r, double theta, const ProbeGrid& probes, const DomainSpec& domain);

struct FvResult {
  ScalarGrid u;
  double inflow_flux = 0.0;   // int a_x u dy at x = 0
  double outflow_flux = 0.0;  // int a_x u dy at x = Lx
  double source_total = 0.0;  // int int (S - a0 u) over [0, Lx] x [0, Ly], as integrated by the march
  std::size_t substeps = 0;
};

/// First-order conservative march in x of d_x(a_x u) + d_y(a_y u) + a0 u = S: donor-cell
/// fluxes in y (periodic), explicit sub-steps keeping dx_sub max|a_y / a_x| / dy <= cfl.
/// Throws std::domain_error where a_x <= 0.
FvResult solve_fv_march(const FieldSet& fields, const DomainSpec& domain, std::size_t nx, std::size_t ny,
                        double cfl = 0.9);

/// max |approx - ref| / max |ref| over all nodes.
double linf_relative_error(const ScalarGrid& approx, const ScalarGrid& ref);

/// Samples a grid at the nodes of a coarser one whose node counts divide it.
ScalarGrid restrict_to(const ScalarGrid& fine, std::size_t nx, std::size_t ny);

void write_sweep_csv(const std::vector<ErrorRecord>& records, const std::string& path);

}  // namespace partrans
