#pragma once

#include <span>
#include <vector>

#include "partrans/grid.hpp"
#include "partrans/kernel.hpp"
#include "partrans/neighbor.hpp"
#include "partrans/particles.hpp"

namespace partrans {

/// Output nodes (i dx, j dy) of an nx x ny grid over the domain.
struct ProbeGrid {
  std::size_t nx = 400;
  std::size_t ny = 100;
};

/// sum_i mass[i] zeta_h(p - x_i) over the 3x3 cell block around p, using the minimum-image
/// distance in y. Contributions are accumulated in ascending particle index, i.e. (k, j)
/// order for stores built by collect_particles.
double evaluate_at(const ParticleStore& store, const CellGrid& cells, const KernelSpec& kernel,
                   std::span<const double> mass, Vec2 p);

std::vector<double> evaluate(const ParticleStore& store, const CellGrid& cells, const KernelSpec& kernel,
                             std::span<const double> mass, std::span<const Vec2> probes);

ScalarGrid evaluate(const ParticleStore& store, const CellGrid& cells, const KernelSpec& kernel,
                    std::span<const double> mass, const ProbeGrid& probes);

/// Mass channel = the store's own rho.
inline ScalarGrid evaluate(const ParticleStore& store, const CellGrid& cells, const KernelSpec& kernel,
                           const ProbeGrid& probes) {
  return evaluate(store, cells, kernel, store.mass, probes);
}

/// Weight-only kernel sum; close to 1 wherever characteristics cover the kernel support.
inline ScalarGrid partition_of_unity(const ParticleStore& store, const CellGrid& cells, const KernelSpec& kernel,
                                     const ProbeGrid& probes) {
  return evaluate(store, cells, kernel, store.weight, probes);
}

}  // namespace partrans
