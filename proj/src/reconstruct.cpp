#include "partrans/reconstruct.hpp"

#include <algorithm>
#include <cstdint>
#include <utility>

namespace partrans {

namespace {

struct Term {
  std::uint32_t index;
  double value;
};

double sum_in_index_order(std::vector<Term>& terms) {
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.index < b.index; });
  double s = 0.0;
  for (const Term& t : terms) s += t.value;
  return s;
}

double evaluate_with(const ParticleStore& store, const CellGrid& cells, const KernelSpec& kernel,
                     std::span<const double> mass, Vec2 p, std::vector<Term>& terms) {
  const DomainSpec& d = cells.domain();
  terms.clear();
  cells.for_each_neighbor(p, [&](std::uint32_t i) {
    const Vec2 q = store.pos[i];
    const double dx = p.x - q.x;
    const double dy = d.min_image_dy(p.y - q.y);
    const double w = kernel.from_squared(dx * dx + dy * dy);
    if (w > 0.0) terms.push_back({i, mass[i] * w});
  });
  return sum_in_index_order(terms);
}

void check_sizes(const ParticleStore& store, const CellGrid& cells, std::span<const double> mass) {
  if (mass.size() != store.size() || cells.particle_count() != store.size())
    throw std::invalid_argument("mass channel, store and cell list sizes differ");
}

}  // namespace

double evaluate_at(const ParticleStore& store, const CellGrid& cells, const KernelSpec& kernel,
                   std::span<const double> mass, Vec2 p) {
  check_sizes(store, cells, mass);
  std::vector<Term> terms;
  return evaluate_with(store, cells, kernel, mass, p, terms);
}

std::vector<double> evaluate(const ParticleStore& store, const CellGrid& cells, const KernelSpec& kernel,
                             std::span<const double> mass, std::span<const Vec2> probes) {
  check_sizes(store, cells, mass);
  std::vector<double> out(probes.size());
  const auto n = static_cast<std::int64_t>(probes.size());
#pragma omp parallel
  {
    std::vector<Term> terms;
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      const auto u = static_cast<std::size_t>(i);
      out[u] = evaluate_with(store, cells, kernel, mass, probes[u], terms);
    }
  }
  return out;
}

ScalarGrid evaluate(const ParticleStore& store, const CellGrid& cells, const KernelSpec& kernel,
                    std::span<const double> mass, const ProbeGrid& probes) {
  const DomainSpec& d = cells.domain();
  ScalarGrid g(probes.nx, probes.ny, d.Lx, d.Ly);
  std::vector<Vec2> pts;
  pts.reserve(probes.nx * probes.ny);
  for (std::size_t i = 0; i < probes.nx; ++i)
    for (std::size_t j = 0; j < probes.ny; ++j) pts.push_back({g.x(i), g.y(j)});
  g.values() = evaluate(store, cells, kernel, mass, pts);
  return g;
}

}  // namespace partrans
