#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "partrans/fields.hpp"
#include "partrans/grid.hpp"

namespace partrans {

/// A quadrature point carried along a characteristic: weight omega ~ ds * eps * det(J_Phi),
/// mass rho = omega * u.
struct Particle {
  Vec2 pos;
  double weight = 0.0;
  double mass = 0.0;
};

struct SolverParams {
  double h = 1.0 / 40.0;   // kernel support radius
  double eps = 1.0 / 400.0;  // transverse seed spacing
  double ds = 1.0 / 200.0;   // arclength step
  std::size_t max_steps = 0;  // 0 selects 10 * ceil((Lx + 2h) / (ds * alpha))
  double seed_offset = 0.0;   // seeds at (k + seed_offset) * eps

  void validate() const;
  std::size_t seed_count(const DomainSpec& d) const;
  std::size_t step_budget(const DomainSpec& d, double alpha) const;
};

/// Non-characteristic inflow: a_x(0, xi) <= 0 at a seed.
class CharacteristicBoundaryError : public std::runtime_error {
 public:
  CharacteristicBoundaryError(std::size_t k, double xi, double ax);
  std::size_t k;
  double xi;
};

/// A trajectory could not be completed (non-finite data, budget exhausted, weight collapse).
class TraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Seed {
  std::size_t k = 0;
  double xi = 0.0;
  Particle particle;
};

/// n = round(Ly/eps) seeds at xi_k = (k + offset) eps with omega_0 = ds eps a_x(0, xi_k) and
/// rho_0 = omega_0 g(xi_k).
std::vector<Seed> seed_particles(const DomainSpec& domain, const SolverParams& params, const FieldSet& fields);

enum class Direction { forward, backward };

/// One explicit Euler step of (x, omega, rho). The backward step solves the forward
/// recursion for the previous state; y is wrapped into [0, Ly).
Particle euler_step(const Particle& p, const FieldSet& fields, double ds, Direction dir, const DomainSpec& domain);

/// States j = first .. last of one characteristic, with
///   first (m0)  = first backward index with x >= -h,
///   inside_last (m1) = last index with x <= Lx,
///   last (m2)   = last index with x <= Lx + h.
struct Trajectory {
  std::size_t k = 0;
  double xi = 0.0;
  int first = 0;
  int inside_last = 0;
  int last = 0;
  std::vector<Particle> states;

  const Particle& at(int j) const { return states.at(static_cast<std::size_t>(j - first)); }
};

Trajectory trace_trajectory(const Seed& seed, const FieldSet& fields, const SolverParams& params,
                            const DomainSpec& domain);

/// Re-runs the mass recursion along a traced path with another reaction/source/boundary
/// (positions and weights are reused). Returns rho for j = first .. last.
std::vector<double> carry_mass(const Trajectory& traj, const FieldSet& fields, double ds);

enum class FailurePolicy { abort, skip };

struct TraceSummary {
  std::vector<Trajectory> trajectories;
  std::size_t seeds = 0;
  std::size_t failed = 0;
  std::vector<std::string> diagnostics;
};

/// Seeds and traces every characteristic. With FailurePolicy::skip, failed seeds and
/// non-characteristic inflow points are dropped with a warning.
TraceSummary trace_all(const DomainSpec& domain, const SolverParams& params, const FieldSet& fields,
                       FailurePolicy policy);

/// u along the characteristic from (0, xi) at arclength s from the representation formula
///   u = [g + int_0^s S e^{I}] e^{-I(s)},  I(t) = int_0^t (div a + a0),
/// with an RK4 path and composite trapezoid quadrature on quad_n panels.
double characteristic_oracle(double xi, double s, const FieldSet& fields, std::size_t quad_n);

/// Flat particle storage in (k, j) order, the reconstruction input.
struct ParticleStore {
  std::vector<Vec2> pos;
  std::vector<double> weight;
  std::vector<double> mass;
  std::vector<std::uint32_t> traj;
  std::vector<std::int32_t> step;

  std::size_t size() const { return pos.size(); }
  void push(std::uint32_t k, std::int32_t j, const Particle& p);
};

ParticleStore collect_particles(std::span<const Trajectory> trajectories);

/// CSV with header k,j,x,y,omega,rho; one row per stored state.
void write_particles_csv(const ParticleStore& store, const std::string& path);

}  // namespace partrans
