#include "partrans/particles.hpp"

#include <cinttypes>
#include <cstdio>
#include <optional>
#include <sstream>

#include "partrans/log.hpp"

namespace partrans {

namespace {

void require_finite(const Particle& p, const char* where) {
  if (!is_finite(p.pos) || !std::isfinite(p.weight) || !std::isfinite(p.mass)) {
    std::ostringstream os;
    os << "non-finite particle state in " << where << " at (" << p.pos.x << ", " << p.pos.y << ")";
    throw TraceError(os.str());
  }
}

}  // namespace

void SolverParams::validate() const {
  if (!(h > 0.0) || !(eps > 0.0) || !(ds > 0.0))
    throw std::invalid_argument("solver parameters h, eps, ds must be positive");
  if (seed_offset < 0.0 || seed_offset >= 1.0) throw std::invalid_argument("seed_offset must lie in [0, 1)");
}

std::size_t SolverParams::seed_count(const DomainSpec& d) const {
  const double n = std::round(d.Ly / eps);
  if (n < 1.0) throw std::invalid_argument("eps larger than the domain width");
  return static_cast<std::size_t>(n);
}

std::size_t SolverParams::step_budget(const DomainSpec& d, double alpha) const {
  if (max_steps > 0) return max_steps;
  if (!(alpha > 0.0)) throw std::invalid_argument("step budget needs a positive inflow speed");
  return 10 * static_cast<std::size_t>(std::ceil((d.Lx + 2.0 * h) / (ds * alpha)));
}

CharacteristicBoundaryError::CharacteristicBoundaryError(std::size_t k_, double xi_, double ax)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "characteristic boundary: a_x(0, " << xi_ << ") = " << ax << " <= 0 at seed " << k_;
        return os.str();
      }()),
      k(k_), xi(xi_) {}

std::vector<Seed> seed_particles(const DomainSpec& domain, const SolverParams& params, const FieldSet& fields) {
  domain.validate();
  params.validate();
  const std::size_t n = params.seed_count(domain);
  std::vector<Seed> seeds;
  seeds.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double xi = (static_cast<double>(k) + params.seed_offset) * params.eps;
    const double ax = fields.velocity({0.0, xi}).x;
    if (!(ax > 0.0)) throw CharacteristicBoundaryError(k, xi, ax);
    const double w = params.ds * params.eps * ax;
    seeds.push_back({k, xi, Particle{{0.0, xi}, w, w * fields.boundary(xi)}});
  }
  return seeds;
}

Particle euler_step(const Particle& p, const FieldSet& fields, double ds, Direction dir, const DomainSpec& domain) {
  require_finite(p, "euler_step input");
  Particle out;
  if (dir == Direction::forward) {
    const Vec2 a = fields.velocity(p.pos);
    const double div = fields.divergence(p.pos);
    const double a0 = fields.reaction(p.pos);
    const double S = fields.source(p.pos);
    const double growth = 1.0 + ds * div;
    if (!(growth > 0.0)) throw TraceError("weight collapse: 1 + ds*div(a) <= 0");
    out.pos = p.pos + ds * a;
    out.weight = p.weight * growth;
    out.mass = p.mass - ds * a0 * p.mass + ds * p.weight * S;
  } else {
    // previous position q solves q + ds a(q) = p; fixed point, exact after one pass
    // wherever the field is locally constant
    Vec2 q = p.pos - ds * fields.velocity(p.pos);
    for (int it = 0; it < 8; ++it) {
      const Vec2 next = p.pos - ds * fields.velocity(q);
      const bool done = next.x == q.x && next.y == q.y;
      q = next;
      if (done) break;
    }
    const double growth = 1.0 + ds * fields.divergence(q);
    const double decay = 1.0 - ds * fields.reaction(q);
    if (!(growth > 0.0) || !(decay != 0.0)) throw TraceError("backward step is not invertible");
    out.pos = q;
    out.weight = p.weight / growth;
    out.mass = (p.mass - ds * out.weight * fields.source(q)) / decay;
  }
  out.pos.y = domain.wrap_y(out.pos.y);
  require_finite(out, "euler_step");
  return out;
}

Trajectory trace_trajectory(const Seed& seed, const FieldSet& fields, const SolverParams& params,
                            const DomainSpec& domain) {
  const double alpha = fields.inflow_lower_bound > 0.0 ? fields.inflow_lower_bound
                                                        : fields.velocity(seed.particle.pos).x;
  const std::size_t budget = params.step_budget(domain, alpha);
  const double lo = -params.h, hi = domain.Lx + params.h;

  std::size_t steps = 0;
  auto spend = [&] {
    if (++steps > budget) {
      std::ostringstream os;
      os << "step budget " << budget << " exhausted on trajectory " << seed.k << " (xi = " << seed.xi << ")";
      throw TraceError(os.str());
    }
  };

  std::vector<Particle> back;
  Particle cur = seed.particle;
  for (;;) {
    spend();
    Particle prev = euler_step(cur, fields, params.ds, Direction::backward, domain);
    if (prev.pos.x < lo) break;
    back.push_back(prev);
    cur = prev;
  }

  Trajectory t;
  t.k = seed.k;
  t.xi = seed.xi;
  t.first = -static_cast<int>(back.size());
  t.states.reserve(back.size() + 64);
  t.states.assign(back.rbegin(), back.rend());
  t.states.push_back(seed.particle);

  cur = seed.particle;
  int j = 0;
  bool crossed = false;
  for (;;) {
    spend();
    Particle next = euler_step(cur, fields, params.ds, Direction::forward, domain);
    if (next.pos.x > hi) break;
    ++j;
    if (!crossed && next.pos.x > domain.Lx) {
      crossed = true;
      t.inside_last = j - 1;
    }
    t.states.push_back(next);
    cur = next;
  }
  if (!crossed) t.inside_last = j;
  t.last = j;
  return t;
}

std::vector<double> carry_mass(const Trajectory& traj, const FieldSet& fields, double ds) {
  const std::size_t n = traj.states.size();
  const std::size_t zero = static_cast<std::size_t>(-traj.first);
  std::vector<double> rho(n);
  rho[zero] = traj.states[zero].weight * fields.boundary(traj.xi);
  for (std::size_t i = zero; i + 1 < n; ++i) {
    const Particle& p = traj.states[i];
    rho[i + 1] = rho[i] - ds * fields.reaction(p.pos) * rho[i] + ds * p.weight * fields.source(p.pos);
  }
  for (std::size_t i = zero; i > 0; --i) {
    const Particle& q = traj.states[i - 1];
    rho[i - 1] = (rho[i] - ds * q.weight * fields.source(q.pos)) / (1.0 - ds * fields.reaction(q.pos));
  }
  return rho;
}

TraceSummary trace_all(const DomainSpec& domain, const SolverParams& params, const FieldSet& fields,
                       FailurePolicy policy) {
  params.validate();
  const std::size_t n = params.seed_count(domain);
  std::vector<Seed> seeds;
  std::vector<std::string> diagnostics;
  if (policy == FailurePolicy::abort) {
    seeds = seed_particles(domain, params, fields);
  } else {
    // seed one by one so a stagnant inflow point only drops itself
    for (std::size_t k = 0; k < n; ++k) {
      const double xi = (static_cast<double>(k) + params.seed_offset) * params.eps;
      const double ax = fields.velocity({0.0, xi}).x;
      if (!(ax > 0.0)) {
        diagnostics.push_back(CharacteristicBoundaryError(k, xi, ax).what());
        continue;
      }
      const double w = params.ds * params.eps * ax;
      seeds.push_back({k, xi, Particle{{0.0, xi}, w, w * fields.boundary(xi)}});
    }
  }

  std::vector<std::optional<Trajectory>> traced(seeds.size());
  std::vector<std::string> errors(seeds.size());
  const auto count = static_cast<std::int64_t>(seeds.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      traced[static_cast<std::size_t>(i)] = trace_trajectory(seeds[static_cast<std::size_t>(i)], fields, params, domain);
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(i)] = e.what();
    }
  }

  TraceSummary out;
  out.seeds = n;
  out.failed = n - seeds.size();
  out.trajectories.reserve(seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (traced[i]) {
      out.trajectories.push_back(std::move(*traced[i]));
      continue;
    }
    if (policy == FailurePolicy::abort) throw TraceError(errors[i]);
    ++out.failed;
    diagnostics.push_back(errors[i]);
  }
  for (const auto& d : diagnostics) log_warn("skipped trajectory: " + d);
  out.diagnostics = std::move(diagnostics);
  return out;
}

double characteristic_oracle(double xi, double s, const FieldSet& fields, std::size_t quad_n) {
  if (quad_n == 0) throw std::invalid_argument("quad_n must be positive");
  if (s == 0.0) return fields.boundary(xi);
  const double step = s / static_cast<double>(quad_n);
  auto rate = [&](Vec2 p) { return fields.divergence(p) + fields.reaction(p); };

  Vec2 x{0.0, xi};
  double f_prev = rate(x);
  double src_prev = fields.source(x);  // integrand S e^{I} at t = 0
  double I = 0.0, J = 0.0;
  for (std::size_t n = 0; n < quad_n; ++n) {
    const Vec2 k1 = fields.velocity(x);
    const Vec2 k2 = fields.velocity(x + (0.5 * step) * k1);
    const Vec2 k3 = fields.velocity(x + (0.5 * step) * k2);
    const Vec2 k4 = fields.velocity(x + step * k3);
    x = x + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!is_finite(x)) throw TraceError("oracle characteristic became non-finite");

    const double f = rate(x);
    I += 0.5 * step * (f_prev + f);
    const double src = fields.source(x) * std::exp(I);
    J += 0.5 * step * (src_prev + src);
    f_prev = f;
    src_prev = src;
  }
  return (fields.boundary(xi) + J) * std::exp(-I);
}

void ParticleStore::push(std::uint32_t k, std::int32_t j, const Particle& p) {
  pos.push_back(p.pos);
  weight.push_back(p.weight);
  mass.push_back(p.mass);
  traj.push_back(k);
  step.push_back(j);
}

ParticleStore collect_particles(std::span<const Trajectory> trajectories) {
  ParticleStore s;
  std::size_t total = 0;
  for (const auto& t : trajectories) total += t.states.size();
  s.pos.reserve(total);
  s.weight.reserve(total);
  s.mass.reserve(total);
  s.traj.reserve(total);
  s.step.reserve(total);
  for (const auto& t : trajectories)
    for (std::size_t i = 0; i < t.states.size(); ++i)
      s.push(static_cast<std::uint32_t>(t.k), t.first + static_cast<std::int32_t>(i), t.states[i]);
  return s;
}

void write_particles_csv(const ParticleStore& store, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  std::fputs("k,j,x,y,omega,rho\n", f);
  for (std::size_t i = 0; i < store.size(); ++i)
    std::fprintf(f, "%" PRIu32 ",%" PRId32 ",%.17g,%.17g,%.17g,%.17g\n", store.traj[i], store.step[i],
                 store.pos[i].x, store.pos[i].y, store.weight[i], store.mass[i]);
  std::fclose(f);
}

}  // namespace partrans
