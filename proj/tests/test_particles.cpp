#include <doctest.h>

#include <cmath>
#include <numbers>

#include "partrans/particles.hpp"
#include "partrans/validation.hpp"

using namespace partrans;

namespace {

const double kTheta = 39.0 * std::numbers::pi / 180.0;
const DomainSpec kDom{1.0, 0.25};

FieldSet plane(double rain = 0.0, std::shared_ptr<const Surface> s = std::make_shared<FlatSurface>()) {
  TiltedPlaneSpec spec;
  spec.theta = kTheta;
  spec.u0 = 1e-3;
  if (rain != 0.0) spec.rain = [rain](Vec2) { return rain; };
  return make_tilted_plane_field(spec, std::move(s), kDom);
}

FieldSet constant_field(Vec2 a, double div, double a0 = 0.0, double g = 1.0) {
  FieldSet f;
  f.velocity = [a](Vec2) { return a; };
  f.divergence = [div](Vec2) { return div; };
  f.reaction = [a0](Vec2) { return a0; };
  f.source = [](Vec2) { return 0.0; };
  f.boundary = [g](double) { return g; };
  f.inflow_lower_bound = a.x;
  f.min_velocity_x = a.x;
  f.max_abs_divergence = std::fabs(div);
  return f;
}

}  // namespace

TEST_CASE("seeding") {
  SolverParams p;
  p.eps = 0.025;
  const auto seeds = seed_particles(kDom, p, plane());
  REQUIRE(seeds.size() == 10);
  for (std::size_t k = 0; k < 10; ++k) CHECK(seeds[k].xi == doctest::Approx(0.025 * k));

  p.eps = 0.0025;
  p.ds = 0.005;
  const auto s2 = seed_particles(kDom, p, plane());
  CHECK(s2.size() == 100);
  CHECK(s2[3].particle.weight == doctest::Approx(1.0122e-5).epsilon(1e-4));
  CHECK(s2[3].particle.mass == doctest::Approx(s2[3].particle.weight * 1e-3));
  CHECK(s2[3].particle.pos.x == 0.0);
}

TEST_CASE("explicit Euler step") {
  const double t = std::tan(kTheta);
  const FieldSet c = constant_field({t, 0.0}, 0.0);
  const Particle p = euler_step({{0.0, 0.1}, 2.0, 3.0}, c, 0.005, Direction::forward, kDom);
  CHECK(p.pos.x == doctest::Approx(0.005 * t));
  CHECK(p.pos.y == 0.1);
  CHECK(p.weight == 2.0);
  CHECK(p.mass == 3.0);

  const Particle q = euler_step({{0.0, 0.1}, 1.0, 0.0}, constant_field({1.0, 0.0}, 1.0), 0.1, Direction::forward, kDom);
  CHECK(q.weight == doctest::Approx(1.1));

  FieldSet shear = constant_field({1.0, 0.0}, 0.0);
  shear.velocity = [](Vec2 x) { return Vec2{1.0, x.x}; };
  const DomainSpec wide{10.0, 100.0};
  Particle s{{0.0, 0.0}, 1.0, 1.0};
  s = euler_step(s, shear, 0.5, Direction::forward, wide);
  CHECK(s.pos.x == 0.5);
  CHECK(s.pos.y == 0.0);
  s = euler_step(s, shear, 0.5, Direction::forward, wide);
  CHECK(s.pos.x == 1.0);
  CHECK(s.pos.y == 0.25);
  CHECK(std::fabs(s.pos.y - 0.5) == doctest::Approx(0.25));  // exact flow reaches (1, 0.5)
}

TEST_CASE("backward step inverts the forward step") {
  const FieldSet f = plane(0.05, make_z1(1e-3, kDom.Ly));
  const Particle p{{0.3, 0.1}, 1e-5, 2e-8};
  const Particle q = euler_step(p, f, 0.005, Direction::forward, kDom);
  const Particle r = euler_step(q, f, 0.005, Direction::backward, kDom);
  CHECK(r.pos.x == doctest::Approx(p.pos.x).epsilon(1e-13));
  CHECK(r.pos.y == doctest::Approx(p.pos.y).epsilon(1e-13));
  CHECK(r.weight == doctest::Approx(p.weight).epsilon(1e-12));
  CHECK(r.mass == doctest::Approx(p.mass).epsilon(1e-12));
}

TEST_CASE("trajectory bookkeeping on the flat plane") {
  SolverParams p;  // h = 0.025, ds = 0.005
  const FieldSet f = plane();
  const auto seeds = seed_particles(kDom, p, f);
  const Trajectory t = trace_trajectory(seeds[7], f, p, kDom);
  CHECK(t.inside_last == 246);
  CHECK(t.first == -6);
  CHECK(t.at(0).pos.x == 0.0);
  CHECK(t.at(0).pos.y == seeds[7].xi);
  CHECK(t.at(t.first).pos.x >= -p.h);
  CHECK(t.at(t.first).pos.x < 0.0);
  CHECK(t.at(t.inside_last).pos.x <= kDom.Lx);
  CHECK(t.at(t.inside_last + 1).pos.x > kDom.Lx);
  CHECK(t.at(t.last).pos.x <= kDom.Lx + p.h);
  CHECK(t.last == static_cast<int>(std::floor((kDom.Lx + p.h) / (p.ds * std::tan(kTheta)))));
}

TEST_CASE("z1 trajectories wrap and advance in x") {
  SolverParams p;
  const FieldSet f = plane(0.0, make_z1(1e-3, kDom.Ly));
  const TraceSummary s = trace_all(kDom, p, f, FailurePolicy::abort);
  CHECK(s.failed == 0);
  CHECK(s.trajectories.size() == 100);
  for (const auto& t : s.trajectories)
    for (int j = t.first; j <= t.last; ++j) {
      CHECK(t.at(j).pos.y >= 0.0);
      CHECK(t.at(j).pos.y < kDom.Ly);
      if (j > t.first) CHECK(t.at(j).pos.x > t.at(j - 1).pos.x);
    }
}

TEST_CASE("failure modes") {
  SolverParams p;
  // weight collapse
  const FieldSet collapse = constant_field({1.0, 0.0}, -300.0);
  const auto seeds = seed_particles(kDom, p, collapse);
  CHECK_THROWS_AS(trace_trajectory(seeds[0], collapse, p, kDom), TraceError);

  // non-characteristic inflow
  const FieldSet back = constant_field({-0.5, 0.0}, 0.0);
  CHECK_THROWS_AS(seed_particles(kDom, p, back), CharacteristicBoundaryError);

  // stagnation beyond x = 0.5 exhausts the step budget; skipped under the skip policy
  FieldSet stall = constant_field({1.0, 0.0}, 0.0);
  stall.velocity = [](Vec2 x) { return Vec2{x.x < 0.5 ? 1.0 : 1e-9, 0.0}; };
  CHECK_THROWS_AS(trace_all(kDom, p, stall, FailurePolicy::abort), TraceError);
  const TraceSummary skipped = trace_all(kDom, p, stall, FailurePolicy::skip);
  CHECK(skipped.trajectories.empty());
  CHECK(skipped.failed == skipped.seeds);

  SolverParams bad;
  bad.eps = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("characteristic oracle closed forms") {
  CHECK(characteristic_oracle(0.1, 0.7, constant_field({1.0, 0.0}, 0.0, 0.0, 2.0), 100) == doctest::Approx(2.0));
  CHECK(characteristic_oracle(0.1, 0.7, constant_field({1.0, 0.0}, 0.0, 0.3, 2.0), 1000) ==
        doctest::Approx(2.0 * std::exp(-0.21)).epsilon(1e-7));
  const FieldSet rain = plane(0.05);
  CHECK(characteristic_oracle(0.1, 0.6, rain, 1000) == doctest::Approx(1e-3 + 0.05 * 0.6).epsilon(1e-10));
}

TEST_CASE("Euler masses reproduce the flat-source solution") {
  SolverParams p;
  const FieldSet f = plane(0.05);
  const auto seeds = seed_particles(kDom, p, f);
  const Trajectory t = trace_trajectory(seeds[0], f, p, kDom);
  for (int j = 0; j <= t.inside_last; ++j) {
    const Particle& q = t.at(j);
    CHECK(q.mass / q.weight == doctest::Approx(1e-3 + 0.05 * q.pos.x / std::tan(kTheta)).epsilon(1e-10));
  }
  for (int j = t.first; j < 0; ++j) CHECK(t.at(j).mass == t.at(0).mass);
}

TEST_CASE("Liouville consistency at order one") {
  const double c = 0.5;
  std::vector<double> steps{0.1, 0.05, 0.025, 0.0125}, errs;
  const FieldSet f = constant_field({1.0, 0.0}, c);
  for (double ds : steps) {
    Particle q{{0.0, 0.1}, 1.0, 1.0};
    const DomainSpec d{10.0, 0.25};
    for (int i = 0; i < static_cast<int>(std::lround(1.0 / ds)); ++i) q = euler_step(q, f, ds, Direction::forward, d);
    errs.push_back(std::fabs(q.weight - std::exp(c)));
  }
  std::vector<double> lx, ly;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const double a = std::log(steps[i]), b = std::log(errs[i]);
    sx += a, sy += b, sxx += a * a, sxy += a * b;
  }
  const double n = static_cast<double>(steps.size());
  CHECK((n * sxy - sx * sy) / (n * sxx - sx * sx) == doctest::Approx(1.0).epsilon(0.2));
}

TEST_CASE("positivity, carry_mass and the particle store") {
  SolverParams p;
  const FieldSet f = plane(0.05, make_z1(1e-3, kDom.Ly));
  const TraceSummary s = trace_all(kDom, p, f, FailurePolicy::abort);
  for (const auto& t : s.trajectories) {
    const auto rho = carry_mass(t, f, p.ds);
    for (int j = t.first; j <= t.last; ++j) {
      CHECK(t.at(j).mass >= 0.0);
      CHECK(t.at(j).weight > 0.0);
      CHECK(rho[static_cast<std::size_t>(j - t.first)] == t.at(j).mass);
    }
  }
  const ParticleStore store = collect_particles(s.trajectories);
  std::size_t total = 0;
  for (const auto& t : s.trajectories) total += t.states.size();
  CHECK(store.size() == total);
  for (std::size_t i = 1; i < store.size(); ++i) {
    const bool ordered = store.traj[i] > store.traj[i - 1] ||
                         (store.traj[i] == store.traj[i - 1] && store.step[i] == store.step[i - 1] + 1);
    CHECK(ordered);
  }
}
