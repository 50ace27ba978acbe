#include <doctest.h>

#include <cmath>
#include <numbers>

#include "partrans/fields.hpp"

using namespace partrans;

namespace {
const double kTheta = 39.0 * std::numbers::pi / 180.0;
const DomainSpec kDom{1.0, 0.25};
}

TEST_CASE("flat tilted plane") {
  TiltedPlaneSpec spec;
  spec.theta = kTheta;
  spec.u0 = 1e-3;
  const FieldSet f = make_tilted_plane_field(spec, std::make_shared<FlatSurface>(), kDom);
  const Vec2 a = f.velocity({0.3, 0.1});
  CHECK(a.x == doctest::Approx(0.80978).epsilon(1e-5));
  CHECK(a.y == 0.0);
  CHECK(f.divergence({0.3, 0.1}) == 0.0);
  CHECK(f.boundary(0.2) == 1e-3);
  CHECK(f.source({0.5, 0.1}) == 0.0);
  CHECK(f.inflow_lower_bound == doctest::Approx(std::tan(kTheta)));
  CHECK_FALSE(f.potential_dry_areas);
}

TEST_CASE("rain only inside, constant velocity outside") {
  TiltedPlaneSpec spec;
  spec.theta = kTheta;
  spec.rain = [](Vec2) { return 0.05; };
  const FieldSet f = make_tilted_plane_field(spec, make_z1(1e-3, kDom.Ly), kDom);
  CHECK(f.source({0.5, 0.1}) == 0.05);
  CHECK(f.source({-0.01, 0.1}) == 0.0);
  CHECK(f.source({1.01, 0.1}) == 0.0);
  for (double x : {-0.02, 1.02}) {
    const Vec2 a = f.velocity({x, 0.07});
    CHECK(a.x == std::tan(kTheta));
    CHECK(a.y == 0.0);
    CHECK(f.divergence({x, 0.07}) == 0.0);
  }
}

TEST_CASE("z1 divergence is the negative Laplacian") {
  const double u0 = 1e-3, Ly = kDom.Ly, k = 2 * std::numbers::pi / Ly;
  TiltedPlaneSpec spec;
  spec.theta = kTheta;
  const FieldSet f = make_tilted_plane_field(spec, make_z1(u0, Ly), kDom);
  for (double y : {0.0, 0.05, 0.125, 0.2}) {
    const double expect = 0.5 * u0 * k * k * std::cos(k * (y - Ly / 2));
    CHECK(f.divergence({0.4, y}) == doctest::Approx(expect).epsilon(1e-12));
  }
  // grid path: second-order FD against the analytic value
  std::vector<double> errs;
  for (std::size_t ny : {25, 50, 100}) {
    const auto z = ScalarGrid::sample(20, ny, 1.0, Ly, [&](double x, double y) { return make_z1(u0, Ly)->height({x, y}); });
    const auto div = divergence_grid(z);
    double e = 0.0;
    for (std::size_t j = 0; j < ny; ++j)
      e = std::max(e, std::fabs(div(10, j) - 0.5 * u0 * k * k * std::cos(k * (z.y(j) - Ly / 2))));
    errs.push_back(e);
  }
  CHECK(std::log2(errs[0] / errs[1]) == doctest::Approx(2.0).epsilon(0.15));
  CHECK(std::log2(errs[1] / errs[2]) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("z2 is separable") {
  const double u0 = 1e-3;
  TiltedPlaneSpec spec;
  spec.theta = kTheta;
  const FieldSet f = make_tilted_plane_field(spec, make_z2(u0, kDom.Lx), kDom);
  for (double x : {0.1, 0.33, 0.9}) {
    CHECK(f.velocity({x, 0.02}).y == 0.0);
    CHECK(f.velocity({x, 0.02}).x == f.velocity({x, 0.2}).x);
  }
  const auto z = ScalarGrid::sample(100, 25, 1.0, 0.25, [&](double x, double y) { return make_z2(u0, 1.0)->height({x, y}); });
  const auto div = divergence_grid(z);
  for (std::size_t i = 0; i < 100; ++i)
    for (std::size_t j = 1; j < 25; ++j) CHECK(std::fabs(div(i, j) - div(i, 0)) <= 1e-12 * div.max_abs());
}

TEST_CASE("steep surface is flagged, non-finite surface rejected") {
  TiltedPlaneSpec spec;
  spec.theta = kTheta;
  auto steep = std::make_shared<CosineSurface>(CosineSurface::Axis::x, 0.05, 8 * std::numbers::pi, 0.0, "steep");
  const FieldSet f = make_tilted_plane_field(spec, steep, kDom);
  CHECK(f.potential_dry_areas);

  CHECK_THROWS_AS(GridSurface(ScalarGrid(10, 5, 1.0, 0.25, std::nan(""))), std::invalid_argument);
}

TEST_CASE("grid-backed surface") {
  const auto z = ScalarGrid::sample(400, 100, 1.0, 0.25, [](double x, double y) { return 1e-3 * x + 2e-3 * y; });
  GridSurface s(z);
  const Vec2 g = s.gradient({0.5, 0.1});
  CHECK(g.x == doctest::Approx(1e-3).epsilon(1e-9));
  CHECK(s.laplacian({0.5, 0.1}) == doctest::Approx(0.0).epsilon(1e-9));

  GridFieldSpec gs;
  gs.velocity_x = ScalarGrid(20, 10, 1.0, 0.25, 0.7);
  gs.velocity_y = ScalarGrid(20, 10, 1.0, 0.25, 0.0);
  gs.divergence = ScalarGrid(20, 10, 1.0, 0.25, 0.0);
  gs.outside_speed = 0.8;
  gs.boundary_value = 2.0;
  const FieldSet f = make_grid_field(gs);
  CHECK(f.velocity({0.5, 0.1}).x == doctest::Approx(0.7));
  CHECK(f.velocity({-0.1, 0.1}).x == 0.8);
  CHECK(f.boundary(0.1) == 2.0);
  gs.divergence = ScalarGrid(21, 10, 1.0, 0.25);
  CHECK_THROWS_AS(make_grid_field(gs), std::invalid_argument);
}
