#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>

#include "partrans/grid.hpp"

using namespace partrans;

namespace {

double max_err(const ScalarGrid& g, auto&& exact) {
  double m = 0.0;
  for (std::size_t i = 0; i < g.nx(); ++i)
    for (std::size_t j = 0; j < g.ny(); ++j) m = std::max(m, std::fabs(g(i, j) - exact(g.x(i), g.y(j))));
  return m;
}

}  // namespace

TEST_CASE("domain wrap and minimum image") {
  const DomainSpec d{1.0, 0.25};
  CHECK(d.wrap_y(0.3) == doctest::Approx(0.05));
  CHECK(d.wrap_y(-0.05) == doctest::Approx(0.2));
  CHECK(d.wrap_y(-1e-20) < d.Ly);
  CHECK(d.min_image_dy(0.24) == doctest::Approx(0.01));
  CHECK(d.min_image_dy(-0.1) == doctest::Approx(0.1));
  CHECK_THROWS_AS((DomainSpec{0.0, 1.0}.validate()), std::invalid_argument);
}

TEST_CASE("grad_fd on constant and linear data") {
  const auto c = ScalarGrid(20, 10, 1.0, 0.25, 3.0);
  auto [cx, cy] = grad_fd(c);
  CHECK(cx.max_abs() == 0.0);
  CHECK(cy.max_abs() == 0.0);

  const auto lin = ScalarGrid::sample(20, 10, 1.0, 0.25, [](double x, double) { return x; });
  auto [lx, ly] = grad_fd(lin);
  CHECK(max_err(lx, [](double, double) { return 1.0; }) < 1e-12);
  CHECK(ly.max_abs() == 0.0);
}

TEST_CASE("grad_fd is second order in the periodic direction") {
  const double Ly = 0.25, k = 2 * std::numbers::pi / Ly;
  std::vector<double> errs;
  for (std::size_t ny : {25, 50, 100, 200}) {
    const auto g = ScalarGrid::sample(8, ny, 1.0, Ly, [&](double, double y) { return std::sin(k * y); });
    errs.push_back(max_err(grad_fd(g).second, [&](double, double y) { return k * std::cos(k * y); }));
  }
  for (std::size_t i = 0; i + 1 < errs.size(); ++i) CHECK(std::log2(errs[i] / errs[i + 1]) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("grad_fd boundary stencils are second order in x") {
  std::vector<double> errs;
  for (std::size_t nx : {20, 40, 80}) {
    const auto g = ScalarGrid::sample(nx, 4, 1.0, 0.25, [](double x, double) { return std::exp(x); });
    errs.push_back(max_err(grad_fd(g).first, [](double x, double) { return std::exp(x); }));
  }
  CHECK(std::log2(errs[0] / errs[1]) == doctest::Approx(2.0).epsilon(0.15));
  CHECK(std::log2(errs[1] / errs[2]) == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("laplacian variants") {
  const auto q = ScalarGrid::sample(40, 20, 1.0, 0.25, [](double x, double) { return x * x; });
  const auto lap = laplacian_fd(q);
  CHECK(max_err(lap, [](double, double) { return 2.0; }) < 1e-8);

  // Neumann: constant stays harmonic, and the discrete sum of the Laplacian of a
  // mirrored field vanishes (no creep flux through x boundaries)
  CHECK(laplacian_neumann(ScalarGrid(10, 6, 1.0, 0.25, 1.5)).max_abs() == 0.0);
  const auto bump = ScalarGrid::sample(30, 12, 1.0, 0.25, [](double x, double y) { return std::cos(3 * x) + y; });
  CHECK(laplacian_neumann(bump).all_finite());
  CHECK_THROWS(grad_fd(ScalarGrid(2, 2, 1.0, 1.0)));
}

TEST_CASE("interp_bilinear") {
  const auto g = ScalarGrid::sample(10, 8, 1.0, 0.25, [](double x, double y) { return 3 * x + 2 * y; });
  CHECK(interp_bilinear(g, {g.x(3), g.y(5)}) == doctest::Approx(g(3, 5)).epsilon(1e-15));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(0.0, g.x(9)), uy(0.0, g.y(7));
  for (int t = 0; t < 100; ++t) {
    const Vec2 p{ux(rng), uy(rng)};
    CHECK(interp_bilinear(g, p) == doctest::Approx(3 * p.x + 2 * p.y).epsilon(1e-13));
  }

  ScalarGrid s(2, 2, 2.0, 2.0);
  s(0, 1) = 1.0;
  s(1, 1) = 1.0;
  CHECK(interp_bilinear(s, {0.5, 0.5}) == doctest::Approx(0.5));

  // monotone: output within the stencil range
  for (int t = 0; t < 100; ++t) {
    const Vec2 p{ux(rng), uy(rng)};
    const double v = interp_bilinear(g, p);
    CHECK(v >= g.min() - 1e-15);
    CHECK(v <= g.max() + 1e-15);
  }
}

TEST_CASE("grid csv round trip and validation") {
  const auto path = (std::filesystem::temp_directory_path() / "partrans_grid.csv").string();
  const auto g = ScalarGrid::sample(7, 5, 1.0, 0.25, [](double x, double y) { return std::sin(x) / 3 + y; });
  write_grid_csv(g, path);
  const auto r = read_grid_csv(path, 7, 5, 1.0, 0.25);
  CHECK(r.values() == g.values());
  CHECK_THROWS(read_grid_csv(path, 7, 6, 1.0, 0.25));
  std::remove(path.c_str());
}
