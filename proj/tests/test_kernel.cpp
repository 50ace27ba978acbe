#include <doctest.h>

#include <cmath>
#include <numbers>

#include "partrans/kernel.hpp"
#include "partrans/validation.hpp"

using namespace partrans;

TEST_CASE("support and peak value") {
  const KernelSpec k(1.0);
  CHECK(kernel_eval(0.0, k) == doctest::Approx(40.0 / (7.0 * std::numbers::pi)));
  CHECK(kernel_eval(0.0, k) == doctest::Approx(1.81891).epsilon(1e-5));
  CHECK(kernel_eval(1.0, k) == 0.0);
  CHECK(kernel_eval(1.0001, k) == 0.0);
  CHECK_THROWS_AS(kernel_eval(-0.1, k), std::domain_error);
  CHECK_THROWS_AS(kernel_eval(std::nan(""), k), std::domain_error);
  for (int i = 0; i <= 1000; ++i) CHECK(kernel_eval(i * 1e-3, k) >= 0.0);
}

TEST_CASE("normalization on a tensor grid") {
  // 2001 x 2001 midpoint grid over the support square, independent of the radial rule
  for (double h : {0.00625, 0.025, 0.1}) {
    const KernelSpec k(h);
    const int n = 2001;
    const double w = 2 * h / n;
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double x = -h + (i + 0.5) * w, y = -h + (j + 0.5) * w;
        s += k.from_squared(x * x + y * y);
      }
    CHECK(s * w * w == doctest::Approx(1.0).epsilon(2e-6));
    CHECK(kernel_radial_integral(k) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("radial symmetry and continuity at the junctions") {
  const KernelSpec k(0.025);
  const double r = 0.013;
  for (double a : {0.0, 0.3, 1.1, 2.5}) {
    const double x = r * std::cos(a), y = r * std::sin(a);
    CHECK(k.from_squared(x * x + y * y) == doctest::Approx(k(r)).epsilon(1e-14));
  }
  for (double q : {1.0, 2.0}) {
    CHECK(std::fabs(cubic_spline_shape(q - 1e-13) - cubic_spline_shape(q)) <= 1e-12);
    CHECK(std::fabs(cubic_spline_shape_derivative(q - 1e-13) - cubic_spline_shape_derivative(q)) <= 1e-12);
  }
}

TEST_CASE("gradient bound") {
  const KernelSpec one(1.0);
  const double b = kernel_gradient_bound(one);
  CHECK(b == doctest::Approx(80.0 / (7.0 * std::numbers::pi)));
  // dense sampling: bound holds and is attained near q = 2/3 (r = h/3)
  double worst = 0.0;
  for (int i = 0; i <= 10000; ++i) worst = std::max(worst, std::fabs(one.radial_derivative(i * 1e-4)));
  CHECK(worst <= b * (1 + 1e-12));
  CHECK(worst == doctest::Approx(b).epsilon(1e-6));
  CHECK(std::fabs(one.radial_derivative(1.0 / 3.0)) == doctest::Approx(b));

  const KernelSpec k(0.05);
  CHECK(kernel_gradient_bound(k) == doctest::Approx(b / std::pow(0.05, 3)));
}
