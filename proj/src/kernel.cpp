#include "partrans/kernel.hpp"

#include <stdexcept>
#include <string>

namespace partrans {

KernelSpec::KernelSpec(double radius)
    : h_(radius), h2_(radius * radius), two_over_h_(2.0 / radius),
      sigma_(40.0 / (7.0 * std::numbers::pi * radius * radius)) {
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw std::invalid_argument("kernel radius must be positive and finite");
}

double kernel_eval(double r, const KernelSpec& spec) {
  if (!(r >= 0.0)) throw std::domain_error("kernel distance must be non-negative, got " + std::to_string(r));
  return spec(r);
}

double kernel_gradient_bound(const KernelSpec& spec) { return 2.0 * spec.sigma() / spec.radius(); }

}  // namespace partrans
