#pragma once

#include <cmath>
#include <numbers>

namespace partrans {

/// Cubic spline shape on q in [0, 2]: 1 - 3/2 q^2 + 3/4 q^3, then 1/4 (2 - q)^3.
inline double cubic_spline_shape(double q) {
  if (q < 1.0) return 1.0 - 1.5 * q * q + 0.75 * q * q * q;
  if (q < 2.0) {
    const double t = 2.0 - q;
    return 0.25 * t * t * t;
  }
  return 0.0;
}

/// dW/dq.
inline double cubic_spline_shape_derivative(double q) {
  if (q < 1.0) return -3.0 * q + 2.25 * q * q;
  if (q < 2.0) {
    const double t = 2.0 - q;
    return -0.75 * t * t;
  }
  return 0.0;
}

/// Two-dimensional cubic spline kernel with support radius h:
///   zeta_h(r) = sigma W(2 r / h),  sigma = 40 / (7 pi h^2),
/// so that it integrates to one over the plane and vanishes for r >= h.
class KernelSpec {
 public:
  explicit KernelSpec(double radius);

  double radius() const { return h_; }
  double sigma() const { return sigma_; }

  /// Unchecked evaluation for hot loops; r must be >= 0.
  double operator()(double r) const { return sigma_ * cubic_spline_shape(r * two_over_h_); }

  /// Same, from the squared distance; returns 0 without a sqrt outside the support.
  double from_squared(double r2) const { return r2 >= h2_ ? 0.0 : (*this)(std::sqrt(r2)); }

  double radial_derivative(double r) const {
    return sigma_ * two_over_h_ * cubic_spline_shape_derivative(r * two_over_h_);
  }

 private:
  double h_;
  double h2_;
  double two_over_h_;
  double sigma_;
};

/// Checked evaluation; throws std::domain_error for r < 0 or NaN.
double kernel_eval(double r, const KernelSpec& spec);

/// sup_r |d zeta_h / dr|. The shape derivative peaks at q = 2/3 with |W'| = 1, giving
/// 2 sigma / h = 80 / (7 pi h^3).
double kernel_gradient_bound(const KernelSpec& spec);

}  // namespace partrans
