#include "partrans/fields.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <sstream>

namespace partrans {

namespace {

constexpr double kPi = std::numbers::pi;

void summarize(FieldSet& f, const DomainSpec& d, std::size_t nx, std::size_t ny) {
  double min_ax = std::numeric_limits<double>::infinity();
  double alpha = std::numeric_limits<double>::infinity();
  double max_div = 0.0, max_a0 = 0.0;
  for (std::size_t i = 0; i <= nx; ++i) {
    const double x = d.Lx * static_cast<double>(i) / static_cast<double>(nx);
    for (std::size_t j = 0; j < ny; ++j) {
      const Vec2 p{x, d.Ly * static_cast<double>(j) / static_cast<double>(ny)};
      const Vec2 a = f.velocity(p);
      const double div = f.divergence(p);
      const double a0 = f.reaction(p);
      if (!is_finite(a) || !std::isfinite(div) || !std::isfinite(a0) || !std::isfinite(f.source(p))) {
        std::ostringstream os;
        os << "non-finite field value at (" << p.x << ", " << p.y << ") for " << f.descriptor;
        throw std::invalid_argument(os.str());
      }
      min_ax = std::min(min_ax, a.x);
      if (i == 0) alpha = std::min(alpha, a.x);
      max_div = std::max(max_div, std::fabs(div));
      max_a0 = std::max(max_a0, std::fabs(a0));
    }
  }
  f.min_velocity_x = min_ax;
  f.inflow_lower_bound = alpha;
  f.max_abs_divergence = max_div;
  f.max_abs_reaction = max_a0;
  f.potential_dry_areas = !(min_ax > 0.0);
}

}  // namespace

CosineSurface::CosineSurface(Axis axis, double amplitude, double wavenumber, double shift, std::string name)
    : axis_(axis), amplitude_(amplitude), k_(wavenumber), shift_(shift), name_(std::move(name)) {}

double CosineSurface::height(Vec2 p) const { return amplitude_ * std::cos(k_ * (coord(p) - shift_)); }

Vec2 CosineSurface::gradient(Vec2 p) const {
  const double d = -amplitude_ * k_ * std::sin(k_ * (coord(p) - shift_));
  return axis_ == Axis::x ? Vec2{d, 0.0} : Vec2{0.0, d};
}

double CosineSurface::laplacian(Vec2 p) const { return -k_ * k_ * height(p); }

std::shared_ptr<const Surface> make_z1(double u0, double Ly) {
  return std::make_shared<CosineSurface>(CosineSurface::Axis::y, 0.5 * u0, 2.0 * kPi / Ly, 0.5 * Ly, "z1");
}

std::shared_ptr<const Surface> make_z2(double u0, double Lx) {
  return std::make_shared<CosineSurface>(CosineSurface::Axis::x, 20.0 * u0, 8.0 * kPi / Lx, 0.0, "z2");
}

std::shared_ptr<const Surface> make_z3(double u0, double Ly) {
  return std::make_shared<CosineSurface>(CosineSurface::Axis::y, 2.0 * u0, 4.0 * kPi / Ly, 0.5 * Ly, "z3");
}

GridSurface::GridSurface(ScalarGrid z, std::string name) : z_(std::move(z)), name_(std::move(name)) {
  if (!z_.all_finite()) throw std::invalid_argument("surface grid contains non-finite values");
  auto [gx, gy] = grad_fd(z_);
  zx_ = std::move(gx);
  zy_ = std::move(gy);
  lap_ = laplacian_fd(z_);
}

ScalarGrid divergence_grid(const ScalarGrid& z) {
  ScalarGrid d = laplacian_fd(z);
  for (double& v : d.values()) v = -v;
  return d;
}

FieldSet make_tilted_plane_field(const TiltedPlaneSpec& spec, std::shared_ptr<const Surface> surface,
                                 const DomainSpec& domain) {
  domain.validate();
  if (!surface) surface = std::make_shared<FlatSurface>();
  const double V = spec.velocity_scale;
  const double slope = std::tan(spec.theta);
  const double Lx = domain.Lx;
  auto inside = [Lx](Vec2 p) { return p.x >= 0.0 && p.x <= Lx; };

  FieldSet f;
  f.velocity = [surface, inside, V, slope](Vec2 p) -> Vec2 {
    if (!inside(p)) return {V * slope, 0.0};
    const Vec2 g = surface->gradient(p);
    return {V * (slope - g.x), -V * g.y};
  };
  f.divergence = [surface, inside, V](Vec2 p) { return inside(p) ? -V * surface->laplacian(p) : 0.0; };
  f.reaction = [](Vec2) { return 0.0; };
  if (spec.rain) {
    auto rain = spec.rain;
    f.source = [rain, inside](Vec2 p) { return inside(p) ? rain(p) : 0.0; };
  } else {
    f.source = [](Vec2) { return 0.0; };
  }
  const double u0 = spec.u0;
  f.boundary = [u0](double) { return u0; };

  std::ostringstream os;
  os << "tilted_plane(theta=" << spec.theta << ",surface=" << surface->describe() << ")";
  f.descriptor = os.str();

  // surface values themselves must be finite, not only derivatives
  for (std::size_t i = 0; i <= spec.sample_nx; ++i)
    for (std::size_t j = 0; j < spec.sample_ny; ++j) {
      const Vec2 p{Lx * static_cast<double>(i) / static_cast<double>(spec.sample_nx),
                   domain.Ly * static_cast<double>(j) / static_cast<double>(spec.sample_ny)};
      if (!std::isfinite(surface->height(p)))
        throw std::invalid_argument("surface " + surface->describe() + " has non-finite height");
    }
  summarize(f, domain, spec.sample_nx, spec.sample_ny);
  return f;
}

FieldSet make_grid_field(GridFieldSpec spec) {
  const ScalarGrid& vx = spec.velocity_x;
  if (!vx.same_geometry(spec.velocity_y) || !vx.same_geometry(spec.divergence) ||
      (spec.source && !vx.same_geometry(*spec.source)))
    throw std::invalid_argument("grid field components must share one geometry");
  const DomainSpec domain = vx.domain();
  const double Lx = domain.Lx;
  const std::size_t nx = vx.nx(), ny = vx.ny();

  auto vxg = std::make_shared<const ScalarGrid>(std::move(spec.velocity_x));
  auto vyg = std::make_shared<const ScalarGrid>(std::move(spec.velocity_y));
  auto divg = std::make_shared<const ScalarGrid>(std::move(spec.divergence));
  const double outside = spec.outside_speed;
  auto inside = [Lx](Vec2 p) { return p.x >= 0.0 && p.x <= Lx; };

  FieldSet f;
  f.velocity = [=](Vec2 p) -> Vec2 {
    if (!inside(p)) return {outside, 0.0};
    return {interp_bilinear(*vxg, p), interp_bilinear(*vyg, p)};
  };
  f.divergence = [=](Vec2 p) { return inside(p) ? interp_bilinear(*divg, p) : 0.0; };
  f.reaction = [](Vec2) { return 0.0; };
  if (spec.source) {
    auto sg = std::make_shared<const ScalarGrid>(std::move(*spec.source));
    f.source = [=](Vec2 p) { return inside(p) ? interp_bilinear(*sg, p) : 0.0; };
  } else {
    f.source = [](Vec2) { return 0.0; };
  }
  const double g = spec.boundary_value;
  f.boundary = [g](double) { return g; };
  f.descriptor = spec.descriptor;
  summarize(f, domain, nx - 1, ny);
  return f;
}

}  // namespace partrans
