#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "partrans/grid.hpp"

namespace partrans {

/// Coefficients of div(a u) + a0 u = S on x > 0 with u(0, y) = g(y).
/// Immutable once built; all members are safe to call concurrently.
struct FieldSet {
  std::function<Vec2(Vec2)> velocity;
  std::function<double(Vec2)> divergence;
  std::function<double(Vec2)> reaction;
  std::function<double(Vec2)> source;
  std::function<double(double)> boundary;

  double inflow_lower_bound = 0.0;  // alpha: min of a_x over the inflow boundary
  double max_abs_divergence = 0.0;  // sampled sup |div a|, for the positivity check
  double max_abs_reaction = 0.0;
  double min_velocity_x = 0.0;      // sampled over the domain
  bool potential_dry_areas = false;
  std::string descriptor;
};

/// Bottom perturbation z(x, y) with first and second derivatives.
class Surface {
 public:
  virtual ~Surface() = default;
  virtual double height(Vec2 p) const = 0;
  virtual Vec2 gradient(Vec2 p) const = 0;
  virtual double laplacian(Vec2 p) const = 0;
  virtual std::string describe() const = 0;
};

class FlatSurface final : public Surface {
 public:
  double height(Vec2) const override { return 0.0; }
  Vec2 gradient(Vec2) const override { return {}; }
  double laplacian(Vec2) const override { return 0.0; }
  std::string describe() const override { return "flat"; }
};

/// amplitude * cos(wavenumber * (coord - shift)) with coord = x or y.
class CosineSurface final : public Surface {
 public:
  enum class Axis { x, y };
  CosineSurface(Axis axis, double amplitude, double wavenumber, double shift, std::string name);

  double height(Vec2 p) const override;
  Vec2 gradient(Vec2 p) const override;
  double laplacian(Vec2 p) const override;
  std::string describe() const override { return name_; }

  double amplitude() const { return amplitude_; }
  double wavenumber() const { return k_; }

 private:
  double coord(Vec2 p) const { return axis_ == Axis::x ? p.x : p.y; }
  Axis axis_;
  double amplitude_;
  double k_;
  double shift_;
  std::string name_;
};

// Test surfaces on [0,Lx] x [0,Ly] with inflow height u0.
std::shared_ptr<const Surface> make_z1(double u0, double Ly);  // (u0/2) cos(2pi/Ly (y - Ly/2))
std::shared_ptr<const Surface> make_z2(double u0, double Lx);  // 20 u0 cos(8pi/Lx x)
std::shared_ptr<const Surface> make_z3(double u0, double Ly);  // 2 u0 cos(4pi/Ly (y - Ly/2))

/// Grid-backed surface: derivatives by finite differences, served by bilinear interpolation.
class GridSurface final : public Surface {
 public:
  explicit GridSurface(ScalarGrid z, std::string name = "grid");

  double height(Vec2 p) const override { return interp_bilinear(z_, p); }
  Vec2 gradient(Vec2 p) const override { return {interp_bilinear(zx_, p), interp_bilinear(zy_, p)}; }
  double laplacian(Vec2 p) const override { return interp_bilinear(lap_, p); }
  std::string describe() const override { return name_; }

  const ScalarGrid& grid() const { return z_; }

 private:
  ScalarGrid z_, zx_, zy_, lap_;
  std::string name_;
};

/// div a for a = (tan theta - dz/dx, -dz/dy), i.e. -laplacian(z), on the grid of z.
ScalarGrid divergence_grid(const ScalarGrid& z);

struct TiltedPlaneSpec {
  double theta = 0.0;          // radians
  double u0 = 1e-3;            // inflow value g
  std::function<double(Vec2)> rain;  // S inside the domain; empty means zero
  double velocity_scale = 1.0;
  std::size_t sample_nx = 400;  // nodes used for the construction-time checks
  std::size_t sample_ny = 100;
};

/// a = V (tan theta - dz/dx, -dz/dy) in [0,Lx], V (tan theta, 0) outside; a0 = 0;
/// S = rain inside, 0 outside; g = u0. Throws on non-finite surface samples.
FieldSet make_tilted_plane_field(const TiltedPlaneSpec& spec, std::shared_ptr<const Surface> surface,
                                 const DomainSpec& domain);

/// Field served from precomputed grids (landscape coupling). Outside [0,Lx] the velocity is
/// (outside_speed, 0) and divergence, reaction and source vanish.
struct GridFieldSpec {
  ScalarGrid velocity_x;
  ScalarGrid velocity_y;
  ScalarGrid divergence;
  std::optional<ScalarGrid> source;
  double outside_speed = 0.0;
  double boundary_value = 0.0;
  std::string descriptor = "grid";
};

FieldSet make_grid_field(GridFieldSpec spec);

}  // namespace partrans
