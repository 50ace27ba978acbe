#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace partrans {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }

inline bool is_finite(Vec2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

/// Rectangle [0,Lx] x [0,Ly], periodic in y.
struct DomainSpec {
  double Lx = 1.0;
  double Ly = 0.25;

  void validate() const {
    if (!(Lx > 0.0) || !(Ly > 0.0)) throw std::invalid_argument("domain lengths must be positive");
  }

  /// Maps y into [0, Ly).
  double wrap_y(double y) const {
    double w = std::fmod(y, Ly);
    if (w < 0.0) w += Ly;
    if (w >= Ly) w -= Ly;  // fmod of a tiny negative can round up to Ly
    return w;
  }

  /// Minimum-image transverse separation, in [0, Ly/2].
  double min_image_dy(double dy) const {
    double d = std::fabs(std::fmod(dy, Ly));
    return d > 0.5 * Ly ? Ly - d : d;
  }
};

/// Node-centred nx x ny array; node (i,j) sits at (i*dx, j*dy) with dx = Lx/nx, dy = Ly/ny.
/// Storage is row-major with one row per x index.
class ScalarGrid {
 public:
  ScalarGrid() = default;
  ScalarGrid(std::size_t nx, std::size_t ny, double Lx, double Ly, double fill = 0.0);

  template <class F>
  static ScalarGrid sample(std::size_t nx, std::size_t ny, double Lx, double Ly, F&& f) {
    ScalarGrid g(nx, ny, Lx, Ly);
    for (std::size_t i = 0; i < nx; ++i)
      for (std::size_t j = 0; j < ny; ++j) g(i, j) = f(g.x(i), g.y(j));
    return g;
  }

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  double Lx() const { return Lx_; }
  double Ly() const { return Ly_; }
  double dx() const { return Lx_ / static_cast<double>(nx_); }
  double dy() const { return Ly_ / static_cast<double>(ny_); }
  double x(std::size_t i) const { return static_cast<double>(i) * dx(); }
  double y(std::size_t j) const { return static_cast<double>(j) * dy(); }
  DomainSpec domain() const { return {Lx_, Ly_}; }

  double& operator()(std::size_t i, std::size_t j) { return values_[i * ny_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * ny_ + j]; }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  bool same_geometry(const ScalarGrid& o) const;
  double min() const;
  double max() const;
  double max_abs() const;
  bool all_finite() const;

 private:
  std::size_t nx_ = 0;
  std::size_t ny_ = 0;
  double Lx_ = 0.0;
  double Ly_ = 0.0;
  std::vector<double> values_;
};

/// Central differences in the interior, one-sided second order at x = 0 and the last
/// x node, periodic in y. Returns (d/dx, d/dy).
std::pair<ScalarGrid, ScalarGrid> grad_fd(const ScalarGrid& g);

/// Second-order Laplacian: 5-point in the interior, one-sided second-order second
/// derivative at the two x boundaries, periodic in y.
ScalarGrid laplacian_fd(const ScalarGrid& g);

/// 5-point Laplacian with homogeneous Neumann conditions in x (mirror ghost nodes),
/// periodic in y. Used for creep.
ScalarGrid laplacian_neumann(const ScalarGrid& g);

/// Bilinear interpolation. x is clamped to the node range, y wraps modulo Ly.
double interp_bilinear(const ScalarGrid& g, Vec2 p);

// Headerless CSV, one line per x index holding ny values.
void write_grid_csv(const ScalarGrid& g, const std::string& path);
ScalarGrid read_grid_csv(const std::string& path, std::size_t nx, std::size_t ny, double Lx, double Ly);

}  // namespace partrans
