#include "partrans/grid.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace partrans {

ScalarGrid::ScalarGrid(std::size_t nx, std::size_t ny, double Lx, double Ly, double fill)
    : nx_(nx), ny_(ny), Lx_(Lx), Ly_(Ly), values_(nx * ny, fill) {
  if (nx < 2 || ny < 2) throw std::invalid_argument("grid needs at least 2 nodes per direction");
  if (!(Lx > 0.0) || !(Ly > 0.0)) throw std::invalid_argument("grid extent must be positive");
}

bool ScalarGrid::same_geometry(const ScalarGrid& o) const {
  return nx_ == o.nx_ && ny_ == o.ny_ && Lx_ == o.Lx_ && Ly_ == o.Ly_;
}

double ScalarGrid::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarGrid::max() const { return *std::max_element(values_.begin(), values_.end()); }

double ScalarGrid::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::fabs(v));
  return m;
}

bool ScalarGrid::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

std::pair<ScalarGrid, ScalarGrid> grad_fd(const ScalarGrid& g) {
  const std::size_t nx = g.nx(), ny = g.ny();
  if (nx < 3 || ny < 3) throw std::invalid_argument("grad_fd needs nx, ny >= 3");
  ScalarGrid gx(nx, ny, g.Lx(), g.Ly()), gy(nx, ny, g.Lx(), g.Ly());
  const double idx2 = 0.5 / g.dx(), idy2 = 0.5 / g.dy();
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      if (i == 0)
        gx(i, j) = (-3.0 * g(0, j) + 4.0 * g(1, j) - g(2, j)) * idx2;
      else if (i == nx - 1)
        gx(i, j) = (3.0 * g(i, j) - 4.0 * g(i - 1, j) + g(i - 2, j)) * idx2;
      else
        gx(i, j) = (g(i + 1, j) - g(i - 1, j)) * idx2;
      const std::size_t jp = (j + 1) % ny, jm = (j + ny - 1) % ny;
      gy(i, j) = (g(i, jp) - g(i, jm)) * idy2;
    }
  }
  return {std::move(gx), std::move(gy)};
}

ScalarGrid laplacian_fd(const ScalarGrid& g) {
  const std::size_t nx = g.nx(), ny = g.ny();
  if (nx < 4 || ny < 3) throw std::invalid_argument("laplacian_fd needs nx >= 4, ny >= 3");
  ScalarGrid out(nx, ny, g.Lx(), g.Ly());
  const double idx2 = 1.0 / (g.dx() * g.dx()), idy2 = 1.0 / (g.dy() * g.dy());
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      double dxx;
      if (i == 0)
        dxx = 2.0 * g(0, j) - 5.0 * g(1, j) + 4.0 * g(2, j) - g(3, j);
      else if (i == nx - 1)
        dxx = 2.0 * g(i, j) - 5.0 * g(i - 1, j) + 4.0 * g(i - 2, j) - g(i - 3, j);
      else
        dxx = g(i + 1, j) - 2.0 * g(i, j) + g(i - 1, j);
      const std::size_t jp = (j + 1) % ny, jm = (j + ny - 1) % ny;
      out(i, j) = dxx * idx2 + (g(i, jp) - 2.0 * g(i, j) + g(i, jm)) * idy2;
    }
  }
  return out;
}

ScalarGrid laplacian_neumann(const ScalarGrid& g) {
  const std::size_t nx = g.nx(), ny = g.ny();
  ScalarGrid out(nx, ny, g.Lx(), g.Ly());
  const double idx2 = 1.0 / (g.dx() * g.dx()), idy2 = 1.0 / (g.dy() * g.dy());
  for (std::size_t i = 0; i < nx; ++i) {
    // mirror ghosts: v(-1) = v(1), v(nx) = v(nx-2)
    const std::size_t ip = (i + 1 < nx) ? i + 1 : nx - 2;
    const std::size_t im = (i > 0) ? i - 1 : 1;
    for (std::size_t j = 0; j < ny; ++j) {
      const std::size_t jp = (j + 1) % ny, jm = (j + ny - 1) % ny;
      out(i, j) = (g(ip, j) - 2.0 * g(i, j) + g(im, j)) * idx2 +
                  (g(i, jp) - 2.0 * g(i, j) + g(i, jm)) * idy2;
    }
  }
  return out;
}

double interp_bilinear(const ScalarGrid& g, Vec2 p) {
  const std::size_t nx = g.nx(), ny = g.ny();
  double fx = p.x / g.dx();
  fx = std::clamp(fx, 0.0, static_cast<double>(nx - 1));
  std::size_t i0 = static_cast<std::size_t>(fx);
  if (i0 >= nx - 1) i0 = nx - 2;
  const double tx = fx - static_cast<double>(i0);

  const double yw = g.domain().wrap_y(p.y);
  double fy = yw / g.dy();
  std::size_t j0 = static_cast<std::size_t>(fy);
  if (j0 >= ny) j0 = ny - 1;
  const double ty = fy - static_cast<double>(j0);
  const std::size_t j1 = (j0 + 1) % ny;

  const double v00 = g(i0, j0), v10 = g(i0 + 1, j0), v01 = g(i0, j1), v11 = g(i0 + 1, j1);
  return (1.0 - tx) * ((1.0 - ty) * v00 + ty * v01) + tx * ((1.0 - ty) * v10 + ty * v11);
}

void write_grid_csv(const ScalarGrid& g, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  for (std::size_t i = 0; i < g.nx(); ++i) {
    for (std::size_t j = 0; j < g.ny(); ++j) std::fprintf(f, j ? ",%.17g" : "%.17g", g(i, j));
    std::fputc('\n', f);
  }
  std::fclose(f);
}

ScalarGrid read_grid_csv(const std::string& path, std::size_t nx, std::size_t ny, double Lx, double Ly) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open surface file " + path);
  ScalarGrid g(nx, ny, Lx, Ly);
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      if (cell.find_first_not_of(" \t\r") == std::string::npos) continue;
      if (n >= nx * ny) throw std::runtime_error(path + ": more than nx*ny values");
      double v = 0.0;
      try {
        v = std::stod(cell);
      } catch (const std::exception&) {
        throw std::runtime_error(path + ": unparsable value '" + cell + "'");
      }
      if (!std::isfinite(v)) throw std::runtime_error(path + ": non-finite value at index " + std::to_string(n));
      g.values()[n++] = v;
    }
  }
  if (n != nx * ny)
    throw std::runtime_error(path + ": expected " + std::to_string(nx * ny) + " values, got " + std::to_string(n));
  return g;
}

}  // namespace partrans
