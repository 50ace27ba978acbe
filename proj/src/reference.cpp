#include "partrans/reference.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace partrans {

ScalarGrid exact_flat(double u0, double r, double theta, const ProbeGrid& probes, const DomainSpec& domain) {
  const double t = std::tan(theta);
  return ScalarGrid::sample(probes.nx, probes.ny, domain.Lx, domain.Ly,
                            [&](double x, double) { return u0 + r * x / t; });
}

FvResult solve_fv_march(const FieldSet& fields, const DomainSpec& domain, std::size_t nx, std::size_t ny,
                        double cfl) {
  domain.validate();
  FvResult out;
  out.u = ScalarGrid(nx, ny, domain.Lx, domain.Ly);
  const double dy = out.u.dy();

  std::vector<double> F(ny), u(ny), G(ny), ax(ny);
  auto row_ax = [&](double x) {
    for (std::size_t j = 0; j < ny; ++j) {
      ax[j] = fields.velocity({x, out.u.y(j)}).x;
      if (!(ax[j] > 0.0)) {
        std::ostringstream os;
        os << "finite-volume reference undefined: a_x(" << x << ", " << out.u.y(j) << ") = " << ax[j];
        throw std::domain_error(os.str());
      }
    }
  };
  auto max_ratio = [&](double x) {
    double m = 0.0;
    for (std::size_t j = 0; j < ny; ++j) {
      const Vec2 a = fields.velocity({x, out.u.y(j) + 0.5 * dy});
      m = std::max(m, std::fabs(a.y) / std::max(a.x, 1e-300));
    }
    return m;
  };

  row_ax(0.0);
  for (std::size_t j = 0; j < ny; ++j) {
    F[j] = ax[j] * fields.boundary(out.u.y(j));
    out.u(0, j) = F[j] / ax[j];
    out.inflow_flux += F[j] * dy;
  }

  double x = 0.0;
  for (std::size_t i = 1; i <= nx; ++i) {
    const double x_next = (i == nx) ? domain.Lx : out.u.x(i);
    const double span = x_next - x;
    const double ratio = std::max(max_ratio(x), max_ratio(x_next));
    const auto m = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span * ratio / (cfl * dy))));
    const double sub = span / static_cast<double>(m);
    for (std::size_t s = 0; s < m; ++s) {
      row_ax(x);
      for (std::size_t j = 0; j < ny; ++j) u[j] = F[j] / ax[j];
      for (std::size_t j = 0; j < ny; ++j) {
        const std::size_t jp = (j + 1) % ny;
        const double ay = fields.velocity({x, out.u.y(j) + 0.5 * dy}).y;
        G[j] = ay * (ay > 0.0 ? u[j] : u[jp]);  // flux through face j + 1/2
      }
      double src_row = 0.0;
      for (std::size_t j = 0; j < ny; ++j) {
        const Vec2 p{x, out.u.y(j)};
        const double rhs = fields.source(p) - fields.reaction(p) * u[j];
        src_row += rhs;
        const std::size_t jm = (j + ny - 1) % ny;
        F[j] += sub * (rhs - (G[j] - G[jm]) / dy);
      }
      out.source_total += sub * src_row * dy;
      x = (s + 1 == m) ? x_next : x + sub;
      ++out.substeps;
    }
    row_ax(x);
    if (i < nx)
      for (std::size_t j = 0; j < ny; ++j) out.u(i, j) = F[j] / ax[j];
  }
  for (std::size_t j = 0; j < ny; ++j) out.outflow_flux += F[j] * dy;
  return out;
}

double linf_relative_error(const ScalarGrid& approx, const ScalarGrid& ref) {
  if (!approx.same_geometry(ref)) throw std::invalid_argument("error grids differ in geometry");
  const double scale = ref.max_abs();
  if (!(scale > 0.0)) throw std::domain_error("relative error undefined: reference is identically zero");
  double m = 0.0;
  for (std::size_t n = 0; n < ref.values().size(); ++n)
    m = std::max(m, std::fabs(approx.values()[n] - ref.values()[n]));
  return m / scale;
}

ScalarGrid restrict_to(const ScalarGrid& fine, std::size_t nx, std::size_t ny) {
  if (nx == 0 || ny == 0 || fine.nx() % nx != 0 || fine.ny() % ny != 0)
    throw std::invalid_argument("coarse node counts must divide the fine ones");
  const std::size_t sx = fine.nx() / nx, sy = fine.ny() / ny;
  ScalarGrid out(nx, ny, fine.Lx(), fine.Ly());
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j) out(i, j) = fine(i * sx, j * sy);
  return out;
}

void write_sweep_csv(const std::vector<ErrorRecord>& records, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  std::fputs("h,eps,ds,error,runtime,case\n", f);
  for (const auto& r : records)
    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.6f,%s\n", r.h, r.eps, r.ds, r.error, r.runtime, r.label.c_str());
  std::fclose(f);
}

}  // namespace partrans
