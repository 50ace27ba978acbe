#include "partrans/neighbor.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace partrans {

namespace {

// Guards floor() against ratios like 0.25/0.025 landing just below an integer.
constexpr double kCountSlack = 1e-9;

}  // namespace

CellGrid::CellGrid(std::span<const Vec2> positions, double h, const DomainSpec& domain)
    : h_(h), x0_(-h), domain_(domain) {
  if (!(h > 0.0)) throw std::invalid_argument("cell size must be positive");
  domain.validate();
  ncx_ = static_cast<std::size_t>(std::ceil((domain.Lx + 2.0 * h) / h - kCountSlack));
  ncx_ = std::max<std::size_t>(ncx_, 1);
  ncy_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(domain.Ly / h + kCountSlack)));
  cy_ = domain.Ly / static_cast<double>(ncy_);

  const double x_hi = domain.Lx + h;
  std::vector<std::uint32_t> cell(positions.size());
  start_.assign(ncx_ * ncy_ + 1, 0);
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const Vec2 p = positions[i];
    if (!(p.x >= x0_ && p.x <= x_hi) || !(p.y >= 0.0 && p.y < domain.Ly)) {
      std::ostringstream os;
      os << "particle " << i << " at (" << p.x << ", " << p.y << ") lies outside the band";
      throw std::out_of_range(os.str());
    }
    const auto [cx, cyi] = cell_of(p);
    cell[i] = static_cast<std::uint32_t>(cx * ncy_ + cyi);
    ++start_[cell[i] + 1];
  }
  for (std::size_t c = 0; c < ncx_ * ncy_; ++c) start_[c + 1] += start_[c];
  index_.resize(positions.size());
  std::vector<std::uint32_t> fill(start_.begin(), start_.end() - 1);
  for (std::size_t i = 0; i < positions.size(); ++i) index_[fill[cell[i]]++] = static_cast<std::uint32_t>(i);
}

std::array<std::size_t, 2> CellGrid::cell_of(Vec2 p) const {
  double fx = std::floor((p.x - x0_) / h_);
  fx = std::clamp(fx, 0.0, static_cast<double>(ncx_ - 1));
  const double y = domain_.wrap_y(p.y);
  auto cy = static_cast<std::size_t>(std::floor(y / cy_));
  if (cy >= ncy_) cy = ncy_ - 1;
  return {static_cast<std::size_t>(fx), cy};
}

std::vector<std::uint32_t> CellGrid::neighbors(Vec2 p) const {
  std::vector<std::uint32_t> out;
  for_each_neighbor(p, [&](std::uint32_t i) { out.push_back(i); });
  return out;
}

CellGrid build_cell_list(std::span<const Vec2> positions, double h, const DomainSpec& domain) {
  return CellGrid(positions, h, domain);
}

}  // namespace partrans
