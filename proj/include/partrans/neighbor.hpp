#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "partrans/grid.hpp"

namespace partrans {

/// Cell linked-list over the band [-h, Lx + h] x [0, Ly) with cells of width h in x and
/// Ly / floor(Ly / h) >= h in y (periodic). Stored in compressed form: the indices of cell c
/// are index[start[c] .. start[c + 1]), ascending.
class CellGrid {
 public:
  CellGrid(std::span<const Vec2> positions, double h, const DomainSpec& domain);

  double cell_size() const { return h_; }
  double cell_height() const { return cy_; }
  double origin_x() const { return x0_; }
  std::size_t ncx() const { return ncx_; }
  std::size_t ncy() const { return ncy_; }
  std::size_t particle_count() const { return index_.size(); }
  const DomainSpec& domain() const { return domain_; }

  /// Bucket coordinates of a point; x is clamped to the band, y wrapped.
  std::array<std::size_t, 2> cell_of(Vec2 p) const;

  std::span<const std::uint32_t> bucket(std::size_t cx, std::size_t cy) const {
    const std::size_t c = cx * ncy_ + cy;
    return {index_.data() + start_[c], index_.data() + start_[c + 1]};
  }

  /// Calls fn(index) for every particle in the 3x3 block of cells around p. Each cell is
  /// visited once even when the periodic direction has fewer than three cells.
  template <class F>
  void for_each_neighbor(Vec2 p, F&& fn) const {
    const auto [cx, cy] = cell_of(p);
    const std::size_t x_lo = cx > 0 ? cx - 1 : 0;
    const std::size_t x_hi = cx + 1 < ncx_ ? cx + 1 : ncx_ - 1;
    std::array<std::size_t, 3> rows{};
    std::size_t nrows = 0;
    for (std::size_t d = 0; d < 3 && d < ncy_; ++d) rows[nrows++] = (cy + ncy_ - 1 + d) % ncy_;
    for (std::size_t ix = x_lo; ix <= x_hi; ++ix)
      for (std::size_t r = 0; r < nrows; ++r)
        for (std::uint32_t idx : bucket(ix, rows[r])) fn(idx);
  }

  std::vector<std::uint32_t> neighbors(Vec2 p) const;

 private:
  double h_;
  double cy_;
  double x0_;
  std::size_t ncx_;
  std::size_t ncy_;
  DomainSpec domain_;
  std::vector<std::uint32_t> start_;
  std::vector<std::uint32_t> index_;
};

/// Builds the list in one counting pass. Throws std::out_of_range naming the offending
/// particle if a position lies outside the band.
CellGrid build_cell_list(std::span<const Vec2> positions, double h, const DomainSpec& domain);

}  // namespace partrans
