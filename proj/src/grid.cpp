#include "glc/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace glc {

Grid Grid::make(const DomainSpec& domain, int nx, int nt) {
  domain.validate();
  if (domain.dimension != 1) throw std::invalid_argument("Grid::make(1D): domain is not 1D");
  if (nx < 2 || nt < 1) throw std::invalid_argument("Grid::make: nx >= 2 and nt >= 1 required");
  Grid g;
  g.domain = domain;
  g.nx = nx;
  g.nt = nt;
  g.dx = domain.extent(0) / (nx + 1);
  g.dt = domain.horizon / nt;
  return g;
}

Grid Grid::make(const DomainSpec& domain, int nx, int ny, int nt) {
  domain.validate();
  if (domain.dimension != 2) throw std::invalid_argument("Grid::make(2D): domain is not 2D");
  if (nx < 2 || ny < 2 || nt < 1)
    throw std::invalid_argument("Grid::make: nx, ny >= 2 and nt >= 1 required");
  Grid g;
  g.domain = domain;
  g.nx = nx;
  g.ny = ny;
  g.nt = nt;
  g.dx = domain.extent(0) / (nx + 1);
  g.dy = domain.extent(1) / (ny + 1);
  g.dt = domain.horizon / nt;
  return g;
}

void Grid::node_coords(int idx, double* x) const {
  if (dim() == 1) {
    x[0] = domain.lo[0] + dx * (idx + 1);
  } else {
    int i = idx % nx;
    int j = idx / nx;
    x[0] = domain.lo[0] + dx * (i + 1);
    x[1] = domain.lo[1] + dy * (j + 1);
  }
}

bool Grid::node_in(int idx, const Box& box) const {
  double x[2];
  node_coords(idx, x);
  return box.contains_open(std::span<const double>(x, static_cast<size_t>(dim())));
}

PotentialField PotentialField::constant(const Grid& grid, Complex c) {
  PotentialField q(grid);
  for (auto& v : q.vals_) v = c;
  q.dirty_ = true;
  return q;
}

bool PotentialField::is_zero() const {
  for (const auto& v : vals_)
    if (v != Complex(0.0, 0.0)) return false;
  return true;
}

double PotentialField::norm_r() const {
  if (!dirty_) return norm_cache_;
  const int n = grid_.num_nodes();
  const double vol = grid_.cell_volume();
  double best = 0.0;
  for (int lev = 0; lev <= grid_.nt; ++lev) {
    double acc = 0.0;
    if (grid_.dim() == 1) {
      for (int i = 0; i < n; ++i) acc += std::abs(at(lev, i)) * vol;
    } else {
      for (int i = 0; i < n; ++i) acc += std::norm(at(lev, i)) * vol;
      acc = std::sqrt(acc);
    }
    best = std::max(best, acc);
  }
  norm_cache_ = best;
  dirty_ = false;
  return best;
}

double potential_norm_r(const PotentialField& q) { return q.norm_r(); }

}  // namespace glc
