#pragma once

#include <complex>
#include <span>
#include <vector>

#include "glc/domain.hpp"

namespace glc {

using Complex = std::complex<double>;

/// Uniform space-time grid. Spatial nodes are interior only (homogeneous
/// Dirichlet boundary), with spacing extent/(count+1); time levels run
/// 0..nt with spacing T/nt.
struct Grid {
  DomainSpec domain;
  int nx = 0;
  int ny = 0;  // 0 in 1D
  int nt = 0;
  double dx = 0.0, dy = 0.0, dt = 0.0;

  static Grid make(const DomainSpec& domain, int nx, int nt);          // 1D
  static Grid make(const DomainSpec& domain, int nx, int ny, int nt);  // 2D

  int dim() const { return domain.dimension; }
  int num_nodes() const { return dim() == 1 ? nx : nx * ny; }
  double cell_volume() const { return dim() == 1 ? dx : dx * dy; }
  double time(int level) const { return dt * level; }

  /// Coordinates of interior node `idx` (row-major over (i,j) in 2D).
  void node_coords(int idx, double* x) const;
  bool node_in(int idx, const Box& box) const;
};

/// Complex scalar field on the space-time grid; boundary values are
/// identically zero by construction and never stored.
class Trajectory {
 public:
  explicit Trajectory(const Grid& grid)
      : grid_(grid), vals_(static_cast<size_t>((grid.nt + 1)) * static_cast<size_t>(grid.num_nodes())) {}

  const Grid& grid() const { return grid_; }

  Complex& at(int level, int node) { return vals_[index(level, node)]; }
  Complex at(int level, int node) const { return vals_[index(level, node)]; }

  std::span<Complex> level(int n) {
    return {vals_.data() + index(n, 0), static_cast<size_t>(grid_.num_nodes())};
  }
  std::span<const Complex> level(int n) const {
    return {vals_.data() + index(n, 0), static_cast<size_t>(grid_.num_nodes())};
  }

  std::span<const Complex> raw() const { return vals_; }
  std::span<Complex> raw() { return vals_; }

 private:
  size_t index(int level, int node) const {
    return static_cast<size_t>(level) * static_cast<size_t>(grid_.num_nodes()) +
           static_cast<size_t>(node);
  }
  Grid grid_;
  std::vector<Complex> vals_;
};

/// Space-time potential q with the cached norm r = |q|_{L^inf(0,T; L^n(Omega))},
/// n = spatial dimension (L^1 in 1D, L^2 in 2D). The cache is invalidated on
/// mutation and recomputed on demand.
class PotentialField {
 public:
  explicit PotentialField(const Grid& grid)
      : grid_(grid), vals_(static_cast<size_t>((grid.nt + 1)) * static_cast<size_t>(grid.num_nodes())) {}

  static PotentialField constant(const Grid& grid, Complex c);

  const Grid& grid() const { return grid_; }
  Complex at(int level, int node) const { return vals_[index(level, node)]; }
  void set(int level, int node, Complex val) {
    vals_[index(level, node)] = val;
    dirty_ = true;
  }
  bool is_zero() const;

  /// Discrete |q|_{L^inf(0,T;L^n)}: max over time levels of the spatial
  /// L^1 (1D) or L^2 (2D) norm over interior nodes.
  double norm_r() const;

 private:
  size_t index(int level, int node) const {
    return static_cast<size_t>(level) * static_cast<size_t>(grid_.num_nodes()) +
           static_cast<size_t>(node);
  }
  Grid grid_;
  std::vector<Complex> vals_;
  mutable bool dirty_ = true;
  mutable double norm_cache_ = 0.0;
};

double potential_norm_r(const PotentialField& q);

}  // namespace glc
