#pragma once

#include <array>
#include <span>
#include <vector>

namespace glc {

/// Axis-aligned open box in 1 or 2 dimensions.
struct Box {
  std::vector<double> lo, hi;

  int dim() const { return static_cast<int>(lo.size()); }

  bool contains_open(std::span<const double> x) const {
    for (size_t i = 0; i < lo.size(); ++i)
      if (!(x[i] > lo[i] && x[i] < hi[i])) return false;
    return true;
  }

  bool contains_closed(std::span<const double> x) const {
    for (size_t i = 0; i < lo.size(); ++i)
      if (!(x[i] >= lo[i] && x[i] <= hi[i])) return false;
    return true;
  }
};

/// Geometry of one experiment: the domain Omega, the time horizon T, the
/// control region omega and the inner region omega0 whose closure must sit
/// strictly inside omega.
struct DomainSpec {
  int dimension = 1;
  std::vector<double> lo{0.0}, hi{1.0};  // Omega bounds per axis
  double horizon = 1.0;                  // T
  Box omega;                             // control region
  Box omega0;                            // inner region for the weight base

  void validate() const;

  double extent(int axis) const { return hi[static_cast<size_t>(axis)] - lo[static_cast<size_t>(axis)]; }

  Box full_box() const { return Box{lo, hi}; }

  bool inside_closure(std::span<const double> x) const {
    for (int i = 0; i < dimension; ++i) {
      size_t s = static_cast<size_t>(i);
      if (!(x[s] >= lo[s] && x[s] <= hi[s])) return false;
    }
    return true;
  }
};

/// Convenience builders for the standard 1D/2D setups used in tests and CLI.
DomainSpec make_domain_1d(double x0, double x1, double horizon,
                          double omega_lo, double omega_hi,
                          double omega0_lo, double omega0_hi);
DomainSpec make_domain_2d(std::array<double, 2> lo, std::array<double, 2> hi, double horizon,
                          const Box& omega, const Box& omega0);

}  // namespace glc
