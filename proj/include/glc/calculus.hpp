#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>

#include "glc/grid.hpp"
#include "glc/linalg.hpp"
#include "glc/weights.hpp"

namespace glc {

/// Coefficient evaluator for the principal part: fills the dim x dim
/// row-major matrix a(t, x). Must return a symmetric matrix.
using CoeffFn = std::function<void(double t, const double* x, double* a)>;

CoeffFn coeff_identity(int dim, double scale = 1.0);
CoeffFn coeff_constant(int dim, std::vector<double> matrix_row_major);

/// The assembled divergence-form operator L = sum_k d_k (a^{jk} d_j .) on
/// interior nodes with homogeneous Dirichlet boundary. Diagonal coefficient
/// blocks use flux form with midpoint coefficient sampling (symmetric by
/// construction); 2D cross terms use centered differences with the
/// coefficient averaged over the four neighboring cells, after which the
/// matrix is symmetrized and the correction asserted to be at rounding level.
class SpatialOp {
 public:
  SpatialOp(const Grid& grid, CoeffFn a, bool time_dependent);

  const Grid& grid() const { return grid_; }
  bool time_dependent() const { return time_dependent_; }
  const CoeffFn& coeff() const { return a_; }

  /// Matrix at time t; cached when the coefficients are time-independent.
  const Csr& matrix(double t) const;

 private:
  Csr assemble(double t) const;

  Grid grid_;
  CoeffFn a_;
  bool time_dependent_;
  mutable std::optional<Csr> cache_;
  mutable double cache_t_ = 0.0;
};

/// Discrete G on the interval (level, level+1):
///   (1+ib)(z^{n+1} - z^n)/dt + L((z^n + z^{n+1})/2) at t_{n+1/2}.
std::vector<Complex> apply_G(const Trajectory& z, int level, double b, const SpatialOp& a);

enum class NormKind { L2_Omega_at_t, L2_Q, L2_omega_Q };

double norm_l2_omega_level(const Trajectory& z, int level);
double norms(const Trajectory& z, NormKind kind, int level = 0);

/// Trapezoidal space-time integral of f(level, x) over Q = (0,T) x Omega,
/// including boundary nodes with half weights (the integrand is evaluated
/// there, so non-Dirichlet integrands are handled correctly).
double integrate_q(const Grid& grid,
                   const std::function<double(int level, std::span<const double> x)>& f);

/// log of  integral over Q of phi^phi_power theta^2 f dt dx  for f >= 0,
/// accumulated in log space so that huge negative Carleman exponents cannot
/// underflow the ratio computations. Returns -inf when f vanishes
/// identically. The t = 0 and t = T levels are excluded (theta -> 0 there);
/// integration is over interior nodes (Dirichlet integrands vanish on the
/// boundary).
double log_integrate_weighted(const Grid& grid, const WeightSpec& w, int phi_power,
                              const std::function<double(int level, int node)>& f,
                              const Box* restrict_box = nullptr);

/// log(exp(a) + exp(b)) without overflow.
double log_add(double a, double b);

/// Squared centered-difference gradient of z at (level, node); one-sided
/// never needed since boundary values are zero.
double grad_sq(const Trajectory& z, int level, int node);

}  // namespace glc
