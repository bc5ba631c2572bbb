#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>

#include "glc/calculus.hpp"
#include "glc/grid.hpp"

namespace glc {

/// Theta-scheme configuration: theta = 1/2 is trapezoidal (default), 1 is
/// implicit Euler. linear_tol is the iterative-solver stopping tolerance.
struct SchemeConfig {
  double theta_scheme = 0.5;
  double linear_tol = 1e-10;
  int max_linear_iters = 2000;

  void validate() const;
};

/// Complex nonlinearity f with f(0) = 0 and its real-form 2x2 Jacobian
/// [d Re f / d Re s, d Re f / d Im s; d Im f / d Re s, d Im f / d Im s].
struct Nonlinearity {
  std::function<Complex(Complex)> f;
  std::function<std::array<double, 4>(Complex)> df;
  bool growth_ok = false;
};

Nonlinearity nonlin_zero();
Nonlinearity nonlin_linear(double c);
/// f(s) = s * ln^p(1 + |s|).
Nonlinearity nonlin_s_logpow(double p);
/// Wraps an evaluator with a central-difference Jacobian.
Nonlinearity make_nonlinearity(std::function<Complex(Complex)> f);

using SourceFn = std::function<Complex(double t, const double* x)>;

/// One implicit theta-step of the linear system
///   (1+ib) y_t - L y - q y = s,
///   B_n y^{n+1} = C_n y^n + s_n,
/// with B_n = (1+ib)/dt I - theta (L + Q^{n+1}) and
///      C_n = (1+ib)/dt I + (1-theta)(L + Q^n).
/// Also provides the conjugate-transpose solves/applies the control module
/// builds its exact discrete adjoint from.
class LinearStepper {
 public:
  LinearStepper(const Grid& grid, double b, const SpatialOp* a, const PotentialField* q,
                const SchemeConfig& cfg);

  const Grid& grid() const { return *grid_; }
  const SchemeConfig& config() const { return cfg_; }

  /// out = B_n^{-1} (C_n y + add); add may be empty.
  void step_forward(int n, std::span<const Complex> y, std::span<const Complex> add,
                    std::span<Complex> out) const;

  /// w = B_n^{-H} zin and zout = C_n^H w (one step of the adjoint recursion).
  void step_adjoint(int n, std::span<const Complex> zin, std::span<Complex> w,
                    std::span<Complex> zout) const;

  /// Solves B_n x = rhs in place.
  void solve_B(int n, std::span<Complex> rhs) const;
  /// Solves B_n^H x = rhs in place.
  void solve_BH(int n, std::span<Complex> rhs) const;
  void apply_C(int n, std::span<const Complex> y, std::span<Complex> out) const;
  void apply_CH(int n, std::span<const Complex> y, std::span<Complex> out) const;

 private:
  void solve_shifted(double t_matrix, Complex shift, Complex scale,
                     std::span<const Complex> diag_extra, std::span<Complex> rhs) const;
  std::vector<Complex> pot_diag(int level, double theta_coeff, bool conj) const;

  const Grid* grid_;
  double b_;
  const SpatialOp* a_;
  const PotentialField* q_;
  SchemeConfig cfg_;
};

/// Forward problem data; exactly one of q / f drives the zero-order term
/// (both may be null, both may be set for the linearized runs).
/// The control enters as chi_omega * u with the interval convention: level n
/// of `control` applies on [t_n, t_{n+1}). `source` is evaluated at the
/// theta-weighted times and added on the full domain (used by MMS).
struct ForwardProblem {
  const Grid* grid = nullptr;
  double b = 0.0;
  const SpatialOp* a = nullptr;
  const PotentialField* q = nullptr;
  const Nonlinearity* f = nullptr;
  const Trajectory* control = nullptr;
  SourceFn source;
};

Trajectory solve_forward(std::span<const Complex> y0, const ForwardProblem& prob,
                         const SchemeConfig& cfg);

/// Backward dual system G z = q z, z(T) = zT, integrated from T down to 0 via
/// the substitution tau = T - t through the same forward stepper.
Trajectory solve_dual_backward(std::span<const Complex> zT, const Grid& grid, double b,
                               const SpatialOp& a, const PotentialField* q,
                               const SchemeConfig& cfg);

/// Manufactured-solution case: analytic solution and matching source
///   g = (1+ib) y*_t - sum (a^{jk} y*_j)_k.
struct MmsCase {
  std::function<Complex(double t, const double* x)> solution;
  SourceFn source;
  double b = 0.0;
  CoeffFn a;
  bool a_time_dependent = false;
};

struct MmsResult {
  double order_time = 0.0;
  double order_space = 0.0;
  std::array<double, 3> err_space{}, err_time{};
  bool monotone = true;
};

/// Observed convergence orders from three-level Richardson slopes, refining
/// space at fixed fine dt and time at fixed fine dx.
MmsResult mms_order(const DomainSpec& domain, const MmsCase& mms, int nx0, int nt0,
                    const SchemeConfig& cfg);

/// L2(Q) error of a trajectory against an analytic field.
double l2q_error(const Trajectory& z,
                 const std::function<Complex(double t, const double* x)>& exact);

}  // namespace glc
