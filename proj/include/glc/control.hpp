#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "glc/solver.hpp"

namespace glc {

struct HUMConfig {
  double epsilon = 1e-8;  // penalization of |zT|^2
  double cg_tol = 1e-10;  // relative CG residual
  int cg_max_iters = 500;
  bool record_history = false;

  void validate() const;
};

struct ControlReport {
  double terminal_norm = 0.0;   // |y(T)|_{L2}, from the a posteriori forward solve
  double control_cost = 0.0;    // |u|_{L2((0,T) x omega)}
  int cg_iters = 0;
  double functional_value = 0.0;  // positive dual energy -J_eps(zT_hat) = (1/2)<G z, z>
};

/// Relative adjoint mismatch max |<S y, z> - <y, S* z>| / (|y| |z|) over
/// random pairs, for the one-step map S = B^{-1} C and its assembled
/// conjugate-transpose. steps == 1 checks one step, steps == nt the full
/// horizon composition.
double adjoint_check(const Grid& grid, double b, const SpatialOp& a, const PotentialField* q,
                     const SchemeConfig& cfg, int pairs, int steps, std::uint64_t seed);

struct HumResult {
  Trajectory u;             // interval convention; zero outside omega
  ControlReport report;
  std::vector<Complex> zT_hat;
  std::vector<double> cg_history;  // relative residual per iteration
  double cg_residual = 0.0;
  double free_terminal_norm = 0.0;  // |y(T)| with u = 0, the CG right-hand side scale
};

/// Penalized HUM: minimizes J_eps(zT) = (1/2)|B* zT|_U^2 + (eps/2)|zT|^2
/// + Re<y_free(T), zT> by conjugate gradient on the Gramian B B* + eps I,
/// where B* is the exact conjugate-transpose of the discrete control-to-state
/// map. The returned control is u = B* zT_hat restricted to omega; the report
/// carries the a posteriori forward-solve terminal norm.
HumResult hum_null_control(std::span<const Complex> y0, const Grid& grid, double b,
                           const SpatialOp& a, const PotentialField* q, const HUMConfig& hum,
                           const SchemeConfig& cfg);

/// J_eps and its gradient w.r.t. the real L2(Omega) pairing; used by the
/// derivative-check tests.
double hum_functional(std::span<const Complex> zT, std::span<const Complex> y0, const Grid& grid,
                      double b, const SpatialOp& a, const PotentialField* q, const HUMConfig& hum,
                      const SchemeConfig& cfg);
std::vector<Complex> hum_gradient(std::span<const Complex> zT, std::span<const Complex> y0,
                                  const Grid& grid, double b, const SpatialOp& a,
                                  const PotentialField* q, const HUMConfig& hum,
                                  const SchemeConfig& cfg);

struct SemilinearOptions {
  int max_iters = 30;
  double damping = 1.0;  // 0.5 engaged automatically after a diverging iterate
  double tol = 1e-3;     // on |y_{k+1} - y_k|_{L2(Q)} / |y0|_{L2(Omega)}
};

struct SemilinearIter {
  int iter = 0;
  double delta = 0.0;
  double terminal_norm = 0.0;
  int cg_iters = 0;
};

struct SemilinearResult {
  Trajectory u;
  ControlReport report;  // terminal_norm re-verified on the nonlinear system
  std::vector<SemilinearIter> log;
  bool converged = false;
};

/// Fixed-point loop: linearize f through q_k = f(y_k)/y_k (with the f'(0)
/// proxy below 1e-12), synthesize a linear null control against q_k, advance
/// y_{k+1} with that potential and control, repeat. Throws on blow-up;
/// non-convergence within max_iters is reported, not thrown.
SemilinearResult semilinear_null_control(std::span<const Complex> y0, const Grid& grid, double b,
                                         const SpatialOp& a, const Nonlinearity& f,
                                         const HUMConfig& hum, const SemilinearOptions& loop,
                                         const SchemeConfig& cfg);

struct GrowthReport {
  std::vector<double> magnitudes;
  std::vector<double> ratios;  // max over phases of |f(s)| / (|s| ln^{1/2}|s|)
  bool pass = false;           // strictly decreasing over the last 4 samples
  bool truncated = false;      // overflow at large samples
};

GrowthReport growth_check(const Nonlinearity& f, std::span<const double> magnitudes = {});

}  // namespace glc
