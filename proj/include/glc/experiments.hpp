#pragma once

#include <cstdint>
#include <vector>

#include "glc/calculus.hpp"
#include "glc/control.hpp"
#include "glc/solver.hpp"
#include "glc/weights.hpp"

namespace glc {

/// Terminal-data ensemble: random low-to-mid frequency Dirichlet-mode
/// combinations with unit discrete L2(Omega) norm. single_mode replaces the
/// whole ensemble by the pure first mode (used by the oracle comparison).
struct EnsembleSpec {
  int size = 16;
  std::uint64_t seed = 1;
  bool single_mode = false;
  int max_mode_div = 4;  // modes 1 .. nx / max_mode_div
};

std::vector<std::vector<Complex>> make_zT_ensemble(const Grid& grid, const EnsembleSpec& spec);

struct CarlemanSweepConfig {
  std::vector<double> mu_list{3.0};
  std::vector<double> lambda_list{20.0, 40.0, 80.0};
  int ensemble_size = 16;
  std::uint64_t rng_seed = 1;
  double b = 0.0;
};

struct CarlemanRow {
  double mu = 0.0;
  double lambda = 0.0;
  int samples_used = 0;
  double c_emp = 0.0;  // max over ensemble of LHS / ((1+b^2) RHS)
};

/// Empirical constant of the Carleman estimate
///   l^3 m^4 int phi^3 th^2 |z|^2 + l m^2 int phi th^2 |grad z|^2
///     <= C (1+b^2) [ int th^2 |Gz|^2 + l^3 m^4 int_omega phi^3 th^2 |z|^2 ].
/// Dual trajectories are generated once per ensemble; the weighted integrals
/// run in log space. Samples whose right-hand side carries no quadrature mass
/// are skipped and counted; an all-skipped ensemble is an error.
std::vector<CarlemanRow> carleman_sweep(const Grid& grid, const SpatialOp& a,
                                        const PotentialField* q, const CarlemanSweepConfig& cfg,
                                        const SchemeConfig& scheme);

struct ObservabilityReport {
  double r = 0.0;                // potential norm of the ensemble's q
  std::vector<double> ratios;    // |z(0)|_{L2(Omega)} / |z|_{L2((0,T) x omega)}
  double c_obs = 0.0;            // max ratio
};

ObservabilityReport observability_estimate(const Grid& grid, double b, const PotentialField& q,
                                           const EnsembleSpec& ensemble,
                                           const SchemeConfig& scheme);

struct PotentialFitReport {
  std::vector<ObservabilityReport> per_r;
  double slope = 0.0;      // least squares of ln C_obs against r^2
  double intercept = 0.0;
};

/// C_obs(r) for q = -r * (profile normalized to unit potential norm); the
/// negative sign makes the backward dual amplify so the constant actually
/// grows with r. The same ensemble seed is reused for every r.
PotentialFitReport constant_vs_potential(const Grid& grid, double b,
                                         const std::vector<double>& r_list,
                                         const EnsembleSpec& ensemble,
                                         const SchemeConfig& scheme);

/// Uniform potential scaled to a prescribed discrete potential norm.
PotentialField uniform_potential(const Grid& grid, double r, bool negative = true);

struct ReducedIneqReport {
  std::vector<double> ratios;
  double c_emp = 0.0;
  int skipped = 0;
};

/// Per-sample ratio  int_Q phi^3 th^2 |z|^2 / int_{(0,T) x omega} phi^3 th^2 |z|^2;
/// requires lambda >= c (1+b^2)(1 + r^2).
ReducedIneqReport reduced_inequality_check(const Grid& grid, double lambda, double mu, double b,
                                           const PotentialField& q, const EnsembleSpec& ensemble,
                                           const SchemeConfig& scheme, double c_floor = 1.0);

/// |z(0)|_{L2} / max_t |z(t)|_{L2}; 0 for the zero trajectory.
double energy_ratio(const Trajectory& z);

/// Single-mode observability oracle: the dual mode ODE is solved in closed
/// form while the spatial sums reuse the grid's node quadrature, so the
/// comparison isolates the PDE time stepping.
double oracle_observability_ratio(const Grid& grid, double b, double q_const, int mode);

/// RK4 for the scalar mode equation dzeta/dt = rate * zeta, from t0 to t1.
Complex ode_mode_oracle(Complex rate, Complex zeta0, double t0, double t1, int steps);

}  // namespace glc
