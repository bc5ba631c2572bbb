#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "glc/experiments.hpp"
#include "glc/rng.hpp"
#include "glc/solver.hpp"

using glc::Complex;
using glc::ForwardProblem;
using glc::Grid;
using glc::SchemeConfig;
using glc::Trajectory;

namespace {

constexpr double kPi = 3.14159265358979323846;

glc::DomainSpec dom1d(double T) { return glc::make_domain_1d(0.0, 1.0, T, 0.3, 0.7, 0.4, 0.6); }

std::vector<Complex> sin_mode(const Grid& g, int k) {
  std::vector<Complex> v(static_cast<size_t>(g.num_nodes()));
  double x;
  for (int i = 0; i < g.num_nodes(); ++i) {
    g.node_coords(i, &x);
    v[static_cast<size_t>(i)] = std::sin(k * kPi * x);
  }
  return v;
}

}  // namespace

TEST_CASE("zero data stays zero (forward and dual)") {
  Grid g = Grid::make(dom1d(0.5), 40, 40);
  glc::SpatialOp a(g, glc::coeff_identity(1), false);
  SchemeConfig cfg;
  ForwardProblem prob;
  prob.grid = &g;
  prob.a = &a;
  glc::Nonlinearity f = glc::nonlin_s_logpow(0.25);
  prob.f = &f;
  std::vector<Complex> y0(static_cast<size_t>(g.num_nodes()), Complex(0.0, 0.0));
  Trajectory y = solve_forward(y0, prob, cfg);
  CHECK(glc::norms(y, glc::NormKind::L2_Q) == 0.0);
  Trajectory z = solve_dual_backward(y0, g, 1.0, a, nullptr, cfg);
  CHECK(glc::norms(z, glc::NormKind::L2_Q) == 0.0);
}

TEST_CASE("heat decay: |y(t)| = e^{-pi^2 t} |y0| for b = 0") {
  Grid g = Grid::make(dom1d(0.5), 200, 400);
  glc::SpatialOp a(g, glc::coeff_identity(1), false);
  SchemeConfig cfg;
  ForwardProblem prob;
  prob.grid = &g;
  prob.a = &a;
  Trajectory y = solve_forward(sin_mode(g, 1), prob, cfg);
  double n0 = glc::norm_l2_omega_level(y, 0);
  for (int lev : {100, 200, 400}) {
    double want = std::exp(-kPi * kPi * g.time(lev)) * n0;
    double got = glc::norm_l2_omega_level(y, lev);
    CHECK(std::abs(got - want) <= 1e-3 * want);
  }
}

TEST_CASE("complex principal part scales the decay rate by 1/(1+b^2)") {
  const double b = 1.0;
  Grid g = Grid::make(dom1d(0.5), 200, 400);
  glc::SpatialOp a(g, glc::coeff_identity(1), false);
  SchemeConfig cfg;
  ForwardProblem prob;
  prob.grid = &g;
  prob.b = b;
  prob.a = &a;
  Trajectory y = solve_forward(sin_mode(g, 1), prob, cfg);
  double n0 = glc::norm_l2_omega_level(y, 0);
  double want = std::exp(-kPi * kPi * 0.5 / (1.0 + b * b)) * n0;
  double got = glc::norm_l2_omega_level(y, g.nt);
  CHECK(std::abs(got - want) <= 1e-3 * want);
}

TEST_CASE("backward dual decays toward t = 0") {
  Grid g = Grid::make(dom1d(0.5), 200, 400);
  glc::SpatialOp a(g, glc::coeff_identity(1), false);
  SchemeConfig cfg;
  Trajectory z = solve_dual_backward(sin_mode(g, 1), g, 0.0, a, nullptr, cfg);
  double nT = glc::norm_l2_omega_level(z, g.nt);
  double n0 = glc::norm_l2_omega_level(z, 0);
  CHECK(std::abs(n0 - std::exp(-kPi * kPi * 0.5) * nT) <= 1e-3 * nT);
}

TEST_CASE("constant potential matches the single-mode ODE oracle") {
  const double b = 0.7, qc = 1.3, T = 0.4;
  Grid g = Grid::make(dom1d(T), 200, 400);
  glc::SpatialOp a(g, glc::coeff_identity(1), false);
  glc::PotentialField q = glc::PotentialField::constant(g, Complex(qc, 0.0));
  SchemeConfig cfg;
  Trajectory z = solve_dual_backward(sin_mode(g, 1), g, b, a, &q, cfg);
  // continuous mode: (1+ib) zeta' - kappa^2 zeta = q zeta backward from T
  double kap2 = kPi * kPi;
  Complex rate = Complex(qc + kap2, 0.0) / Complex(1.0, b);
  Complex zeta0 = glc::ode_mode_oracle(rate, Complex(1.0, 0.0), T, 0.0, 4000);
  double want = std::abs(zeta0) * glc::norm_l2_omega_level(z, g.nt);
  CHECK(glc::norm_l2_omega_level(z, 0) == doctest::Approx(want).epsilon(1e-3));
}

TEST_CASE("unconditional stability: L2 norm non-increasing for theta in [1/2, 1]") {
  for (double theta : {0.5, 0.75, 1.0}) {
    for (auto [nx, nt] : {std::pair{40, 8}, std::pair{160, 8}}) {
      Grid g = Grid::make(dom1d(0.5), nx, nt);  // large dt on purpose
      glc::SpatialOp a(g, glc::coeff_identity(1), false);
      SchemeConfig cfg;
      cfg.theta_scheme = theta;
      ForwardProblem prob;
      prob.grid = &g;
      prob.b = 0.8;
      prob.a = &a;
      glc::Rng rng(17);
      std::vector<Complex> y0(static_cast<size_t>(g.num_nodes()));
      for (auto& c : y0) c = rng.normal_complex();
      Trajectory y = solve_forward(y0, prob, cfg);
      double prev = glc::norm_l2_omega_level(y, 0);
      for (int lev = 1; lev <= g.nt; ++lev) {
        double cur = glc::norm_l2_omega_level(y, lev);
        CHECK(cur <= prev * (1.0 + 1e-12));
        prev = cur;
      }
    }
  }
}

TEST_CASE("conjugation symmetry: (b, zT) vs (-b, conj zT)") {
  Grid g = Grid::make(dom1d(0.3), 64, 64);
  glc::SpatialOp a(g, glc::coeff_identity(1), false);
  SchemeConfig cfg;
  glc::Rng rng(23);
  std::vector<Complex> zT(static_cast<size_t>(g.num_nodes()));
  for (auto& c : zT) c = rng.normal_complex();
  std::vector<Complex> zTc(zT.size());
  for (size_t i = 0; i < zT.size(); ++i) zTc[i] = std::conj(zT[i]);
  Trajectory z1 = solve_dual_backward(zT, g, 2.0, a, nullptr, cfg);
  Trajectory z2 = solve_dual_backward(zTc, g, -2.0, a, nullptr, cfg);
  double worst = 0.0;
  for (int lev = 0; lev <= g.nt; ++lev)
    for (int i = 0; i < g.num_nodes(); ++i)
      worst = std::max(worst, std::abs(z1.at(lev, i) - std::conj(z2.at(lev, i))));
  CHECK(worst <= 1e-12);
}

TEST_CASE("solve_forward is additive in (y0, u)") {
  Grid g = Grid::make(dom1d(0.3), 48, 48);
  glc::SpatialOp a(g, glc::coeff_identity(1), false);
  SchemeConfig cfg;
  glc::Rng rng(29);
  std::vector<Complex> y0a(static_cast<size_t>(g.num_nodes())), y0b = y0a;
  for (auto& c : y0a) c = rng.normal_complex();
  for (auto& c : y0b) c = rng.normal_complex();
  Trajectory ua(g), ub(g);
  for (int lev = 0; lev < g.nt; ++lev)
    for (int i = 0; i < g.num_nodes(); ++i) {
      ua.at(lev, i) = rng.normal_complex();
      ub.at(lev, i) = rng.normal_complex();
    }
  auto run = [&](std::span<const Complex> y0, const Trajectory& u) {
    ForwardProblem prob;
    prob.grid = &g;
    prob.b = 1.2;
    prob.a = &a;
    prob.control = &u;
    return solve_forward(y0, prob, cfg);
  };
  Trajectory ya = run(y0a, ua);
  Trajectory yb = run(y0b, ub);
  std::vector<Complex> y0s(y0a.size());
  for (size_t i = 0; i < y0s.size(); ++i) y0s[i] = y0a[i] + y0b[i];
  Trajectory us(g);
  for (int lev = 0; lev < g.nt; ++lev)
    for (int i = 0; i < g.num_nodes(); ++i) us.at(lev, i) = ua.at(lev, i) + ub.at(lev, i);
  Trajectory ys = run(y0s, us);
  double worst = 0.0;
  for (int lev = 0; lev <= g.nt; ++lev)
    for (int i = 0; i < g.num_nodes(); ++i)
      worst = std::max(worst,
                       std::abs(ys.at(lev, i) - ya.at(lev, i) - yb.at(lev, i)));
  CHECK(worst <= 1e-9);
}

TEST_CASE("MMS: trapezoidal orders are 2 in space and time") {
  glc::DomainSpec d = dom1d(0.5);
  const double b = 0.7;
  auto sol = [](double t, const double* x) {
    return Complex(1.0, 0.5) * std::exp(-t) * std::sin(kPi * x[0]);
  };
  auto src = [b, sol](double t, const double* x) {
    return (Complex(-1.0, -b) + kPi * kPi) * sol(t, x);
  };
  glc::MmsCase mms{sol, src, b, glc::coeff_identity(1), false};
  SchemeConfig cfg;
  glc::MmsResult r = glc::mms_order(d, mms, 24, 16, cfg);
  CHECK(r.monotone);
  CHECK(r.order_space == doctest::Approx(2.0).epsilon(0.15));
  CHECK(r.order_time == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("MMS: implicit Euler drops the time order to 1") {
  glc::DomainSpec d = dom1d(0.5);
  auto sol = [](double t, const double* x) {
    return Complex(1.0, 0.5) * std::exp(-t) * std::sin(kPi * x[0]);
  };
  auto src = [sol](double t, const double* x) {
    return (Complex(-1.0, 0.0) + kPi * kPi) * sol(t, x);
  };
  glc::MmsCase mms{sol, src, 0.0, glc::coeff_identity(1), false};
  SchemeConfig cfg;
  cfg.theta_scheme = 1.0;
  glc::MmsResult r = glc::mms_order(d, mms, 24, 16, cfg);
  CHECK(r.order_time == doctest::Approx(1.0).epsilon(0.3));
}

TEST_CASE("MMS: zero manufactured solution is solved to solver tolerance") {
  glc::DomainSpec d = dom1d(0.5);
  auto sol = [](double, const double*) { return Complex(0.0, 0.0); };
  auto src = [](double, const double*) { return Complex(0.0, 0.0); };
  glc::MmsCase mms{sol, src, 0.3, glc::coeff_identity(1), false};
  SchemeConfig cfg;
  glc::MmsResult r = glc::mms_order(d, mms, 12, 8, cfg);
  for (double e : r.err_space) CHECK(e <= cfg.linear_tol);
  for (double e : r.err_time) CHECK(e <= cfg.linear_tol);
}

TEST_CASE("semilinear forward: linear f matches potential-based solve") {
  Grid g = Grid::make(dom1d(0.3), 60, 60);
  glc::SpatialOp a(g, glc::coeff_identity(1), false);
  SchemeConfig cfg;
  glc::Nonlinearity f = glc::nonlin_linear(0.5);
  ForwardProblem with_f;
  with_f.grid = &g;
  with_f.b = 0.5;
  with_f.a = &a;
  with_f.f = &f;
  glc::PotentialField q = glc::PotentialField::constant(g, Complex(0.5, 0.0));
  ForwardProblem with_q;
  with_q.grid = &g;
  with_q.b = 0.5;
  with_q.a = &a;
  with_q.q = &q;
  auto y0 = sin_mode(g, 1);
  Trajectory yf = solve_forward(y0, with_f, cfg);
  Trajectory yq = solve_forward(y0, with_q, cfg);
  double worst = 0.0;
  for (int lev = 0; lev <= g.nt; ++lev)
    for (int i = 0; i < g.num_nodes(); ++i)
      worst = std::max(worst, std::abs(yf.at(lev, i) - yq.at(lev, i)));
  CHECK(worst <= 1e-8);
}

TEST_CASE("2D solver: mode decay with anisotropic diagonal coefficients") {
  glc::Box omega{{0.3, 0.3}, {0.7, 0.7}};
  glc::Box omega0{{0.4, 0.4}, {0.6, 0.6}};
  glc::DomainSpec d = glc::make_domain_2d({0.0, 0.0}, {1.0, 1.0}, 0.1, omega, omega0);
  Grid g = Grid::make(d, 48, 48, 60);
  glc::SpatialOp a(g, glc::coeff_constant(2, {1.0, 0.0, 0.0, 2.0}), false);
  SchemeConfig cfg;
  ForwardProblem prob;
  prob.grid = &g;
  prob.b = 0.5;
  prob.a = &a;
  std::vector<Complex> y0(static_cast<size_t>(g.num_nodes()));
  double x[2];
  for (int i = 0; i < g.num_nodes(); ++i) {
    g.node_coords(i, x);
    y0[static_cast<size_t>(i)] = std::sin(kPi * x[0]) * std::sin(kPi * x[1]);
  }
  Trajectory y = solve_forward(y0, prob, cfg);
  // eigenvalue of -(d_xx + 2 d_yy) on the (1,1) mode: pi^2 (1 + 2) = 3 pi^2
  double want = std::exp(-3.0 * kPi * kPi * 0.1 / (1.0 + 0.25)) *
                glc::norm_l2_omega_level(y, 0);
  CHECK(glc::norm_l2_omega_level(y, g.nt) == doctest::Approx(want).epsilon(5e-3));
}
