#include "glc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <thread>

#include "glc/parallel.hpp"
#include "glc/rng.hpp"

namespace glc {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;
}  // namespace

void parallel_for(int n, const std::function<void(int)>& fn) {
  int workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& t : pool) t.join();
}

int worker_count() {
  if (const char* env = std::getenv("GLC_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::vector<std::vector<Complex>> make_zT_ensemble(const Grid& grid, const EnsembleSpec& spec) {
  if (spec.size < 1) throw std::invalid_argument("make_zT_ensemble: ensemble_size >= 1 required");
  const int n = grid.num_nodes();
  const int kmax = std::max(1, grid.nx / spec.max_mode_div);
  const int lmax = grid.dim() == 2 ? std::max(1, grid.ny / spec.max_mode_div) : 1;
  const double lx = grid.domain.extent(0);
  const double ly = grid.dim() == 2 ? grid.domain.extent(1) : 1.0;

  std::vector<std::vector<Complex>> out(static_cast<size_t>(spec.size));
  for (int s = 0; s < spec.size; ++s) {
    Rng rng(Rng::mix(spec.seed, static_cast<std::uint64_t>(s)));
    std::vector<Complex> zT(static_cast<size_t>(n), Complex(0.0, 0.0));
    double x[2];
    if (spec.single_mode) {
      for (int i = 0; i < n; ++i) {
        grid.node_coords(i, x);
        double v = std::sin(kPi * (x[0] - grid.domain.lo[0]) / lx);
        if (grid.dim() == 2) v *= std::sin(kPi * (x[1] - grid.domain.lo[1]) / ly);
        zT[static_cast<size_t>(i)] = v;
      }
    } else {
      std::vector<Complex> coef;
      for (int k = 1; k <= kmax; ++k)
        for (int l = 1; l <= lmax; ++l) coef.push_back(rng.normal_complex());
      for (int i = 0; i < n; ++i) {
        grid.node_coords(i, x);
        Complex acc(0.0, 0.0);
        int c = 0;
        for (int k = 1; k <= kmax; ++k) {
          double sx = std::sin(k * kPi * (x[0] - grid.domain.lo[0]) / lx);
          for (int l = 1; l <= lmax; ++l, ++c) {
            double sy = grid.dim() == 2
                            ? std::sin(l * kPi * (x[1] - grid.domain.lo[1]) / ly)
                            : 1.0;
            acc += coef[static_cast<size_t>(c)] * (sx * sy);
          }
        }
        zT[static_cast<size_t>(i)] = acc;
      }
    }
    double nrm = 0.0;
    for (const auto& c : zT) nrm += std::norm(c);
    nrm = std::sqrt(nrm * grid.cell_volume());
    if (nrm <= 0.0) throw std::runtime_error("make_zT_ensemble: zero sample generated");
    for (auto& c : zT) c /= nrm;
    out[static_cast<size_t>(s)] = std::move(zT);
  }
  return out;
}

std::vector<CarlemanRow> carleman_sweep(const Grid& grid, const SpatialOp& a,
                                        const PotentialField* q, const CarlemanSweepConfig& cfg,
                                        const SchemeConfig& scheme) {
  for (double mu : cfg.mu_list)
    if (!(mu > 1.0)) throw std::invalid_argument("carleman_sweep: mu must be > 1");
  for (double l : cfg.lambda_list)
    if (!(l > 1.0)) throw std::invalid_argument("carleman_sweep: lambda must be > 1");

  EnsembleSpec es;
  es.size = cfg.ensemble_size;
  es.seed = cfg.rng_seed;
  auto ensemble = make_zT_ensemble(grid, es);

  // Dual trajectories do not depend on (mu, lambda): solve the ensemble once.
  std::vector<Trajectory> trajs(ensemble.size(), Trajectory(grid));
  parallel_for(static_cast<int>(ensemble.size()), [&](int s) {
    trajs[static_cast<size_t>(s)] =
        solve_dual_backward(ensemble[static_cast<size_t>(s)], grid, cfg.b, a, q, scheme);
  });

  PsiField psi = PsiField::build(grid.domain);
  const double one_b2 = 1.0 + cfg.b * cfg.b;
  std::vector<CarlemanRow> rows;
  for (double mu : cfg.mu_list) {
    for (double lambda : cfg.lambda_list) {
      WeightSpec w{lambda, mu, psi, grid.domain.horizon};
      w.validate();
      double cmax = kNegInf;
      int used = 0;
      std::vector<double> cs(ensemble.size(), kNegInf);
      parallel_for(static_cast<int>(ensemble.size()), [&](int s) {
        const Trajectory& z = trajs[static_cast<size_t>(s)];
        auto zsq = [&](int lev, int node) { return std::norm(z.at(lev, node)); };
        auto gsq = [&](int lev, int node) { return grad_sq(z, lev, node); };
        auto gzsq = [&](int lev, int node) {
          // Gz = qz along the dual dynamics; the discrete trajectory satisfies
          // this relation by construction.
          Complex qv = (q != nullptr) ? q->at(lev, node) : Complex(0.0, 0.0);
          return std::norm(qv * z.at(lev, node));
        };
        double l_z = log_integrate_weighted(grid, w, 3, zsq);
        double l_g = log_integrate_weighted(grid, w, 1, gsq);
        double l_gz = log_integrate_weighted(grid, w, 0, gzsq);
        double l_om = log_integrate_weighted(grid, w, 3, zsq, &grid.domain.omega);
        double lw = std::log(lambda) ;
        double lhs = log_add(3.0 * lw + 4.0 * std::log(mu) + l_z,
                             lw + 2.0 * std::log(mu) + l_g);
        double rhs = log_add(l_gz, 3.0 * lw + 4.0 * std::log(mu) + l_om);
        if (rhs == kNegInf) return;  // no quadrature mass: degenerate sample
        cs[static_cast<size_t>(s)] = lhs - rhs - std::log(one_b2);
      });
      for (double c : cs)
        if (c != kNegInf) {
          cmax = std::max(cmax, c);
          ++used;
        }
      if (used == 0) throw std::runtime_error("carleman_sweep: no valid samples");
      rows.push_back({mu, lambda, used, std::exp(cmax)});
    }
  }
  return rows;
}

ObservabilityReport observability_estimate(const Grid& grid, double b, const PotentialField& q,
                                           const EnsembleSpec& ensemble,
                                           const SchemeConfig& scheme) {
  auto zts = make_zT_ensemble(grid, ensemble);
  SpatialOp a(grid, coeff_identity(grid.dim()), false);

  ObservabilityReport rep;
  rep.r = q.norm_r();
  rep.ratios.assign(zts.size(), 0.0);
  parallel_for(static_cast<int>(zts.size()), [&](int s) {
    Trajectory z = solve_dual_backward(zts[static_cast<size_t>(s)], grid, b, a, &q, scheme);
    double num = norm_l2_omega_level(z, 0);
    double den = norms(z, NormKind::L2_omega_Q);
    if (!(den > 0.0))
      throw std::runtime_error("observability_estimate: dual trajectory vanishes on omega");
    rep.ratios[static_cast<size_t>(s)] = num / den;
  });
  rep.c_obs = *std::max_element(rep.ratios.begin(), rep.ratios.end());
  return rep;
}

PotentialField uniform_potential(const Grid& grid, double r, bool negative) {
  PotentialField q(grid);
  if (r == 0.0) return q;
  PotentialField unit = PotentialField::constant(grid, Complex(1.0, 0.0));
  double unit_norm = unit.norm_r();
  Complex val((negative ? -r : r) / unit_norm, 0.0);
  for (int lev = 0; lev <= grid.nt; ++lev)
    for (int i = 0; i < grid.num_nodes(); ++i) q.set(lev, i, val);
  return q;
}

PotentialFitReport constant_vs_potential(const Grid& grid, double b,
                                         const std::vector<double>& r_list,
                                         const EnsembleSpec& ensemble,
                                         const SchemeConfig& scheme) {
  if (r_list.size() < 3)
    throw std::invalid_argument("constant_vs_potential: need at least 3 distinct r values");
  PotentialFitReport rep;
  for (double r : r_list) {
    PotentialField q = uniform_potential(grid, r);
    rep.per_r.push_back(observability_estimate(grid, b, q, ensemble, scheme));
  }
  // least squares of ln C_obs on r^2
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(r_list.size());
  for (size_t i = 0; i < r_list.size(); ++i) {
    double xx = r_list[i] * r_list[i];
    double yy = std::log(rep.per_r[i].c_obs);
    sx += xx;
    sy += yy;
    sxx += xx * xx;
    sxy += xx * yy;
  }
  double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-30)
    throw std::invalid_argument("constant_vs_potential: degenerate fit (r values coincide)");
  rep.slope = (n * sxy - sx * sy) / denom;
  rep.intercept = (sy - rep.slope * sx) / n;
  return rep;
}

ReducedIneqReport reduced_inequality_check(const Grid& grid, double lambda, double mu, double b,
                                           const PotentialField& q, const EnsembleSpec& ensemble,
                                           const SchemeConfig& scheme, double c_floor) {
  const double r = q.norm_r();
  const double floor = c_floor * (1.0 + b * b) * (1.0 + r * r);
  if (lambda < floor)
    throw std::invalid_argument("reduced_inequality_check: lambda below c(1+b^2)(1+r^2)");

  auto zts = make_zT_ensemble(grid, ensemble);
  SpatialOp a(grid, coeff_identity(grid.dim()), false);
  PsiField psi = PsiField::build(grid.domain);
  WeightSpec w{lambda, mu, psi, grid.domain.horizon};
  w.validate();

  ReducedIneqReport rep;
  std::vector<double> ratios(zts.size(), kNegInf);
  parallel_for(static_cast<int>(zts.size()), [&](int s) {
    Trajectory z = solve_dual_backward(zts[static_cast<size_t>(s)], grid, b, a, &q, scheme);
    auto zsq = [&](int lev, int node) { return std::norm(z.at(lev, node)); };
    double l_full = log_integrate_weighted(grid, w, 3, zsq);
    double l_om = log_integrate_weighted(grid, w, 3, zsq, &grid.domain.omega);
    if (l_om == kNegInf) return;
    ratios[static_cast<size_t>(s)] = l_full - l_om;
  });
  for (double lr : ratios) {
    if (lr == kNegInf) {
      ++rep.skipped;
      continue;
    }
    rep.ratios.push_back(std::exp(lr));
  }
  if (rep.ratios.empty()) throw std::runtime_error("reduced_inequality_check: no valid samples");
  rep.c_emp = *std::max_element(rep.ratios.begin(), rep.ratios.end());
  return rep;
}

double energy_ratio(const Trajectory& z) {
  double worst = 0.0;
  for (int lev = 0; lev <= z.grid().nt; ++lev)
    worst = std::max(worst, norm_l2_omega_level(z, lev));
  if (worst == 0.0) return 0.0;
  return norm_l2_omega_level(z, 0) / worst;
}

Complex ode_mode_oracle(Complex rate, Complex zeta0, double t0, double t1, int steps) {
  Complex z = zeta0;
  double h = (t1 - t0) / steps;
  auto f = [rate](Complex y) { return rate * y; };
  for (int i = 0; i < steps; ++i) {
    Complex k1 = f(z);
    Complex k2 = f(z + 0.5 * h * k1);
    Complex k3 = f(z + 0.5 * h * k2);
    Complex k4 = f(z + h * k3);
    z += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return z;
}

double oracle_observability_ratio(const Grid& grid, double b, double q_const, int mode) {
  if (grid.dim() != 1)
    throw std::invalid_argument("oracle_observability_ratio: 1D oracle only");
  const double L = grid.domain.extent(0);
  const double T = grid.domain.horizon;
  const double kap2 = (mode * kPi / L) * (mode * kPi / L);
  // |zeta(t)|^2 = e^{m (t - T)} with m = 2(q + kap2)/(1+b^2)
  const double m = 2.0 * (q_const + kap2) / (1.0 + b * b);
  const double z0sq = std::exp(-m * T);
  const double time_int = (std::abs(m) > 1e-14) ? (1.0 - std::exp(-m * T)) / m : T;
  // spatial sums use the same node quadrature as the discrete norms
  double x[1];
  double s_all = 0.0, s_om = 0.0;
  for (int i = 0; i < grid.num_nodes(); ++i) {
    grid.node_coords(i, x);
    double v = std::sin(mode * kPi * (x[0] - grid.domain.lo[0]) / L);
    s_all += v * v;
    if (grid.node_in(i, grid.domain.omega)) s_om += v * v;
  }
  s_all *= grid.dx;
  s_om *= grid.dx;
  return std::sqrt(z0sq * s_all) / std::sqrt(time_int * s_om);
}

}  // namespace glc
