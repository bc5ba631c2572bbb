#include "glc/calculus.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace glc {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

CoeffFn coeff_identity(int dim, double scale) {
  return [dim, scale](double, const double*, double* a) {
    for (int i = 0; i < dim * dim; ++i) a[i] = 0.0;
    for (int i = 0; i < dim; ++i) a[i * dim + i] = scale;
  };
}

CoeffFn coeff_constant(int dim, std::vector<double> matrix_row_major) {
  if (static_cast<int>(matrix_row_major.size()) != dim * dim)
    throw std::invalid_argument("coeff_constant: matrix size mismatch");
  for (int j = 0; j < dim; ++j)
    for (int k = 0; k < dim; ++k)
      if (matrix_row_major[static_cast<size_t>(j * dim + k)] !=
          matrix_row_major[static_cast<size_t>(k * dim + j)])
        throw std::invalid_argument("coeff_constant: matrix must be symmetric");
  return [dim, m = std::move(matrix_row_major)](double, const double*, double* a) {
    for (int i = 0; i < dim * dim; ++i) a[i] = m[static_cast<size_t>(i)];
  };
}

SpatialOp::SpatialOp(const Grid& grid, CoeffFn a, bool time_dependent)
    : grid_(grid), a_(std::move(a)), time_dependent_(time_dependent) {}

const Csr& SpatialOp::matrix(double t) const {
  if (cache_ && (!time_dependent_ || cache_t_ == t)) return *cache_;
  cache_ = assemble(t);
  cache_t_ = t;
  return *cache_;
}

Csr SpatialOp::assemble(double t) const {
  const int dim = grid_.dim();
  const int n = grid_.num_nodes();
  CsrBuilder b(n);
  double amat[4];

  auto eval_a = [&](double x0, double x1, int j, int k) {
    double x[2] = {x0, x1};
    a_(t, x, amat);
    if (dim == 2 && amat[1] != amat[2])
      throw std::invalid_argument("SpatialOp: coefficient matrix is not symmetric");
    return amat[j * dim + k];
  };

  // Interface/node coordinates are always derived from indices so the same
  // physical point evaluates bitwise-identically from either adjacent row;
  // that keeps the flux-form assembly exactly symmetric.
  auto xface = [&](int i) { return grid_.domain.lo[0] + grid_.dx * (i + 0.5); };

  if (dim == 1) {
    const double inv = 1.0 / (grid_.dx * grid_.dx);
    for (int i = 0; i < n; ++i) {
      double am = eval_a(xface(i), 0.0, 0, 0);      // face between nodes i-1 and i
      double ap = eval_a(xface(i + 1), 0.0, 0, 0);  // face between nodes i and i+1
      b.add(i, i, -(am + ap) * inv);
      if (i > 0) b.add(i, i - 1, am * inv);
      if (i < n - 1) b.add(i, i + 1, ap * inv);
    }
    return b.build();
  }

  const int nx = grid_.nx, ny = grid_.ny;
  const double ivx = 1.0 / (grid_.dx * grid_.dx);
  const double ivy = 1.0 / (grid_.dy * grid_.dy);
  const double ivxy = 1.0 / (4.0 * grid_.dx * grid_.dy);
  auto id = [nx](int i, int j) { return i + nx * j; };
  auto xnode = [&](int i) { return grid_.domain.lo[0] + grid_.dx * (i + 1); };
  auto ynode = [&](int j) { return grid_.domain.lo[1] + grid_.dy * (j + 1); };
  auto yface = [&](int j) { return grid_.domain.lo[1] + grid_.dy * (j + 0.5); };
  // four-cell average of a12 around node (i, j), index-addressed
  auto a12avg = [&](int i, int j) {
    return 0.25 * (eval_a(xface(i), yface(j), 0, 1) + eval_a(xface(i + 1), yface(j), 0, 1) +
                   eval_a(xface(i), yface(j + 1), 0, 1) +
                   eval_a(xface(i + 1), yface(j + 1), 0, 1));
  };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      int r = id(i, j);
      double x = xnode(i);
      double y = ynode(j);
      // flux form along each axis with midpoint coefficients
      double axm = eval_a(xface(i), y, 0, 0);
      double axp = eval_a(xface(i + 1), y, 0, 0);
      double aym = eval_a(x, yface(j), 1, 1);
      double ayp = eval_a(x, yface(j + 1), 1, 1);
      b.add(r, r, -(axm + axp) * ivx - (aym + ayp) * ivy);
      if (i > 0) b.add(r, id(i - 1, j), axm * ivx);
      if (i < nx - 1) b.add(r, id(i + 1, j), axp * ivx);
      if (j > 0) b.add(r, id(i, j - 1), aym * ivy);
      if (j < ny - 1) b.add(r, id(i, j + 1), ayp * ivy);
      // cross terms d_x(a12 d_y .) + d_y(a12 d_x .): centered stencil with the
      // node coefficient averaged over the four neighboring cells.
      // d_x(c d_y z): neighbors (i+-1, j), inner difference in y
      if (i < nx - 1) {
        double c = a12avg(i + 1, j);
        if (j < ny - 1) b.add(r, id(i + 1, j + 1), c * ivxy);
        if (j > 0) b.add(r, id(i + 1, j - 1), -c * ivxy);
      }
      if (i > 0) {
        double c = a12avg(i - 1, j);
        if (j < ny - 1) b.add(r, id(i - 1, j + 1), -c * ivxy);
        if (j > 0) b.add(r, id(i - 1, j - 1), c * ivxy);
      }
      // d_y(c d_x z): neighbors (i, j+-1), inner difference in x
      if (j < ny - 1) {
        double c = a12avg(i, j + 1);
        if (i < nx - 1) b.add(r, id(i + 1, j + 1), c * ivxy);
        if (i > 0) b.add(r, id(i - 1, j + 1), -c * ivxy);
      }
      if (j > 0) {
        double c = a12avg(i, j - 1);
        if (i < nx - 1) b.add(r, id(i + 1, j - 1), -c * ivxy);
        if (i > 0) b.add(r, id(i - 1, j - 1), c * ivxy);
      }
    }
  }
  Csr m = b.build();
  double skew = m.asymmetry();
  m.symmetrize();
  if (skew > 1e-12 * (1.0 + std::abs(m.val.empty() ? 0.0 : m.val[0])))
    throw std::runtime_error("SpatialOp: cross-term asymmetry above rounding level");
  return m;
}

std::vector<Complex> apply_G(const Trajectory& z, int level, double b, const SpatialOp& a) {
  const Grid& g = z.grid();
  if (level < 0 || level + 1 > g.nt) throw std::invalid_argument("apply_G: level out of range");
  const int n = g.num_nodes();
  const Complex one_ib(1.0, b);
  std::vector<Complex> mid(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) mid[static_cast<size_t>(i)] = 0.5 * (z.at(level, i) + z.at(level + 1, i));
  std::vector<Complex> out(static_cast<size_t>(n));
  a.matrix(g.time(level) + 0.5 * g.dt).apply(mid, out);
  for (int i = 0; i < n; ++i)
    out[static_cast<size_t>(i)] += one_ib * (z.at(level + 1, i) - z.at(level, i)) / g.dt;
  return out;
}

double norm_l2_omega_level(const Trajectory& z, int level) {
  const Grid& g = z.grid();
  double acc = 0.0;
  for (int i = 0; i < g.num_nodes(); ++i) acc += std::norm(z.at(level, i));
  return std::sqrt(acc * g.cell_volume());
}

double norms(const Trajectory& z, NormKind kind, int level) {
  const Grid& g = z.grid();
  switch (kind) {
    case NormKind::L2_Omega_at_t:
      return norm_l2_omega_level(z, level);
    case NormKind::L2_Q: {
      double acc = 0.0;
      for (int n = 0; n <= g.nt; ++n) {
        double w = (n == 0 || n == g.nt) ? 0.5 : 1.0;
        double lvl = 0.0;
        for (int i = 0; i < g.num_nodes(); ++i) lvl += std::norm(z.at(n, i));
        acc += w * lvl;
      }
      return std::sqrt(acc * g.cell_volume() * g.dt);
    }
    case NormKind::L2_omega_Q: {
      std::vector<char> in(static_cast<size_t>(g.num_nodes()));
      for (int i = 0; i < g.num_nodes(); ++i) in[static_cast<size_t>(i)] = g.node_in(i, g.domain.omega) ? 1 : 0;
      double acc = 0.0;
      for (int n = 0; n <= g.nt; ++n) {
        double w = (n == 0 || n == g.nt) ? 0.5 : 1.0;
        double lvl = 0.0;
        for (int i = 0; i < g.num_nodes(); ++i)
          if (in[static_cast<size_t>(i)]) lvl += std::norm(z.at(n, i));
        acc += w * lvl;
      }
      return std::sqrt(acc * g.cell_volume() * g.dt);
    }
  }
  return 0.0;
}

double integrate_q(const Grid& grid,
                   const std::function<double(int level, std::span<const double> x)>& f) {
  const int dim = grid.dim();
  double acc = 0.0;
  // full node set including boundary, trapezoid weights in every direction
  const int mx = grid.nx + 2;
  const int my = (dim == 2) ? grid.ny + 2 : 1;
  double x[2];
  for (int lev = 0; lev <= grid.nt; ++lev) {
    double wt = (lev == 0 || lev == grid.nt) ? 0.5 : 1.0;
    double lvl = 0.0;
    for (int j = 0; j < my; ++j) {
      for (int i = 0; i < mx; ++i) {
        double w = (i == 0 || i == mx - 1) ? 0.5 : 1.0;
        if (dim == 2) w *= (j == 0 || j == my - 1) ? 0.5 : 1.0;
        x[0] = grid.domain.lo[0] + grid.dx * i;
        if (dim == 2) x[1] = grid.domain.lo[1] + grid.dy * j;
        if (std::isnan(f(lev, std::span<const double>(x, static_cast<size_t>(dim)))))
          throw std::runtime_error("integrate_q: NaN in integrand");
        lvl += w * f(lev, std::span<const double>(x, static_cast<size_t>(dim)));
      }
    }
    acc += wt * lvl;
  }
  return acc * grid.cell_volume() * grid.dt;
}

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double log_integrate_weighted(const Grid& grid, const WeightSpec& w, int phi_power,
                              const std::function<double(int level, int node)>& f,
                              const Box* restrict_box) {
  const int n = grid.num_nodes();
  std::vector<char> in(static_cast<size_t>(n), 1);
  if (restrict_box != nullptr)
    for (int i = 0; i < n; ++i) in[static_cast<size_t>(i)] = grid.node_in(i, *restrict_box) ? 1 : 0;
  double x[2];
  // streaming logsumexp of  w_quad * phi^p theta^2 f  over interior x levels 1..nt-1
  double lmax = kNegInf, msum = 0.0;
  for (int lev = 1; lev < grid.nt; ++lev) {
    double t = grid.time(lev);
    for (int i = 0; i < n; ++i) {
      if (!in[static_cast<size_t>(i)]) continue;
      double fv = f(lev, i);
      if (std::isnan(fv)) throw std::runtime_error("log_integrate_weighted: NaN in integrand");
      if (fv <= 0.0) continue;
      grid.node_coords(i, x);
      WeightEval we = eval_weights(w, t, std::span<const double>(x, static_cast<size_t>(grid.dim())));
      double g = 2.0 * we.ell + phi_power * we.log_phi + std::log(fv);
      if (g == kNegInf) continue;
      if (g <= lmax) {
        msum += std::exp(g - lmax);
      } else {
        msum = msum * std::exp(lmax - g) + 1.0;
        lmax = g;
      }
    }
  }
  if (lmax == kNegInf) return kNegInf;
  return lmax + std::log(msum) + std::log(grid.cell_volume() * grid.dt);
}

double grad_sq(const Trajectory& z, int level, int node) {
  const Grid& g = z.grid();
  if (g.dim() == 1) {
    Complex zm = (node > 0) ? z.at(level, node - 1) : Complex(0.0, 0.0);
    Complex zp = (node < g.nx - 1) ? z.at(level, node + 1) : Complex(0.0, 0.0);
    return std::norm((zp - zm) / (2.0 * g.dx));
  }
  int i = node % g.nx;
  int j = node / g.nx;
  auto val = [&](int ii, int jj) {
    if (ii < 0 || ii >= g.nx || jj < 0 || jj >= g.ny) return Complex(0.0, 0.0);
    return z.at(level, ii + g.nx * jj);
  };
  Complex gx = (val(i + 1, j) - val(i - 1, j)) / (2.0 * g.dx);
  Complex gy = (val(i, j + 1) - val(i, j - 1)) / (2.0 * g.dy);
  return std::norm(gx) + std::norm(gy);
}

}  // namespace glc
