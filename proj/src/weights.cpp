#include "glc/weights.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace glc {

namespace {

bool box_closure_inside_open(const Box& inner, const Box& outer) {
  for (size_t i = 0; i < inner.lo.size(); ++i)
    if (!(inner.lo[i] > outer.lo[i] && inner.hi[i] < outer.hi[i])) return false;
  return true;
}

}  // namespace

void DomainSpec::validate() const {
  if (dimension != 1 && dimension != 2)
    throw std::invalid_argument("DomainSpec: dimension must be 1 or 2");
  if (static_cast<int>(lo.size()) != dimension || static_cast<int>(hi.size()) != dimension)
    throw std::invalid_argument("DomainSpec: bounds size mismatch");
  for (int i = 0; i < dimension; ++i)
    if (!(hi[static_cast<size_t>(i)] > lo[static_cast<size_t>(i)]))
      throw std::invalid_argument("DomainSpec: empty axis interval");
  if (!(horizon > 0.0)) throw std::invalid_argument("DomainSpec: horizon must be positive");
  if (omega.dim() != dimension || omega0.dim() != dimension)
    throw std::invalid_argument("DomainSpec: omega/omega0 dimension mismatch");
  for (int i = 0; i < dimension; ++i) {
    size_t s = static_cast<size_t>(i);
    if (!(omega.lo[s] < omega.hi[s]))
      throw std::invalid_argument("DomainSpec: omega is empty");
    if (!(omega.lo[s] >= lo[s] && omega.hi[s] <= hi[s]))
      throw std::invalid_argument("DomainSpec: omega not contained in Omega");
  }
  if (!box_closure_inside_open(omega0, omega))
    throw std::invalid_argument("DomainSpec: closure of omega0 must lie strictly inside omega");
}

DomainSpec make_domain_1d(double x0, double x1, double horizon,
                          double omega_lo, double omega_hi,
                          double omega0_lo, double omega0_hi) {
  DomainSpec d;
  d.dimension = 1;
  d.lo = {x0};
  d.hi = {x1};
  d.horizon = horizon;
  d.omega = Box{{omega_lo}, {omega_hi}};
  d.omega0 = Box{{omega0_lo}, {omega0_hi}};
  d.validate();
  return d;
}

DomainSpec make_domain_2d(std::array<double, 2> lo, std::array<double, 2> hi, double horizon,
                          const Box& omega, const Box& omega0) {
  DomainSpec d;
  d.dimension = 2;
  d.lo = {lo[0], lo[1]};
  d.hi = {hi[0], hi[1]};
  d.horizon = horizon;
  d.omega = omega;
  d.omega0 = omega0;
  d.validate();
  return d;
}

PsiField::PsiField(const DomainSpec& d) : domain_(d) {
  // Each axis factor peaks at 1/4 at the midpoint, so the product sup is
  // (1/4)^dim, attained at the box center.
  sup_norm_ = 1.0;
  for (int i = 0; i < d.dimension; ++i) {
    (void)i;
    sup_norm_ *= 0.25;
  }
}

double PsiField::axis_value(int axis, double s) const {
  size_t a = static_cast<size_t>(axis);
  double len = domain_.hi[a] - domain_.lo[a];
  return (s - domain_.lo[a]) * (domain_.hi[a] - s) / (len * len);
}

double PsiField::axis_deriv(int axis, double s) const {
  size_t a = static_cast<size_t>(axis);
  double len = domain_.hi[a] - domain_.lo[a];
  return (domain_.lo[a] + domain_.hi[a] - 2.0 * s) / (len * len);
}

double PsiField::axis_second(int axis) const {
  size_t a = static_cast<size_t>(axis);
  double len = domain_.hi[a] - domain_.lo[a];
  return -2.0 / (len * len);
}

double PsiField::value(std::span<const double> x) const {
  double v = 1.0;
  for (int i = 0; i < domain_.dimension; ++i) v *= axis_value(i, x[static_cast<size_t>(i)]);
  return v;
}

void PsiField::gradient(std::span<const double> x, std::span<double> grad) const {
  for (int i = 0; i < domain_.dimension; ++i) {
    double g = axis_deriv(i, x[static_cast<size_t>(i)]);
    for (int j = 0; j < domain_.dimension; ++j)
      if (j != i) g *= axis_value(j, x[static_cast<size_t>(j)]);
    grad[static_cast<size_t>(i)] = g;
  }
}

void PsiField::hessian(std::span<const double> x, std::span<double> hess) const {
  int d = domain_.dimension;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      double h;
      if (i == j) {
        h = axis_second(i);
        for (int k = 0; k < d; ++k)
          if (k != i) h *= axis_value(k, x[static_cast<size_t>(k)]);
      } else {
        h = axis_deriv(i, x[static_cast<size_t>(i)]) * axis_deriv(j, x[static_cast<size_t>(j)]);
      }
      hess[static_cast<size_t>(i * d + j)] = h;
    }
  }
}

PsiField PsiField::build(const DomainSpec& domain) {
  domain.validate();
  PsiField psi(domain);

  const int nodes = 101;
  const int d = domain.dimension;
  auto coord = [&](int axis, int k) {
    size_t a = static_cast<size_t>(axis);
    return domain.lo[a] + (domain.hi[a] - domain.lo[a]) * static_cast<double>(k) / (nodes - 1);
  };

  // The candidate's interior critical point is the center; require it in omega0
  // up front so the error message names the actual obstruction.
  std::vector<double> center(static_cast<size_t>(d));
  for (int i = 0; i < d; ++i)
    center[static_cast<size_t>(i)] = 0.5 * (domain.lo[static_cast<size_t>(i)] + domain.hi[static_cast<size_t>(i)]);
  if (!domain.omega0.contains_open(center)) {
    std::ostringstream os;
    os << "build_psi: critical point outside omega0 (candidate critical point at";
    for (double c : center) os << ' ' << c;
    os << ")";
    throw std::invalid_argument(os.str());
  }

  std::vector<double> x(static_cast<size_t>(d));
  std::vector<double> grad(static_cast<size_t>(d));
  const int nj = (d == 2) ? nodes : 1;
  for (int ki = 0; ki < nodes; ++ki) {
    for (int kj = 0; kj < nj; ++kj) {
      x[0] = coord(0, ki);
      if (d == 2) x[1] = coord(1, kj);
      bool on_boundary = (ki == 0 || ki == nodes - 1) ||
                         (d == 2 && (kj == 0 || kj == nodes - 1));
      double v = psi.value(x);
      if (on_boundary) {
        bool axis0_bd = (ki == 0 || ki == nodes - 1);
        bool axis1_bd = d == 2 && (kj == 0 || kj == nodes - 1);
        if (std::abs(v) > 1e-14)
          throw std::runtime_error("build_psi: psi does not vanish on the boundary");
        bool corner = axis0_bd && axis1_bd;
        if (corner) continue;  // corner policy: gradient not checked there
      } else if (!(v > 0.0)) {
        throw std::runtime_error("build_psi: psi not positive in the interior");
      }
      if (!domain.omega0.contains_open(x)) {
        psi.gradient(x, grad);
        double g2 = 0.0;
        for (int i = 0; i < d; ++i) g2 += grad[static_cast<size_t>(i)] * grad[static_cast<size_t>(i)];
        if (!(g2 > 0.0)) {
          std::ostringstream os;
          os << "build_psi: critical point outside omega0 (grad psi = 0 at";
          for (double c : x) os << ' ' << c;
          os << ")";
          throw std::invalid_argument(os.str());
        }
      }
    }
  }
  return psi;
}

void WeightSpec::validate() const {
  if (!(lambda > 1.0)) throw std::invalid_argument("WeightSpec: lambda must be > 1");
  if (!(mu > 1.0)) throw std::invalid_argument("WeightSpec: mu must be > 1");
  if (!(horizon > 0.0)) throw std::invalid_argument("WeightSpec: horizon must be > 0");
}

WeightEval eval_weights(const WeightSpec& spec, double t, std::span<const double> x) {
  const double T = spec.horizon;
  if (!(t > 0.0 && t < T)) throw std::invalid_argument("eval_weights: t must lie in (0, T)");
  const PsiField& psi = spec.psi;
  const int d = psi.domain().dimension;

  double pv = psi.value(x);
  double pg[2] = {0.0, 0.0};
  double ph[4] = {0.0, 0.0, 0.0, 0.0};
  psi.gradient(x, std::span<double>(pg, static_cast<size_t>(d)));
  psi.hessian(x, std::span<double>(ph, static_cast<size_t>(d * d)));

  const double mu = spec.mu, lam = spec.lambda;
  const double tw = t * (T - t);
  const double emu = std::exp(mu * pv);
  const double etop = std::exp(2.0 * mu * psi.sup_norm());

  WeightEval w;
  w.phi = emu / tw;
  w.log_phi = mu * pv - std::log(tw);
  w.rho = (emu - etop) / tw;
  w.ell = lam * w.rho;
  w.theta = (w.ell < -700.0) ? 0.0 : std::exp(w.ell);
  // rho_t = (e^{mu psi} - e^{2 mu |psi|}) d/dt [1/(t(T-t))]
  const double dinv = (2.0 * t - T) / (tw * tw);
  w.ell_t = lam * (emu - etop) * dinv;
  for (int j = 0; j < d; ++j)
    w.ell_x[j] = lam * mu * w.phi * pg[j];
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      w.ell_xx[j][k] = lam * mu * mu * w.phi * pg[j] * pg[k] + lam * mu * w.phi * ph[j * d + k];
  return w;
}

SchrodingerWeight SchrodingerWeight::make(double gamma, double c, double s,
                                          std::vector<double> x0, double t0,
                                          const DomainSpec& domain) {
  if (!(gamma > 0.0 && c > 0.0 && s > 0.0))
    throw std::invalid_argument("SchrodingerWeight: gamma, c, s must be positive");
  if (static_cast<int>(x0.size()) != domain.dimension)
    throw std::invalid_argument("SchrodingerWeight: x0 dimension mismatch");
  if (domain.inside_closure(x0))
    throw std::invalid_argument("SchrodingerWeight: x0 must lie outside the closed domain");
  SchrodingerWeight w;
  w.gamma = gamma;
  w.c = c;
  w.s = s;
  w.t0 = t0;
  w.x0 = std::move(x0);
  return w;
}

double SchrodingerWeight::ell(double t, std::span<const double> x) const {
  double q = 0.0;
  for (size_t i = 0; i < x0.size(); ++i) q += (x[i] - x0[i]) * (x[i] - x0[i]);
  q -= c * (t - t0) * (t - t0);
  return s * std::exp(gamma * q);
}

double SchrodingerWeight::ell_t(double t, std::span<const double> x) const {
  return ell(t, x) * gamma * (-2.0 * c * (t - t0));
}

void SchrodingerWeight::ell_grad(double t, std::span<const double> x, std::span<double> grad) const {
  double e = ell(t, x);
  for (size_t i = 0; i < x0.size(); ++i) grad[i] = e * gamma * 2.0 * (x[i] - x0[i]);
}

void SchrodingerWeight::ell_hess(double t, std::span<const double> x, std::span<double> hess) const {
  double e = ell(t, x);
  size_t d = x0.size();
  for (size_t i = 0; i < d; ++i) {
    for (size_t j = 0; j < d; ++j) {
      double hij = 4.0 * gamma * gamma * (x[i] - x0[i]) * (x[j] - x0[j]);
      if (i == j) hij += 2.0 * gamma;
      hess[i * d + j] = e * hij;
    }
  }
}

}  // namespace glc
