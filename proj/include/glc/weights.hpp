#pragma once

#include <functional>
#include <span>
#include <vector>

#include "glc/domain.hpp"

namespace glc {

/// Weight-base function psi: positive inside Omega, zero on the boundary,
/// with non-vanishing gradient outside omega0. The canonical candidate is
/// the per-axis parabola product
///   1D:  psi(x) = (x - a)(b - x) / (b - a)^2
///   2D:  psi(x, y) = psi1(x) * psi2(y)
/// whose only interior critical point is the box center; build() rejects
/// geometries where that point is not inside omega0.
class PsiField {
 public:
  /// Verifies the three conditions on a 101-nodes-per-axis grid (2D corner
  /// nodes are excluded from the gradient condition: the gradient of the
  /// product candidate vanishes there, on a measure-zero set the Dirichlet
  /// discretization never touches).
  static PsiField build(const DomainSpec& domain);

  double value(std::span<const double> x) const;
  void gradient(std::span<const double> x, std::span<double> grad) const;
  /// Row-major dim x dim Hessian.
  void hessian(std::span<const double> x, std::span<double> hess) const;

  double sup_norm() const { return sup_norm_; }  // |psi|_{C(closure Omega)}
  const DomainSpec& domain() const { return domain_; }

 private:
  explicit PsiField(const DomainSpec& d);

  double axis_value(int axis, double s) const;
  double axis_deriv(int axis, double s) const;
  double axis_second(int axis) const;

  DomainSpec domain_;
  double sup_norm_ = 0.0;
};

/// Carleman weight parameters; lambda, mu > 1.
struct WeightSpec {
  double lambda = 2.0;
  double mu = 2.0;
  PsiField psi;
  double horizon = 1.0;  // T

  void validate() const;
};

/// All weight quantities at one space-time point:
///   phi   = e^{mu psi} / (t(T-t))
///   rho   = (e^{mu psi} - e^{2 mu |psi|_C}) / (t(T-t))   [always < 0]
///   ell   = lambda rho,  theta = e^ell  (underflow-to-zero below -700)
///   ell_t = lambda rho_t
///   ell_j = lambda mu phi psi_j
///   ell_jk = lambda mu^2 phi psi_j psi_k + lambda mu phi psi_jk
struct WeightEval {
  double phi = 0.0;
  double rho = 0.0;
  double ell = 0.0;
  double theta = 0.0;
  double log_phi = 0.0;  // ln(phi), kept for log-space quadrature
  double ell_t = 0.0;
  double ell_x[2] = {0.0, 0.0};
  double ell_xx[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
};

WeightEval eval_weights(const WeightSpec& spec, double t, std::span<const double> x);

/// Closed-form weight of the Schrodinger family:
///   ell(t,x) = s * e^{gamma (|x-x0|^2 - c (t-t0)^2)}
/// with x0 outside the closed domain. Used by the finite-difference identity
/// verifier; derivatives are available in closed form.
struct SchrodingerWeight {
  double gamma = 1.0;
  double c = 1.0;
  double s = 1.0;
  double t0 = 0.0;
  std::vector<double> x0;

  static SchrodingerWeight make(double gamma, double c, double s,
                                std::vector<double> x0, double t0,
                                const DomainSpec& domain);

  double ell(double t, std::span<const double> x) const;
  double ell_t(double t, std::span<const double> x) const;
  void ell_grad(double t, std::span<const double> x, std::span<double> grad) const;
  void ell_hess(double t, std::span<const double> x, std::span<double> hess) const;
};

}  // namespace glc
