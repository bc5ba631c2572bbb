#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "glc/identity_assembly.hpp"
#include "glc/multipoly.hpp"
#include "glc/rng.hpp"

namespace glc {

/// Coefficients and auxiliary data of the operator
///   P z = (alpha + i beta) z_t + sum (a^{jk} z_j)_k
/// together with the gauge Psi and the weight exponent ell. All entries are
/// polynomials in (t, x1..xm); alpha, beta, a, Psi, ell are real-valued.
struct OperatorSpec {
  int m = 1;
  MultiPoly alpha{2}, beta{2};
  std::vector<std::vector<MultiPoly>> a;
  MultiPoly psi_gauge{2};
  MultiPoly ell{2};
  double s0 = 0.0;  // ellipticity constant; 0 means only symmetry is assumed

  int num_vars() const { return m + 1; }

  /// Checks exact symmetry of a^{jk} and, when s0 > 0, sampled ellipticity.
  void validate(std::uint64_t seed = 12345) const;
};

/// All assembled pieces of the identity for a given (spec, v). The modified
/// estimate extras (c_jk, B_tilde, V_tilde) are filled only by
/// assemble_modified_parts.
struct IdentityParts {
  MultiPoly A{2}, I1{2}, I2{2}, Ptheta{2}, M{2}, B{2};
  std::vector<MultiPoly> V;
  std::vector<std::vector<MultiPoly>> c_jk;
  MultiPoly B_tilde{2};
  std::vector<MultiPoly> V_tilde;
  bool has_modified = false;
};

IdentityParts assemble_parts(const OperatorSpec& spec, const MultiPoly& v);

/// Adds the modified-estimate parts; requires alpha == 1 and beta == b.
void assemble_modified_parts(const OperatorSpec& spec, double b, const MultiPoly& v,
                             IdentityParts& parts);

struct ResidualResult {
  double residual = 0.0;  // max |LHS - RHS| over the sample points
  double scale = 1.0;     // max magnitude of any top-level term on either side
};

struct SlackResult {
  double min_slack = 0.0;  // min (LHS - RHS) over the sample points
  double scale = 1.0;
};

using SamplePoints = std::span<const std::vector<double>>;

/// Residuals of theta P z = I1 + I2 and of the |.|^2 expansion derived from it;
/// returns the larger of the two maxima.
ResidualResult check_factorization(const OperatorSpec& spec, const MultiPoly& v, SamplePoints pts);

/// The two factorization residuals separately (sum relation, square relation).
std::pair<ResidualResult, ResidualResult> check_factorization_parts(const OperatorSpec& spec,
                                                                    const MultiPoly& v,
                                                                    SamplePoints pts);

/// Residual of the fundamental identity
///   theta(Pz conj(I1) + conj(Pz) I1) + M_t + div V = 2|I1|^2 + ... + B|v|^2.
ResidualResult check_identity(const OperatorSpec& spec, const MultiPoly& v, SamplePoints pts);

/// Pointwise estimate for G (alpha == 1, beta == b, Psi = -2 sum (a l_j)_k):
///   theta^2 |Gz|^2 + M_t + div V >= RHS; returns the minimum slack.
SlackResult parabolic_pointwise_check(double b, const OperatorSpec& spec, const MultiPoly& v,
                                      SamplePoints pts);

/// Modified pointwise estimate:
///   2 theta^2 |Gz|^2 + M_t + div V_tilde >= RHS; requires s0 > 0.
SlackResult modified_pointwise_check(double b, const OperatorSpec& spec, const MultiPoly& v,
                                     SamplePoints pts);

enum class OperatorFamily { parabolic, hyperbolic, schrodinger, schrodinger_p, plate };

/// Partial operator data for preset(): the spatial dimension, principal part
/// and weight exponent; Psi and alpha/beta are supplied by the family.
struct PresetBase {
  int m = 1;
  std::vector<std::vector<MultiPoly>> a;
  MultiPoly ell{2};
  double s0 = 0.0;
};

/// Families:
///   parabolic      alpha = 1, beta = b,   Psi = -2 sum (a^{jk} l_j)_k
///   hyperbolic     alpha = 0, beta = 0,   Psi = 0, a time-independent
///   schrodinger    alpha = 0, beta = 1,   Psi = -laplace l, a = identity
///   schrodinger_p  alpha = 0, beta = p(x),Psi = -laplace l, a = identity
///   plate          schrodinger with identity a (covers the plate system)
OperatorSpec preset(OperatorFamily family, const PresetBase& base, double b = 0.0,
                    const MultiPoly* p = nullptr);

/// Gauge helpers.
MultiPoly gauge_parabolic(const std::vector<std::vector<MultiPoly>>& a, const MultiPoly& ell);
MultiPoly gauge_neg_laplacian(const MultiPoly& ell, int m);

/// Uniform sample points in (0.1, 0.9)^{1+m}.
std::vector<std::vector<double>> sample_points(int num_vars, int count, Rng& rng);

/// Random polynomial of total degree <= deg; real or complex coefficients.
MultiPoly random_poly(int num_vars, int deg, bool complex_coeffs, Rng& rng);

struct RandomIdentityConfig {
  OperatorSpec spec;
  MultiPoly v{2};
};

/// Fully random configuration for the identity/factorization residual
/// ensemble: symmetric a (deg <= 2), real alpha/beta (deg <= 2), complex v
/// (deg <= 3), random ell and Psi (deg <= 2). Only symmetry is imposed.
RandomIdentityConfig random_identity_config(int m, Rng& rng);

/// Elliptic parabolic-gauge configuration for the pointwise-estimate
/// ensemble: alpha = 1, beta = b, Psi the parabolic gauge, a(t) constant in x
/// with eigenvalues >= s0 = 0.5, and ell drawn from the family
///   ell = p0(t) + sum_i p_i(t) x_i + c x^T S x   (c >= 0, S PSD constant),
/// which keeps sum (a^{jk} l_j)_k >= 0 on the sample box, the regime in which
/// the modified estimate's quadratic-form absorption is signed.
RandomIdentityConfig random_parabolic_config(int m, double b, Rng& rng);

// ---------------------------------------------------------------------------
// Finite-difference verification path.
// ---------------------------------------------------------------------------

/// Field backed by a plain evaluator; diff() returns a central-difference
/// field with the same step, so derivative order composes by nesting. Used to
/// re-check the identity with grid-style calculus and with non-polynomial
/// weights (e.g. the Schrodinger family weight).
class FnField {
 public:
  using Fn = std::function<Complex(std::span<const double>)>;

  FnField(int num_vars, double h, Fn f);

  int num_vars() const { return num_vars_; }
  FnField diff(int var) const;
  FnField conjugated() const;
  Complex eval(std::span<const double> point) const { return f_(point); }

  friend FnField operator+(const FnField& a, const FnField& b);
  friend FnField operator-(const FnField& a, const FnField& b);
  friend FnField operator*(const FnField& a, const FnField& b);
  friend FnField operator*(const FnField& a, Complex c);
  friend FnField operator*(Complex c, const FnField& a) { return a * c; }

 private:
  int num_vars_;
  double h_;
  Fn f_;
};

FnField field_constant(const FnField& like, Complex c);

/// Operator data as plain evaluators; all fields take a (1+m)-point.
struct FdFieldSet {
  int m = 1;
  double h = 1e-3;
  std::function<double(std::span<const double>)> alpha, beta, Psi, ell;
  std::vector<std::vector<std::function<double(std::span<const double>)>>> a;
  std::function<Complex(std::span<const double>)> v;
};

/// Residual of the fundamental identity at one point with every derivative
/// taken by central differences of step fields.h; O(h^2) in exact arithmetic.
ResidualResult fd_identity_residual(const FdFieldSet& fields, std::span<const double> point);

}  // namespace glc
