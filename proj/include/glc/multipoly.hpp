#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace glc {

using Complex = std::complex<double>;

/// Multivariate polynomial with complex coefficients over the variables
/// (t, x1, ..., xm); variable 0 is time. Arithmetic, differentiation and
/// evaluation are exact over double-precision coefficient arithmetic, which
/// keeps rounding far below the residual thresholds used by the identity
/// checks as long as total degrees stay moderate.
///
/// Exponent tuples are packed into one 64-bit key (8 bits per variable,
/// variable 0 in the top byte), so monomial products are integer additions
/// and the term map needs no per-key allocation. Up to 8 variables and
/// per-variable degree 127 — far beyond anything the identity assembly
/// produces.
///
/// Values are immutable in practice: every operation returns a new
/// polynomial, so instances can be shared freely between threads.
class MultiPoly {
 public:
  using Monomial = std::vector<int>;

  explicit MultiPoly(int num_vars);

  static MultiPoly constant(int num_vars, Complex c);
  static MultiPoly variable(int num_vars, int var);

  int num_vars() const { return num_vars_; }
  bool is_zero() const { return terms_.empty(); }
  int total_degree() const;

  /// Materialized exponent-tuple view of the terms.
  std::map<Monomial, Complex> terms() const;

  /// Adds coeff * x^expo; merges with an existing term and prunes zeros.
  void add_term(const Monomial& expo, Complex coeff);

  MultiPoly& operator+=(const MultiPoly& rhs);
  MultiPoly& operator-=(const MultiPoly& rhs);
  MultiPoly& operator*=(const MultiPoly& rhs);
  MultiPoly& operator*=(Complex c);

  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
  friend MultiPoly operator*(Complex c, MultiPoly p) { return p *= c; }
  friend MultiPoly operator*(MultiPoly p, Complex c) { return p *= c; }
  friend MultiPoly operator-(MultiPoly p) { return p *= Complex(-1.0, 0.0); }

  /// Exact partial derivative with respect to variable `var`.
  MultiPoly diff(int var) const;

  /// Coefficient-wise complex conjugate; equals pointwise conjugation since
  /// all variables take real values.
  MultiPoly conjugated() const;

  Complex eval(std::span<const double> point) const;

  double max_abs_coeff() const;

  bool operator==(const MultiPoly& rhs) const {
    return num_vars_ == rhs.num_vars_ && terms_ == rhs.terms_;
  }

 private:
  // Coefficients below this magnitude are dropped to stop denormal buildup.
  static constexpr double kPruneTol = 1e-300;
  static constexpr int kMaxVars = 8;
  static constexpr int kMaxExp = 127;

  static int shift_for(int var) { return 8 * (kMaxVars - 1 - var); }
  std::uint64_t pack(const Monomial& expo) const;

  void insert(std::uint64_t key, Complex coeff);

  int num_vars_;
  std::map<std::uint64_t, Complex> terms_;
};

enum class PolyOp { add, mul };

/// Spec-level entry points; thin wrappers over the member operations.
MultiPoly poly_combine(const MultiPoly& p, const MultiPoly& q, PolyOp op);
MultiPoly poly_scale(const MultiPoly& p, Complex c);
MultiPoly poly_diff(const MultiPoly& p, int var);
Complex poly_eval(const MultiPoly& p, std::span<const double> point);

}  // namespace glc
