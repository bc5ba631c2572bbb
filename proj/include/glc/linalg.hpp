#pragma once

#include <complex>
#include <span>
#include <vector>

namespace glc {

using Complex = std::complex<double>;

/// Real sparse matrix in CSR form, applied to complex vectors.
struct Csr {
  int n = 0;
  std::vector<int> rowptr;  // size n+1
  std::vector<int> col;
  std::vector<double> val;

  void apply(std::span<const Complex> x, std::span<Complex> y) const;

  /// Largest |A - A^T| entry; the assembly asserts this stays at rounding level.
  double asymmetry() const;

  /// Replaces A by (A + A^T)/2.
  void symmetrize();
};

/// Builder with (row, col, value) triplets; duplicate entries accumulate.
struct CsrBuilder {
  explicit CsrBuilder(int n) : n(n), rows(static_cast<size_t>(n)) {}
  void add(int r, int c, double v) { rows[static_cast<size_t>(r)].push_back({c, v}); }
  Csr build() const;

  int n;
  std::vector<std::vector<std::pair<int, double>>> rows;
};

/// Complex tridiagonal system solved by the Thomas algorithm.
/// diag/upper/lower describe A = tridiag(lower, diag, upper); rhs is
/// overwritten with the solution.
void solve_tridiag(std::span<const Complex> lower, std::span<Complex> diag_copy,
                   std::span<const Complex> upper, std::span<Complex> rhs);

/// System A x = rhs with A = shift*I + scale*L, L real CSR. 1D grids produce
/// tridiagonal L and are solved directly; callers use bicgstab otherwise.
struct TridiagFromCsr {
  // Extracts the three bands; throws if L has entries outside them.
  TridiagFromCsr(const Csr& L, Complex shift, Complex scale, std::span<const Complex> diag_extra);
  void solve(std::span<Complex> rhs) const;

  std::vector<Complex> lower, diag, upper;
};

struct IterStats {
  int iters = 0;
  double residual = 0.0;
  bool converged = false;
};

/// Shifted-CSR operator y = (shift + diag_extra[i]) x_i + scale * (L x)_i.
struct ShiftedOp {
  const Csr* L = nullptr;
  Complex shift{1.0, 0.0};
  Complex scale{1.0, 0.0};
  std::span<const Complex> diag_extra;  // may be empty

  void apply(std::span<const Complex> x, std::span<Complex> y) const;
};

/// BiCGStab with Jacobi preconditioning for the complex shifted systems of the
/// 2D stepper. Deterministic: fixed start (x = 0) and fixed reduction order.
IterStats bicgstab(const ShiftedOp& A, std::span<const Complex> rhs, std::span<Complex> x,
                   double rel_tol, int max_iters);

}  // namespace glc
