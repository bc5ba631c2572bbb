#include "glc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace glc {

void Csr::apply(std::span<const Complex> x, std::span<Complex> y) const {
  for (int r = 0; r < n; ++r) {
    Complex acc(0.0, 0.0);
    for (int p = rowptr[static_cast<size_t>(r)]; p < rowptr[static_cast<size_t>(r) + 1]; ++p)
      acc += val[static_cast<size_t>(p)] * x[static_cast<size_t>(col[static_cast<size_t>(p)])];
    y[static_cast<size_t>(r)] = acc;
  }
}

double Csr::asymmetry() const {
  // Map-based transpose lookup; matrices here are small enough.
  std::map<std::pair<int, int>, double> entries;
  for (int r = 0; r < n; ++r)
    for (int p = rowptr[static_cast<size_t>(r)]; p < rowptr[static_cast<size_t>(r) + 1]; ++p)
      entries[{r, col[static_cast<size_t>(p)]}] += val[static_cast<size_t>(p)];
  double worst = 0.0;
  for (const auto& [rc, v] : entries) {
    auto it = entries.find({rc.second, rc.first});
    double vt = (it == entries.end()) ? 0.0 : it->second;
    worst = std::max(worst, std::abs(v - vt));
  }
  return worst;
}

void Csr::symmetrize() {
  std::map<std::pair<int, int>, double> entries;
  for (int r = 0; r < n; ++r)
    for (int p = rowptr[static_cast<size_t>(r)]; p < rowptr[static_cast<size_t>(r) + 1]; ++p)
      entries[{r, col[static_cast<size_t>(p)]}] += val[static_cast<size_t>(p)];
  CsrBuilder b(n);
  for (const auto& [rc, v] : entries) {
    auto it = entries.find({rc.second, rc.first});
    double vt = (it == entries.end()) ? 0.0 : it->second;
    b.add(rc.first, rc.second, 0.5 * (v + vt));
  }
  *this = b.build();
}

Csr CsrBuilder::build() const {
  Csr m;
  m.n = n;
  m.rowptr.assign(static_cast<size_t>(n) + 1, 0);
  std::vector<std::pair<int, double>> row;
  for (int r = 0; r < n; ++r) {
    row.assign(rows[static_cast<size_t>(r)].begin(), rows[static_cast<size_t>(r)].end());
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    int last = -1;
    for (const auto& [c, v] : row) {
      if (c == last) {
        m.val.back() += v;
      } else {
        m.col.push_back(c);
        m.val.push_back(v);
        last = c;
      }
    }
    m.rowptr[static_cast<size_t>(r) + 1] = static_cast<int>(m.col.size());
  }
  return m;
}

void solve_tridiag(std::span<const Complex> lower, std::span<Complex> diag,
                   std::span<const Complex> upper, std::span<Complex> rhs) {
  const size_t n = diag.size();
  if (n == 0) return;
  // Forward sweep (in-place on diag and rhs).
  for (size_t i = 1; i < n; ++i) {
    Complex w = lower[i - 1] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

TridiagFromCsr::TridiagFromCsr(const Csr& L, Complex shift, Complex scale,
                               std::span<const Complex> diag_extra) {
  const int n = L.n;
  lower.assign(static_cast<size_t>(n > 0 ? n - 1 : 0), Complex(0.0, 0.0));
  upper.assign(static_cast<size_t>(n > 0 ? n - 1 : 0), Complex(0.0, 0.0));
  diag.assign(static_cast<size_t>(n), shift);
  if (!diag_extra.empty())
    for (int i = 0; i < n; ++i) diag[static_cast<size_t>(i)] += diag_extra[static_cast<size_t>(i)];
  for (int r = 0; r < n; ++r) {
    for (int p = L.rowptr[static_cast<size_t>(r)]; p < L.rowptr[static_cast<size_t>(r) + 1]; ++p) {
      int c = L.col[static_cast<size_t>(p)];
      Complex add = scale * L.val[static_cast<size_t>(p)];
      if (c == r)
        diag[static_cast<size_t>(r)] += add;
      else if (c == r - 1)
        lower[static_cast<size_t>(r) - 1] += add;
      else if (c == r + 1)
        upper[static_cast<size_t>(r)] += add;
      else
        throw std::invalid_argument("TridiagFromCsr: matrix is not tridiagonal");
    }
  }
}

void TridiagFromCsr::solve(std::span<Complex> rhs) const {
  std::vector<Complex> d = diag;
  solve_tridiag(lower, d, upper, rhs);
}

void ShiftedOp::apply(std::span<const Complex> x, std::span<Complex> y) const {
  L->apply(x, y);
  const size_t n = static_cast<size_t>(L->n);
  for (size_t i = 0; i < n; ++i) {
    Complex d = shift + (diag_extra.empty() ? Complex(0.0, 0.0) : diag_extra[i]);
    y[i] = scale * y[i] + d * x[i];
  }
}

namespace {

Complex dot(std::span<const Complex> a, std::span<const Complex> b) {
  Complex s(0.0, 0.0);
  for (size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

double nrm2(std::span<const Complex> a) { return std::sqrt(std::abs(dot(a, a))); }

}  // namespace

IterStats bicgstab(const ShiftedOp& A, std::span<const Complex> rhs, std::span<Complex> x,
                   double rel_tol, int max_iters) {
  const size_t n = rhs.size();
  std::vector<Complex> r(n), r0(n), p(n), v(n), s(n), t(n), z(n), y(n);
  std::vector<Complex> dinv(n);
  // Jacobi preconditioner from the operator diagonal.
  {
    std::vector<Complex> e(n, Complex(0.0, 0.0)), col(n);
    // The diagonal of shift + diag_extra + scale*diag(L).
    for (size_t i = 0; i < n; ++i) {
      Complex d = A.shift + (A.diag_extra.empty() ? Complex(0.0, 0.0) : A.diag_extra[i]);
      double ld = 0.0;
      int rr = static_cast<int>(i);
      for (int pidx = A.L->rowptr[i]; pidx < A.L->rowptr[i + 1]; ++pidx)
        if (A.L->col[static_cast<size_t>(pidx)] == rr) ld += A.L->val[static_cast<size_t>(pidx)];
      d += A.scale * ld;
      dinv[i] = (std::abs(d) > 0.0) ? 1.0 / d : Complex(1.0, 0.0);
    }
  }

  std::fill(x.begin(), x.end(), Complex(0.0, 0.0));
  std::copy(rhs.begin(), rhs.end(), r.begin());
  double bnrm = nrm2(rhs);
  IterStats st;
  if (bnrm == 0.0) {
    st.converged = true;
    return st;
  }
  r0 = r;
  Complex rho_old(1.0, 0.0), alpha(1.0, 0.0), omega(1.0, 0.0);
  std::fill(p.begin(), p.end(), Complex(0.0, 0.0));
  std::fill(v.begin(), v.end(), Complex(0.0, 0.0));
  for (int it = 1; it <= max_iters; ++it) {
    Complex rho = dot(r0, r);
    if (std::abs(rho) < 1e-300) break;
    Complex beta = (rho / rho_old) * (alpha / omega);
    for (size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    for (size_t i = 0; i < n; ++i) y[i] = dinv[i] * p[i];
    A.apply(y, v);
    alpha = rho / dot(r0, v);
    for (size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    if (nrm2(s) <= rel_tol * bnrm) {
      for (size_t i = 0; i < n; ++i) x[i] += alpha * y[i];
      st.iters = it;
      st.residual = nrm2(s) / bnrm;
      st.converged = true;
      return st;
    }
    for (size_t i = 0; i < n; ++i) z[i] = dinv[i] * s[i];
    A.apply(z, t);
    omega = dot(t, s) / dot(t, t);
    for (size_t i = 0; i < n; ++i) x[i] += alpha * y[i] + omega * z[i];
    for (size_t i = 0; i < n; ++i) r[i] = s[i] - omega * t[i];
    double res = nrm2(r) / bnrm;
    st.iters = it;
    st.residual = res;
    if (res <= rel_tol) {
      st.converged = true;
      return st;
    }
    rho_old = rho;
  }
  return st;
}

}  // namespace glc
