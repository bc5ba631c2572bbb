#pragma once

#include <complex>
#include <vector>

#include "glc/multipoly.hpp"

namespace glc {

/// Operator data for the weighted identity, generic over the field
/// representation F. F must provide +, -, *, scalar multiplication by
/// Complex, diff(var), conjugated(), eval(point) and field_constant(like, c).
/// Variable 0 is time, variables 1..m are spatial.
template <class F>
struct OpData {
  int m = 1;
  F alpha, beta;               // real-valued multipliers of the time derivative
  std::vector<std::vector<F>> a;  // symmetric m x m principal part
  F Psi;                       // gauge
  F ell;                       // weight exponent
};

/// The building blocks of the identity: the multipliers I1/I2, the conjugated
/// operator theta*P(z) expressed in v = theta z, and the divergence payload
/// (M, V, B).
template <class F>
struct PartsT {
  F A, I1, I2, Ptheta;
  F M;
  std::vector<F> V;
  F B;
};

inline MultiPoly field_constant(const MultiPoly& like, Complex c) {
  return MultiPoly::constant(like.num_vars(), c);
}

namespace detail {

constexpr Complex kI{0.0, 1.0};

template <class F>
F fc(const F& like, double re, double im = 0.0) {
  return field_constant(like, Complex(re, im));
}

}  // namespace detail

/// A = sum a^{jk} l_j l_k - sum (a^{jk} l_j)_k - Psi.
template <class F>
F assemble_A(const OpData<F>& s) {
  const int m = s.m;
  F A = detail::fc(s.ell, -1.0) * s.Psi;
  for (int j = 0; j < m; ++j) {
    F lj = s.ell.diff(j + 1);
    for (int k = 0; k < m; ++k) {
      A = A + s.a[j][k] * lj * s.ell.diff(k + 1);
      A = A - (s.a[j][k] * lj).diff(k + 1);
    }
  }
  return A;
}

template <class F>
PartsT<F> assemble_parts_t(const OpData<F>& s, const F& v) {
  using detail::kI;
  const int m = s.m;
  PartsT<F> p{v, v, v, v, v, {}, v};  // placeholders, overwritten below

  const F vb = v.conjugated();
  const F vt = v.diff(0);
  const F vbt = vb.diff(0);
  const F lt = s.ell.diff(0);
  std::vector<F> vx, vbx, lx;
  vx.reserve(m); vbx.reserve(m); lx.reserve(m);
  for (int j = 0; j < m; ++j) {
    vx.push_back(v.diff(j + 1));
    vbx.push_back(vb.diff(j + 1));
    lx.push_back(s.ell.diff(j + 1));
  }
  const F vv = v * vb;

  p.A = assemble_A(s);

  // I1 = i beta v_t - alpha l_t v + sum (a^{jk} v_j)_k + A v
  {
    F I1 = (s.beta * vt) * kI;
    I1 = I1 - s.alpha * lt * v;
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) I1 = I1 + (s.a[j][k] * vx[j]).diff(k + 1);
    I1 = I1 + p.A * v;
    p.I1 = I1;
  }

  // I2 = alpha v_t - i beta l_t v - 2 sum a^{jk} l_j v_k + Psi v
  {
    F I2 = s.alpha * vt;
    I2 = I2 - (s.beta * lt * v) * kI;
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) I2 = I2 - detail::fc(v, 2.0) * s.a[j][k] * lx[j] * vx[k];
    I2 = I2 + s.Psi * v;
    p.I2 = I2;
  }

  // theta P z in v-form, from z = e^{-l} v:
  //   (alpha + i beta)(v_t - l_t v) + sum_k [(a^{jk}(v_j - l_j v))_k - a^{jk} l_k (v_j - l_j v)]
  {
    F Pt = (s.alpha + s.beta * kI) * (vt - lt * v);
    for (int j = 0; j < m; ++j) {
      F wj = vx[j] - lx[j] * v;
      for (int k = 0; k < m; ++k) {
        Pt = Pt + (s.a[j][k] * wj).diff(k + 1);
        Pt = Pt - s.a[j][k] * s.ell.diff(k + 1) * wj;
      }
    }
    p.Ptheta = Pt;
  }

  // M = [(alpha^2 + beta^2) l_t - alpha A]|v|^2 + alpha sum a v_j conj(v)_k
  //     + i beta sum a l_j (conj(v)_k v - v_k conj(v))
  {
    F M = ((s.alpha * s.alpha + s.beta * s.beta) * lt - s.alpha * p.A) * vv;
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        M = M + s.alpha * s.a[j][k] * vx[j] * vbx[k];
        M = M + (s.beta * s.a[j][k] * lx[j] * (vbx[k] * v - vx[k] * vb)) * kI;
      }
    p.M = M;
  }

  // V^k; each addend is summed over exactly the indices it carries. The
  // four-index block factors through E[k] = sum_j a^{jk} l_j and the
  // gradient pairings D[j'][k'] = v_{j'} conj(v)_{k'} + conj(v)_{j'} v_{k'}:
  //   sum (2 a^{jk'} a^{j'k} - a^{jk} a^{j'k'}) l_j D[j'][k']
  //     = 2 sum_{j'} a^{j'k} (sum_{k'} E[k'] D[j'][k']) - E[k] (sum a^{j'k'} D[j'][k']).
  std::vector<F> E;
  E.reserve(m);
  for (int k = 0; k < m; ++k) {
    F Ek = detail::fc(v, 0.0);
    for (int j = 0; j < m; ++j) Ek = Ek + s.a[j][k] * lx[j];
    E.push_back(Ek);
  }
  std::vector<std::vector<F>> D(static_cast<size_t>(m), std::vector<F>());
  for (int jp = 0; jp < m; ++jp)
    for (int kp = 0; kp < m; ++kp)
      D[static_cast<size_t>(jp)].push_back(vx[jp] * vbx[kp] + vbx[jp] * vx[kp]);
  F S_aD = detail::fc(v, 0.0);
  std::vector<F> FjD;
  FjD.reserve(m);
  for (int jp = 0; jp < m; ++jp) {
    F acc = detail::fc(v, 0.0);
    for (int kp = 0; kp < m; ++kp) {
      S_aD = S_aD + s.a[jp][kp] * D[static_cast<size_t>(jp)][static_cast<size_t>(kp)];
      acc = acc + E[static_cast<size_t>(kp)] * D[static_cast<size_t>(jp)][static_cast<size_t>(kp)];
    }
    FjD.push_back(acc);
  }

  p.V.clear();
  p.V.reserve(m);
  for (int k = 0; k < m; ++k) {
    F Vk = detail::fc(v, 0.0);
    for (int j = 0; j < m; ++j) {
      Vk = Vk - (s.beta * s.a[j][k] * (lx[j] * (vbt * v - vb * vt) + lt * (vx[j] * vb - vbx[j] * v))) * kI;
      Vk = Vk - s.alpha * s.a[j][k] * (vx[j] * vbt + vbx[j] * vt);
      Vk = Vk - s.Psi * s.a[j][k] * (vx[j] * vb + vbx[j] * v);
      Vk = Vk + s.a[j][k] * (detail::fc(v, 2.0) * p.A * lx[j] + s.Psi.diff(j + 1) -
                             detail::fc(v, 2.0) * s.alpha * lx[j] * lt) * vv;
      Vk = Vk + detail::fc(v, 2.0) * (s.a[j][k] * FjD[static_cast<size_t>(j)]);
    }
    Vk = Vk - E[static_cast<size_t>(k)] * S_aD;
    p.V.push_back(Vk);
  }

  // B = (alpha^2 l_t)_t + (beta^2 l_t)_t - (alpha A)_t
  //     - 2[ sum (alpha a l_j l_t)_k + alpha Psi l_t ]
  //     + sum (a^{jk} Psi_k)_j + 2[ sum (a^{jk} l_j A)_k + A Psi ]
  {
    F B = (s.alpha * s.alpha * lt).diff(0) + (s.beta * s.beta * lt).diff(0) - (s.alpha * p.A).diff(0);
    B = B - detail::fc(v, 2.0) * s.alpha * s.Psi * lt;
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        B = B - detail::fc(v, 2.0) * (s.alpha * s.a[j][k] * lx[j] * lt).diff(k + 1);
        B = B + (s.a[j][k] * s.Psi.diff(k + 1)).diff(j + 1);
        B = B + detail::fc(v, 2.0) * (s.a[j][k] * lx[j] * p.A).diff(k + 1);
      }
    B = B + detail::fc(v, 2.0) * p.A * s.Psi;
    p.B = B;
  }

  return p;
}

/// Right-hand side of the fundamental identity: everything except 2|I1|^2,
/// i.e. the quadratic form in grad v, the first-order antisymmetric terms and
/// B |v|^2.
template <class F>
F assemble_rhs_rest(const OpData<F>& s, const PartsT<F>& p, const F& v) {
  using detail::kI;
  const int m = s.m;
  const F vb = v.conjugated();
  const F vt = v.diff(0);
  const F vbt = vb.diff(0);
  const F lt = s.ell.diff(0);
  std::vector<F> vx, vbx, lx;
  for (int j = 0; j < m; ++j) {
    vx.push_back(v.diff(j + 1));
    vbx.push_back(vb.diff(j + 1));
    lx.push_back(s.ell.diff(j + 1));
  }

  F rhs = p.B * (v * vb);

  // c^{jk} = sum_{j',k'}[2(a^{j'k} l_{j'})_{k'} a^{jk'} - (a^{jk} a^{j'k'} l_{j'})_{k'}]
  //          + (1/2)(alpha a^{jk})_t - a^{jk} Psi,
  // with the j' sums folded through E[k] = sum_{j'} a^{j'k} l_{j'}.
  std::vector<F> E;
  E.reserve(m);
  for (int k = 0; k < m; ++k) {
    F Ek = detail::fc(v, 0.0);
    for (int j = 0; j < m; ++j) Ek = Ek + s.a[j][k] * lx[j];
    E.push_back(Ek);
  }
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) {
      F c = (s.alpha * s.a[j][k]).diff(0) * detail::fc(v, 0.5) - s.a[j][k] * s.Psi;
      for (int kp = 0; kp < m; ++kp) {
        c = c + detail::fc(v, 2.0) * (E[static_cast<size_t>(k)].diff(kp + 1) * s.a[j][kp]);
        c = c - (s.a[j][k] * E[static_cast<size_t>(kp)]).diff(kp + 1);
      }
      rhs = rhs + c * (vx[k] * vbx[j] + vbx[k] * vx[j]);
    }

  // i sum [(beta a^{jk} l_j)_t + a^{jk} (beta l_t)_j] (conj(v)_k v - v_k conj(v))
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) {
      F coef = (s.beta * s.a[j][k] * lx[j]).diff(0) + s.a[j][k] * (s.beta * lt).diff(j + 1);
      rhs = rhs + (coef * (vbx[k] * v - vx[k] * vb)) * kI;
    }

  // - sum a^{jk} alpha_k (v_j conj(v)_t + conj(v)_j v_t)
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k)
      rhs = rhs - s.a[j][k] * s.alpha.diff(k + 1) * (vx[j] * vbt + vbx[j] * vt);

  // i [beta Psi + sum (beta a^{jk} l_j)_k] (conj(v) v_t - v conj(v)_t)
  {
    F coef = s.beta * s.Psi;
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) coef = coef + (s.beta * s.a[j][k] * lx[j]).diff(k + 1);
    rhs = rhs + (coef * (vb * vt - v * vbt)) * kI;
  }

  return rhs;
}

/// M_t + div V.
template <class F>
F assemble_divergence(const PartsT<F>& p) {
  F d = p.M.diff(0);
  for (size_t k = 0; k < p.V.size(); ++k) d = d + p.V[k].diff(static_cast<int>(k) + 1);
  return d;
}

}  // namespace glc
