#include "glc/identity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace glc {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kTiny = 1e-30;

OpData<MultiPoly> to_opdata(const OperatorSpec& s) {
  return OpData<MultiPoly>{s.m, s.alpha, s.beta, s.a, s.psi_gauge, s.ell};
}

void check_shapes(const OperatorSpec& s, const MultiPoly& v) {
  const int nv = s.m + 1;
  if (v.num_vars() != nv) throw std::invalid_argument("identity: v has wrong variable count");
  if (s.alpha.num_vars() != nv || s.beta.num_vars() != nv || s.psi_gauge.num_vars() != nv ||
      s.ell.num_vars() != nv)
    throw std::invalid_argument("identity: operator fields have wrong variable count");
  if (static_cast<int>(s.a.size()) != s.m)
    throw std::invalid_argument("identity: a has wrong shape");
  for (const auto& row : s.a)
    if (static_cast<int>(row.size()) != s.m)
      throw std::invalid_argument("identity: a has wrong shape");
}

bool poly_near(const MultiPoly& p, const MultiPoly& q, double tol) {
  MultiPoly d = p;
  d -= q;
  double ref = std::max({1.0, p.max_abs_coeff(), q.max_abs_coeff()});
  return d.max_abs_coeff() <= tol * ref;
}

void require_parabolic_form(const OperatorSpec& spec, double b) {
  const int nv = spec.num_vars();
  if (!poly_near(spec.alpha, MultiPoly::constant(nv, 1.0), 1e-14))
    throw std::invalid_argument("pointwise check: alpha must be identically 1");
  if (!poly_near(spec.beta, MultiPoly::constant(nv, b), 1e-14))
    throw std::invalid_argument("pointwise check: beta must be identically b");
  MultiPoly gauge = gauge_parabolic(spec.a, spec.ell);
  if (!poly_near(spec.psi_gauge, gauge, 1e-12))
    throw std::invalid_argument("pointwise check: gauge mismatch (Psi must be -2 sum (a^{jk} l_j)_k)");
}

double abs2(Complex z) { return std::norm(z); }

}  // namespace

void OperatorSpec::validate(std::uint64_t seed) const {
  const int nv = m + 1;
  if (static_cast<int>(a.size()) != m) throw std::invalid_argument("OperatorSpec: a must be m x m");
  for (const auto& row : a)
    if (static_cast<int>(row.size()) != m) throw std::invalid_argument("OperatorSpec: a must be m x m");
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) {
      if (a[j][k].num_vars() != nv) throw std::invalid_argument("OperatorSpec: a entry variable count");
      MultiPoly d = a[j][k];
      d -= a[k][j];
      if (!d.is_zero())
        throw std::invalid_argument("OperatorSpec: a^{jk} must equal a^{kj} exactly");
    }
  if (s0 < 0.0) throw std::invalid_argument("OperatorSpec: s0 must be >= 0");
  if (s0 > 0.0) {
    Rng rng(seed);
    auto pts = sample_points(nv, 50, rng);
    for (const auto& pt : pts) {
      std::vector<Complex> xi(static_cast<size_t>(m));
      double norm2 = 0.0;
      for (auto& x : xi) {
        x = rng.normal_complex();
        norm2 += std::norm(x);
      }
      if (norm2 < 1e-12) continue;
      double quad = 0.0;
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
          quad += (a[static_cast<size_t>(j)][static_cast<size_t>(k)].eval(pt) *
                   xi[static_cast<size_t>(j)] * std::conj(xi[static_cast<size_t>(k)]))
                      .real();
      if (quad < s0 * norm2 - 1e-9 * norm2)
        throw std::runtime_error("OperatorSpec: sampled ellipticity below s0");
    }
  }
}

IdentityParts assemble_parts(const OperatorSpec& spec, const MultiPoly& v) {
  check_shapes(spec, v);
  PartsT<MultiPoly> p = assemble_parts_t(to_opdata(spec), v);
  IdentityParts out;
  out.A = std::move(p.A);
  out.I1 = std::move(p.I1);
  out.I2 = std::move(p.I2);
  out.Ptheta = std::move(p.Ptheta);
  out.M = std::move(p.M);
  out.V = std::move(p.V);
  out.B = std::move(p.B);
  return out;
}

void assemble_modified_parts(const OperatorSpec& spec, double b, const MultiPoly& v,
                             IdentityParts& parts) {
  check_shapes(spec, v);
  require_parabolic_form(spec, b);
  const int m = spec.m;
  const int nv = spec.num_vars();
  const double fb2 = b * b / (1.0 + b * b);
  const Complex ifb1 = kI * (b / (1.0 + b * b));

  const MultiPoly vb = v.conjugated();
  const MultiPoly vv = v * vb;
  std::vector<MultiPoly> vx, vbx, lx;
  for (int j = 0; j < m; ++j) {
    vx.push_back(v.diff(j + 1));
    vbx.push_back(vb.diff(j + 1));
    lx.push_back(spec.ell.diff(j + 1));
  }

  MultiPoly W(nv);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) W += (spec.a[j][k] * lx[j]).diff(k + 1);
  std::vector<MultiPoly> Wx;
  for (int j = 0; j < m; ++j) Wx.push_back(W.diff(j + 1));

  // V_tilde: the z-form corrections of the modified estimate, rewritten in v
  // (theta^2 (conj(z)_j z + z_j conj z) = (conj(v)_j v + v_j conj v) - 2 l_j |v|^2,
  //  (theta^2 W)_j |z|^2 = (2 l_j W + W_j)|v|^2).
  parts.V_tilde.clear();
  for (int k = 0; k < m; ++k) {
    MultiPoly Vt = parts.V[static_cast<size_t>(k)];
    for (int j = 0; j < m; ++j) {
      Vt += ifb1 * (W * spec.a[j][k] * (vbx[j] * v - vx[j] * vb));
      Vt -= fb2 * (W * spec.a[j][k] * (vbx[j] * v + vx[j] * vb - 2.0 * (lx[j] * vv)));
      Vt += fb2 * ((2.0 * (lx[j] * W) + Wx[j]) * spec.a[j][k] * vv);
      Vt -= 2.0 * fb2 * (W * spec.a[j][k] * lx[j] * vv);
    }
    parts.V_tilde.push_back(std::move(Vt));
  }

  // c^{jk} with the 1/(2(1+b^2)) share of the a^{jk} W block.
  parts.c_jk.assign(static_cast<size_t>(m), std::vector<MultiPoly>());
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < m; ++k) {
      MultiPoly c = 0.5 * spec.a[j][k].diff(0) + (0.5 / (1.0 + b * b)) * (spec.a[j][k] * W);
      for (int jp = 0; jp < m; ++jp)
        for (int kp = 0; kp < m; ++kp) {
          c += 2.0 * ((spec.a[jp][k] * lx[jp]).diff(kp + 1) * spec.a[j][kp]);
          c -= spec.a[j][k].diff(kp + 1) * spec.a[jp][kp] * lx[jp];
        }
      parts.c_jk[static_cast<size_t>(j)].push_back(std::move(c));
    }
  }

  MultiPoly Bt = parts.B;
  Bt -= fb2 * (W * W);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) {
      Bt -= 2.0 * fb2 * (W * spec.a[j][k] * lx[k] * lx[j]);
      Bt += fb2 * (2.0 * (spec.a[j][k] * lx[k] * Wx[j]) + (spec.a[j][k] * Wx[j]).diff(k + 1));
    }
  parts.B_tilde = std::move(Bt);
  parts.has_modified = true;
}

MultiPoly random_poly(int num_vars, int deg, bool complex_coeffs, Rng& rng) {
  MultiPoly p(num_vars);
  MultiPoly::Monomial mono(static_cast<size_t>(num_vars), 0);
  // enumerate all monomials with total degree <= deg
  std::function<void(int, int)> walk = [&](int var, int budget) {
    if (var == num_vars) {
      Complex c = complex_coeffs ? Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0))
                                 : Complex(rng.uniform(-1.0, 1.0), 0.0);
      p.add_term(mono, c);
      return;
    }
    for (int e = 0; e <= budget; ++e) {
      mono[static_cast<size_t>(var)] = e;
      walk(var + 1, budget - e);
    }
    mono[static_cast<size_t>(var)] = 0;
  };
  walk(0, deg);
  return p;
}

RandomIdentityConfig random_identity_config(int m, Rng& rng) {
  const int nv = m + 1;
  RandomIdentityConfig cfg;
  cfg.spec.m = m;
  cfg.spec.alpha = random_poly(nv, 2, false, rng);
  cfg.spec.beta = random_poly(nv, 2, false, rng);
  cfg.spec.a.assign(static_cast<size_t>(m), std::vector<MultiPoly>());
  std::vector<std::vector<MultiPoly>> upper(static_cast<size_t>(m));
  for (int j = 0; j < m; ++j)
    for (int k = j; k < m; ++k) upper[static_cast<size_t>(j)].push_back(random_poly(nv, 2, false, rng));
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) {
      int lo = std::min(j, k), hi = std::max(j, k);
      cfg.spec.a[static_cast<size_t>(j)].push_back(
          upper[static_cast<size_t>(lo)][static_cast<size_t>(hi - lo)]);
    }
  cfg.spec.psi_gauge = random_poly(nv, 2, false, rng);
  cfg.spec.ell = random_poly(nv, 2, false, rng);
  cfg.spec.s0 = 0.0;
  cfg.v = random_poly(nv, 3, true, rng);
  cfg.spec.validate();
  return cfg;
}

RandomIdentityConfig random_parabolic_config(int m, double b, Rng& rng) {
  const int nv = m + 1;
  RandomIdentityConfig cfg;
  cfg.spec.m = m;
  cfg.spec.alpha = MultiPoly::constant(nv, 1.0);
  cfg.spec.beta = MultiPoly::constant(nv, b);

  // a(t) = A0 + t A1, constant in x, with A0 = 0.75 I + small symmetric and
  // A1 small, keeping eigenvalues >= 0.5 on (0, 1).
  std::vector<std::vector<double>> A0(static_cast<size_t>(m), std::vector<double>(static_cast<size_t>(m), 0.0));
  std::vector<std::vector<double>> A1 = A0;
  for (int j = 0; j < m; ++j) {
    A0[static_cast<size_t>(j)][static_cast<size_t>(j)] = 1.0 + 0.5 * rng.uniform();
    for (int k = j + 1; k < m; ++k) {
      double off = 0.15 * rng.uniform(-1.0, 1.0) / m;
      A0[static_cast<size_t>(j)][static_cast<size_t>(k)] = off;
      A0[static_cast<size_t>(k)][static_cast<size_t>(j)] = off;
    }
    for (int k = j; k < m; ++k) {
      double off = 0.1 * rng.uniform(-1.0, 1.0) / m;
      A1[static_cast<size_t>(j)][static_cast<size_t>(k)] = off;
      A1[static_cast<size_t>(k)][static_cast<size_t>(j)] = off;
    }
  }
  const MultiPoly t_var = MultiPoly::variable(nv, 0);
  cfg.spec.a.assign(static_cast<size_t>(m), std::vector<MultiPoly>());
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) {
      MultiPoly e = MultiPoly::constant(nv, A0[static_cast<size_t>(j)][static_cast<size_t>(k)]);
      e += A1[static_cast<size_t>(j)][static_cast<size_t>(k)] * t_var;
      cfg.spec.a[static_cast<size_t>(j)].push_back(std::move(e));
    }

  // ell = p0(t) + sum p_i(t) x_i + c x^T S x, S = R^T R.
  MultiPoly ell = random_poly(nv, 2, false, rng);
  {
    // strip the x-dependence of the random part beyond linear terms
    MultiPoly lin(nv);
    for (const auto& [mono, c] : ell.terms()) {
      int xdeg = 0;
      for (int v = 1; v < nv; ++v) xdeg += mono[static_cast<size_t>(v)];
      if (xdeg <= 1) lin.add_term(mono, c);
    }
    ell = lin;
  }
  std::vector<std::vector<double>> R(static_cast<size_t>(m), std::vector<double>(static_cast<size_t>(m)));
  for (auto& row : R)
    for (auto& e : row) e = rng.uniform(-1.0, 1.0);
  const double c_quad = rng.uniform();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double s = 0.0;
      for (int k = 0; k < m; ++k) s += R[static_cast<size_t>(k)][static_cast<size_t>(i)] * R[static_cast<size_t>(k)][static_cast<size_t>(j)];
      MultiPoly xij = MultiPoly::variable(nv, i + 1) * MultiPoly::variable(nv, j + 1);
      ell += (c_quad * s) * xij;
    }
  cfg.spec.ell = ell;
  cfg.spec.psi_gauge = gauge_parabolic(cfg.spec.a, cfg.spec.ell);
  cfg.spec.s0 = 0.5;
  cfg.v = random_poly(nv, 3, true, rng);
  cfg.spec.validate();
  return cfg;
}

std::vector<std::vector<double>> sample_points(int num_vars, int count, Rng& rng) {
  std::vector<std::vector<double>> pts;
  pts.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) {
    std::vector<double> p(static_cast<size_t>(num_vars));
    for (auto& c : p) c = rng.uniform(0.1, 0.9);
    pts.push_back(std::move(p));
  }
  return pts;
}

std::pair<ResidualResult, ResidualResult> check_factorization_parts(const OperatorSpec& spec,
                                                                    const MultiPoly& v,
                                                                    SamplePoints pts) {
  IdentityParts p = assemble_parts(spec, v);
  double r1 = 0.0, s1 = kTiny, r2 = 0.0, s2 = kTiny;
  for (const auto& pt : pts) {
    Complex Pt = p.Ptheta.eval(pt);
    Complex i1 = p.I1.eval(pt);
    Complex i2 = p.I2.eval(pt);
    r1 = std::max(r1, std::abs(Pt - i1 - i2));
    s1 = std::max({s1, std::abs(Pt), std::abs(i1), std::abs(i2)});
    Complex lhs = Pt * std::conj(i1) + std::conj(Pt) * i1;
    Complex cross = i1 * std::conj(i2) + i2 * std::conj(i1);
    Complex rhs = 2.0 * abs2(i1) + cross;
    r2 = std::max(r2, std::abs(lhs - rhs));
    s2 = std::max({s2, std::abs(lhs), 2.0 * abs2(i1), std::abs(cross)});
  }
  return {ResidualResult{r1, s1}, ResidualResult{r2, s2}};
}

ResidualResult check_factorization(const OperatorSpec& spec, const MultiPoly& v, SamplePoints pts) {
  auto [a6, a8] = check_factorization_parts(spec, v, pts);
  // report whichever of the two relations is worse in relative terms
  return (a6.residual / a6.scale > a8.residual / a8.scale) ? a6 : a8;
}

ResidualResult check_identity(const OperatorSpec& spec, const MultiPoly& v, SamplePoints pts) {
  OpData<MultiPoly> data = to_opdata(spec);
  PartsT<MultiPoly> p = assemble_parts_t(data, v);
  MultiPoly Mt = p.M.diff(0);
  MultiPoly divV(spec.num_vars());
  for (int k = 0; k < spec.m; ++k) divV += p.V[static_cast<size_t>(k)].diff(k + 1);
  MultiPoly rhs_rest = assemble_rhs_rest(data, p, v);

  ResidualResult res;
  res.scale = kTiny;
  for (const auto& pt : pts) {
    Complex Pt = p.Ptheta.eval(pt);
    Complex i1 = p.I1.eval(pt);
    Complex l1 = Pt * std::conj(i1) + std::conj(Pt) * i1;
    Complex l2 = Mt.eval(pt);
    Complex l3 = divV.eval(pt);
    Complex r1 = 2.0 * abs2(i1);
    Complex rr = rhs_rest.eval(pt);
    res.residual = std::max(res.residual, std::abs(l1 + l2 + l3 - r1 - rr));
    res.scale = std::max({res.scale, std::abs(l1), std::abs(l2), std::abs(l3), std::abs(r1),
                          std::abs(rr)});
  }
  return res;
}

SlackResult parabolic_pointwise_check(double b, const OperatorSpec& spec, const MultiPoly& v,
                                      SamplePoints pts) {
  check_shapes(spec, v);
  require_parabolic_form(spec, b);
  OpData<MultiPoly> data = to_opdata(spec);
  PartsT<MultiPoly> p = assemble_parts_t(data, v);
  const int m = spec.m;
  const int nv = spec.num_vars();

  const MultiPoly vb = v.conjugated();
  const MultiPoly vt = v.diff(0);
  const MultiPoly vbt = vb.diff(0);
  const MultiPoly vv = v * vb;
  std::vector<MultiPoly> vx, vbx, lx;
  for (int j = 0; j < m; ++j) {
    vx.push_back(v.diff(j + 1));
    vbx.push_back(vb.diff(j + 1));
    lx.push_back(spec.ell.diff(j + 1));
  }
  MultiPoly W(nv);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) W += (spec.a[j][k] * lx[j]).diff(k + 1);

  // RHS quadratic form: 2(a^{j'k} l_{j'})_{k'} a^{jk'} - a^{jk}_{k'} a^{j'k'} l_{j'}
  //                     + (1/2) a^{jk}_t + a^{jk} sum (a^{j'k'} l_{j'})_{k'}
  MultiPoly rhs(nv);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) {
      MultiPoly c = 0.5 * spec.a[j][k].diff(0) + spec.a[j][k] * W;
      for (int jp = 0; jp < m; ++jp)
        for (int kp = 0; kp < m; ++kp) {
          c += 2.0 * ((spec.a[jp][k] * lx[jp]).diff(kp + 1) * spec.a[j][kp]);
          c -= spec.a[j][k].diff(kp + 1) * spec.a[jp][kp] * lx[jp];
        }
      rhs += c * (vx[k] * vbx[j] + vbx[k] * vx[j]);
    }
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) {
      MultiPoly coef = spec.a[j][k].diff(0) * lx[j] + 2.0 * (spec.a[j][k] * lx[j].diff(0));
      rhs += (kI * b) * (coef * (vbx[k] * v - vx[k] * vb));
    }
  rhs -= (kI * b) * (W * (vb * vt - v * vbt));
  MultiPoly Bvv = p.B * vv;

  MultiPoly Mt = p.M.diff(0);
  MultiPoly divV(nv);
  for (int k = 0; k < m; ++k) divV += p.V[static_cast<size_t>(k)].diff(k + 1);

  SlackResult out;
  out.min_slack = std::numeric_limits<double>::infinity();
  out.scale = kTiny;
  for (const auto& pt : pts) {
    double l1 = abs2(p.Ptheta.eval(pt));
    double l2 = Mt.eval(pt).real();
    double l3 = divV.eval(pt).real();
    double r = rhs.eval(pt).real() + Bvv.eval(pt).real();
    out.min_slack = std::min(out.min_slack, l1 + l2 + l3 - r);
    out.scale = std::max({out.scale, l1, std::abs(l2), std::abs(l3), std::abs(r)});
  }
  return out;
}

SlackResult modified_pointwise_check(double b, const OperatorSpec& spec, const MultiPoly& v,
                                     SamplePoints pts) {
  if (!(spec.s0 > 0.0))
    throw std::invalid_argument("modified_pointwise_check: requires s0 > 0 (refusing degenerate a)");
  spec.validate();
  IdentityParts p = assemble_parts(spec, v);
  assemble_modified_parts(spec, b, v, p);
  const int m = spec.m;
  const int nv = spec.num_vars();

  const MultiPoly vb = v.conjugated();
  const MultiPoly vv = v * vb;
  std::vector<MultiPoly> vx, vbx, lx;
  for (int j = 0; j < m; ++j) {
    vx.push_back(v.diff(j + 1));
    vbx.push_back(vb.diff(j + 1));
    lx.push_back(spec.ell.diff(j + 1));
  }
  MultiPoly W(nv);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) W += (spec.a[j][k] * lx[j]).diff(k + 1);
  std::vector<MultiPoly> Wx;
  for (int j = 0; j < m; ++j) Wx.push_back(W.diff(j + 1));

  MultiPoly qf(nv);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k)
      qf += p.c_jk[static_cast<size_t>(j)][static_cast<size_t>(k)] *
            (vx[k] * vbx[j] + vbx[k] * vx[j]);
  MultiPoly ib_term(nv);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) {
      MultiPoly coef = spec.a[j][k].diff(0) * lx[j] + 2.0 * (spec.a[j][k] * lx[j].diff(0)) +
                       (1.0 / (1.0 + b * b)) * (Wx[j] * spec.a[j][k]);
      ib_term += (kI * b) * (coef * (vbx[k] * v - vx[k] * vb));
    }
  MultiPoly Btvv = p.B_tilde * vv;

  MultiPoly Mt = p.M.diff(0);
  MultiPoly divVt(nv);
  for (int k = 0; k < m; ++k) divVt += p.V_tilde[static_cast<size_t>(k)].diff(k + 1);

  SlackResult out;
  out.min_slack = std::numeric_limits<double>::infinity();
  out.scale = kTiny;
  for (const auto& pt : pts) {
    double l1 = 2.0 * abs2(p.Ptheta.eval(pt));
    double l2 = Mt.eval(pt).real();
    double l3 = divVt.eval(pt).real();
    double r1 = qf.eval(pt).real();
    double r2 = Btvv.eval(pt).real();
    double r3 = ib_term.eval(pt).real();
    out.min_slack = std::min(out.min_slack, l1 + l2 + l3 - r1 - r2 - r3);
    out.scale = std::max({out.scale, l1, std::abs(l2), std::abs(l3), std::abs(r1), std::abs(r2),
                          std::abs(r3)});
  }
  return out;
}

MultiPoly gauge_parabolic(const std::vector<std::vector<MultiPoly>>& a, const MultiPoly& ell) {
  const int m = static_cast<int>(a.size());
  MultiPoly g(ell.num_vars());
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k)
      g -= 2.0 * ((a[static_cast<size_t>(j)][static_cast<size_t>(k)] * ell.diff(j + 1)).diff(k + 1));
  return g;
}

MultiPoly gauge_neg_laplacian(const MultiPoly& ell, int m) {
  MultiPoly g(ell.num_vars());
  for (int j = 0; j < m; ++j) g -= ell.diff(j + 1).diff(j + 1);
  return g;
}

namespace {

bool is_identity_matrix(const std::vector<std::vector<MultiPoly>>& a, int nv) {
  const int m = static_cast<int>(a.size());
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) {
      MultiPoly want = (j == k) ? MultiPoly::constant(nv, 1.0) : MultiPoly(nv);
      if (!poly_near(a[static_cast<size_t>(j)][static_cast<size_t>(k)], want, 1e-12)) return false;
    }
  return true;
}

}  // namespace

OperatorSpec preset(OperatorFamily family, const PresetBase& base, double b, const MultiPoly* p) {
  const int nv = base.m + 1;
  OperatorSpec spec;
  spec.m = base.m;
  spec.a = base.a;
  spec.ell = base.ell;
  spec.s0 = base.s0;
  switch (family) {
    case OperatorFamily::parabolic:
      spec.alpha = MultiPoly::constant(nv, 1.0);
      spec.beta = MultiPoly::constant(nv, b);
      spec.psi_gauge = gauge_parabolic(base.a, base.ell);
      break;
    case OperatorFamily::hyperbolic: {
      spec.alpha = MultiPoly(nv);
      spec.beta = MultiPoly(nv);
      spec.psi_gauge = MultiPoly(nv);
      for (const auto& row : base.a)
        for (const auto& e : row)
          if (!e.diff(0).is_zero())
            throw std::invalid_argument("preset: hyperbolic family needs time-independent a");
      break;
    }
    case OperatorFamily::schrodinger:
    case OperatorFamily::plate:
      if (!is_identity_matrix(base.a, nv))
        throw std::invalid_argument("preset: schrodinger/plate families require a = identity");
      spec.alpha = MultiPoly(nv);
      spec.beta = MultiPoly::constant(nv, 1.0);
      spec.psi_gauge = gauge_neg_laplacian(base.ell, base.m);
      break;
    case OperatorFamily::schrodinger_p: {
      if (p == nullptr) throw std::invalid_argument("preset: schrodinger_p needs the multiplier p");
      if (p->num_vars() != nv) throw std::invalid_argument("preset: p has wrong variable count");
      if (!p->diff(0).is_zero())
        throw std::invalid_argument("preset: p must depend on x only");
      if (!is_identity_matrix(base.a, nv))
        throw std::invalid_argument("preset: schrodinger/plate families require a = identity");
      spec.alpha = MultiPoly(nv);
      spec.beta = *p;
      spec.psi_gauge = gauge_neg_laplacian(base.ell, base.m);
      break;
    }
  }
  spec.validate();
  return spec;
}

// ---------------------------------------------------------------------------
// Finite-difference path.
// ---------------------------------------------------------------------------

FnField::FnField(int num_vars, double h, Fn f) : num_vars_(num_vars), h_(h), f_(std::move(f)) {}

FnField FnField::diff(int var) const {
  if (var < 0 || var >= num_vars_) throw std::out_of_range("FnField::diff: index out of range");
  Fn f = f_;
  double h = h_;
  return FnField(num_vars_, h_, [f, var, h](std::span<const double> pt) {
    std::vector<double> q(pt.begin(), pt.end());
    q[static_cast<size_t>(var)] += h;
    Complex fp = f(q);
    q[static_cast<size_t>(var)] -= 2.0 * h;
    Complex fm = f(q);
    return (fp - fm) / (2.0 * h);
  });
}

FnField FnField::conjugated() const {
  Fn f = f_;
  return FnField(num_vars_, h_, [f](std::span<const double> pt) { return std::conj(f(pt)); });
}

FnField operator+(const FnField& a, const FnField& b) {
  auto fa = a.f_, fb = b.f_;
  return FnField(a.num_vars_, a.h_,
                 [fa, fb](std::span<const double> pt) { return fa(pt) + fb(pt); });
}

FnField operator-(const FnField& a, const FnField& b) {
  auto fa = a.f_, fb = b.f_;
  return FnField(a.num_vars_, a.h_,
                 [fa, fb](std::span<const double> pt) { return fa(pt) - fb(pt); });
}

FnField operator*(const FnField& a, const FnField& b) {
  auto fa = a.f_, fb = b.f_;
  return FnField(a.num_vars_, a.h_,
                 [fa, fb](std::span<const double> pt) { return fa(pt) * fb(pt); });
}

FnField operator*(const FnField& a, Complex c) {
  auto fa = a.f_;
  return FnField(a.num_vars_, a.h_, [fa, c](std::span<const double> pt) { return c * fa(pt); });
}

FnField field_constant(const FnField& like, Complex c) {
  return FnField(like.num_vars(), 1e-3, [c](std::span<const double>) { return c; });
}

ResidualResult fd_identity_residual(const FdFieldSet& fields, std::span<const double> point) {
  const int nv = fields.m + 1;
  auto wrap = [&](const std::function<double(std::span<const double>)>& f) {
    return FnField(nv, fields.h,
                   [f](std::span<const double> pt) { return Complex(f(pt), 0.0); });
  };
  OpData<FnField> data{fields.m, wrap(fields.alpha), wrap(fields.beta), {}, wrap(fields.Psi),
                       wrap(fields.ell)};
  data.a.resize(static_cast<size_t>(fields.m));
  for (int j = 0; j < fields.m; ++j)
    for (int k = 0; k < fields.m; ++k)
      data.a[static_cast<size_t>(j)].push_back(wrap(fields.a[static_cast<size_t>(j)][static_cast<size_t>(k)]));
  FnField v(nv, fields.h, fields.v);

  PartsT<FnField> p = assemble_parts_t(data, v);
  FnField rhs_rest = assemble_rhs_rest(data, p, v);
  FnField div = assemble_divergence(p);

  Complex Pt = p.Ptheta.eval(point);
  Complex i1 = p.I1.eval(point);
  Complex l1 = Pt * std::conj(i1) + std::conj(Pt) * i1;
  Complex l23 = div.eval(point);
  Complex r1 = 2.0 * std::norm(i1);
  Complex rr = rhs_rest.eval(point);

  ResidualResult out;
  out.residual = std::abs(l1 + l23 - r1 - rr);
  out.scale = std::max({kTiny, std::abs(l1), std::abs(l23), std::abs(r1), std::abs(rr)});
  return out;
}

}  // namespace glc
