#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "glc/identity.hpp"
#include "glc/rng.hpp"
#include "glc/weights.hpp"

using glc::Complex;
using glc::IdentityParts;
using glc::MultiPoly;
using glc::OperatorFamily;
using glc::OperatorSpec;
using glc::PresetBase;

namespace {

MultiPoly var(int nv, int i) { return MultiPoly::variable(nv, i); }
MultiPoly cst(int nv, Complex c) { return MultiPoly::constant(nv, c); }

OperatorSpec spec_1d(MultiPoly alpha, MultiPoly beta, MultiPoly a11, MultiPoly psi, MultiPoly ell,
                     double s0 = 0.0) {
  OperatorSpec s;
  s.m = 1;
  s.alpha = std::move(alpha);
  s.beta = std::move(beta);
  s.a = {{std::move(a11)}};
  s.psi_gauge = std::move(psi);
  s.ell = std::move(ell);
  s.s0 = s0;
  return s;
}

double poly_dist(const MultiPoly& p, const MultiPoly& q) {
  MultiPoly d = p;
  d -= q;
  return d.max_abs_coeff();
}

}  // namespace

TEST_CASE("A vanishes when ell and Psi vanish") {
  OperatorSpec s = spec_1d(cst(2, 1.0), cst(2, 0.0), cst(2, 1.0), MultiPoly(2), MultiPoly(2));
  IdentityParts p = assemble_parts(s, var(2, 1));
  CHECK(p.A.is_zero());
}

TEST_CASE("A = t^2 for a = 1, ell = t x, Psi = 0") {
  MultiPoly ell = var(2, 0) * var(2, 1);
  OperatorSpec s = spec_1d(cst(2, 1.0), cst(2, 0.0), cst(2, 1.0), MultiPoly(2), ell);
  IdentityParts p = assemble_parts(s, var(2, 1));
  MultiPoly want = var(2, 0) * var(2, 0);
  CHECK(poly_dist(p.A, want) <= 1e-15);
}

TEST_CASE("corollary gauge turns A into sum a l l + sum (a l_j)_k") {
  glc::Rng rng(3);
  MultiPoly a11 = glc::random_poly(2, 2, false, rng);
  MultiPoly ell = glc::random_poly(2, 2, false, rng);
  MultiPoly gauge = glc::gauge_parabolic({{a11}}, ell);
  OperatorSpec s = spec_1d(cst(2, 1.0), cst(2, 0.0), a11, gauge, ell);
  IdentityParts p = assemble_parts(s, var(2, 1));
  MultiPoly lx = ell.diff(1);
  MultiPoly want = a11 * lx * lx + (a11 * lx).diff(1);
  CHECK(poly_dist(p.A, want) <= 1e-13 * (1.0 + want.max_abs_coeff()));
}

TEST_CASE("gauge reduction: Psi = -sum (a l_j)_k gives A = sum a l l exactly") {
  glc::Rng rng(17);
  for (int m : {1, 2}) {
    glc::RandomIdentityConfig rc = glc::random_identity_config(m, rng);
    MultiPoly gauge(m + 1);
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        gauge -= (rc.spec.a[static_cast<size_t>(j)][static_cast<size_t>(k)] *
                  rc.spec.ell.diff(j + 1))
                     .diff(k + 1);
    rc.spec.psi_gauge = gauge;
    IdentityParts p = assemble_parts(rc.spec, rc.v);
    MultiPoly want(m + 1);
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        want += rc.spec.a[static_cast<size_t>(j)][static_cast<size_t>(k)] *
                rc.spec.ell.diff(j + 1) * rc.spec.ell.diff(k + 1);
    CHECK(poly_dist(p.A, want) <= 1e-12 * (1.0 + want.max_abs_coeff()));
  }
}

TEST_CASE("factorization: zero input gives zero residual") {
  OperatorSpec s = spec_1d(cst(2, 1.0), cst(2, 1.0), cst(2, 1.0), var(2, 1),
                           0.1 * (var(2, 0) * var(2, 1)));
  glc::Rng rng(1);
  auto pts = glc::sample_points(2, 10, rng);
  glc::ResidualResult r = glc::check_factorization(s, MultiPoly(2), pts);
  CHECK(r.residual == 0.0);
}

TEST_CASE("factorization residual on the pinned 1D configuration") {
  // alpha = beta = 1, a = 1, ell = 0.1 t x, Psi = x, z = x + i x^2
  MultiPoly z = var(2, 1) + Complex(0, 1) * (var(2, 1) * var(2, 1));
  OperatorSpec s = spec_1d(cst(2, 1.0), cst(2, 1.0), cst(2, 1.0), var(2, 1),
                           0.1 * (var(2, 0) * var(2, 1)));
  glc::Rng rng(50);
  auto pts = glc::sample_points(2, 50, rng);
  glc::ResidualResult r = glc::check_factorization(s, z, pts);
  CHECK(r.residual <= 1e-12 * r.scale);
}

TEST_CASE("factorization residual in 2D with variable coefficients") {
  const int nv = 3;
  glc::Rng rng(8);
  MultiPoly x2 = var(nv, 2);
  OperatorSpec s;
  s.m = 2;
  s.alpha = cst(nv, 1.0);
  s.beta = cst(nv, 0.5);
  s.a = {{cst(nv, 1.0) + x2 * x2, cst(nv, 0.3)}, {cst(nv, 0.3), cst(nv, 2.0)}};
  s.psi_gauge = glc::random_poly(nv, 2, false, rng);
  s.ell = glc::random_poly(nv, 2, false, rng);
  MultiPoly z = glc::random_poly(nv, 2, true, rng);
  auto pts = glc::sample_points(nv, 30, rng);
  glc::ResidualResult r = glc::check_factorization(s, z, pts);
  CHECK(r.residual <= 1e-11 * r.scale);
}

TEST_CASE("identity: constant z with frozen coefficients gives zero") {
  OperatorSpec s = spec_1d(cst(2, 1.0), cst(2, 2.0), cst(2, 1.5), MultiPoly(2), MultiPoly(2));
  glc::Rng rng(9);
  auto pts = glc::sample_points(2, 10, rng);
  glc::ResidualResult r = glc::check_identity(s, cst(2, Complex(0.7, -0.2)), pts);
  CHECK(r.residual <= 1e-14 * r.scale);
}

TEST_CASE("identity residual on the pinned 1D configuration") {
  MultiPoly z = var(2, 1) + Complex(0, 1) * (var(2, 1) * var(2, 1));
  OperatorSpec s = spec_1d(cst(2, 1.0), cst(2, 1.0), cst(2, 1.0), var(2, 1),
                           0.1 * (var(2, 0) * var(2, 1)));
  glc::Rng rng(51);
  auto pts = glc::sample_points(2, 50, rng);
  glc::ResidualResult r = glc::check_identity(s, z, pts);
  CHECK(r.residual <= 1e-11 * r.scale);
}

TEST_CASE("identity residual for the hyperbolic preset") {
  // alpha = beta = 0, time-independent a, z = t^2 + x^2
  PresetBase base;
  base.m = 1;
  base.a = {{cst(2, 1.0) + 0.3 * (var(2, 1) * var(2, 1))}};
  base.ell = 0.4 * (var(2, 0) * var(2, 1)) + 0.2 * (var(2, 1) * var(2, 1));
  OperatorSpec s = preset(OperatorFamily::hyperbolic, base);
  MultiPoly z = var(2, 0) * var(2, 0) + var(2, 1) * var(2, 1);
  glc::Rng rng(52);
  auto pts = glc::sample_points(2, 30, rng);
  glc::ResidualResult r = glc::check_identity(s, z, pts);
  CHECK(r.residual <= 1e-11 * r.scale);
}

TEST_CASE("identity and factorization residuals over a random ensemble") {
  glc::Rng rng(12345);
  for (int cfg = 0; cfg < 30; ++cfg) {
    int m = 1 + cfg % 3;
    glc::RandomIdentityConfig rc = glc::random_identity_config(m, rng);
    auto pts = glc::sample_points(m + 1, 20, rng);
    glc::ResidualResult rid = glc::check_identity(rc.spec, rc.v, pts);
    CHECK(rid.residual <= 1e-9 * rid.scale);
    glc::ResidualResult rf = glc::check_factorization(rc.spec, rc.v, pts);
    CHECK(rf.residual <= 1e-10 * rf.scale);
  }
}

TEST_CASE("symmetry of a is enforced exactly") {
  OperatorSpec s;
  s.m = 2;
  const int nv = 3;
  s.alpha = cst(nv, 1.0);
  s.beta = cst(nv, 0.0);
  s.a = {{cst(nv, 1.0), cst(nv, 0.3)}, {cst(nv, 0.30000001), cst(nv, 1.0)}};
  s.psi_gauge = MultiPoly(nv);
  s.ell = MultiPoly(nv);
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("sampled ellipticity is enforced when s0 > 0") {
  OperatorSpec s = spec_1d(cst(2, 1.0), cst(2, 0.0), 0.25 * cst(2, 1.0), MultiPoly(2),
                           MultiPoly(2), 0.5);
  CHECK_THROWS_AS(s.validate(), std::runtime_error);
  s.a[0][0] = cst(2, 0.75);
  s.s0 = 0.5;
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("parabolic pointwise estimate: slack equals |I1|^2 + |I2|^2") {
  glc::Rng rng(77);
  for (int cfg = 0; cfg < 6; ++cfg) {
    int m = 1 + cfg % 3;
    double b = (cfg % 2 == 0) ? 0.0 : 2.0;
    glc::RandomIdentityConfig rc = glc::random_identity_config(m, rng);
    rc.spec.alpha = cst(m + 1, 1.0);
    rc.spec.beta = cst(m + 1, b);
    rc.spec.psi_gauge = glc::gauge_parabolic(rc.spec.a, rc.spec.ell);
    IdentityParts parts = assemble_parts(rc.spec, rc.v);
    auto pts = glc::sample_points(m + 1, 5, rng);
    for (const auto& pt : pts) {
      std::vector<std::vector<double>> one{pt};
      glc::SlackResult sr = glc::parabolic_pointwise_check(b, rc.spec, rc.v, one);
      double oracle = std::norm(parts.I1.eval(pt)) + std::norm(parts.I2.eval(pt));
      CHECK(sr.min_slack == doctest::Approx(oracle).epsilon(1e-8));
      CHECK(sr.min_slack >= -1e-10 * sr.scale);
    }
  }
}

TEST_CASE("parabolic pointwise estimate on the pinned configurations") {
  MultiPoly ell = var(2, 0) * var(2, 1);
  MultiPoly z = var(2, 1) * var(2, 1);
  glc::Rng rng(101);
  auto pts = glc::sample_points(2, 100, rng);
  for (double b : {0.0, 2.0}) {
    OperatorSpec s = spec_1d(cst(2, 1.0), cst(2, b), cst(2, 1.0),
                             glc::gauge_parabolic({{cst(2, 1.0)}}, ell), ell, 1.0);
    glc::SlackResult sr = glc::parabolic_pointwise_check(b, s, z, pts);
    CHECK(sr.min_slack >= -1e-10 * sr.scale);
  }
  // zero input: slack identically zero
  OperatorSpec s = spec_1d(cst(2, 1.0), cst(2, 0.0), cst(2, 1.0),
                           glc::gauge_parabolic({{cst(2, 1.0)}}, ell), ell, 1.0);
  glc::SlackResult sr = glc::parabolic_pointwise_check(0.0, s, MultiPoly(2), pts);
  CHECK(sr.min_slack == 0.0);
}

TEST_CASE("gauge mismatch is rejected") {
  MultiPoly ell = var(2, 0) * var(2, 1);
  OperatorSpec s = spec_1d(cst(2, 1.0), cst(2, 0.0), cst(2, 1.0), var(2, 1), ell, 1.0);
  glc::Rng rng(5);
  auto pts = glc::sample_points(2, 3, rng);
  CHECK_THROWS_WITH_AS((void)glc::parabolic_pointwise_check(0.0, s, var(2, 1), pts),
                       doctest::Contains("gauge mismatch"), std::invalid_argument);
}

TEST_CASE("modified estimate slack matches its exact decomposition") {
  // slack = |I1|^2 + |I2|^2 + |(1-ib) theta Gz + i b W v|^2 / (1+b^2)
  //         + (W/(1+b^2)) sum a^{jk} w_j conj(w_k),  w_j = v_j + 2 i b l_j v,
  // with W = sum (a^{jk} l_j)_k. Verified on unconstrained random data, where
  // W changes sign, so this pins every term of the assembled V~, c^{jk}, B~.
  glc::Rng rng(404);
  for (int cfg = 0; cfg < 6; ++cfg) {
    int m = 1 + cfg % 2;
    double b = (cfg % 3 == 0) ? 0.0 : (cfg % 3 == 1 ? 0.5 : 2.0);
    glc::RandomIdentityConfig rc = glc::random_identity_config(m, rng);
    const int nv = m + 1;
    rc.spec.alpha = cst(nv, 1.0);
    rc.spec.beta = cst(nv, b);
    // make a elliptic enough for the check's s0 precondition: damp the random
    // off-diagonal entries and push the diagonal up
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        if (j != k) rc.spec.a[static_cast<size_t>(j)][static_cast<size_t>(k)] *= Complex(0.15, 0.0);
        else rc.spec.a[static_cast<size_t>(j)][static_cast<size_t>(k)] += cst(nv, 5.0);
      }
    rc.spec.s0 = 0.5;
    rc.spec.psi_gauge = glc::gauge_parabolic(rc.spec.a, rc.spec.ell);
    IdentityParts parts = assemble_parts(rc.spec, rc.v);

    MultiPoly W(nv);
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        W += (rc.spec.a[static_cast<size_t>(j)][static_cast<size_t>(k)] * rc.spec.ell.diff(j + 1))
                 .diff(k + 1);

    auto pts = glc::sample_points(nv, 5, rng);
    for (const auto& pt : pts) {
      std::vector<std::vector<double>> one{pt};
      glc::SlackResult sr = glc::modified_pointwise_check(b, rc.spec, rc.v, one);
      Complex i1 = parts.I1.eval(pt), i2 = parts.I2.eval(pt), P = parts.Ptheta.eval(pt);
      Complex vv = rc.v.eval(pt);
      double Wv = W.eval(pt).real();
      double oracle = std::norm(i1) + std::norm(i2);
      oracle += std::norm(Complex(1.0, -b) * P + Complex(0.0, b) * Wv * vv) / (1.0 + b * b);
      Complex q(0.0, 0.0);
      for (int j = 0; j < m; ++j) {
        Complex wj = rc.v.diff(j + 1).eval(pt) +
                     Complex(0.0, 2.0 * b) * rc.spec.ell.diff(j + 1).eval(pt) * vv;
        for (int k = 0; k < m; ++k) {
          Complex wk = rc.v.diff(k + 1).eval(pt) +
                       Complex(0.0, 2.0 * b) * rc.spec.ell.diff(k + 1).eval(pt) * vv;
          q += rc.spec.a[static_cast<size_t>(j)][static_cast<size_t>(k)].eval(pt) * wj *
               std::conj(wk);
        }
      }
      oracle += Wv / (1.0 + b * b) * q.real();
      CHECK(sr.min_slack == doctest::Approx(oracle).epsilon(1e-7));
    }
  }
}

TEST_CASE("modified estimate slack is nonnegative on the signed ensemble") {
  glc::Rng rng(505);
  for (int cfg = 0; cfg < 10; ++cfg) {
    int m = 1 + cfg % 3;
    double b = (cfg % 3 == 0) ? 0.0 : (cfg % 3 == 1 ? 0.5 : 2.0);
    glc::RandomIdentityConfig rc = glc::random_parabolic_config(m, b, rng);
    auto pts = glc::sample_points(m + 1, 40, rng);
    glc::SlackResult sr = glc::modified_pointwise_check(b, rc.spec, rc.v, pts);
    CHECK(sr.min_slack >= -1e-10 * sr.scale);
    glc::SlackResult sp = glc::parabolic_pointwise_check(b, rc.spec, rc.v, pts);
    CHECK(sp.min_slack >= -1e-10 * sp.scale);
  }
}

TEST_CASE("modified estimate pinned example and the b = 0 collapse") {
  MultiPoly ell = 0.2 * (var(2, 0) * var(2, 1));
  MultiPoly z = (var(2, 1) - var(2, 1) * var(2, 1)) * cst(2, Complex(1.0, 1.0));
  OperatorSpec s = spec_1d(cst(2, 1.0), cst(2, 1.0), cst(2, 1.0),
                           glc::gauge_parabolic({{cst(2, 1.0)}}, ell), ell, 1.0);
  glc::Rng rng(33);
  auto pts = glc::sample_points(2, 100, rng);
  glc::SlackResult sr = glc::modified_pointwise_check(1.0, s, z, pts);
  CHECK(sr.min_slack >= -1e-10 * sr.scale);

  // zero input gives zero slack
  glc::SlackResult s0 = glc::modified_pointwise_check(1.0, s, MultiPoly(2), pts);
  CHECK(s0.min_slack == 0.0);

  // b = 0: every correction to V is the zero polynomial
  OperatorSpec sb0 = spec_1d(cst(2, 1.0), cst(2, 0.0), cst(2, 1.0),
                             glc::gauge_parabolic({{cst(2, 1.0)}}, ell), ell, 1.0);
  IdentityParts parts = assemble_parts(sb0, z);
  assemble_modified_parts(sb0, 0.0, z, parts);
  REQUIRE(parts.has_modified);
  CHECK(poly_dist(parts.V_tilde[0], parts.V[0]) <= 1e-14);

  // s0 = 0 is refused
  OperatorSpec degenerate = spec_1d(cst(2, 1.0), cst(2, 1.0), cst(2, 1.0),
                                    glc::gauge_parabolic({{cst(2, 1.0)}}, ell), ell, 0.0);
  CHECK_THROWS_AS((void)glc::modified_pointwise_check(1.0, degenerate, z, pts),
                  std::invalid_argument);
}

TEST_CASE("presets populate the families of Remarks 2.3-2.6") {
  PresetBase base;
  base.m = 1;
  base.a = {{cst(2, 1.0)}};
  base.ell = var(2, 0) * var(2, 1);

  OperatorSpec par = preset(OperatorFamily::parabolic, base);
  CHECK(poly_dist(par.alpha, cst(2, 1.0)) == 0.0);
  CHECK(par.beta.is_zero());
  CHECK(par.psi_gauge.is_zero());  // -2 (1 * t)_x = 0

  OperatorSpec sch = preset(OperatorFamily::schrodinger, base);
  CHECK(sch.alpha.is_zero());
  CHECK(poly_dist(sch.beta, cst(2, 1.0)) == 0.0);
  CHECK(poly_dist(sch.psi_gauge, glc::gauge_neg_laplacian(base.ell, 1)) == 0.0);

  MultiPoly p = cst(2, 2.0) + var(2, 1);
  OperatorSpec schp = preset(OperatorFamily::schrodinger_p, base, 0.0, &p);
  CHECK(poly_dist(schp.beta, p) == 0.0);

  // plate = schrodinger with identity a; non-identity a is rejected
  PresetBase bad = base;
  bad.a = {{cst(2, 2.0)}};
  CHECK_THROWS_AS((void)preset(OperatorFamily::plate, bad), std::invalid_argument);
  // time-dependent a is rejected for the hyperbolic family
  PresetBase tdep = base;
  tdep.a = {{var(2, 0)}};
  CHECK_THROWS_AS((void)preset(OperatorFamily::hyperbolic, tdep), std::invalid_argument);
}

TEST_CASE("finite-difference verifier shows O(h^2) residual on smooth fields") {
  // Non-polynomial data: trigonometric coefficients and the Schrodinger-family
  // weight of Remark 2.6 through its closed-form evaluator.
  glc::DomainSpec dom = glc::make_domain_1d(0.0, 1.0, 1.0, 0.3, 0.7, 0.4, 0.6);
  auto sw = glc::SchrodingerWeight::make(0.8, 1.0, 0.5, {1.7}, 0.2, dom);

  auto make_fields = [&](double h) {
    glc::FdFieldSet f;
    f.m = 1;
    f.h = h;
    f.alpha = [](std::span<const double>) { return 0.0; };
    f.beta = [](std::span<const double> p) { return 2.0 + std::sin(p[1]); };
    f.a = {{[](std::span<const double>) { return 1.0; }}};
    f.ell = [sw](std::span<const double> p) {
      return sw.ell(p[0], std::span<const double>(p.data() + 1, 1));
    };
    // Psi = -laplace ell, in closed form
    f.Psi = [sw](std::span<const double> p) {
      double h2;
      sw.ell_hess(p[0], std::span<const double>(p.data() + 1, 1), std::span<double>(&h2, 1));
      return -h2;
    };
    f.v = [](std::span<const double> p) {
      return Complex(std::sin(2.0 * p[0] + p[1]), std::cos(p[0] - p[1]));
    };
    return f;
  };

  std::vector<double> pt = {0.45, 0.55};
  double r1 = glc::fd_identity_residual(make_fields(4e-3), pt).residual;
  double r2 = glc::fd_identity_residual(make_fields(2e-3), pt).residual;
  double ratio = r1 / r2;
  CHECK(ratio > 2.5);
  CHECK(ratio < 6.0);
}
