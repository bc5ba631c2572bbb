#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "glc/multipoly.hpp"
#include "glc/rng.hpp"

using glc::Complex;
using glc::MultiPoly;
using glc::PolyOp;

namespace {

// random polynomial with dyadic coefficients, exact in double arithmetic
MultiPoly random_dyadic_poly(int num_vars, int deg, glc::Rng& rng) {
  MultiPoly p(num_vars);
  MultiPoly::Monomial mono(static_cast<size_t>(num_vars), 0);
  std::function<void(int, int)> walk = [&](int var, int budget) {
    if (var == num_vars) {
      double re = static_cast<double>(static_cast<int>(rng.uniform_int(17)) - 8) / 8.0;
      double im = static_cast<double>(static_cast<int>(rng.uniform_int(17)) - 8) / 8.0;
      p.add_term(mono, Complex(re, im));
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

std::vector<double> random_dyadic_point(int num_vars, glc::Rng& rng) {
  std::vector<double> pt(static_cast<size_t>(num_vars));
  for (auto& c : pt) c = static_cast<double>(static_cast<int>(rng.uniform_int(17)) - 8) / 8.0;
  return pt;
}

}  // namespace

TEST_CASE("monomial product") {
  // (x^2) * x = x^3 over (t, x)
  MultiPoly x = MultiPoly::variable(2, 1);
  MultiPoly x2 = x * x;
  MultiPoly x3 = poly_combine(x2, x, PolyOp::mul);
  MultiPoly want(2);
  want.add_term({0, 3}, 1.0);
  CHECK(x3 == want);
}

TEST_CASE("additive inverse gives the zero polynomial") {
  glc::Rng rng(11);
  MultiPoly p = random_dyadic_poly(3, 3, rng);
  MultiPoly z = poly_combine(p, glc::poly_scale(p, Complex(-1.0, 0.0)), PolyOp::add);
  CHECK(z.is_zero());
}

TEST_CASE("conjugate pair product (x + it)(x - it) = x^2 + t^2") {
  MultiPoly t = MultiPoly::variable(2, 0);
  MultiPoly x = MultiPoly::variable(2, 1);
  MultiPoly prod = (x + Complex(0, 1) * t) * (x - Complex(0, 1) * t);
  MultiPoly want(2);
  want.add_term({2, 0}, 1.0);
  want.add_term({0, 2}, 1.0);
  CHECK(prod == want);
}

TEST_CASE("variable-count mismatch is rejected") {
  MultiPoly p(2), q(3);
  CHECK_THROWS_AS((void)poly_combine(p, q, PolyOp::add), std::invalid_argument);
  CHECK_THROWS_AS((void)poly_combine(p, q, PolyOp::mul), std::invalid_argument);
}

TEST_CASE("differentiation basics") {
  // d/dx (x^2 t) = 2 x t, d/dt (x^2) = 0, mixed partials of x t commute
  MultiPoly t = MultiPoly::variable(2, 0);
  MultiPoly x = MultiPoly::variable(2, 1);
  MultiPoly p = x * x * t;
  MultiPoly want = Complex(2.0, 0.0) * x * t;
  CHECK(glc::poly_diff(p, 1) == want);
  CHECK(glc::poly_diff(x * x, 0).is_zero());
  MultiPoly xt = x * t;
  CHECK(xt.diff(0).diff(1) == xt.diff(1).diff(0));
  CHECK(xt.diff(0).diff(1) == MultiPoly::constant(2, 1.0));
  CHECK_THROWS_AS((void)p.diff(2), std::out_of_range);
}

TEST_CASE("evaluation examples") {
  MultiPoly t = MultiPoly::variable(2, 0);
  MultiPoly x = MultiPoly::variable(2, 1);
  MultiPoly p = x * x + Complex(0, 1) * t;
  std::vector<double> pt = {3.0, 2.0};
  CHECK(glc::poly_eval(p, pt) == Complex(4.0, 3.0));
  CHECK(MultiPoly(2).eval(pt) == Complex(0.0, 0.0));
  // (x + it)(x - it) at (1, 2) equals |2 + i|^2 = 5
  MultiPoly prod = (x + Complex(0, 1) * t) * (x - Complex(0, 1) * t);
  std::vector<double> pt2 = {1.0, 2.0};
  CHECK(prod.eval(pt2) == Complex(5.0, 0.0));
  CHECK_THROWS_AS((void)p.eval(std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("eval is multiplicative on random polynomials at 100 rational points") {
  glc::Rng rng(2026);
  for (int rep = 0; rep < 5; ++rep) {
    MultiPoly p = random_dyadic_poly(3, 4, rng);
    MultiPoly q = random_dyadic_poly(3, 4, rng);
    MultiPoly pq = p * q;
    for (int i = 0; i < 20; ++i) {
      auto pt = random_dyadic_point(3, rng);
      Complex lhs = pq.eval(pt);
      Complex rhs = p.eval(pt) * q.eval(pt);
      CHECK(std::abs(lhs - rhs) <= 1e-13 * (1.0 + std::abs(lhs)));
    }
  }
}

TEST_CASE("Leibniz rule holds exactly") {
  glc::Rng rng(7);
  for (int rep = 0; rep < 10; ++rep) {
    MultiPoly p = random_dyadic_poly(3, 3, rng);
    MultiPoly q = random_dyadic_poly(3, 3, rng);
    for (int var = 0; var < 3; ++var) {
      MultiPoly lhs = (p * q).diff(var);
      MultiPoly rhs = p.diff(var) * q + p * q.diff(var);
      MultiPoly d = lhs - rhs;
      CHECK(d.max_abs_coeff() <= 1e-14 * (1.0 + lhs.max_abs_coeff()));
    }
  }
}

TEST_CASE("mixed partials commute for random polynomials") {
  glc::Rng rng(13);
  for (int rep = 0; rep < 10; ++rep) {
    MultiPoly p = random_dyadic_poly(4, 5, rng);
    for (int v1 = 0; v1 < 4; ++v1)
      for (int v2 = v1 + 1; v2 < 4; ++v2) CHECK(p.diff(v1).diff(v2) == p.diff(v2).diff(v1));
  }
}

TEST_CASE("conjugation matches pointwise conjugate") {
  glc::Rng rng(5);
  MultiPoly p = random_dyadic_poly(3, 4, rng);
  MultiPoly pc = p.conjugated();
  for (int i = 0; i < 10; ++i) {
    auto pt = random_dyadic_point(3, rng);
    CHECK(pc.eval(pt) == std::conj(p.eval(pt)));
  }
}
