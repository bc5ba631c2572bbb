#include "glc/multipoly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace glc {

namespace {
// any byte >= 128 set: product keys could carry into the next variable
constexpr std::uint64_t kHighBits = 0x8080808080808080ULL;
}  // namespace

MultiPoly::MultiPoly(int num_vars) : num_vars_(num_vars) {
  if (num_vars < 1 || num_vars > kMaxVars)
    throw std::invalid_argument("MultiPoly: num_vars must be in [1, 8]");
}

MultiPoly MultiPoly::constant(int num_vars, Complex c) {
  MultiPoly p(num_vars);
  p.insert(0, c);
  return p;
}

MultiPoly MultiPoly::variable(int num_vars, int var) {
  if (var < 0 || var >= num_vars) throw std::out_of_range("MultiPoly::variable: index out of range");
  MultiPoly p(num_vars);
  p.insert(std::uint64_t{1} << shift_for(var), Complex(1.0, 0.0));
  return p;
}

std::uint64_t MultiPoly::pack(const Monomial& expo) const {
  if (static_cast<int>(expo.size()) != num_vars_)
    throw std::invalid_argument("MultiPoly: exponent tuple length mismatch");
  std::uint64_t key = 0;
  for (int v = 0; v < num_vars_; ++v) {
    int e = expo[static_cast<size_t>(v)];
    if (e < 0 || e > kMaxExp)
      throw std::invalid_argument("MultiPoly: exponent out of the supported range [0, 127]");
    key |= static_cast<std::uint64_t>(e) << shift_for(v);
  }
  return key;
}

int MultiPoly::total_degree() const {
  int deg = 0;
  for (const auto& [key, c] : terms_) {
    int d = 0;
    for (int v = 0; v < num_vars_; ++v)
      d += static_cast<int>((key >> shift_for(v)) & 0xFF);
    deg = std::max(deg, d);
  }
  return deg;
}

std::map<MultiPoly::Monomial, Complex> MultiPoly::terms() const {
  std::map<Monomial, Complex> out;
  for (const auto& [key, c] : terms_) {
    Monomial m(static_cast<size_t>(num_vars_));
    for (int v = 0; v < num_vars_; ++v)
      m[static_cast<size_t>(v)] = static_cast<int>((key >> shift_for(v)) & 0xFF);
    out.emplace(std::move(m), c);
  }
  return out;
}

void MultiPoly::insert(std::uint64_t key, Complex coeff) {
  auto it = terms_.find(key);
  if (it == terms_.end()) {
    if (std::abs(coeff) >= kPruneTol) terms_.emplace(key, coeff);
  } else {
    it->second += coeff;
    if (std::abs(it->second) < kPruneTol) terms_.erase(it);
  }
}

void MultiPoly::add_term(const Monomial& expo, Complex coeff) { insert(pack(expo), coeff); }

MultiPoly& MultiPoly::operator+=(const MultiPoly& rhs) {
  if (rhs.num_vars_ != num_vars_)
    throw std::invalid_argument("MultiPoly: variable-count mismatch in add");
  for (const auto& [key, c] : rhs.terms_) insert(key, c);
  return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& rhs) {
  if (rhs.num_vars_ != num_vars_)
    throw std::invalid_argument("MultiPoly: variable-count mismatch in sub");
  for (const auto& [key, c] : rhs.terms_) insert(key, -c);
  return *this;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
  if (a.num_vars_ != b.num_vars_)
    throw std::invalid_argument("MultiPoly: variable-count mismatch in mul");
  MultiPoly out(a.num_vars_);
  for (const auto& [ka, ca] : a.terms_) {
    if (ka & kHighBits)
      throw std::overflow_error("MultiPoly: degree too large for packed product");
    for (const auto& [kb, cb] : b.terms_) {
      if (kb & kHighBits)
        throw std::overflow_error("MultiPoly: degree too large for packed product");
      out.insert(ka + kb, ca * cb);
    }
  }
  return out;
}

MultiPoly& MultiPoly::operator*=(const MultiPoly& rhs) {
  *this = *this * rhs;
  return *this;
}

MultiPoly& MultiPoly::operator*=(Complex c) {
  if (c == Complex(0.0, 0.0)) {
    terms_.clear();
    return *this;
  }
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= c;
    if (std::abs(it->second) < kPruneTol)
      it = terms_.erase(it);
    else
      ++it;
  }
  return *this;
}

MultiPoly MultiPoly::diff(int var) const {
  if (var < 0 || var >= num_vars_) throw std::out_of_range("MultiPoly::diff: index out of range");
  MultiPoly out(num_vars_);
  const int sh = shift_for(var);
  for (const auto& [key, c] : terms_) {
    int k = static_cast<int>((key >> sh) & 0xFF);
    if (k == 0) continue;
    out.insert(key - (std::uint64_t{1} << sh), c * static_cast<double>(k));
  }
  return out;
}

MultiPoly MultiPoly::conjugated() const {
  MultiPoly out(num_vars_);
  for (const auto& [key, c] : terms_) out.terms_.emplace(key, std::conj(c));
  return out;
}

Complex MultiPoly::eval(std::span<const double> point) const {
  if (static_cast<int>(point.size()) != num_vars_)
    throw std::invalid_argument("MultiPoly::eval: point length mismatch");
  // Powers are built by repeated multiplication per variable (Horner-style
  // factor reuse), so the same monomial always evaluates the same way.
  int max_deg = 0;
  for (const auto& [key, c] : terms_)
    for (int v = 0; v < num_vars_; ++v)
      max_deg = std::max(max_deg, static_cast<int>((key >> shift_for(v)) & 0xFF));
  std::vector<double> pow_table(static_cast<size_t>(num_vars_) * (static_cast<size_t>(max_deg) + 1));
  for (int v = 0; v < num_vars_; ++v) {
    double* row = &pow_table[static_cast<size_t>(v) * (static_cast<size_t>(max_deg) + 1)];
    row[0] = 1.0;
    for (int k = 1; k <= max_deg; ++k) row[k] = row[k - 1] * point[static_cast<size_t>(v)];
  }
  Complex acc(0.0, 0.0);
  for (const auto& [key, c] : terms_) {
    double mono = 1.0;
    for (int v = 0; v < num_vars_; ++v)
      mono *= pow_table[static_cast<size_t>(v) * (static_cast<size_t>(max_deg) + 1) +
                        ((key >> shift_for(v)) & 0xFF)];
    acc += c * mono;
  }
  return acc;
}

double MultiPoly::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& [key, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

MultiPoly poly_combine(const MultiPoly& p, const MultiPoly& q, PolyOp op) {
  switch (op) {
    case PolyOp::add: return p + q;
    case PolyOp::mul: return p * q;
  }
  throw std::invalid_argument("poly_combine: unknown op");
}

MultiPoly poly_scale(const MultiPoly& p, Complex c) {
  MultiPoly out = p;
  out *= c;
  return out;
}

MultiPoly poly_diff(const MultiPoly& p, int var) { return p.diff(var); }

Complex poly_eval(const MultiPoly& p, std::span<const double> point) { return p.eval(point); }

}  // namespace glc
