#pragma once

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include "juliatwin/scalar.hpp"

namespace juliatwin {

/// Degree reported for the zero polynomial.
inline constexpr int kZeroDegree = -1;

/// Dense univariate polynomial; coeffs()[k] multiplies z^k.
/// The coefficient vector never ends in an (exact) zero.
template <FieldScalar S>
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<S> coeffs) : c_(std::move(coeffs)) { trim(); }
  Poly(std::initializer_list<S> coeffs) : c_(coeffs) { trim(); }

  static Poly constant(S v) { return Poly(std::vector<S>{std::move(v)}); }
  static Poly monomial(S v, int k) {
    std::vector<S> c(static_cast<std::size_t>(k) + 1, S(0));
    c.back() = std::move(v);
    return Poly(std::move(c));
  }
  static Poly identity() { return monomial(S(1), 1); }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<S>& coeffs() const { return c_; }
  std::size_t size() const { return c_.size(); }

  /// Coefficient of z^k, zero beyond the degree.
  S operator[](int k) const {
    return k >= 0 && k < static_cast<int>(c_.size()) ? c_[static_cast<std::size_t>(k)] : S(0);
  }
  const S& leading() const { return c_.back(); }

  S operator()(const S& z) const {
    S acc(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
    return acc;
  }

  Poly derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<S> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * S(static_cast<long>(k));
    return Poly(std::move(d));
  }

  /// z^n P(1/z) for n >= degree.
  Poly reversed(int n) const {
    std::vector<S> r(static_cast<std::size_t>(n) + 1, S(0));
    for (int k = 0; k <= degree(); ++k) r[static_cast<std::size_t>(n - k)] = c_[k];
    return Poly(std::move(r));
  }

  /// P(z + a).
  Poly shifted(const S& a) const {
    std::vector<S> r = c_;
    const int n = degree();
    for (int i = 0; i < n; ++i)
      for (int k = n - 1; k >= i; --k) r[k] += a * r[k + 1];
    return Poly(std::move(r));
  }

  template <class F>
  auto map(F&& fn) const {
    using T = std::decay_t<decltype(fn(std::declval<const S&>()))>;
    std::vector<T> r;
    r.reserve(c_.size());
    for (const auto& v : c_) r.push_back(fn(v));
    return Poly<T>(std::move(r));
  }

  /// Drops leading coefficients below rel_tol * max |coeff| (float cleanup only).
  Poly trimmed_relative(double rel_tol) const {
    double scale = 0.0;
    for (const auto& v : c_) scale = std::max(scale, magnitude(v));
    std::vector<S> r = c_;
    while (!r.empty() && magnitude(r.back()) <= rel_tol * scale) r.pop_back();
    return Poly(std::move(r));
  }

  Poly& operator+=(const Poly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), S(0));
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
    trim();
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), S(0));
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
    trim();
    return *this;
  }
  Poly& operator*=(const S& s) {
    for (auto& v : c_) v *= s;
    trim();
    return *this;
  }

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator-(const Poly& a) { return a * S(-1); }
  friend Poly operator*(Poly a, const S& s) { return a *= s; }
  friend Poly operator*(const S& s, Poly a) { return a *= s; }
  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<S> r(a.c_.size() + b.c_.size() - 1, S(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (juliatwin::is_zero(a.c_[i])) continue;
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    }
    return Poly(std::move(r));
  }
  friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }

 private:
  void trim() {
    while (!c_.empty() && juliatwin::is_zero(c_.back())) c_.pop_back();
  }

  std::vector<S> c_;
};

template <FieldScalar S>
Poly<S> pow(const Poly<S>& p, int k) {
  Poly<S> result = Poly<S>::constant(S(1));
  Poly<S> base = p;
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k) base = base * base;
  }
  return result;
}

/// Euclidean division a = q*b + r with deg r < deg b.
template <FieldScalar S>
std::pair<Poly<S>, Poly<S>> divmod(const Poly<S>& a, const Poly<S>& b) {
  require(!b.is_zero(), ErrorKind::kDomain, "polynomial division by zero");
  std::vector<S> rem = a.coeffs();
  const int db = b.degree();
  if (a.degree() < db) return {Poly<S>{}, a};
  std::vector<S> quo(static_cast<std::size_t>(a.degree() - db) + 1, S(0));
  const S inv_lead = S(1) / b.leading();
  for (int k = a.degree(); k >= db; --k) {
    S factor = rem[k] * inv_lead;
    quo[k - db] = factor;
    if (is_zero(factor)) continue;
    for (int j = 0; j <= db; ++j) rem[k - db + j] -= factor * b.coeffs()[j];
    rem[k] = S(0);
  }
  rem.resize(static_cast<std::size_t>(db));
  return {Poly<S>(std::move(quo)), Poly<S>(std::move(rem))};
}

template <FieldScalar S>
Poly<S> make_monic(const Poly<S>& p) {
  if (p.is_zero()) return p;
  return p * (S(1) / p.leading());
}

/// Monic gcd. Exact in Q(i); in float mode only meaningful for well-separated inputs.
template <FieldScalar S>
Poly<S> gcd(Poly<S> a, Poly<S> b) {
  while (!b.is_zero()) {
    auto r = divmod(a, b).second;
    a = std::move(b);
    b = make_monic(r);
  }
  return make_monic(a);
}

inline Poly<Complex> to_float(const Poly<Complex>& p) { return p; }
inline Poly<Complex> to_float(const Poly<GaussRational>& p) {
  return p.map([](const GaussRational& v) { return to_complex(v); });
}

}  // namespace juliatwin
