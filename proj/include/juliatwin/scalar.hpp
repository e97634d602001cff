#pragma once

#include <gmpxx.h>

#include <cctype>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>

#include "juliatwin/error.hpp"

namespace juliatwin {

using Complex = std::complex<double>;

enum class Mode { kExact, kFloat };

inline const char* to_string(Mode m) { return m == Mode::kExact ? "exact" : "float"; }

/// Element of Q(i): a pair of arbitrary-precision rationals.
class GaussRational {
 public:
  GaussRational() : re_(0), im_(0) {}
  GaussRational(long re) : re_(re), im_(0) {}  // NOLINT: integer literals promote
  GaussRational(mpq_class re, mpq_class im = 0) : re_(std::move(re)), im_(std::move(im)) {
    re_.canonicalize();
    im_.canonicalize();
  }

  const mpq_class& re() const { return re_; }
  const mpq_class& im() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  mpq_class norm() const { return re_ * re_ + im_ * im_; }
  GaussRational conj() const { return {re_, -im_}; }

  GaussRational& operator+=(const GaussRational& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  GaussRational& operator-=(const GaussRational& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  GaussRational& operator*=(const GaussRational& o) {
    mpq_class r = re_ * o.re_ - im_ * o.im_;
    mpq_class i = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    im_ = std::move(i);
    return *this;
  }
  GaussRational& operator/=(const GaussRational& o) {
    require(!o.is_zero(), ErrorKind::kDomain, "division by zero in Q(i)");
    mpq_class n = o.norm();
    mpq_class r = (re_ * o.re_ + im_ * o.im_) / n;
    mpq_class i = (im_ * o.re_ - re_ * o.im_) / n;
    re_ = std::move(r);
    im_ = std::move(i);
    return *this;
  }

  friend GaussRational operator+(GaussRational a, const GaussRational& b) { return a += b; }
  friend GaussRational operator-(GaussRational a, const GaussRational& b) { return a -= b; }
  friend GaussRational operator*(GaussRational a, const GaussRational& b) { return a *= b; }
  friend GaussRational operator/(GaussRational a, const GaussRational& b) { return a /= b; }
  friend GaussRational operator-(const GaussRational& a) { return {-a.re_, -a.im_}; }
  friend bool operator==(const GaussRational& a, const GaussRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }

 private:
  mpq_class re_, im_;
};

// Uniform scalar vocabulary used by the Poly/RatMap templates.
inline bool is_zero(const Complex& c) { return c == Complex(0.0, 0.0); }
inline bool is_zero(const GaussRational& c) { return c.is_zero(); }
inline Complex to_complex(const Complex& c) { return c; }
inline Complex to_complex(const GaussRational& c) { return {c.re().get_d(), c.im().get_d()}; }
inline double magnitude(const Complex& c) { return std::abs(c); }
inline double magnitude(const GaussRational& c) { return std::abs(to_complex(c)); }

namespace detail {

inline double log_abs(const mpz_class& z) {
  long e = 0;
  const double m = mpz_get_d_2exp(&e, z.get_mpz_t());
  return std::log(std::abs(m)) + static_cast<double>(e) * std::numbers::ln2;
}

inline double log_abs(const mpq_class& q) {
  if (q == 0) return -std::numeric_limits<double>::infinity();
  return log_abs(q.get_num()) - log_abs(q.get_den());
}

}  // namespace detail

/// log|c|, finite for exact values far outside the double range.
inline double log_magnitude(const Complex& c) { return std::log(std::abs(c)); }
inline double log_magnitude(const GaussRational& c) {
  const double a = detail::log_abs(c.re()), b = detail::log_abs(c.im());
  const double hi = std::max(a, b), lo = std::min(a, b);
  if (!std::isfinite(lo)) return hi;
  return hi + 0.5 * std::log1p(std::exp(2.0 * (lo - hi)));
}

template <class S>
inline constexpr Mode mode_of = std::is_same_v<S, GaussRational> ? Mode::kExact : Mode::kFloat;

template <class S>
concept FieldScalar = std::is_same_v<S, Complex> || std::is_same_v<S, GaussRational>;

/// Parses "p/q", an integer, or a finite decimal ("-0.25", "1e-3") exactly.
inline mpq_class parse_rational(std::string_view text) {
  std::string s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
  require(!s.empty(), ErrorKind::kInput, "empty rational literal");
  try {
    if (s.find('/') != std::string::npos) {
      if (s.front() == '+') s.erase(s.begin());
      mpq_class q(s, 10);
      require(q.get_den() != 0, ErrorKind::kInput, "zero denominator in '" + s + "'");
      q.canonicalize();
      return q;
    }
    // Decimal with optional exponent.
    bool neg = false;
    std::size_t pos = 0;
    if (s[pos] == '+' || s[pos] == '-') neg = s[pos++] == '-';
    std::string digits;
    long exp10 = 0;
    bool seen_dot = false, any_digit = false;
    for (; pos < s.size(); ++pos) {
      char c = s[pos];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        digits.push_back(c);
        any_digit = true;
        if (seen_dot) --exp10;
      } else if (c == '.' && !seen_dot) {
        seen_dot = true;
      } else if (c == 'e' || c == 'E') {
        exp10 += std::stol(s.substr(pos + 1));
        pos = s.size();
        break;
      } else {
        fail(ErrorKind::kInput, "bad rational literal '" + s + "'");
      }
    }
    require(any_digit, ErrorKind::kInput, "bad rational literal '" + s + "'");
    mpz_class mant(digits, 10);
    mpz_class pow10;
    mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exp10)));
    mpq_class q = exp10 >= 0 ? mpq_class(mant * pow10) : mpq_class(mant, pow10);
    q.canonicalize();
    return neg ? mpq_class(-q) : q;
  } catch (const std::invalid_argument&) {
    fail(ErrorKind::kInput, "bad rational literal '" + s + "'");
  }
}

inline std::string rational_to_string(const mpq_class& q) { return q.get_str(10); }

/// Best rational approximation with denominator <= max_den (continued fractions).
/// Returns nullopt if the approximation misses x by more than rel_tol.
inline std::optional<mpq_class> snap_to_rational(double x, long max_den = 1000000,
                                                 double rel_tol = 1e-12) {
  if (!std::isfinite(x)) return std::nullopt;
  if (x == 0.0) return mpq_class(0);
  // Convergents h/k of the continued fraction of x.
  mpz_class h_prev = 1, h = static_cast<long>(std::floor(x));
  mpz_class k_prev = 0, k = 1;
  double frac = x - std::floor(x);
  mpq_class best(h, k);
  for (int it = 0; it < 64 && frac > 1e-300; ++it) {
    double inv = 1.0 / frac;
    double a_d = std::floor(inv);
    if (a_d > 1e15) break;
    mpz_class a = static_cast<long>(a_d);
    mpz_class h_next = a * h + h_prev;
    mpz_class k_next = a * k + k_prev;
    if (k_next > max_den) break;
    h_prev = h;
    h = h_next;
    k_prev = k;
    k = k_next;
    best = mpq_class(h, k);
    best.canonicalize();
    frac = inv - a_d;
    if (std::abs(best.get_d() - x) <= 1e-17 * std::abs(x)) break;
  }
  if (std::abs(best.get_d() - x) > rel_tol * std::max(1.0, std::abs(x))) return std::nullopt;
  return best;
}

inline std::optional<GaussRational> snap_to_gauss(const Complex& c, long max_den = 1000000) {
  auto re = snap_to_rational(c.real(), max_den);
  auto im = snap_to_rational(c.imag(), max_den);
  if (!re || !im) return std::nullopt;
  return GaussRational(*re, *im);
}

}  // namespace juliatwin
