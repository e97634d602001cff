#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "juliatwin/poly.hpp"
#include "juliatwin/roots.hpp"
#include "juliatwin/sphere.hpp"

namespace juliatwin {

/// Largest degree any composed or iterated map may reach.
inline constexpr std::int64_t kDefaultDegreeBudget = 4096;

/// Chordal distance under which roots of numerator and denominator count as shared.
inline constexpr double kCoprimalityTolerance = 1e-9;

/// Coefficient tolerance for float-mode map equality.
inline constexpr double kEqualityTolerance = 1e-9;

/// Rational map P/Q on the Riemann sphere with gcd(P, Q) = 1.
/// Stored normalised so that Q is monic.
template <FieldScalar S>
class RatMap {
 public:
  using Scalar = S;

  /// Validating constructor: rejects Q = 0 and constant maps, removes common factors
  /// (exact gcd in exact mode; shared-root deflation in float mode).
  static RatMap make(Poly<S> num, Poly<S> den);

  /// Trusted constructor for results that are coprime by construction.
  static RatMap from_coprime(Poly<S> num, Poly<S> den) {
    require(!den.is_zero(), ErrorKind::kDomain, "rational map with zero denominator");
    const S inv = S(1) / den.leading();
    RatMap f;
    f.num_ = num * inv;
    f.den_ = den * inv;
    return f;
  }

  static RatMap identity() {
    return from_coprime(Poly<S>::identity(), Poly<S>::constant(S(1)));
  }
  static RatMap polynomial(Poly<S> p) { return make(std::move(p), Poly<S>::constant(S(1))); }

  const Poly<S>& num() const { return num_; }
  const Poly<S>& den() const { return den_; }

  /// max(deg P, deg Q).
  int degree() const { return std::max(num_.degree(), den_.degree()); }
  bool is_polynomial() const { return den_.degree() == 0; }
  static constexpr Mode mode() { return mode_of<S>; }

  friend bool operator==(const RatMap&, const RatMap&) = default;

 private:
  Poly<S> num_, den_;
};

namespace detail {

inline Poly<Complex> deflate_root(const Poly<Complex>& p, Complex r, double& rem_norm) {
  auto [q, rem] = divmod(p, Poly<Complex>{-r, Complex(1.0)});
  rem_norm = rem.is_zero() ? 0.0 : std::abs(rem[0]);
  return q;
}

inline double coeff_scale(const Poly<Complex>& p) {
  double s = 0.0;
  for (const auto& c : p.coeffs()) s = std::max(s, std::abs(c));
  return s;
}

}  // namespace detail

template <FieldScalar S>
RatMap<S> RatMap<S>::make(Poly<S> num, Poly<S> den) {
  require(!den.is_zero(), ErrorKind::kInput, "rational map with zero denominator");
  if constexpr (std::is_same_v<S, GaussRational>) {
    if (!num.is_zero() && den.degree() > 0 && num.degree() > 0) {
      Poly<S> g = gcd(num, den);
      if (g.degree() > 0) {
        num = divmod(num, g).first;
        den = divmod(den, g).first;
      }
    }
  } else {
    // Float mode: shared roots (chordally within tolerance) are divided out once;
    // if the division leaves a large remainder the input is rejected.
    for (int pass = 0; pass < 64 && num.degree() > 0 && den.degree() > 0; ++pass) {
      const auto rn = solve_roots(num);
      const auto rd = solve_roots(den);
      bool found = false;
      for (const auto& a : rn) {
        for (const auto& b : rd) {
          if (chordal(a, b) >= kCoprimalityTolerance) continue;
          const Complex r = 0.5 * (a + b);
          double en = 0.0, ed = 0.0;
          auto qn = detail::deflate_root(num, r, en);
          auto qd = detail::deflate_root(den, r, ed);
          require(en <= 1e-6 * detail::coeff_scale(num) && ed <= 1e-6 * detail::coeff_scale(den),
                  ErrorKind::kInput,
                  "numerator and denominator share a near-root that cannot be cancelled");
          num = std::move(qn);
          den = std::move(qd);
          found = true;
          break;
        }
        if (found) break;
      }
      if (!found) break;
    }
  }
  RatMap f = from_coprime(std::move(num), std::move(den));
  require(f.degree() >= 1, ErrorKind::kInput, "constant maps are not supported");
  return f;
}

inline RatMap<Complex> to_float(const RatMap<Complex>& f) { return f; }
inline RatMap<Complex> to_float(const RatMap<GaussRational>& f) {
  return RatMap<Complex>::from_coprime(to_float(f.num()), to_float(f.den()));
}

/// Snaps every coefficient to a rational with denominator <= max_den.
/// Throws kInput if some coefficient is not close to such a rational.
inline RatMap<GaussRational> rationalize(const RatMap<Complex>& f, long max_den = 1000000) {
  auto snap = [&](const Poly<Complex>& p) {
    std::vector<GaussRational> c;
    for (const auto& v : p.coeffs()) {
      auto q = snap_to_gauss(v, max_den);
      require(q.has_value(), ErrorKind::kInput,
              "float coefficient cannot be rationalized with denominator <= " +
                  std::to_string(max_den));
      c.push_back(*q);
    }
    return Poly<GaussRational>(std::move(c));
  };
  return RatMap<GaussRational>::make(snap(f.num()), snap(f.den()));
}
inline RatMap<GaussRational> rationalize(const RatMap<GaussRational>& f, long = 0) { return f; }

// ---------------------------------------------------------------------------
// Evaluation

namespace detail {

// sum c_i z0^i z1^(d-i) up to a common nonzero factor, evaluated in the
// better-conditioned affine chart.
inline std::pair<Complex, Complex> homogeneous_eval(const Poly<Complex>& p, const Poly<Complex>& q,
                                                    int d, const SpherePoint& z) {
  if (std::abs(z.z0()) <= std::abs(z.z1())) {
    const Complex w = z.z0() / z.z1();
    return {p(w), q(w)};
  }
  const Complex u = z.z1() / z.z0();
  Complex a = 0.0, b = 0.0;
  for (int i = 0; i <= d; ++i) {
    a = a * u + p[i];
    b = b * u + q[i];
  }
  return {a, b};
}

}  // namespace detail

inline SpherePoint evaluate(const RatMap<Complex>& f, const SpherePoint& z) {
  auto [a, b] = detail::homogeneous_eval(f.num(), f.den(), f.degree(), z);
  return {a, b};
}

inline SpherePoint evaluate(const RatMap<GaussRational>& f, const SpherePoint& z) {
  return evaluate(to_float(f), z);
}

// ---------------------------------------------------------------------------
// Composition and iteration

namespace detail {

inline void check_budget(std::int64_t degree, std::int64_t budget) {
  require(degree <= budget, ErrorKind::kBudget,
          "degree " + std::to_string(degree) + " exceeds degree budget " + std::to_string(budget));
}

template <FieldScalar S>
Poly<S> cleanup(Poly<S> p, double scale) {
  if constexpr (std::is_same_v<S, Complex>) {
    std::vector<Complex> c = p.coeffs();
    while (!c.empty() && std::abs(c.back()) <= 1e-14 * scale) c.pop_back();
    return Poly<Complex>(std::move(c));
  } else {
    (void)scale;
    return p;
  }
}

}  // namespace detail

/// f o g. Homogeneous substitution P^h(R, S), Q^h(R, S) is coprime whenever
/// both inputs are, so no gcd is taken.
template <FieldScalar S>
RatMap<S> compose(const RatMap<S>& f, const RatMap<S>& g,
                  std::int64_t budget = kDefaultDegreeBudget) {
  const int d = f.degree();
  const int e = g.degree();
  detail::check_budget(static_cast<std::int64_t>(d) * e, budget);
  std::vector<Poly<S>> rp(static_cast<std::size_t>(d) + 1), sp(static_cast<std::size_t>(d) + 1);
  rp[0] = sp[0] = Poly<S>::constant(S(1));
  for (int i = 1; i <= d; ++i) {
    rp[i] = rp[i - 1] * g.num();
    sp[i] = sp[i - 1] * g.den();
  }
  Poly<S> n, m;
  for (int i = 0; i <= d; ++i) {
    const bool use_p = !is_zero(f.num()[i]);
    const bool use_q = !is_zero(f.den()[i]);
    if (!use_p && !use_q) continue;
    Poly<S> term = rp[i] * sp[d - i];
    if (use_p) n += term * f.num()[i];
    if (use_q) m += term * f.den()[i];
  }
  if constexpr (std::is_same_v<S, Complex>) {
    const double scale = std::max(detail::coeff_scale(n), detail::coeff_scale(m));
    n = detail::cleanup(std::move(n), scale);
    m = detail::cleanup(std::move(m), scale);
  }
  return RatMap<S>::from_coprime(std::move(n), std::move(m));
}

inline std::int64_t checked_power(std::int64_t base, int k, std::int64_t cap) {
  std::int64_t r = 1;
  for (int i = 0; i < k; ++i) {
    if (r > cap / std::max<std::int64_t>(base, 1)) return cap + 1;
    r *= base;
  }
  return r;
}

/// f^k, with f^0 the identity.
template <FieldScalar S>
RatMap<S> iterate(const RatMap<S>& f, int k, std::int64_t budget = kDefaultDegreeBudget) {
  require(k >= 0, ErrorKind::kInput, "negative iteration count");
  detail::check_budget(checked_power(f.degree(), k, budget), budget);
  RatMap<S> r = RatMap<S>::identity();
  for (int i = 0; i < k; ++i) r = compose(f, r, budget);
  return r;
}

// ---------------------------------------------------------------------------
// Derivative, conjugation, equality

/// f' = (P'Q - PQ') / Q^2 in lowest terms.
template <FieldScalar S>
RatMap<S> derivative(const RatMap<S>& f) {
  const auto& p = f.num();
  const auto& q = f.den();
  Poly<S> w = p.derivative() * q - p * q.derivative();
  Poly<S> q2 = q * q;
  if (w.is_zero()) return RatMap<S>::from_coprime(Poly<S>{}, Poly<S>::constant(S(1)));
  if constexpr (std::is_same_v<S, GaussRational>) {
    return RatMap<S>::make(std::move(w), std::move(q2));
  } else {
    // A root of Q of multiplicity m leaves a common factor (z - a)^(m-1).
    if (q.degree() >= 2) {
      auto clusters = cluster_points(
          [&] {
            std::vector<SpherePoint> pts;
            for (const auto& r : solve_roots(q)) pts.push_back(SpherePoint::affine(r));
            return pts;
          }(),
          1e-6);
      for (const auto& c : clusters) {
        for (int k = 1; k < c.multiplicity; ++k) {
          double e1 = 0.0, e2 = 0.0;
          w = detail::deflate_root(w, c.centre.value(), e1);
          q2 = detail::deflate_root(q2, c.centre.value(), e2);
        }
      }
    }
    return RatMap<S>::from_coprime(std::move(w), std::move(q2));
  }
}

/// Value of the derivative at a finite point (float mode; no reduction needed).
inline Complex derivative_at(const RatMap<Complex>& f, Complex z) {
  const Complex p = f.num()(z), q = f.den()(z);
  const Complex dp = f.num().derivative()(z), dq = f.den().derivative()(z);
  return (dp * q - p * dq) / (q * q);
}

template <FieldScalar S>
RatMap<S> mobius_inverse(const RatMap<S>& sigma) {
  require(sigma.degree() == 1, ErrorKind::kInput, "Mobius transformation must have degree 1");
  const S a = sigma.num()[1], b = sigma.num()[0], c = sigma.den()[1], d = sigma.den()[0];
  require(!is_zero(a * d - b * c), ErrorKind::kInput, "Mobius transformation is not invertible");
  return RatMap<S>::from_coprime(Poly<S>{-b, d}, Poly<S>{a, -c});
}

/// sigma o f o sigma^-1.
template <FieldScalar S>
RatMap<S> mobius_conjugate(const RatMap<S>& f, const RatMap<S>& sigma,
                           std::int64_t budget = kDefaultDegreeBudget) {
  return compose(sigma, compose(f, mobius_inverse(sigma), budget), budget);
}

/// Equality as maps: P_f Q_g == P_g Q_f (exact), or within kEqualityTolerance after
/// scaling both cross-products by their largest coefficient (float).
template <FieldScalar S>
bool maps_equal(const RatMap<S>& f, const RatMap<S>& g, double tol = kEqualityTolerance) {
  const Poly<S> x = f.num() * g.den();
  const Poly<S> y = g.num() * f.den();
  if constexpr (std::is_same_v<S, GaussRational>) {
    (void)tol;
    return x == y;
  } else {
    const double scale = std::max(detail::coeff_scale(x), detail::coeff_scale(y));
    if (scale == 0.0) return true;
    const int n = std::max(x.degree(), y.degree());
    for (int k = 0; k <= n; ++k)
      if (std::abs(x[k] - y[k]) / scale >= tol) return false;
    return true;
  }
}

// ---------------------------------------------------------------------------
// Model families

/// lambda z^d, or lambda / z^|d| for negative d.
template <FieldScalar S>
RatMap<S> power_map(const S& lambda, int d) {
  require(d >= 2 || d <= -2, ErrorKind::kInput, "power_map needs |d| >= 2");
  require(!is_zero(lambda), ErrorKind::kInput, "power_map needs lambda != 0");
  if (d > 0) return RatMap<S>::from_coprime(Poly<S>::monomial(lambda, d), Poly<S>::constant(S(1)));
  return RatMap<S>::from_coprime(Poly<S>::constant(lambda), Poly<S>::monomial(S(1), -d));
}

/// sign * T_d via T_0 = 1, T_1 = z, T_{k+1} = 2 z T_k - T_{k-1}.
template <FieldScalar S>
RatMap<S> chebyshev(int d, int sign = +1) {
  require(d >= 2, ErrorKind::kInput, "chebyshev needs d >= 2");
  require(sign == 1 || sign == -1, ErrorKind::kInput, "chebyshev sign must be +1 or -1");
  Poly<S> prev = Poly<S>::constant(S(1));
  Poly<S> cur = Poly<S>::identity();
  const Poly<S> two_z = Poly<S>::monomial(S(2), 1);
  for (int k = 1; k < d; ++k) {
    Poly<S> next = two_z * cur - prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return RatMap<S>::from_coprime(cur * S(sign), Poly<S>::constant(S(1)));
}

/// (h(z^p), alpha h(z^p)) for a p-th root of unity alpha != 1.
template <FieldScalar S>
std::pair<RatMap<S>, RatMap<S>> example_pair(const RatMap<S>& h, int p, const S& alpha) {
  require(p >= 1, ErrorKind::kInput, "example_pair needs p >= 1");
  S ap(1);
  for (int i = 0; i < p; ++i) ap = ap * alpha;
  if constexpr (std::is_same_v<S, GaussRational>) {
    require(ap == S(1), ErrorKind::kInput, "alpha is not a p-th root of unity");
    require(!(alpha == S(1)), ErrorKind::kInput, "alpha must differ from 1");
  } else {
    require(std::abs(ap - 1.0) < 1e-12, ErrorKind::kInput, "alpha is not a p-th root of unity");
    require(std::abs(alpha - 1.0) > 1e-12, ErrorKind::kInput, "alpha must differ from 1");
  }
  const RatMap<S> zp =
      p == 1 ? RatMap<S>::identity()
             : RatMap<S>::from_coprime(Poly<S>::monomial(S(1), p), Poly<S>::constant(S(1)));
  RatMap<S> f = compose(h, zp);
  RatMap<S> scale = RatMap<S>::from_coprime(Poly<S>::monomial(alpha, 1), Poly<S>::constant(S(1)));
  RatMap<S> g = compose(scale, f);
  return {std::move(f), std::move(g)};
}

// ---------------------------------------------------------------------------
// Critical points

struct CriticalPoint {
  SpherePoint point;
  int multiplicity = 1;
};

/// Zeros of P'Q - PQ' plus infinity with the remaining multiplicity, so that the
/// total is 2 deg f - 2.
template <FieldScalar S>
std::vector<CriticalPoint> critical_points(const RatMap<S>& f) {
  const int d = f.degree();
  require(d >= 2, ErrorKind::kInput, "critical_points needs deg f >= 2");
  const Poly<S> w = f.num().derivative() * f.den() - f.num() * f.den().derivative();
  Poly<Complex> wf = to_float(w);
  if constexpr (std::is_same_v<S, Complex>) wf = wf.trimmed_relative(1e-14);
  std::vector<SpherePoint> pts;
  for (const auto& r : solve_roots(wf)) pts.push_back(SpherePoint::affine(r));
  const int at_inf = 2 * d - 2 - wf.degree();
  for (int k = 0; k < at_inf; ++k) pts.push_back(SpherePoint::infinity());
  std::vector<CriticalPoint> out;
  for (const auto& c : cluster_points(pts, 1e-6)) out.push_back({c.centre, c.multiplicity});
  return out;
}

}  // namespace juliatwin
