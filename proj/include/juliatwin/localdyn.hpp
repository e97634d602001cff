#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "juliatwin/ratmap.hpp"

namespace juliatwin {

inline constexpr int kDefaultSeriesOrder = 24;

// ---------------------------------------------------------------------------
// Truncated power series

/// sum_{j < order} c[j] t^j + O(t^order).
template <FieldScalar S>
struct PowerSeries {
  std::vector<S> c;
  int order = 0;

  PowerSeries() = default;
  PowerSeries(std::vector<S> coeffs, int n) : c(std::move(coeffs)), order(n) {
    c.resize(static_cast<std::size_t>(n), S(0));
  }

  static PowerSeries identity(int n) {
    PowerSeries s(std::vector<S>(static_cast<std::size_t>(n), S(0)), n);
    if (n > 1) s.c[1] = S(1);
    return s;
  }

  S operator[](int j) const { return j >= 0 && j < order ? c[static_cast<std::size_t>(j)] : S(0); }

  /// Index of the first nonzero coefficient, or `order` if none.
  int valuation() const {
    for (int j = 0; j < order; ++j)
      if (!is_zero(c[static_cast<std::size_t>(j)])) return j;
    return order;
  }

  Complex operator()(Complex t) const {
    Complex acc = 0.0;
    for (int j = order - 1; j >= 0; --j) acc = acc * t + to_complex(c[static_cast<std::size_t>(j)]);
    return acc;
  }
};

template <FieldScalar S>
PowerSeries<Complex> to_float(const PowerSeries<S>& s) {
  std::vector<Complex> c;
  for (const auto& v : s.c) c.push_back(to_complex(v));
  return PowerSeries<Complex>(std::move(c), s.order);
}

template <FieldScalar S>
PowerSeries<S> operator+(const PowerSeries<S>& a, const PowerSeries<S>& b) {
  const int n = std::min(a.order, b.order);
  std::vector<S> c(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) c[j] = a[j] + b[j];
  return {std::move(c), n};
}

template <FieldScalar S>
PowerSeries<S> operator*(const PowerSeries<S>& a, const PowerSeries<S>& b) {
  // The error of a, O(t^order_a), is multiplied by b's lowest term and vice versa.
  const int n = std::min(a.order + b.valuation(), b.order + a.valuation());
  std::vector<S> c(static_cast<std::size_t>(n), S(0));
  for (int i = 0; i < std::min(a.order, n); ++i) {
    if (is_zero(a.c[i])) continue;
    for (int j = 0; j < std::min(b.order, n - i); ++j) c[i + j] += a.c[i] * b.c[j];
  }
  return {std::move(c), n};
}

/// F(G(t)) for G(0) = 0.
template <FieldScalar S>
PowerSeries<S> compose(const PowerSeries<S>& f, const PowerSeries<S>& g) {
  require(is_zero(g[0]), ErrorKind::kDomain, "series composition needs G(0) = 0");
  const int vg = std::max(g.valuation(), 1);
  const int n = std::min(g.order, f.order * vg);
  PowerSeries<S> acc(std::vector<S>{f[f.order - 1]}, n);
  for (int j = f.order - 2; j >= 0; --j) {
    acc = acc * g;
    acc.order = n;
    acc.c.resize(static_cast<std::size_t>(n), S(0));
    acc.c[0] += f[j];
  }
  return acc;
}

/// Compositional inverse of F with F(0) = 0, F'(0) != 0.
template <FieldScalar S>
PowerSeries<S> reversion(const PowerSeries<S>& f) {
  require(is_zero(f[0]) && !is_zero(f[1]), ErrorKind::kDomain,
          "series reversion needs F(0) = 0 and F'(0) != 0");
  const int n = f.order;
  PowerSeries<S> g(std::vector<S>(static_cast<std::size_t>(n), S(0)), n);
  g.c[1] = S(1) / f[1];
  for (int k = 2; k < n; ++k) {
    const auto fg = compose(f, g);
    g.c[k] = S(0) - fg[k] / f[1];
  }
  return g;
}

/// num / den as a series, den(0) != 0.
template <FieldScalar S>
PowerSeries<S> series_quotient(const Poly<S>& num, const Poly<S>& den, int n) {
  require(!is_zero(den[0]), ErrorKind::kDomain, "series quotient with den(0) = 0");
  std::vector<S> q(static_cast<std::size_t>(n), S(0));
  const S inv = S(1) / den[0];
  for (int k = 0; k < n; ++k) {
    S acc = num[k];
    for (int j = 1; j <= std::min(k, den.degree()); ++j) acc -= den[j] * q[k - j];
    q[k] = acc * inv;
  }
  return {std::move(q), n};
}

/// Radius within which the truncation tail is below tol, estimated from the last
/// few coefficients (root test); capped at `cap` when they vanish.
template <FieldScalar S>
double convergence_radius(const PowerSeries<S>& s, double tol = 1e-16, double cap = 1.0) {
  double r = cap;
  for (int j = std::max(2, s.order / 2); j < s.order; ++j) {
    const double m = magnitude(s[j]);
    if (m > 0.0) r = std::min(r, std::pow(tol / m, 1.0 / j));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Local germs

/// A fixed point: finite value or infinity.
template <FieldScalar S>
struct FixedPoint {
  bool infinite = false;
  S value = S(0);

  SpherePoint sphere() const { return infinite ? SpherePoint::infinity() : SpherePoint::affine(to_complex(value)); }
  /// Global point of local coordinate s.
  SpherePoint from_local(Complex s) const {
    if (infinite) return s == Complex(0.0) ? SpherePoint::infinity() : SpherePoint::affine(1.0 / s);
    return SpherePoint::affine(to_complex(value) + s);
  }
  Complex to_local(const SpherePoint& z) const {
    if (infinite) return z.is_infinite() ? Complex(0.0) : 1.0 / z.value();
    return z.value() - to_complex(value);
  }
};

/// f in the local coordinate s at a fixed point: F(s) = num(s) / den(s), F(0) = 0.
template <FieldScalar S>
struct Germ {
  Poly<S> num, den;

  Complex operator()(Complex s) const {
    return to_float(num)(s) / to_float(den)(s);
  }
  PowerSeries<S> series(int n) const { return series_quotient(num, den, n); }
};

/// f(z* + s) - z*, or 1/f(1/s) at infinity.
template <FieldScalar S>
Germ<S> local_germ(const RatMap<S>& f, const FixedPoint<S>& at, double tol = 1e-9) {
  Germ<S> g;
  if (at.infinite) {
    const int d = f.degree();
    g.num = f.den().reversed(d);
    g.den = f.num().reversed(d);
  } else {
    const Poly<S> p = f.num().shifted(at.value), q = f.den().shifted(at.value);
    g.num = p - q * at.value;
    g.den = q;
  }
  if constexpr (std::is_same_v<S, GaussRational>) {
    (void)tol;
    require(is_zero(g.num[0]) && !is_zero(g.den[0]), ErrorKind::kDomain, "not a fixed point of f");
    g.num = Poly<S>([&] {
      auto c = g.num.coeffs();
      c[0] = S(0);
      return c;
    }());
  } else {
    require(!is_zero(g.den[0]) && std::abs(g.num[0] / g.den[0]) < tol, ErrorKind::kDomain,
            "not a fixed point of f");
    auto c = g.num.coeffs();
    c[0] = 0.0;
    g.num = Poly<S>(std::move(c));
  }
  return g;
}

/// t -> c F(t / c).
template <FieldScalar S>
Germ<S> rescale(const Germ<S>& g, const S& c) {
  const S ic = S(1) / c;
  std::vector<S> n, d;
  S pw(1);  // c^{-j}
  for (int j = 0; j <= std::max(g.num.degree(), g.den.degree()); ++j) {
    n.push_back(g.num[j] * pw * c);
    d.push_back(g.den[j] * pw);
    pw = pw * ic;
  }
  return {Poly<S>(std::move(n)), Poly<S>(std::move(d))};
}

// ---------------------------------------------------------------------------
// Koenigs linearisation

template <FieldScalar S>
struct Linearizer {
  PowerSeries<S> phi;  // phi(lambda t) = F(phi(t)), phi'(0) = 1
  S lambda;
  FixedPoint<S> at;
  double radius = 0.0;  // disc where the truncated series is trusted
};

namespace detail {

template <FieldScalar S>
void require_hyperbolic(const S& lambda) {
  if constexpr (std::is_same_v<S, GaussRational>) {
    require(!lambda.is_zero(), ErrorKind::kDomain, "Koenigs series needs lambda != 0");
    require(lambda.norm() != mpq_class(1), ErrorKind::kDomain, "Koenigs series needs |lambda| != 1");
  } else {
    require(std::abs(lambda) > 1e-12, ErrorKind::kDomain, "Koenigs series needs lambda != 0");
    require(std::abs(std::abs(lambda) - 1.0) > 1e-9, ErrorKind::kDomain,
            "Koenigs series needs |lambda| != 1");
  }
}

}  // namespace detail

/// Coefficients of the Koenigs map from c_n (lambda^n - lambda) = [F o phi_{<n}]_n.
template <FieldScalar S>
Linearizer<S> koenigs_series(const RatMap<S>& f, const FixedPoint<S>& at, int n = kDefaultSeriesOrder) {
  require(n >= 2, ErrorKind::kInput, "series order must be >= 2");
  const PowerSeries<S> a = local_germ(f, at).series(n + 1);
  const S lambda = a[1];
  detail::require_hyperbolic(lambda);
  Linearizer<S> lin;
  lin.lambda = lambda;
  lin.at = at;
  lin.phi = PowerSeries<S>::identity(n + 1);
  S lam_pow = lambda;
  for (int k = 2; k <= n; ++k) {
    lam_pow = lam_pow * lambda;
    const S b = compose(a, lin.phi)[k];
    lin.phi.c[static_cast<std::size_t>(k)] = b / (lam_pow - lambda);
  }
  lin.radius = convergence_radius(lin.phi, 1e-16, 1.0);
  return lin;
}

/// phi(z) beyond the trusted disc: phi(z) = f^n(phi(z / lambda^n)), with n the
/// smallest depth that lands in half the disc (or `depth` if larger).
template <FieldScalar S>
SpherePoint koenigs_extend(const RatMap<S>& f, const Linearizer<S>& lin, Complex z, int depth = 0,
                           int max_depth = 200) {
  const Complex lam = to_complex(lin.lambda);
  require(std::abs(lam) > 1.0, ErrorKind::kDomain, "koenigs_extend needs |lambda| > 1");
  int n = 0;
  Complex t = z;
  while (std::abs(t) > 0.5 * lin.radius || n < depth) {
    t /= lam;
    require(++n <= max_depth, ErrorKind::kBudget, "koenigs_extend exceeded its iteration cap");
  }
  SpherePoint w = lin.at.from_local(lin.phi(t));
  const RatMap<Complex> ff = to_float(f);
  for (int k = 0; k < n; ++k) w = evaluate(ff, w);
  return w;
}

/// sup over |t| <= r0 (sampled on circles) of |phi^-1(F(phi(t))) - lambda t|.
template <FieldScalar S>
double conjugacy_residual(const RatMap<S>& f, const Linearizer<S>& lin, double r0, int samples = 256) {
  const auto phi = to_float(lin.phi);
  const auto inv = reversion(phi);
  const Germ<Complex> g = [&] {
    const auto gs = local_germ(f, lin.at);
    return Germ<Complex>{to_float(gs.num), to_float(gs.den)};
  }();
  const Complex lam = to_complex(lin.lambda);
  double worst = 0.0;
  for (double frac : {0.25, 0.5, 1.0})
    for (int k = 0; k < samples; ++k) {
      const Complex t = std::polar(r0 * frac, 2 * std::numbers::pi * k / samples);
      worst = std::max(worst, std::abs(inv(g(phi(t))) - lam * t));
    }
  return worst;
}

/// Radius for conjugacy checks: phi trusted on |t| <= r0 and its inverse on the image.
template <FieldScalar S>
double conjugacy_radius(const Linearizer<S>& lin) {
  const auto inv = reversion(to_float(lin.phi));
  const double r_inv = convergence_radius(inv, 1e-16, 1.0);
  return std::min(lin.radius, r_inv) / (2.0 * std::max(1.0, std::abs(to_complex(lin.lambda))));
}

// ---------------------------------------------------------------------------
// Parabolic points

/// f(t) = t + alpha t^{p+1} + ... at a fixed point with multiplier 1.
struct ParabolicData {
  int p = 1;
  Complex alpha;
  bool normalized = false;  // alpha == -1
  Complex scale = 1.0;      // t -> scale * t brings alpha to -1
  int residual_order = 0;   // first j > p + 1 with a nonzero coefficient after normalising
  Complex b = 0.0;          // coefficient of t^{2p+1} after normalising
};

/// Reads p and alpha from a germ series with F'(0) = 1.
template <FieldScalar S>
ParabolicData parabolic_data(const PowerSeries<S>& a, double tol = 1e-9) {
  if constexpr (std::is_same_v<S, GaussRational>) {
    require(a[1] == S(1), ErrorKind::kDomain, "multiplier is not 1");
  } else {
    require(std::abs(a[1] - 1.0) < tol, ErrorKind::kDomain, "multiplier is not 1");
  }
  double scale = 0.0;
  for (int j = 0; j < a.order; ++j) scale = std::max(scale, magnitude(a[j]));
  auto nonzero = [&](int j) {
    if constexpr (std::is_same_v<S, GaussRational>) return !is_zero(a[j]);
    else return magnitude(a[j]) > 1e-12 * std::max(scale, 1.0);
  };
  int j = 2;
  while (j < a.order && !nonzero(j)) ++j;
  require(j < a.order, ErrorKind::kDomain, "not parabolic at this order: all coefficients vanish");
  ParabolicData d;
  d.p = j - 1;
  d.alpha = to_complex(a[j]);
  d.normalized = std::abs(d.alpha + 1.0) < 1e-15;
  // c = (-alpha)^{1/p}, principal branch; the normalised germ is c F(t / c).
  d.scale = std::exp(std::log(-d.alpha) / static_cast<double>(d.p));
  d.residual_order = a.order;
  for (int k = j + 1; k < a.order; ++k)
    if (nonzero(k)) {
      d.residual_order = k;
      break;
    }
  const int jb = 2 * d.p + 1;
  if (jb < a.order) d.b = to_complex(a[jb]) * std::pow(d.scale, 1 - jb);
  return d;
}

template <FieldScalar S>
ParabolicData parabolic_data(const RatMap<S>& f, const FixedPoint<S>& at, int order = kDefaultSeriesOrder) {
  return parabolic_data(local_germ(f, at).series(order + 1));
}

/// The germ of f at the point rescaled so that alpha = -1.
template <FieldScalar S>
Germ<Complex> normalize_alpha(const RatMap<S>& f, const FixedPoint<S>& at, const ParabolicData& d) {
  const auto g = local_germ(f, at);
  return rescale(Germ<Complex>{to_float(g.num), to_float(g.den)}, d.scale);
}

// ---------------------------------------------------------------------------
// Petals

enum class PetalKind { kAttracting, kRepelling };  // Pi_k and Pi'_k

struct PetalSpec {
  int p = 1;
  double a = 0.25;
  int k = 0;
  PetalKind kind = PetalKind::kAttracting;
};

/// 0 < r^p < a (1 +- cos p theta) with theta in the window of width 2 pi / p around
/// 2 k pi / p (Pi) or (2k + 1) pi / p (Pi').
inline bool petal_contains(const PetalSpec& s, Complex t) {
  require(s.p >= 1 && s.a > 0.0 && s.k >= 0 && s.k < s.p, ErrorKind::kInput, "invalid petal spec");
  if (t == Complex(0.0)) return false;
  const double pi = std::numbers::pi;
  const double centre = (s.kind == PetalKind::kAttracting ? 2.0 * s.k : 2.0 * s.k + 1.0) * pi / s.p;
  double theta = std::arg(t);
  theta -= 2 * pi * std::round((theta - centre) / (2 * pi));
  if (!(std::abs(theta - centre) < pi / s.p)) return false;
  const double c = std::cos(s.p * theta);
  const double bound = s.a * (s.kind == PetalKind::kAttracting ? 1.0 + c : 1.0 - c);
  return std::pow(std::abs(t), s.p) < bound;
}

/// Uniform-in-r^p random point of the petal (rejection sampling).
template <class Rng>
Complex sample_petal(const PetalSpec& s, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double pi = std::numbers::pi;
  const double centre = (s.kind == PetalKind::kAttracting ? 2.0 * s.k : 2.0 * s.k + 1.0) * pi / s.p;
  for (;;) {
    const double theta = centre + (2.0 * u(rng) - 1.0) * pi / s.p;
    const double rp = 2.0 * s.a * u(rng);
    const Complex t = std::polar(std::pow(rp, 1.0 / s.p), theta);
    if (petal_contains(s, t)) return t;
  }
}

/// Fraction of `samples` points of Pi_k(a) whose image under g stays in Pi_k(a).
inline double petal_invariance(const Germ<Complex>& g, const PetalSpec& s, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  int ok = 0;
  for (int i = 0; i < samples; ++i)
    if (petal_contains(s, g(sample_petal(s, rng)))) ++ok;
  return static_cast<double>(ok) / samples;
}

/// Largest a = 2^-j <= 0.25 for which every attracting petal is mapped into itself
/// on `samples` random points each.
inline double select_petal_a(const Germ<Complex>& g, int p, int samples = 1000, std::uint64_t seed = 7,
                             int max_halvings = 30) {
  double a = 0.25;
  for (int h = 0; h <= max_halvings; ++h, a /= 2) {
    bool ok = true;
    for (int k = 0; k < p && ok; ++k)
      ok = petal_invariance(g, {p, a, k, PetalKind::kAttracting}, samples, seed + static_cast<std::uint64_t>(k)) == 1.0;
    if (ok) return a;
  }
  fail(ErrorKind::kDomain, "no petal size a >= 2^-32 passed the invariance test");
}

// ---------------------------------------------------------------------------
// Charts Phi, Psi_k and the Fatou coordinate

/// Phi(t) = t^{-p}.
inline Complex phi_chart(Complex t, int p) {
  require(t != Complex(0.0), ErrorKind::kDomain, "phi_chart at t = 0");
  return std::pow(t, -p);
}

/// Inverse branch of Phi onto the sector around 2 k pi / p; rejects arg w = pi.
inline Complex psi_branch(int k, Complex w, int p) {
  require(w != Complex(0.0), ErrorKind::kDomain, "psi_branch at w = 0");
  require(!(w.imag() == 0.0 && w.real() < 0.0), ErrorKind::kDomain, "psi_branch on the slit arg w = pi");
  return std::exp(-std::log(w) / static_cast<double>(p)) *
         std::polar(1.0, 2 * std::numbers::pi * k / p);
}

/// v = Phi o g o Psi_k for a normalised germ g.
inline Complex petal_map(const Germ<Complex>& g, int p, int k, Complex w) {
  return phi_chart(g(psi_branch(k, w, p)), p);
}

struct FatouValue {
  Complex u;
  double error_estimate = 0.0;
  bool log_corrected = false;
};

/// Abel coordinate u(w) ~ v^n(w) - n p on the image of the petal, up to an additive
/// constant. When the normalised germ is t - t^{p+1} + b t^{2p+1} + ..., the
/// logarithmic drift of v^n is removed as well, which turns the 1/n convergence
/// into 1/n^2.
inline FatouValue fatou_coordinate(const Germ<Complex>& g, const ParabolicData& d, int k, Complex w,
                                   int n_iter) {
  require(n_iter >= 1, ErrorKind::kInput, "n_iter must be >= 1");
  const int p = d.p;
  const bool corrected = d.residual_order >= 2 * p + 1;
  const Complex beta = static_cast<double>(p) * (p + 1) / 2.0 - static_cast<double>(p) * d.b;
  auto u_at = [&](Complex wn, int n) {
    Complex u = wn - static_cast<double>(n) * p;
    if (corrected) u -= beta / static_cast<double>(p) * std::log(wn);
    return u;
  };
  Complex wn = w, prev = u_at(w, 0), cur = prev;
  for (int n = 1; n <= n_iter; ++n) {
    wn = petal_map(g, p, k, wn);
    require(std::isfinite(wn.real()) && std::isfinite(wn.imag()) && !(wn.imag() == 0.0 && wn.real() < 0.0),
            ErrorKind::kDomain, "Fatou orbit left the chart domain");
    prev = cur;
    cur = u_at(wn, n);
  }
  // Increments decay like |W_n|^-2 (corrected) so the tail is about |W_n| / p times
  // the last one.
  const double tail = std::abs(cur - prev) * std::abs(wn) / p;
  return {cur, tail, corrected};
}

}  // namespace juliatwin
