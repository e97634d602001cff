#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "juliatwin/poly.hpp"
#include "juliatwin/sphere.hpp"

namespace juliatwin {

struct RootSolveOptions {
  int max_iterations = 800;
  // Rotation of the initial circle of guesses; varied on retries.
  double angle_offset = 0.4;
};

struct RootSolveResult {
  std::vector<Complex> roots;  // deg p roots, with repetition
  bool converged = false;
  int iterations = 0;
};

// Newton ratio p(z)/p'(z), with a flag set when |p(z)| is within rounding error.
struct NewtonTerm {
  Complex ratio;
  bool at_noise_level = false;
};

namespace detail {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Coefficient-based Newton term, evaluated in the reversed polynomial when |z| > 1
// so that large roots stay well scaled.

inline NewtonTerm newton_term(const std::vector<Complex>& c, Complex z) {
  const int n = static_cast<int>(c.size()) - 1;
  if (std::abs(z) <= 1.0) {
    Complex p = c[n], dp = 0.0;
    double bound = std::abs(c[n]);
    const double az = std::abs(z);
    for (int k = n - 1; k >= 0; --k) {
      dp = dp * z + p;
      p = p * z + c[k];
      bound = bound * az + std::abs(c[k]);
    }
    const bool noise = std::abs(p) <= 8.0 * kEps * bound;
    if (dp == Complex(0.0)) return {Complex(0.0), noise};
    return {p / dp, noise};
  }
  // p(z) = z^n r(w), w = 1/z, r(w) = sum c[k] w^(n-k).
  const Complex w = 1.0 / z;
  Complex r = c[0], dr = 0.0;
  double bound = std::abs(c[0]);
  const double aw = std::abs(w);
  for (int k = 1; k <= n; ++k) {
    dr = dr * w + r;
    r = r * w + c[k];
    bound = bound * aw + std::abs(c[k]);
  }
  const bool noise = std::abs(r) <= 8.0 * kEps * bound;
  // p'(z) = z^(n-1) (n r(w) - w r'(w)), hence p/p' = z r / (n r - w r').
  const Complex den = static_cast<double>(n) * r - w * dr;
  if (den == Complex(0.0)) return {Complex(0.0), noise};
  return {z * r / den, noise};
}

// |p(z)| for |z| <= 1, |p(z)| / |z|^n otherwise.
inline double scaled_abs(const std::vector<Complex>& c, Complex z) {
  const int n = static_cast<int>(c.size()) - 1;
  if (std::abs(z) <= 1.0) {
    Complex p = 0.0;
    for (int k = n; k >= 0; --k) p = p * z + c[k];
    return std::abs(p);
  }
  const Complex w = 1.0 / z;
  Complex r = 0.0;
  for (int k = 0; k <= n; ++k) r = r * w + c[k];
  return std::abs(r);
}

}  // namespace detail

/// Aberth-Ehrlich simultaneous iteration for the m roots of a function known only
/// through its Newton ratio, from a perturbed circle of the given centre and radius.
/// A root is settled once its Newton ratio is at noise level, its correction is
/// below rounding, or it has spent several iterations at small corrections
/// (noisy evaluators and multiple roots never reach rounding level).
template <class NewtonFn>
RootSolveResult aberth_iterate(NewtonFn&& newton, int m, Complex centre, double radius,
                               const RootSolveOptions& opt = {}) {
  RootSolveResult out;
  std::vector<Complex> z(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    const double ang = 2.0 * std::numbers::pi * k / m + opt.angle_offset;
    z[static_cast<std::size_t>(k)] = centre + std::polar(radius, ang);
  }
  std::vector<char> done(static_cast<std::size_t>(m), 0);
  std::vector<int> small_steps(static_cast<std::size_t>(m), 0);
  int remaining = m;
  int it = 0;
  for (; it < opt.max_iterations && remaining > 0; ++it) {
    for (int k = 0; k < m; ++k) {
      const auto uk = static_cast<std::size_t>(k);
      if (done[uk]) continue;
      const Complex zk = z[uk];
      const NewtonTerm term = newton(zk);
      if (term.at_noise_level) {
        done[uk] = 1;
        --remaining;
        continue;
      }
      Complex s = 0.0;
      for (int j = 0; j < m; ++j)
        if (j != k) s += 1.0 / (zk - z[static_cast<std::size_t>(j)]);
      const Complex corr = term.ratio / (1.0 - term.ratio * s);
      if (!std::isfinite(corr.real()) || !std::isfinite(corr.imag())) continue;
      z[uk] = zk - corr;
      const double size = std::abs(corr);
      const double scale = std::max(std::abs(z[uk]), 1e-300);
      if (size <= 1e-6 * std::max(scale, 1.0)) ++small_steps[uk];
      if (size <= 2.0 * detail::kEps * scale || small_steps[uk] >= 8) {
        done[uk] = 1;
        --remaining;
      }
    }
  }
  out.iterations = it;
  out.converged = remaining == 0;
  out.roots = std::move(z);
  return out;
}

/// All roots of p by Aberth-Ehrlich iteration on its coefficients.
inline RootSolveResult aberth_roots(const Poly<Complex>& p, const RootSolveOptions& opt = {}) {
  RootSolveResult out;
  const int n = p.degree();
  require(n >= 0, ErrorKind::kDomain, "root solve of the zero polynomial");
  if (n == 0) {
    out.converged = true;
    return out;
  }
  // Monic copy.
  std::vector<Complex> c = p.coeffs();
  const Complex lead = c.back();
  for (auto& v : c) v /= lead;

  // Factor out exact zero roots, which are common (z^k factors).
  int zero_roots = 0;
  while (zero_roots < n && c[static_cast<std::size_t>(zero_roots)] == Complex(0.0)) ++zero_roots;
  std::vector<Complex> red(c.begin() + zero_roots, c.end());
  const int m = n - zero_roots;
  out.roots.assign(static_cast<std::size_t>(zero_roots), Complex(0.0));
  if (m == 0) {
    out.converged = true;
    return out;
  }
  if (m == 1) {
    out.roots.push_back(-red[0]);
    out.converged = true;
    return out;
  }

  // Initial guesses around the centroid; radius from the geometric mean of |roots|.
  const Complex centre = -red[static_cast<std::size_t>(m - 1)] / static_cast<double>(m);
  Poly<Complex> shifted = Poly<Complex>(red).shifted(centre);
  double radius = std::pow(std::abs(shifted[0]), 1.0 / m);
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    radius = 0.0;
    for (int k = 0; k < m; ++k)
      radius = std::max(radius, std::pow(std::abs(red[static_cast<std::size_t>(k)]), 1.0 / (m - k)));
    if (!(radius > 0.0)) radius = 1.0;
  }
  auto res = aberth_iterate([&](Complex z) { return detail::newton_term(red, z); }, m, centre,
                            radius, opt);
  out.iterations = res.iterations;
  out.converged = res.converged;
  out.roots.insert(out.roots.end(), res.roots.begin(), res.roots.end());
  return out;
}

/// A few plain Newton steps per root; a step is kept only if it lowers |p|.
inline void newton_polish(const Poly<Complex>& p, std::vector<Complex>& roots, int steps = 3) {
  if (p.degree() < 1) return;
  const auto& c = p.coeffs();
  for (auto& r : roots) {
    for (int s = 0; s < steps; ++s) {
      auto term = detail::newton_term(c, r);
      if (term.at_noise_level || term.ratio == Complex(0.0)) break;
      const Complex cand = r - term.ratio;
      if (detail::scaled_abs(c, cand) <= detail::scaled_abs(c, r)) {
        r = cand;
      } else {
        break;
      }
    }
  }
}

/// Roots of p with retries on non-convergence; throws kRootFinder after `attempts`.
inline std::vector<Complex> solve_roots(const Poly<Complex>& p, int attempts = 4) {
  RootSolveOptions opt;
  for (int a = 0; a < attempts; ++a) {
    opt.angle_offset = 0.4 + 0.7 * a;
    auto res = aberth_roots(p, opt);
    if (res.converged) {
      newton_polish(p, res.roots, 2);
      return res.roots;
    }
  }
  fail(ErrorKind::kRootFinder,
       "Aberth iteration did not converge for degree " + std::to_string(p.degree()));
}

struct PointCluster {
  SpherePoint centre;
  int multiplicity = 0;
};

/// Greedy chordal clustering; the first point of a cluster is its representative.
inline std::vector<PointCluster> cluster_points(const std::vector<SpherePoint>& pts,
                                                double chordal_tol) {
  std::vector<PointCluster> out;
  for (const auto& p : pts) {
    auto it = std::find_if(out.begin(), out.end(), [&](const PointCluster& c) {
      return chordal(c.centre, p) < chordal_tol;
    });
    if (it == out.end()) {
      out.push_back({p, 1});
    } else {
      ++it->multiplicity;
    }
  }
  return out;
}

}  // namespace juliatwin
