#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "juliatwin/charts.hpp"
#include "juliatwin/cloud.hpp"
#include "juliatwin/ratmap.hpp"

namespace juliatwin {

/// Largest number of fixed points (with multiplicity) periodic_points will solve for.
inline constexpr std::int64_t kDefaultRootBudget = 4097;

inline constexpr double kOrbitGroupingTolerance = 1e-7;
inline constexpr double kMultiplicityTolerance = 1e-6;
inline constexpr double kResidualFlag = 1e-8;

enum class PointClass {
  kSuperattracting,
  kAttracting,
  kRepelling,
  kRationallyIndifferent,
  kIrrationallyIndifferent,
};

inline const char* to_string(PointClass c) {
  switch (c) {
    case PointClass::kSuperattracting: return "superattracting";
    case PointClass::kAttracting: return "attracting";
    case PointClass::kRepelling: return "repelling";
    case PointClass::kRationallyIndifferent: return "rationally_indifferent";
    case PointClass::kIrrationallyIndifferent: return "irrationally_indifferent";
  }
  return "?";
}

struct MultiplierClass {
  PointClass kind = PointClass::kRepelling;
  int q = 0;  // order of the root of unity for kRationallyIndifferent

  bool repelling() const { return kind == PointClass::kRepelling; }
  friend bool operator==(const MultiplierClass&, const MultiplierClass&) = default;
};

/// |lambda| ~ 0, < 1, > 1, or on the unit circle (root of unity of order <= q_max or not).
inline MultiplierClass classify_multiplier(Complex lambda, int q_max = 64, double tol = 1e-6) {
  require(q_max >= 1, ErrorKind::kInput, "q_max must be >= 1");
  const double r = std::abs(lambda);
  if (r < 1e-10) return {PointClass::kSuperattracting, 0};
  if (r < 1.0 - tol) return {PointClass::kAttracting, 0};
  if (r > 1.0 + tol) return {PointClass::kRepelling, 0};
  Complex power = 1.0;
  for (int q = 1; q <= q_max; ++q) {
    power *= lambda;
    if (std::abs(power - 1.0) < tol) return {PointClass::kRationallyIndifferent, q};
  }
  return {PointClass::kIrrationallyIndifferent, 0};
}

struct OrbitRecord {
  int period = 1;
  std::vector<SpherePoint> points;  // cyclic order: f(points[i]) = points[i+1]
  Complex multiplier;               // (f^period)' along the orbit
  MultiplierClass cls;
  int multiplicity = 1;             // as a root of f^n(z) = z
  double residual = 0.0;            // max chordal |f(points[i]) - points[i+1]|
  bool flagged = false;             // residual above kResidualFlag or grouping trouble
};

namespace detail {

// z Q_n(z) - P_n(z): the fixed-point equation of f^n, of formal degree d^n + 1.
template <FieldScalar S>
Poly<S> fixed_point_polynomial(const RatMap<S>& fn) {
  return Poly<S>::identity() * fn.den() - fn.num();
}

// P^h(a, b) = sum p_i a^i b^(d-i) and its two partials, evaluated in whichever
// affine ratio is bounded.
struct HomValue {
  Complex v, da, db;
};

inline HomValue homogeneous_partials(const Poly<Complex>& p, int d, Complex a, Complex b) {
  auto powc = [](Complex x, int k) {
    Complex r = 1.0;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
  };
  Complex val = 0.0, der = 0.0;
  if (std::abs(a) <= std::abs(b)) {
    const Complex u = a / b;
    for (int i = p.degree(); i >= 0; --i) {
      der = der * u + val;
      val = val * u + p[i];
    }
    const Complex bd1 = powc(b, d - 1);
    return {bd1 * b * val, bd1 * der, bd1 * (static_cast<double>(d) * val - u * der)};
  }
  const Complex v = b / a;
  // R(v) = sum p_i v^(d-i)
  for (int j = 0; j <= d; ++j) {
    der = der * v + val;
    val = val * v + p[j];
  }
  const Complex ad1 = powc(a, d - 1);
  return {ad1 * a * val, ad1 * (static_cast<double>(d) * val - v * der), ad1 * der};
}

// Newton ratio of E(z) = z Q_n(z) - P_n(z) computed by iterating f in homogeneous
// coordinates, never forming the ill-conditioned coefficients of f^n.
class FixedPointEquation {
 public:
  FixedPointEquation(const RatMap<Complex>& f, int n, int zero_roots)
      : p_(f.num()), q_(f.den()), d_(f.degree()), n_(n), zero_roots_(zero_roots) {}

  NewtonTerm operator()(Complex z) const {
    Complex a = z, b = 1.0, da = 1.0, db = 0.0;
    rescale(a, b, da, db);
    for (int k = 0; k < n_; ++k) {
      const HomValue P = homogeneous_partials(p_, d_, a, b);
      const HomValue Q = homogeneous_partials(q_, d_, a, b);
      Complex na = P.v, nb = Q.v;
      Complex nda = P.da * da + P.db * db, ndb = Q.da * da + Q.db * db;
      a = na, b = nb, da = nda, db = ndb;
      rescale(a, b, da, db);
    }
    const Complex e = z * b - a;
    const Complex de = b + z * db - da;
    if (e == Complex(0.0)) return {Complex(0.0), true};
    Complex inv_ratio = de / e;
    if (zero_roots_ > 0) inv_ratio -= static_cast<double>(zero_roots_) / z;
    return {1.0 / inv_ratio, false};
  }

 private:
  static void rescale(Complex& a, Complex& b, Complex& da, Complex& db) {
    const double s = std::max(std::abs(a), std::abs(b));
    if (s == 0.0 || !std::isfinite(s)) return;
    a /= s, b /= s, da /= s, db /= s;
  }

  Poly<Complex> p_, q_;
  int d_, n_, zero_roots_;
};

// Finite roots of E with repetition: exact zeros from the coefficient pattern, the
// rest by Aberth on the homogeneous evaluator.
template <FieldScalar S>
std::vector<Complex> fixed_point_roots(const RatMap<S>& f, const Poly<S>& e, int n) {
  const int deg = e.degree();
  int zeros = 0;
  while (zeros < deg && is_zero(e[zeros])) ++zeros;
  std::vector<Complex> roots(static_cast<std::size_t>(zeros), Complex(0.0));
  const int m = deg - zeros;
  if (m <= 0) return roots;
  const double log_radius = (log_magnitude(e[zeros]) - log_magnitude(e.leading())) / m;
  const double radius = std::clamp(std::exp(log_radius), 1e-8, 1e8);
  const FixedPointEquation eq(to_float(f), n, zeros);
  RootSolveOptions opt;
  for (int attempt = 0; attempt < 4; ++attempt) {
    opt.angle_offset = 0.4 + 0.7 * attempt;
    auto res = aberth_iterate(eq, m, Complex(0.0), radius * (1.0 + 0.1 * attempt), opt);
    if (res.converged) {
      roots.insert(roots.end(), res.roots.begin(), res.roots.end());
      return roots;
    }
  }
  fail(ErrorKind::kRootFinder, "Aberth iteration did not converge for the period-" +
                                   std::to_string(n) + " equation of degree " + std::to_string(deg));
}

// Newton on f^n(z) = z in the chart of z; steps are kept only if they help.
inline SpherePoint polish_periodic(const ChartedMap& f, SpherePoint z, int n) {
  auto residual = [&](const SpherePoint& p) { return chordal(f.iterate_with_derivative(p, n).first, p); };
  double res = residual(z);
  for (int it = 0; it < 8 && res > 0.0; ++it) {
    const Chart c = chart_of(z);
    const auto [img, dg] = f.iterate_with_derivative(z, n);
    const Complex s = coordinate(z, c);
    const Complex g = coordinate(img, c);
    const Complex den = dg - 1.0;
    if (std::abs(den) < 1e-8 || !std::isfinite(std::abs(g))) break;
    const Complex s_new = s - (g - s) / den;
    if (!std::isfinite(s_new.real()) || !std::isfinite(s_new.imag())) break;
    const SpherePoint cand = from_coordinate(s_new, c);
    const double cand_res = residual(cand);
    if (!(cand_res < res)) break;
    z = cand;
    res = cand_res;
  }
  return z;
}

}  // namespace detail

/// All orbits of exact period dividing n, from the d^n + 1 roots of the
/// homogenised fixed-point equation of f^n.
template <FieldScalar S>
std::vector<OrbitRecord> periodic_points(const RatMap<S>& f, int n,
                                         std::int64_t root_budget = kDefaultRootBudget) {
  require(n >= 1, ErrorKind::kInput, "period must be positive");
  require(f.degree() >= 2, ErrorKind::kInput, "periodic_points needs deg f >= 2");
  const std::int64_t dn = checked_power(f.degree(), n, root_budget);
  require(dn + 1 <= root_budget, ErrorKind::kBudget,
          "d^n + 1 exceeds root budget " + std::to_string(root_budget));
  const RatMap<S> fn = iterate(f, n, root_budget);
  Poly<S> eq = detail::fixed_point_polynomial(fn);
  if constexpr (std::is_same_v<S, Complex>) eq = eq.trimmed_relative(1e-14);
  const int formal = static_cast<int>(dn) + 1;

  const ChartedMap fc(to_float(f));
  std::vector<SpherePoint> roots;
  for (const auto& r : detail::fixed_point_roots(f, eq, n))
    roots.push_back(detail::polish_periodic(fc, SpherePoint::affine(r), n));
  for (int k = std::max(eq.degree(), 0); k < formal; ++k) roots.push_back(SpherePoint::infinity());
  auto clusters = cluster_points(roots, kMultiplicityTolerance);

  // Group clusters into cycles.
  std::vector<char> used(clusters.size(), 0);
  auto nearest_cluster = [&](const SpherePoint& p) {
    std::size_t best = clusters.size();
    double bd = kOrbitGroupingTolerance;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      const double d = chordal(clusters[i].centre, p);
      if (d < bd) {
        bd = d;
        best = i;
      }
    }
    return best;
  };

  std::vector<OrbitRecord> out;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    if (used[i]) continue;
    const SpherePoint z = clusters[i].centre;
    // Exact period: smallest divisor k of n with f^k(z) = z.
    int period = n;
    {
      SpherePoint cur = z;
      for (int k = 1; k <= n; ++k) {
        cur = fc(cur);
        if (n % k == 0 && chordal(cur, z) < kOrbitGroupingTolerance * std::max(1, k)) {
          period = k;
          break;
        }
      }
    }
    OrbitRecord rec;
    rec.period = period;
    rec.multiplicity = clusters[i].multiplicity;
    rec.points.push_back(z);
    used[i] = 1;
    SpherePoint cur = z;
    for (int k = 1; k < period; ++k) {
      cur = fc(cur);
      const std::size_t j = nearest_cluster(cur);
      if (j < clusters.size() && !used[j]) {
        used[j] = 1;
        rec.points.push_back(clusters[j].centre);
        if (clusters[j].multiplicity != rec.multiplicity) rec.flagged = true;
      } else {
        rec.points.push_back(cur);
        rec.flagged = true;
      }
    }
    for (int k = 0; k < period; ++k) {
      const auto img = fc(rec.points[k]);
      rec.residual = std::max(rec.residual, chordal(img, rec.points[(k + 1) % period]));
    }
    if (rec.residual > kResidualFlag) rec.flagged = true;
    rec.multiplier = fc.cycle_multiplier(rec.points);
    rec.cls = classify_multiplier(rec.multiplier);
    out.push_back(std::move(rec));
  }
  return out;
}

/// Sum over orbits of period * multiplicity; equals d^n + 1 when nothing was lost.
inline int weighted_fixed_point_count(const std::vector<OrbitRecord>& orbits) {
  int total = 0;
  for (const auto& o : orbits) total += o.period * o.multiplicity;
  return total;
}

/// Same cycle (as a set of points) up to kMultiplicityTolerance.
inline bool same_cycle(const OrbitRecord& a, const OrbitRecord& b, double tol = kMultiplicityTolerance) {
  if (a.period != b.period) return false;
  for (const auto& p : a.points) {
    const bool hit = std::any_of(b.points.begin(), b.points.end(),
                                 [&](const SpherePoint& q) { return chordal(p, q) < tol; });
    if (!hit) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Census of non-repelling cycles

struct CensusRow {
  int n = 0;
  int superattracting = 0, attracting = 0, repelling = 0, rationally_indifferent = 0,
      irrationally_indifferent = 0;
  std::vector<OrbitRecord> nonrepelling;
};

struct Census {
  std::vector<CensusRow> rows;
  bool stable = true;  // the set of non-repelling cycles is the same for every n
};

template <FieldScalar S>
Census nonrepelling_census(const RatMap<S>& f, int n_max,
                           std::int64_t root_budget = kDefaultRootBudget) {
  require(n_max >= 1, ErrorKind::kInput, "n_max must be >= 1");
  Census census;
  for (int n = 1; n <= n_max; ++n) {
    CensusRow row;
    row.n = n;
    for (auto& o : periodic_points(f, n, root_budget)) {
      switch (o.cls.kind) {
        case PointClass::kSuperattracting: ++row.superattracting; break;
        case PointClass::kAttracting: ++row.attracting; break;
        case PointClass::kRepelling: ++row.repelling; break;
        case PointClass::kRationallyIndifferent: ++row.rationally_indifferent; break;
        case PointClass::kIrrationallyIndifferent: ++row.irrationally_indifferent; break;
      }
      if (!o.cls.repelling()) row.nonrepelling.push_back(std::move(o));
    }
    census.rows.push_back(std::move(row));
  }
  // Non-repelling cycles found at any n must already be present at every n
  // (they are finite in number; first-found cycles reappear for multiples).
  const auto& first = census.rows.front().nonrepelling;
  for (const auto& row : census.rows) {
    if (row.nonrepelling.size() != first.size()) census.stable = false;
    for (const auto& o : row.nonrepelling) {
      const bool seen = std::any_of(first.begin(), first.end(),
                                    [&](const OrbitRecord& q) { return same_cycle(o, q); });
      if (!seen) census.stable = false;
    }
  }
  return census;
}

// ---------------------------------------------------------------------------
// Critical orbit hypothesis

enum class CriticalStatus {
  kFatou,                  // not on the cloud; orbit settles on an attracting cycle
  kPreperiodicRepelling,   // on the cloud; lands on a repelling cycle
  kPreperiodicOther,       // on the cloud; lands on a non-repelling cycle
  kUnknown,                // neither separates from the cloud nor closes up
};

inline const char* to_string(CriticalStatus s) {
  switch (s) {
    case CriticalStatus::kFatou: return "fatou";
    case CriticalStatus::kPreperiodicRepelling: return "preperiodic_repelling";
    case CriticalStatus::kPreperiodicOther: return "preperiodic_nonrepelling";
    case CriticalStatus::kUnknown: return "unknown";
  }
  return "?";
}

struct CriticalOrbit {
  SpherePoint point;
  int multiplicity = 1;
  bool in_julia = false;
  double cloud_distance = 0.0;
  CriticalStatus status = CriticalStatus::kUnknown;
  int preperiod = -1;  // steps before the cycle is entered
  int cycle_period = 0;
  Complex cycle_multiplier;
};

struct CriticalOrbitReport {
  std::vector<CriticalOrbit> orbits;
  // True: every critical point on J is preperiodic repelling. False: some is not.
  // Empty: undecided because some status is unknown.
  std::optional<bool> hypothesis_satisfied;
};

namespace detail {

// Looks for the first k with f^k(c) within tol of an earlier f^j(c).
inline std::optional<std::pair<int, int>> find_closure(const std::vector<SpherePoint>& orbit,
                                                       double tol) {
  for (std::size_t k = 1; k < orbit.size(); ++k)
    for (std::size_t j = 0; j < k; ++j)
      if (chordal(orbit[k], orbit[j]) < tol) return std::pair<int, int>{static_cast<int>(j), static_cast<int>(k)};
  return std::nullopt;
}

}  // namespace detail

/// Decides, per critical point, membership in the sampled Julia set and whether the
/// forward orbit is preperiodic onto a repelling cycle.
template <FieldScalar S>
CriticalOrbitReport critical_orbit_report(const RatMap<S>& f, const PointCloud& cloud, int n_steps,
                                          double tol) {
  require(!cloud.empty(), ErrorKind::kInput, "critical_orbit_report needs a non-empty cloud");
  require(n_steps >= 1 && tol > 0.0, ErrorKind::kInput, "n_steps >= 1 and tol > 0 required");
  const ChartedMap fc(to_float(f));
  const SphereGrid grid(cloud.points, std::max(tol, 1e-4));
  CriticalOrbitReport report;
  bool all_ok = true, any_unknown = false;
  for (const auto& cp : critical_points(f)) {
    CriticalOrbit co;
    co.point = cp.point;
    co.multiplicity = cp.multiplicity;
    co.cloud_distance = distance_to_cloud(grid, cp.point);
    co.in_julia = co.cloud_distance < tol;

    std::vector<SpherePoint> orbit{cp.point};
    for (int k = 0; k < n_steps; ++k) orbit.push_back(fc(orbit.back()));

    // Closure test uses a much finer tolerance than cloud membership.
    const double close_tol = 1e-9;
    auto closure = detail::find_closure(orbit, close_tol);
    if (closure) {
      const auto [j, k] = *closure;
      std::vector<SpherePoint> cycle(orbit.begin() + j, orbit.begin() + k);
      co.preperiod = j;
      co.cycle_period = k - j;
      co.cycle_multiplier = fc.cycle_multiplier(cycle);
      // Preimages of a repelling cycle lie on J however sparse the cloud is.
      if (classify_multiplier(co.cycle_multiplier).repelling()) co.in_julia = true;
    }

    if (co.in_julia) {
      if (closure) {
        co.status = classify_multiplier(co.cycle_multiplier).repelling()
                        ? CriticalStatus::kPreperiodicRepelling
                        : CriticalStatus::kPreperiodicOther;
      } else {
        co.status = CriticalStatus::kUnknown;
      }
    } else {
      // Off the cloud: Fatou if the orbit settles on an attracting cycle that stays
      // clear of the cloud.
      bool settled = false;
      if (closure) {
        settled = std::abs(co.cycle_multiplier) < 0.99;
      } else {
        const SpherePoint tail = orbit.back();
        for (int q = 1; q <= 12 && !settled; ++q) {
          SpherePoint cur = tail;
          std::vector<SpherePoint> cyc{cur};
          for (int s = 1; s < q; ++s) cyc.push_back(cur = fc(cur));
          if (chordal(fc(cyc.back()), tail) > 1e-6) continue;
          const Complex lam = fc.cycle_multiplier(cyc);
          if (std::abs(lam) < 0.99 && distance_to_cloud(grid, tail) > tol) {
            settled = true;
            co.cycle_period = q;
            co.cycle_multiplier = lam;
          }
        }
      }
      co.status = settled ? CriticalStatus::kFatou : CriticalStatus::kUnknown;
    }
    if (co.status == CriticalStatus::kUnknown) any_unknown = true;
    if (co.status == CriticalStatus::kPreperiodicOther) all_ok = false;
    report.orbits.push_back(co);
  }
  if (!all_ok) {
    report.hypothesis_satisfied = false;
  } else if (!any_unknown) {
    report.hypothesis_satisfied = true;
  }
  return report;
}

}  // namespace juliatwin
