#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "juliatwin/spectrum.hpp"

using namespace juliatwin;
using Q = GaussRational;
using ExactMap = RatMap<Q>;

namespace {

ExactMap poly_map(std::initializer_list<long> c) {
  std::vector<Q> v;
  for (long x : c) v.emplace_back(x);
  return ExactMap::polynomial(Poly<Q>(std::move(v)));
}

const OrbitRecord* find_orbit(const std::vector<OrbitRecord>& orbits, Complex z) {
  for (const auto& o : orbits)
    for (const auto& p : o.points)
      if (chordal(p, SpherePoint::affine(z)) < 1e-8) return &o;
  return nullptr;
}

}  // namespace

TEST(PeriodicPoints, SquareFixedPoints) {
  const auto orbits = periodic_points(poly_map({0, 0, 1}), 1);
  ASSERT_EQ(orbits.size(), 3u);
  EXPECT_EQ(weighted_fixed_point_count(orbits), 3);
  const auto* zero = find_orbit(orbits, 0.0);
  const auto* one = find_orbit(orbits, 1.0);
  ASSERT_TRUE(zero && one);
  EXPECT_EQ(zero->cls.kind, PointClass::kSuperattracting);
  EXPECT_EQ(one->cls.kind, PointClass::kRepelling);
  EXPECT_NEAR(std::abs(one->multiplier - 2.0), 0.0, 1e-12);
  bool saw_inf = false;
  for (const auto& o : orbits)
    if (o.points[0].is_infinite()) {
      saw_inf = true;
      EXPECT_EQ(o.cls.kind, PointClass::kSuperattracting);
    }
  EXPECT_TRUE(saw_inf);
}

TEST(PeriodicPoints, SquarePeriodTwo) {
  const auto orbits = periodic_points(poly_map({0, 0, 1}), 2);
  EXPECT_EQ(orbits.size(), 4u);
  EXPECT_EQ(weighted_fixed_point_count(orbits), 5);
  const auto* two = find_orbit(orbits, std::polar(1.0, 2 * std::numbers::pi / 3));
  ASSERT_TRUE(two);
  EXPECT_EQ(two->period, 2);
  EXPECT_NEAR(std::abs(two->multiplier - 4.0), 0.0, 1e-10);
  EXPECT_NEAR(chordal(two->points[1], SpherePoint::affine(std::polar(1.0, 4 * std::numbers::pi / 3))), 0.0,
              1e-10);
}

TEST(PeriodicPoints, CountWithMultiplicity) {
  // z + z^2 has a double fixed point at 0.
  const std::vector<ExactMap> maps = {poly_map({0, 1, 1}), chebyshev<Q>(3), poly_map({-2, 0, 1}),
                                      ExactMap::make(Poly<Q>{Q(1), Q(0), Q(1)}, Poly<Q>{Q(0), Q(2)})};
  for (const auto& f : maps) {
    for (int n = 1; n <= 4; ++n) {
      const auto orbits = periodic_points(f, n);
      EXPECT_EQ(weighted_fixed_point_count(orbits),
                static_cast<int>(std::pow(f.degree(), n)) + 1);
      for (const auto& o : orbits) EXPECT_EQ(static_cast<int>(o.points.size()), o.period);
    }
  }
  const auto par = periodic_points(poly_map({0, 1, 1}), 1);
  const auto* zero = find_orbit(par, 0.0);
  ASSERT_TRUE(zero);
  EXPECT_EQ(zero->multiplicity, 2);
  EXPECT_EQ(zero->cls.kind, PointClass::kRationallyIndifferent);
  EXPECT_EQ(zero->cls.q, 1);
}

TEST(PeriodicPoints, BudgetGuard) {
  try {
    periodic_points(poly_map({0, 0, 1}), 13);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kBudget);
  }
}

TEST(ClassifyMultiplier, Examples) {
  EXPECT_EQ(classify_multiplier(2.0).kind, PointClass::kRepelling);
  const auto third = classify_multiplier(std::polar(1.0, 2 * std::numbers::pi / 3));
  EXPECT_EQ(third.kind, PointClass::kRationallyIndifferent);
  EXPECT_EQ(third.q, 3);
  EXPECT_EQ(classify_multiplier(std::polar(1.0, 2 * std::numbers::pi * 0.6180339887), 64).kind,
            PointClass::kIrrationallyIndifferent);
  EXPECT_EQ(classify_multiplier(0.0).kind, PointClass::kSuperattracting);
  EXPECT_EQ(classify_multiplier(0.5).kind, PointClass::kAttracting);
}

TEST(ClassifyMultiplier, IrrationalOracle) {
  // Independent scan of |lambda^q - 1| for q <= 64.
  const Complex lam = std::polar(1.0, 2 * std::numbers::pi * 0.6180339887);
  double closest = 1e9;
  for (int q = 1; q <= 64; ++q) closest = std::min(closest, std::abs(std::pow(lam, q) - 1.0));
  EXPECT_GT(closest, 1e-6);
}

TEST(Census, SquareMap) {
  const auto census = nonrepelling_census(poly_map({0, 0, 1}), 4);
  EXPECT_TRUE(census.stable);
  int prev_rep = -1;
  for (const auto& row : census.rows) {
    EXPECT_EQ(row.nonrepelling.size(), 2u);
    EXPECT_EQ(row.superattracting, 2);
    EXPECT_GT(row.repelling, prev_rep);
    prev_rep = row.repelling;
  }
}

TEST(Census, ChebyshevThree) {
  const auto census = nonrepelling_census(chebyshev<Q>(3), 3);
  EXPECT_TRUE(census.stable);
  for (const auto& row : census.rows) EXPECT_EQ(row.nonrepelling.size(), 1u);  // infinity
}

TEST(Properties, MultiplierRotationInvariant) {
  const ChartedMap f(to_float(poly_map({-1, 0, 1, 1})));
  for (int n = 2; n <= 3; ++n) {
    for (const auto& o : periodic_points(poly_map({-1, 0, 1, 1}), n)) {
      auto pts = o.points;
      for (int r = 0; r < o.period; ++r) {
        std::rotate(pts.begin(), pts.begin() + 1, pts.end());
        EXPECT_LT(std::abs(f.cycle_multiplier(pts) - o.multiplier), 1e-9 * std::max(1.0, std::abs(o.multiplier)));
      }
    }
  }
}

TEST(Properties, MultiplierConjugationInvariant) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> coef(-3, 3);
  const auto f = poly_map({-1, 0, 1});  // basilica: attracting 2-cycle plus repelling points
  for (int trial = 0; trial < 5; ++trial) {
    Q a(coef(rng) | 1, coef(rng)), b(coef(rng)), c(coef(rng), 1), d(coef(rng) | 1);
    if (a * d - b * c == Q(0)) continue;
    const auto sigma = ExactMap::make(Poly<Q>{b, a}, Poly<Q>{d, c});
    const auto g = mobius_conjugate(f, sigma);
    for (int n = 1; n <= 2; ++n) {
      auto of = periodic_points(f, n);
      auto og = periodic_points(g, n);
      ASSERT_EQ(of.size(), og.size());
      auto key = [](const OrbitRecord& o) { return std::pair(o.period, std::abs(o.multiplier)); };
      std::vector<std::pair<int, double>> kf, kg;
      for (const auto& o : of) kf.push_back(key(o));
      for (const auto& o : og) kg.push_back(key(o));
      std::sort(kf.begin(), kf.end());
      std::sort(kg.begin(), kg.end());
      for (std::size_t i = 0; i < kf.size(); ++i) {
        EXPECT_EQ(kf[i].first, kg[i].first);
        EXPECT_NEAR(kf[i].second, kg[i].second, 1e-7 * std::max(1.0, kf[i].second));
      }
    }
  }
}

TEST(Properties, PowerMapCirclePoints) {
  for (int d : {2, 3}) {
    const auto f = poly_map(d == 2 ? std::initializer_list<long>{0, 0, 1} : std::initializer_list<long>{0, 0, 0, 1});
    for (int n = 1; n <= 3; ++n)
      for (const auto& o : periodic_points(f, n)) {
        if (o.points[0].is_infinite() || std::abs(o.points[0].value()) < 0.5) continue;
        EXPECT_NEAR(std::abs(o.points[0].value()), 1.0, 1e-10);
        EXPECT_TRUE(o.cls.repelling());
        EXPECT_NEAR(std::abs(o.multiplier), std::pow(d, o.period), 1e-8);
      }
  }
}

TEST(CriticalOrbits, Verdicts) {
  auto circle = [] {
    std::vector<SpherePoint> pts;
    for (int k = 0; k < 2000; ++k) pts.push_back(SpherePoint::affine(std::polar(1.0, 2 * std::numbers::pi * k / 2000)));
    return make_cloud(pts);
  }();
  const auto sq = critical_orbit_report(poly_map({0, 0, 1}), circle, 64, 1e-3);
  ASSERT_TRUE(sq.hypothesis_satisfied.has_value());
  EXPECT_TRUE(*sq.hypothesis_satisfied);
  for (const auto& o : sq.orbits) EXPECT_EQ(o.status, CriticalStatus::kFatou);

  auto segment = [] {
    std::vector<SpherePoint> pts;
    for (int k = 0; k <= 4000; ++k) pts.push_back(SpherePoint::affine(-2.0 + 4.0 * k / 4000));
    return make_cloud(pts);
  }();
  const auto cheb = critical_orbit_report(poly_map({-2, 0, 1}), segment, 64, 1e-3);
  ASSERT_TRUE(cheb.hypothesis_satisfied.has_value());
  EXPECT_TRUE(*cheb.hypothesis_satisfied);
  bool saw = false;
  for (const auto& o : cheb.orbits)
    if (!o.point.is_infinite()) {
      saw = true;
      EXPECT_EQ(o.status, CriticalStatus::kPreperiodicRepelling);
      EXPECT_EQ(o.cycle_period, 1);
      EXPECT_NEAR(std::abs(o.cycle_multiplier - 4.0), 0.0, 1e-9);
    }
  EXPECT_TRUE(saw);
}

TEST(CriticalOrbits, ParabolicIsUnknown) {
  // z^2 + 1/4: the critical orbit creeps towards the parabolic point 1/2.
  std::vector<SpherePoint> pts;
  pts.assign(10, SpherePoint::affine(0.5));
  const auto f = ExactMap::polynomial(Poly<Q>{Q(mpq_class(1, 4)), Q(0), Q(1)});
  const auto rep = critical_orbit_report(f, make_cloud(pts), 200, 1e-3);
  EXPECT_FALSE(rep.hypothesis_satisfied.value_or(false));
  bool saw_unknown = false;
  for (const auto& o : rep.orbits) saw_unknown |= o.status == CriticalStatus::kUnknown;
  EXPECT_TRUE(saw_unknown);
}

TEST(CriticalOrbits, RepellingLandingOverridesSparseCloud) {
  // z^2 + i: 0 -> i -> -1+i <-> -i. A cloud that misses 0 entirely.
  std::vector<SpherePoint> pts;
  pts.assign(10, SpherePoint::affine(Complex(3.0, 3.0)));
  const auto f = ExactMap::polynomial(Poly<Q>{Q(0, 1), Q(0), Q(1)});
  const auto rep = critical_orbit_report(f, make_cloud(pts), 64, 1e-3);
  for (const auto& o : rep.orbits) {
    if (o.point.is_infinite()) continue;
    EXPECT_TRUE(o.in_julia);
    EXPECT_EQ(o.status, CriticalStatus::kPreperiodicRepelling);
    EXPECT_EQ(o.preperiod, 2);
    EXPECT_EQ(o.cycle_period, 2);
    // (-1+i)(-i) * 4 = 4 + 4i
    EXPECT_NEAR(std::abs(o.cycle_multiplier - Complex(4.0, 4.0)), 0.0, 1e-9);
  }
  EXPECT_TRUE(rep.hypothesis_satisfied.value_or(false));
}
