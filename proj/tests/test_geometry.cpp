#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "juliatwin/geometry.hpp"

using namespace juliatwin;
using Q = GaussRational;
using ExactMap = RatMap<Q>;

namespace {

constexpr double kPi = std::numbers::pi;

ExactMap poly_map(std::initializer_list<long> c) {
  std::vector<Q> v;
  for (long x : c) v.emplace_back(x);
  return ExactMap::polynomial(Poly<Q>(std::move(v)));
}

PointCloud from_complex(const std::vector<Complex>& zs) {
  std::vector<SpherePoint> pts;
  for (const auto& z : zs) pts.push_back(SpherePoint::affine(z));
  return make_cloud(std::move(pts));
}

// e^{2 pi i j / n} for j in [0, n * frac)
PointCloud circle_cloud(int n, double frac = 1.0, Complex centre = 0.0, double radius = 1.0) {
  std::vector<Complex> zs;
  for (int j = 0; j < n * frac; ++j) zs.push_back(centre + std::polar(radius, 2 * kPi * j / n));
  return from_complex(zs);
}

PointCloud segment_cloud(int n) {
  std::vector<Complex> zs;
  for (int j = 0; j <= n; ++j) zs.push_back(Complex(-1.0 + 2.0 * j / n, 0.0));
  return from_complex(zs);
}

PointCloud transformed(const PointCloud& c, Complex rot, Complex shift) {
  std::vector<Complex> zs;
  for (const auto& p : c.points) zs.push_back(p.value() * rot + shift);
  return from_complex(zs);
}

bool near_angle(double a, double b, double tol) { return std::abs(std::remainder(a - b, 2 * kPi)) <= tol; }

}  // namespace

TEST(CircleFit, UnitCircle) {
  const auto f = circle_fit(circle_cloud(1000));
  EXPECT_LT(f.rms_residual, 1e-10);
  EXPECT_NEAR(f.A, 1 / std::sqrt(2.0), 1e-10);
  EXPECT_NEAR(std::abs(f.B), 0.0, 1e-10);
  EXPECT_NEAR(f.C, -1 / std::sqrt(2.0), 1e-10);
}

TEST(CircleFit, RealAxisIsALine) {
  const auto f = circle_fit(segment_cloud(200));
  EXPECT_LT(f.rms_residual, 1e-10);
  EXPECT_NEAR(f.A, 0.0, 1e-10);
  EXPECT_NEAR(f.B.real(), 0.0, 1e-10);
  EXPECT_NEAR(std::abs(f.B.imag()), 1.0, 1e-10);
  EXPECT_TRUE(f.is_line());
}

TEST(CircleFit, ShiftedCircleCoefficients) {
  // |z - (2 + i)|^2 = 9  <=>  |z|^2 - 2 Re(conj(2 + i) z) + (5 - 9) = 0
  const auto f = circle_fit(circle_cloud(500, 1.0, Complex(2, 1), 3.0));
  const double n = std::sqrt(1 + 5 + 16.0);
  EXPECT_NEAR(f.A, 1 / n, 1e-10);
  EXPECT_NEAR(std::abs(f.B - Complex(-2, -1) / n), 0.0, 1e-10);
  EXPECT_NEAR(f.C, -4 / n, 1e-10);
}

TEST(CircleFit, ResidualInvariantUnderEuclideanMotions) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> noise(0.0, 1e-3);
  std::vector<Complex> zs;
  for (int j = 0; j < 400; ++j) zs.push_back(std::polar(1.0 + noise(rng), 2 * kPi * j / 400));
  const auto base = from_complex(zs);
  const auto f0 = circle_fit(base);
  for (double beta : {0.3, 2.0, -1.1}) {
    const auto f1 = circle_fit(transformed(base, std::polar(1.0, beta), Complex(5.0, -3.0)));
    EXPECT_NEAR(f1.rms_residual, f0.rms_residual, 1e-9 * f0.rms_residual + 1e-15);
  }
  // coefficients are canonical: the same whatever order the points arrive in
  std::reverse(zs.begin(), zs.end());
  const auto f2 = circle_fit(from_complex(zs));
  EXPECT_NEAR(f2.A, f0.A, 1e-12);
  EXPECT_NEAR(std::abs(f2.B - f0.B), 0.0, 1e-12);
  EXPECT_NEAR(f2.C, f0.C, 1e-12);
}

TEST(CircleFit, Errors) {
  EXPECT_THROW(circle_fit(from_complex({1.0, 2.0, 3.0})), Error);
  EXPECT_THROW(circle_fit(from_complex({1.0, 1.0, 1.0, 1.0, 1.0})), Error);
}

TEST(ArcVerdict, SyntheticShapes) {
  EXPECT_EQ(arc_or_circle_verdict(circle_cloud(4000)).verdict, ArcVerdict::kFullCircle);
  EXPECT_EQ(arc_or_circle_verdict(circle_cloud(4000, 0.75)).verdict, ArcVerdict::kArc);
  EXPECT_EQ(arc_or_circle_verdict(segment_cloud(4000)).verdict, ArcVerdict::kArc);
  // two arcs with two gaps
  std::vector<Complex> zs;
  for (int j = 0; j < 4000; ++j)
    if ((j / 1000) % 2 == 0) zs.push_back(std::polar(1.0, 2 * kPi * j / 4000));
  EXPECT_EQ(arc_or_circle_verdict(from_complex(zs)).verdict, ArcVerdict::kNeither);
}

TEST(ArcVerdict, JuliaClouds) {
  EXPECT_EQ(arc_or_circle_verdict(inverse_iteration_sample(poly_map({0, 0, 1}))).verdict, ArcVerdict::kFullCircle);
  EXPECT_EQ(arc_or_circle_verdict(inverse_iteration_sample(chebyshev<Q>(2))).verdict, ArcVerdict::kArc);
  const auto seg = arc_or_circle_verdict(inverse_iteration_sample(poly_map({-2, 0, 1})));
  EXPECT_EQ(seg.verdict, ArcVerdict::kArc);
  EXPECT_TRUE(seg.fit.is_line());
  const auto fractal = ExactMap::polynomial(Poly<Q>{Q(0, 1), Q(0), Q(1)});
  const auto rep = arc_or_circle_verdict(inverse_iteration_sample(fractal));
  EXPECT_EQ(rep.verdict, ArcVerdict::kNeither);
  EXPECT_GT(rep.fit.rms_residual, 1e-3);
}

TEST(TangentCone, CircleAtOne) {
  const auto cone = tangent_cone_directions(circle_cloud(20000), 1.0, radius_ladder(0.2, 8));
  ASSERT_EQ(cone.directions.size(), 2u);
  EXPECT_TRUE(near_angle(cone.directions[0], -kPi / 2, kDefaultBinWidth));
  EXPECT_TRUE(near_angle(cone.directions[1], kPi / 2, kDefaultBinWidth));
  for (double p : cone.persistence) EXPECT_GE(p, 3.0 / 8);
}

TEST(TangentCone, Segment) {
  const auto mid = tangent_cone_directions(segment_cloud(20000), 0.0, radius_ladder(0.5, 8));
  ASSERT_EQ(mid.directions.size(), 2u);
  EXPECT_TRUE(near_angle(mid.directions[0], 0.0, 1e-9));
  EXPECT_TRUE(near_angle(mid.directions[1], kPi, 1e-9));
  const auto end = tangent_cone_directions(segment_cloud(20000), 1.0, radius_ladder(0.5, 8));
  ASSERT_EQ(end.directions.size(), 1u);
  EXPECT_TRUE(near_angle(end.directions[0], kPi, 1e-9));
}

TEST(TangentCone, ChebyshevJuliaEndpoint) {
  const auto cloud = inverse_iteration_sample(chebyshev<Q>(2));
  const auto cone = tangent_cone_directions(cloud, 1.0, radius_ladder(0.5, 8));
  ASSERT_EQ(cone.directions.size(), 1u);
  EXPECT_TRUE(near_angle(cone.directions[0], kPi, kDefaultBinWidth));
}

TEST(TangentCone, RotationEquivariant) {
  const auto base = circle_cloud(20000);
  const auto c0 = tangent_cone_directions(base, 1.0, radius_ladder(0.2, 8));
  for (double beta : {0.4, 1.7, -2.9}) {
    const Complex rot = std::polar(1.0, beta);
    const auto c1 = tangent_cone_directions(transformed(base, rot, 0.0), rot, radius_ladder(0.2, 8));
    ASSERT_EQ(c1.directions.size(), c0.directions.size());
    for (double d0 : c0.directions) {
      bool found = false;
      for (double d1 : c1.directions) found = found || near_angle(d1, d0 + beta, kDefaultBinWidth);
      EXPECT_TRUE(found) << beta;
    }
  }
}

TEST(TangentCone, SkippedRungsAndErrors) {
  const auto cone = tangent_cone_directions(segment_cloud(100), 1.0, {0.5, 0.25, 0.125, 0.01, 0.005});
  EXPECT_EQ(cone.skipped_rungs, 2);
  EXPECT_TRUE(cone.rungs[3].skipped && cone.rungs[4].skipped);
  EXPECT_THROW(tangent_cone_directions(segment_cloud(100), Complex(0.0, 0.5), {0.1}), Error);
  EXPECT_THROW(tangent_cone_directions(segment_cloud(100), 1.0, {0.1, 0.2}), Error);
}

TEST(Lamination, CircleArc) {
  const auto rep = lamination_probe(circle_cloud(20000), 0.0, {0.5, 1.5, 0.7, 0.4});
  EXPECT_TRUE(rep.laminated);
  EXPECT_EQ(rep.curve_count, 1);
  const auto off = lamination_probe(circle_cloud(20000), 2.0, {0.9, 1.2, kPi, 0.3});
  EXPECT_TRUE(off.laminated);
  EXPECT_EQ(off.curve_count, 1);
}

TEST(Lamination, ThreeRadialSegments) {
  std::vector<Complex> zs;
  for (int k = 0; k < 3; ++k)
    for (int j = 1; j <= 2000; ++j) zs.push_back(std::polar(j / 2000.0, 2 * kPi * k / 3 + 0.2));
  const auto rep = lamination_probe(from_complex(zs), 0.0, {0.2, 0.8});
  EXPECT_TRUE(rep.laminated);
  EXPECT_EQ(rep.curve_count, 3);
  EXPECT_LT(rep.rms, 1e-10);
}

TEST(Lamination, BranchingDendrite) {
  const auto fractal = ExactMap::polynomial(Poly<Q>{Q(0, 1), Q(0), Q(1)});
  const auto cloud = inverse_iteration_sample(fractal, 100000);
  // the alpha fixed point, where three arms of the dendrite meet
  const Complex alpha = (1.0 - std::sqrt(Complex(1.0, -4.0))) / 2.0;
  const auto rep = lamination_probe(cloud, alpha, {0.05, 0.3});
  EXPECT_FALSE(rep.laminated);
}

TEST(Lamination, Errors) {
  EXPECT_THROW(lamination_probe(circle_cloud(100), 0.0, {0.0, 1.5}), Error);
  EXPECT_THROW(lamination_probe(circle_cloud(100), 0.0, {2.0, 3.0}), Error);
}

TEST(ClassifyPair, ModelFamilies) {
  const auto circle = classify_pair(poly_map({0, 0, 1}), poly_map({0, 0, 0, 1}));
  EXPECT_EQ(circle.verdict, PairVerdict::kCondition1);
  EXPECT_EQ(circle.shape.verdict, ArcVerdict::kFullCircle);
  const auto arc = classify_pair(chebyshev<Q>(2), chebyshev<Q>(3));
  EXPECT_EQ(arc.verdict, PairVerdict::kCondition1);
  EXPECT_EQ(arc.shape.verdict, ArcVerdict::kArc);
}

TEST(ClassifyPair, ExampleOneNeedsTheSearch) {
  const auto [f, g] = example_pair(poly_map({1, 0, 1}), 2, Q(-1));
  const auto r = classify_pair(f, g);
  EXPECT_EQ(r.shape.verdict, ArcVerdict::kNeither);
  ASSERT_EQ(r.verdict, PairVerdict::kCondition2);
  ASSERT_TRUE(r.search && r.search->witness);
  EXPECT_EQ(r.search->witness->exponents, std::vector<int>{1});
  EXPECT_EQ(r.search->witness->m, 2);
}

TEST(ClassifyPair, DifferentJuliaSets) {
  ClassifyOptions opt;
  opt.n_points = 20000;
  EXPECT_EQ(classify_pair(poly_map({0, 0, 1}), poly_map({-2, 0, 1}), opt).verdict, PairVerdict::kDifferentJulia);
}
