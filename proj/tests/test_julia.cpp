#include <gtest/gtest.h>

#include <cstdlib>
#include <numbers>
#include <random>
#include <sstream>

#include "juliatwin/julia.hpp"

using namespace juliatwin;
using Q = GaussRational;
using ExactMap = RatMap<Q>;

namespace {

ExactMap poly_map(std::initializer_list<long> c) {
  std::vector<Q> v;
  for (long x : c) v.emplace_back(x);
  return ExactMap::polynomial(Poly<Q>(std::move(v)));
}

PointCloud circle_cloud(int n, double radius = 1.0, double phase = 0.0) {
  std::vector<SpherePoint> pts;
  for (int k = 0; k < n; ++k)
    pts.push_back(SpherePoint::affine(std::polar(radius, phase + 2 * std::numbers::pi * k / n)));
  return make_cloud(pts);
}

double brute_hausdorff(const PointCloud& a, const PointCloud& b) {
  auto directed = [](const PointCloud& x, const PointCloud& y) {
    double worst = 0.0;
    for (const auto& p : x.points) {
      double best = 1e300;
      for (const auto& q : y.points) best = std::min(best, chordal(p, q));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

PointCloud random_cloud(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> nd(0.0, 2.0);
  std::vector<SpherePoint> pts;
  for (int k = 0; k < n; ++k) pts.push_back(SpherePoint::affine({nd(rng), nd(rng)}));
  if (n > 3) pts.back() = SpherePoint::infinity();
  return make_cloud(pts);
}

}  // namespace

TEST(Sampling, PowerMapOnUnitCircle) {
  const auto cloud = inverse_iteration_sample(poly_map({0, 0, 1}), 20000, 50, 7);
  ASSERT_EQ(cloud.size(), 20000u);
  EXPECT_EQ(cloud.meta.n_points, 20000u);
  EXPECT_EQ(cloud.meta.method, SampleMethod::kInverseIteration);
  double worst = 0.0;
  for (const auto& p : cloud.points) worst = std::max(worst, std::abs(std::abs(p.value()) - 1.0));
  EXPECT_LT(worst, 1e-6);
}

TEST(Sampling, UnimodularPowerMaps) {
  // lambda z^d with |lambda| = 1
  const auto f = power_map(Q(mpq_class(3, 5), mpq_class(4, 5)), 3);
  const auto cloud = inverse_iteration_sample(f, 5000, 50, 3);
  for (const auto& p : cloud.points) EXPECT_LT(std::abs(std::abs(p.value()) - 1.0), 1e-6);
}

TEST(Sampling, ChebyshevOnSegment) {
  const auto cloud = inverse_iteration_sample(chebyshev<Q>(2), 20000, 50, 7);
  for (const auto& p : cloud.points) {
    const Complex z = p.value();
    EXPECT_LT(std::abs(z.imag()), 1e-6);
    EXPECT_LE(std::abs(z.real()), 1.0 + 1e-6);
  }
}

TEST(Sampling, ConjugateChebyshevOnLongerSegment) {
  const auto cloud = inverse_iteration_sample(poly_map({-2, 0, 1}), 5000, 50, 7);
  for (const auto& p : cloud.points) {
    const Complex z = p.value();
    EXPECT_LT(std::abs(z.imag()), 1e-6);
    EXPECT_LE(std::abs(z.real()), 2.0 + 1e-6);
  }
}

TEST(Sampling, SeedDeterminismAndThreadIndependence) {
  const auto f = poly_map({0, 1, 0, 1}) ;  // z + z^3
  const auto a = inverse_iteration_sample(f, 9000, 20, 42);
  const auto b = inverse_iteration_sample(f, 9000, 20, 42);
  ::setenv("JULIATWIN_THREADS", "3", 1);
  const auto c = inverse_iteration_sample(f, 9000, 20, 42);
  ::unsetenv("JULIATWIN_THREADS");
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.points[i].z0(), b.points[i].z0());
    EXPECT_EQ(a.points[i].z0(), c.points[i].z0());
    EXPECT_EQ(a.points[i].z1(), c.points[i].z1());
  }
  const auto d = inverse_iteration_sample(f, 9000, 20, 43);
  EXPECT_NE(a.points[100].z0(), d.points[100].z0());
}

TEST(Sampling, TreeCoversLevels) {
  const auto cloud = preimage_tree_sample(poly_map({0, 0, 1}), 5000, 1);
  EXPECT_EQ(cloud.meta.method, SampleMethod::kPreimageTree);
  EXPECT_LE(cloud.size(), 5000u);
  EXPECT_GT(cloud.size(), 2000u);
  for (const auto& p : cloud.points) EXPECT_LT(std::abs(std::abs(p.value()) - 1.0), 1e-9);
}

TEST(Sampling, RationalMapWithPoles) {
  // (z^2 + 1) / (2z), Newton's map for z^2 + 1: J is the imaginary axis with infinity.
  const auto f = ExactMap::make(Poly<Q>{Q(1), Q(0), Q(1)}, Poly<Q>{Q(0), Q(2)});
  const auto cloud = inverse_iteration_sample(f, 4000, 50, 5);
  for (const auto& p : cloud.points) {
    if (p.is_infinite()) continue;
    EXPECT_LT(std::abs(p.value().real()), 1e-6 * std::max(1.0, std::abs(p.value())));
  }
  EXPECT_GE(forward_invariance_fraction(f, cloud), 0.999);
}

TEST(Hausdorff, Identity) {
  const auto c = circle_cloud(1000);
  EXPECT_EQ(hausdorff_distance(c, c), 0.0);
}

TEST(Hausdorff, ScaledCircle) {
  const auto a = circle_cloud(20000);
  const auto b = circle_cloud(20000, 1.01);
  // Nearest pairs share an angle; their chordal distance by the closed formula:
  const double oracle = 2.0 * 0.01 / std::sqrt((1.0 + 1.0) * (1.0 + 1.01 * 1.01));
  EXPECT_NEAR(hausdorff_distance(a, b), oracle, 1e-6);
}

TEST(Hausdorff, MatchesBruteForce) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_cloud(rng, 300), b = random_cloud(rng, 250);
    const double fast = hausdorff_distance(a, b, 0.01);
    EXPECT_NEAR(fast, brute_hausdorff(a, b), 1e-12);
    EXPECT_EQ(fast, hausdorff_distance(b, a, 0.01));
  }
}

TEST(Hausdorff, TriangleInequality) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_cloud(rng, 200), b = random_cloud(rng, 200), c = random_cloud(rng, 200);
    EXPECT_LE(hausdorff_distance(a, c), hausdorff_distance(a, b) + hausdorff_distance(b, c) + 1e-12);
  }
}

TEST(Hausdorff, EmptyRejected) {
  EXPECT_THROW(hausdorff_distance(make_cloud({}), circle_cloud(5)), Error);
}

TEST(SameJulia, PowerMaps) {
  const auto r = same_julia_test(poly_map({0, 0, 1}), poly_map({0, 0, 0, 1}), 100000, 7, 1e-3);
  EXPECT_TRUE(r.verdict);
  EXPECT_LT(r.distance, 1e-3);
}

TEST(SameJulia, ExamplePair) {
  auto [f, g] = example_pair(poly_map({1, 0, 1}), 2, Q(-1));
  const auto r = same_julia_test(f, g, kDefaultComparePoints, 7, 1e-3);
  EXPECT_TRUE(r.verdict) << r.distance;
}

TEST(SameJulia, CircleVersusSegment) {
  const auto r = same_julia_test(poly_map({0, 0, 1}), poly_map({-2, 0, 1}), 20000, 7, 1e-3);
  EXPECT_FALSE(r.verdict);
  EXPECT_GT(r.distance, 0.5);
}

TEST(Invariance, ForwardImagesStayInCloud) {
  const std::vector<ExactMap> maps = {poly_map({0, 0, 1}), chebyshev<Q>(3), poly_map({-1, 0, 1}),
                                      ExactMap::polynomial(Poly<Q>{Q(0, 1), Q(0), Q(1)})};
  for (const auto& f : maps) {
    const auto cloud = inverse_iteration_sample(f, 20000, 50, 7);
    EXPECT_GE(forward_invariance_fraction(f, cloud, 1e-5), 0.999);
    const auto tree = preimage_tree_sample(f, 20000, 7);
    EXPECT_GE(forward_invariance_fraction(f, tree, 1e-5), 0.999);
  }
}

TEST(CloudIo, CsvRoundTrip) {
  auto cloud = circle_cloud(50);
  cloud.points.push_back(SpherePoint::infinity());
  std::stringstream ss;
  write_cloud_csv(ss, cloud);
  const auto back = read_cloud_csv(ss);
  ASSERT_EQ(back.size(), cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) EXPECT_LT(chordal(back.points[i], cloud.points[i]), 1e-15);
  std::stringstream bad("re,im,is_infinite\n1;2;0\n");
  EXPECT_THROW(read_cloud_csv(bad), Error);
}

TEST(CloudIo, PpmHeaderAndInk) {
  std::stringstream ss;
  write_cloud_ppm(ss, circle_cloud(400), 64);
  const std::string s = ss.str();
  ASSERT_EQ(s.rfind("P6\n64 64\n255\n", 0), 0u);
  EXPECT_EQ(s.size(), std::string("P6\n64 64\n255\n").size() + 64 * 64 * 3);
  EXPECT_NE(s.find('\0'), std::string::npos);
}

TEST(EscapeBoundary, AgreesWithInverseIteration) {
  const auto f = poly_map({-1, 0, 1});
  const auto coarse = escape_boundary_sample(f, 256, 100);
  EXPECT_EQ(coarse.meta.method, SampleMethod::kEscapeBoundary);
  const auto fine = inverse_iteration_sample(f, 20000, 50, 7);
  // Every boundary cell is near J, at the scale of a few cells.
  const SphereGrid grid(fine.points, 0.01);
  double worst = 0.0;
  for (const auto& p : coarse.points) worst = std::max(worst, grid.nearest(p).distance);
  EXPECT_LT(worst, 0.1);
}
