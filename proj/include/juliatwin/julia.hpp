#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "juliatwin/cloud.hpp"
#include "juliatwin/spectrum.hpp"

namespace juliatwin {

inline constexpr std::size_t kDefaultSamplePoints = 20000;
/// Point budget for set comparison, where coverage matters more than speed.
inline constexpr std::size_t kDefaultComparePoints = 400000;
inline constexpr int kDefaultBurnIn = 50;
inline constexpr std::size_t kSampleChunk = 4096;
inline constexpr int kMaxResamples = 200;

/// Worker count: JULIATWIN_THREADS if set and positive, else the hardware count.
inline unsigned thread_count() {
  if (const char* env = std::getenv("JULIATWIN_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, n) on up to thread_count() workers. Each index is
/// processed by exactly one worker; callers write results to slot i only.
template <class F>
void parallel_for(std::size_t n, F&& body) {
  const std::size_t workers = std::min<std::size_t>(thread_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// FNV-1a over the printed float coefficients; identifies a map in cloud metadata.
template <FieldScalar S>
std::string map_fingerprint(const RatMap<S>& f) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (const auto& c : f.num().coeffs()) os << to_complex(c) << ';';
  os << '/';
  for (const auto& c : f.den().coeffs()) os << to_complex(c) << ';';
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : os.str()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// The d preimages of z under f, with multiplicity (infinity included).
inline std::vector<SpherePoint> preimages(const RatMap<Complex>& f, const SpherePoint& z) {
  // z1 P(w) - z0 Q(w) = 0
  Poly<Complex> eq = f.num() * z.z1() - f.den() * z.z0();
  eq = eq.trimmed_relative(1e-15);
  std::vector<SpherePoint> out;
  if (eq.degree() >= 1)
    for (const auto& r : solve_roots(eq)) out.push_back(SpherePoint::affine(r));
  while (static_cast<int>(out.size()) < f.degree()) out.push_back(SpherePoint::infinity());
  return out;
}

namespace detail {

inline std::vector<SpherePoint> repelling_seeds(const RatMap<Complex>& f) {
  for (int n = 1; n <= 3; ++n) {
    std::vector<SpherePoint> pts;
    for (const auto& o : periodic_points(f, n))
      if (o.cls.repelling() && !o.flagged) pts.insert(pts.end(), o.points.begin(), o.points.end());
    if (!pts.empty()) return pts;
  }
  fail(ErrorKind::kDomain, "no repelling periodic point of period <= 3 to start from");
}

}  // namespace detail

/// Random backward orbit. The sample is split into chunks of kSampleChunk points,
/// each an independent chain seeded by (seed, chunk index) that starts from a
/// randomly chosen repelling periodic point, so the result does not depend on
/// the thread count.
template <FieldScalar S>
PointCloud inverse_iteration_sample(const RatMap<S>& f_in, std::size_t n_points = kDefaultSamplePoints,
                                    int burn_in = kDefaultBurnIn, std::uint64_t seed = 7) {
  require(f_in.degree() >= 2, ErrorKind::kInput, "sampling needs deg f >= 2");
  require(n_points >= 1 && burn_in >= 0, ErrorKind::kInput, "n_points >= 1 and burn_in >= 0 required");
  const RatMap<Complex> f = to_float(f_in);
  const auto seeds = detail::repelling_seeds(f);
  const std::size_t chunks = (n_points + kSampleChunk - 1) / kSampleChunk;
  std::vector<std::vector<SpherePoint>> parts(chunks);

  parallel_for(chunks, [&](std::size_t c) {
    std::seed_seq ss{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                     static_cast<std::uint32_t>(c)};
    std::mt19937_64 rng(ss);
    const std::size_t want = std::min(kSampleChunk, n_points - c * kSampleChunk);
    std::uniform_int_distribution<std::size_t> pick_seed(0, seeds.size() - 1);
    std::uniform_int_distribution<int> pick_branch(0, f.degree() - 1);
    SpherePoint z = seeds[pick_seed(rng)];
    auto& out = parts[c];
    out.reserve(want);
    int retries = 0;
    for (std::size_t step = 0; out.size() < want; ++step) {
      std::vector<SpherePoint> pre;
      try {
        pre = preimages(f, z);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kRootFinder || ++retries > kMaxResamples) throw;
        z = seeds[pick_seed(rng)];
        continue;
      }
      z = pre[static_cast<std::size_t>(pick_branch(rng))];
      if (step >= static_cast<std::size_t>(burn_in)) out.push_back(z);
    }
  });

  PointCloud cloud;
  cloud.points.reserve(n_points);
  for (auto& p : parts) cloud.points.insert(cloud.points.end(), p.begin(), p.end());
  cloud.meta = {map_fingerprint(f_in), seed, cloud.points.size(), burn_in, SampleMethod::kInverseIteration};
  return cloud;
}

/// Breadth-first backward tree: the cycle of a random repelling periodic point,
/// then all of its iterated preimages, level by level, for as many complete
/// levels as fit in n_points. Each complete level meets every inverse branch of
/// that depth once, and every point's image is its parent.
template <FieldScalar S>
PointCloud preimage_tree_sample(const RatMap<S>& f_in, std::size_t n_points = kDefaultComparePoints,
                                std::uint64_t seed = 7) {
  require(f_in.degree() >= 2, ErrorKind::kInput, "sampling needs deg f >= 2");
  require(n_points >= 1, ErrorKind::kInput, "n_points >= 1 required");
  const RatMap<Complex> f = to_float(f_in);
  const std::size_t d = static_cast<std::size_t>(f.degree());
  const auto seeds = detail::repelling_seeds(f);
  std::seed_seq ss{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0xfeedu};
  std::mt19937_64 rng(ss);
  const SpherePoint root = seeds[std::uniform_int_distribution<std::size_t>(0, seeds.size() - 1)(rng)];

  std::vector<SpherePoint> pts{root};
  for (SpherePoint z = evaluate(f, root); chordal(z, root) > 1e-9 && pts.size() < 64; z = evaluate(f, z))
    pts.push_back(z);
  std::vector<SpherePoint> frontier{root};
  while (pts.size() + frontier.size() * d <= n_points) {
    std::vector<std::vector<SpherePoint>> kids(frontier.size());
    parallel_for((frontier.size() + 255) / 256, [&](std::size_t block) {
      const std::size_t hi = std::min(frontier.size(), (block + 1) * 256);
      for (std::size_t i = block * 256; i < hi; ++i) kids[i] = preimages(f, frontier[i]);
    });
    std::vector<SpherePoint> next;
    next.reserve(frontier.size() * d);
    for (auto& k : kids) next.insert(next.end(), k.begin(), k.end());
    pts.insert(pts.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  PointCloud cloud;
  cloud.points = std::move(pts);
  cloud.meta = {map_fingerprint(f_in), seed, cloud.points.size(), 0, SampleMethod::kPreimageTree};
  return cloud;
}

/// Boundary cells of the escape-time picture of a polynomial on a square grid
/// centred at 0: cells that stay bounded with a neighbour that escapes. Coarse
/// (accuracy is the cell size); kept as an independent cross-check.
template <FieldScalar S>
PointCloud escape_boundary_sample(const RatMap<S>& f_in, int grid = 512, int max_iter = 200,
                                  double escape_radius = 0.0) {
  require(f_in.is_polynomial() && f_in.degree() >= 2, ErrorKind::kInput,
          "escape_boundary_sample needs a polynomial of degree >= 2");
  const RatMap<Complex> f = to_float(f_in);
  const Poly<Complex> p = f.num() * (1.0 / f.den()[0]);
  if (!(escape_radius > 0.0)) {
    // |p(z)| > 2|z| whenever |z| exceeds this.
    double r = 1.0;
    for (int k = 0; k < p.degree(); ++k) r += std::abs(p[k]) / std::abs(p.leading());
    escape_radius = std::max(2.0, r + 2.0 / std::abs(p.leading()));
  }
  const double half = escape_radius;
  const double h = 2.0 * half / grid;
  std::vector<char> bounded(static_cast<std::size_t>(grid) * grid);
  for (int j = 0; j < grid; ++j)
    for (int i = 0; i < grid; ++i) {
      Complex z(-half + (i + 0.5) * h, -half + (j + 0.5) * h);
      int it = 0;
      for (; it < max_iter && std::abs(z) <= escape_radius; ++it) z = p(z);
      bounded[static_cast<std::size_t>(j) * grid + i] = it == max_iter;
    }
  std::vector<SpherePoint> pts;
  for (int j = 0; j < grid; ++j)
    for (int i = 0; i < grid; ++i) {
      if (!bounded[static_cast<std::size_t>(j) * grid + i]) continue;
      bool edge = false;
      for (int dj = -1; dj <= 1 && !edge; ++dj)
        for (int di = -1; di <= 1 && !edge; ++di) {
          const int ii = i + di, jj = j + dj;
          edge = ii < 0 || jj < 0 || ii >= grid || jj >= grid ||
                 !bounded[static_cast<std::size_t>(jj) * grid + ii];
        }
      if (edge) pts.push_back(SpherePoint::affine({-half + (i + 0.5) * h, -half + (j + 0.5) * h}));
    }
  PointCloud cloud;
  cloud.points = std::move(pts);
  cloud.meta = {map_fingerprint(f_in), 0, cloud.points.size(), 0, SampleMethod::kEscapeBoundary};
  return cloud;
}

// ---------------------------------------------------------------------------
// Set comparison

namespace detail {

// Directed distance max_a min_b with the early break of Taha and Hanbury: once a
// point of B closer than the running maximum is seen, a cannot raise it.
inline double directed_hausdorff(const PointCloud& a, const SphereGrid& gb) {
  std::vector<std::size_t> order(a.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(0x5eed);
  std::shuffle(order.begin(), order.end(), rng);
  double cmax = 0.0;
  for (std::size_t i : order) {
    const auto hit = gb.nearest(a.points[i], cmax);
    if (hit.distance > cmax) cmax = hit.distance;
  }
  return cmax;
}

inline double default_cell(std::size_t n) {
  return std::clamp(16.0 / static_cast<double>(std::max<std::size_t>(n, 1)), 2e-5, 0.05);
}

}  // namespace detail

/// Symmetric chordal Hausdorff distance between two clouds; exact for the clouds.
inline double hausdorff_distance(const PointCloud& a, const PointCloud& b, double cell = 0.0) {
  require(!a.empty() && !b.empty(), ErrorKind::kInput, "hausdorff_distance of an empty cloud");
  if (!(cell > 0.0)) cell = detail::default_cell(std::max(a.size(), b.size()));
  const SphereGrid ga(a.points, cell), gb(b.points, cell);
  return std::max(detail::directed_hausdorff(a, gb), detail::directed_hausdorff(b, ga));
}

struct SameJuliaResult {
  bool verdict = false;
  double distance = 0.0;
  PointCloud cloud_f, cloud_g;
};

/// Samples both maps with the preimage tree (seeds derived from `seed`) and
/// compares the clouds.
template <FieldScalar S>
SameJuliaResult same_julia_test(const RatMap<S>& f, const RatMap<S>& g,
                                std::size_t n_points = kDefaultComparePoints, std::uint64_t seed = 7,
                                double tol = 1e-3) {
  require(tol > 0.0, ErrorKind::kInput, "tolerance must be positive");
  SameJuliaResult r;
  r.cloud_f = preimage_tree_sample(f, n_points, seed);
  r.cloud_g = preimage_tree_sample(g, n_points, seed + 1);
  r.distance = hausdorff_distance(r.cloud_f, r.cloud_g, tol / 2);
  r.verdict = r.distance < tol;
  return r;
}

/// Fraction of cloud points whose image lies within tol of the cloud.
template <FieldScalar S>
double forward_invariance_fraction(const RatMap<S>& f_in, const PointCloud& cloud, double tol = 1e-5) {
  require(!cloud.empty(), ErrorKind::kInput, "empty cloud");
  const RatMap<Complex> f = to_float(f_in);
  const SphereGrid grid(cloud.points, std::max(tol, 2e-6));
  std::size_t ok = 0;
  for (const auto& p : cloud.points)
    if (grid.any_within(evaluate(f, p).embed(), tol)) ++ok;
  return static_cast<double>(ok) / static_cast<double>(cloud.size());
}

// ---------------------------------------------------------------------------
// Cloud I/O

/// CSV with header "re,im,is_infinite".
inline void write_cloud_csv(std::ostream& os, const PointCloud& cloud) {
  os << "re,im,is_infinite\n" << std::setprecision(17);
  for (const auto& p : cloud.points) {
    if (p.is_infinite()) {
      os << "0,0,1\n";
    } else {
      const Complex z = p.value();
      os << z.real() << ',' << z.imag() << ",0\n";
    }
  }
}

inline PointCloud read_cloud_csv(std::istream& is) {
  std::string line;
  std::vector<SpherePoint> pts;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || (lineno == 1 && line.rfind("re", 0) == 0)) continue;
    std::istringstream ls(line);
    double re = 0, im = 0;
    int inf = 0;
    char c1 = 0, c2 = 0;
    if (!(ls >> re >> c1 >> im >> c2 >> inf) || c1 != ',' || c2 != ',')
      fail(ErrorKind::kInput, "malformed cloud CSV at line " + std::to_string(lineno));
    pts.push_back(inf ? SpherePoint::infinity() : SpherePoint::affine({re, im}));
  }
  return make_cloud(std::move(pts), "csv");
}

/// Binary P6 image of the finite points: white background, black points, square
/// frame around the bounding box.
inline void write_cloud_ppm(std::ostream& os, const PointCloud& cloud, int width) {
  require(width >= 8, ErrorKind::kInput, "ppm width must be >= 8");
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& p : cloud.points) {
    if (p.is_infinite()) continue;
    const Complex z = p.value();
    x0 = std::min(x0, z.real()), x1 = std::max(x1, z.real());
    y0 = std::min(y0, z.imag()), y1 = std::max(y1, z.imag());
  }
  if (x0 > x1) x0 = y0 = -1, x1 = y1 = 1;
  const double span = std::max({x1 - x0, y1 - y0, 1e-9}) * 1.05;
  const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
  std::vector<unsigned char> img(static_cast<std::size_t>(width) * width * 3, 255);
  for (const auto& p : cloud.points) {
    if (p.is_infinite()) continue;
    const Complex z = p.value();
    const int i = static_cast<int>((z.real() - cx) / span * width + width / 2.0);
    const int j = static_cast<int>((cy - z.imag()) / span * width + width / 2.0);
    if (i < 0 || j < 0 || i >= width || j >= width) continue;
    const std::size_t o = (static_cast<std::size_t>(j) * width + i) * 3;
    img[o] = img[o + 1] = img[o + 2] = 0;
  }
  os << "P6\n" << width << ' ' << width << "\n255\n";
  os.write(reinterpret_cast<const char*>(img.data()), static_cast<std::streamsize>(img.size()));
}

}  // namespace juliatwin
