#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <map>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "juliatwin/funceq.hpp"
#include "juliatwin/julia.hpp"

namespace juliatwin {

inline constexpr double kDefaultBinWidth = 2 * std::numbers::pi / 90;
inline constexpr int kDefaultPersistence = 3;
inline constexpr double kDefaultFitTolerance = 1e-6;

namespace detail {

inline std::vector<Complex> affine_points(const PointCloud& cloud) {
  std::vector<Complex> out;
  out.reserve(cloud.size());
  for (const auto& p : cloud.points)
    if (!p.is_infinite()) out.push_back(p.value());
  return out;
}

inline double wrap_angle(double a) {
  const double two_pi = 2 * std::numbers::pi;
  a = std::fmod(a + std::numbers::pi, two_pi);
  if (a < 0) a += two_pi;
  return a - std::numbers::pi;
}

inline double angle_gap(double a, double b) { return std::abs(wrap_angle(a - b)); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Tangent cones

struct ConeRung {
  double radius = 0.0;
  std::size_t count = 0;
  bool skipped = false;  // empty annulus
  std::vector<double> modes;
};

struct TangentCone {
  std::vector<double> directions;   // persistent, in (-pi, pi], sorted
  std::vector<double> persistence;  // fraction of non-skipped rungs each direction spans
  std::vector<ConeRung> rungs;
  int skipped_rungs = 0;
};

struct ConeOptions {
  double bin_width = kDefaultBinWidth;
  int persistence = kDefaultPersistence;
  double anchor_tol = 1e-6;
  double min_mass = 0.05;  // share of the annulus a mode must hold
};

/// r, r/2, r/4, ... (count rungs).
inline std::vector<double> radius_ladder(double r_max, int count) {
  std::vector<double> r;
  for (int i = 0; i < count; ++i) r.push_back(r_max * std::pow(0.5, i));
  return r;
}

namespace detail {

// Modes of one annulus: maximal circular runs of occupied bins holding enough
// points, each reported at the circular mean of its angles.
inline std::vector<double> histogram_modes(const std::vector<double>& angles, double bw, double min_mass) {
  const int nb = std::max(1, static_cast<int>(std::lround(2 * std::numbers::pi / bw)));
  std::vector<std::vector<double>> bins(static_cast<std::size_t>(nb));
  for (double a : angles) {
    int b = static_cast<int>(std::floor((a + std::numbers::pi) / (2 * std::numbers::pi) * nb));
    bins[static_cast<std::size_t>(std::clamp(b, 0, nb - 1))].push_back(a);
  }
  int start = -1;
  for (int b = 0; b < nb; ++b)
    if (bins[b].empty()) {
      start = b;
      break;
    }
  if (start < 0) return {};  // every direction occupied
  const double need = std::max(3.0, min_mass * static_cast<double>(angles.size()));
  std::vector<double> modes;
  Complex sum = 0.0;
  std::size_t mass = 0;
  for (int s = 1; s <= nb; ++s) {
    const auto& bin = bins[static_cast<std::size_t>((start + s) % nb)];
    for (double a : bin) sum += std::polar(1.0, a);
    mass += bin.size();
    if (bin.empty() || s == nb) {
      if (static_cast<double>(mass) >= need) modes.push_back(std::arg(sum));
      sum = 0.0;
      mass = 0;
    }
  }
  return modes;
}

}  // namespace detail

/// Directions of the cloud seen from z0 on a ladder of annuli (r/2, r]. A direction
/// is kept when it is a histogram mode on `persistence` consecutive non-empty rungs.
inline TangentCone tangent_cone_directions(const PointCloud& cloud, Complex z0, const std::vector<double>& radii,
                                           const ConeOptions& opt = {}) {
  require(!radii.empty() && opt.bin_width > 0.0 && opt.persistence >= 1, ErrorKind::kInput,
          "tangent cone needs radii, a positive bin width and persistence >= 1");
  for (std::size_t i = 0; i < radii.size(); ++i)
    require(radii[i] > 0.0 && (i == 0 || radii[i] < radii[i - 1]), ErrorKind::kInput,
            "radii must be positive and decreasing");
  const auto pts = detail::affine_points(cloud);
  double anchor = std::numeric_limits<double>::infinity();
  for (const auto& z : pts) anchor = std::min(anchor, std::abs(z - z0));
  require(anchor <= opt.anchor_tol, ErrorKind::kDomain, "z0 is not a point of the cloud");

  TangentCone out;
  for (double r : radii) {
    std::vector<double> angles;
    for (const auto& z : pts) {
      const double d = std::abs(z - z0);
      if (d > r / 2 && d <= r) angles.push_back(std::arg(z - z0));
    }
    ConeRung rung{r, angles.size(), angles.empty(), {}};
    if (rung.skipped) ++out.skipped_rungs;
    else rung.modes = detail::histogram_modes(angles, opt.bin_width, opt.min_mass);
    out.rungs.push_back(std::move(rung));
  }

  std::vector<const ConeRung*> live;
  for (const auto& r : out.rungs)
    if (!r.skipped) live.push_back(&r);
  struct Chain {
    double direction;
    int length;
  };
  std::vector<Chain> chains;
  const double match = 1.5 * opt.bin_width;
  for (std::size_t i = 0; i < live.size(); ++i)
    for (double d0 : live[i]->modes) {
      double d = d0;
      int len = 1;
      for (std::size_t j = i + 1; j < live.size(); ++j) {
        std::optional<double> next;
        for (double m : live[j]->modes)
          if (detail::angle_gap(m, d) <= match && (!next || detail::angle_gap(m, d) < detail::angle_gap(*next, d)))
            next = m;
        if (!next) break;
        d = *next;
        ++len;
      }
      if (len >= opt.persistence) chains.push_back({d, len});
    }
  // Chains started at later rungs end at the same directions; keep the longest.
  std::sort(chains.begin(), chains.end(), [](const Chain& a, const Chain& b) { return a.length > b.length; });
  std::vector<Chain> kept;
  for (const auto& c : chains)
    if (std::none_of(kept.begin(), kept.end(),
                     [&](const Chain& k) { return detail::angle_gap(k.direction, c.direction) <= 2 * opt.bin_width; }))
      kept.push_back(c);
  std::sort(kept.begin(), kept.end(), [](const Chain& a, const Chain& b) { return a.direction < b.direction; });
  for (const auto& c : kept) {
    out.directions.push_back(c.direction);
    out.persistence.push_back(static_cast<double>(c.length) / static_cast<double>(live.size()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Generalized circles

/// A |z|^2 + 2 Re(conj(B) z) + C = 0 with A^2 + |B|^2 + C^2 = 1.
struct CircleFit {
  double A = 0.0;
  Complex B;
  double C = 0.0;
  double rms_residual = 0.0;  // algebraic, in centroid/scale normalised coordinates
  Complex centroid;
  double scale = 1.0;
  // the same circle in normalised coordinates
  double a_n = 0.0;
  Complex b_n;
  double c_n = 0.0;

  bool is_line(double rel = 1e-9) const { return std::abs(a_n) <= rel * std::abs(b_n); }
};

namespace detail {

// Unit norm and a fixed sign: first of (A, Re B, Im B, C) with magnitude > 1e-12 positive.
inline void canonical_sign(double& a, Complex& b, double& c) {
  const double n = std::sqrt(a * a + std::norm(b) + c * c);
  a /= n;
  b /= n;
  c /= n;
  for (double v : {a, b.real(), b.imag(), c})
    if (std::abs(v) > 1e-12) {
      if (v < 0) {
        a = -a;
        b = -b;
        c = -c;
      }
      return;
    }
}

}  // namespace detail

/// Least-squares generalized circle: smallest eigenvector of M^T M for rows
/// (|w|^2, 2 Re w, 2 Im w, 1) of the cloud moved to its centroid and scaled to unit
/// rms radius, mapped back to the original coordinates.
inline CircleFit circle_fit(const PointCloud& cloud) {
  const auto pts = detail::affine_points(cloud);
  require(pts.size() >= 4, ErrorKind::kInput, "circle_fit needs at least 4 finite points");
  Complex m = 0.0;
  for (const auto& z : pts) m += z;
  m /= static_cast<double>(pts.size());
  double s2 = 0.0;
  for (const auto& z : pts) s2 += std::norm(z - m);
  const double s = std::sqrt(s2 / static_cast<double>(pts.size()));
  require(s > 0.0, ErrorKind::kDomain, "circle_fit of identical points");

  Eigen::Matrix4d g = Eigen::Matrix4d::Zero();
  for (const auto& z : pts) {
    const Complex w = (z - m) / s;
    const Eigen::Vector4d row(std::norm(w), 2 * w.real(), 2 * w.imag(), 1.0);
    g.noalias() += row * row.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(g);
  const Eigen::Vector4d v = es.eigenvectors().col(0);

  CircleFit f;
  f.centroid = m;
  f.scale = s;
  f.a_n = v[0];
  f.b_n = Complex(v[1], v[2]);
  f.c_n = v[3];
  detail::canonical_sign(f.a_n, f.b_n, f.c_n);
  f.rms_residual = std::sqrt(std::max(es.eigenvalues()[0], 0.0) / static_cast<double>(pts.size()));
  // w = (z - m) / s
  f.A = f.a_n / (s * s);
  f.B = f.b_n / s - f.a_n * m / (s * s);
  f.C = f.a_n * std::norm(m) / (s * s) - 2.0 * (std::conj(f.b_n) * m).real() / s + f.c_n;
  detail::canonical_sign(f.A, f.B, f.C);
  return f;
}

enum class ArcVerdict { kFullCircle, kArc, kNeither };

inline const char* to_string(ArcVerdict v) {
  switch (v) {
    case ArcVerdict::kFullCircle: return "full_circle";
    case ArcVerdict::kArc: return "arc";
    case ArcVerdict::kNeither: return "neither";
  }
  return "?";
}

struct ArcReport {
  ArcVerdict verdict = ArcVerdict::kNeither;
  CircleFit fit;
  double largest_gap = 0.0;
  double second_gap = 0.0;
  double expected_gap = 0.0;
};

/// Angular coverage of the cloud along its fitted generalized circle. On a line the
/// parameter is 2 atan(t), so the point at infinity sits at angle pi.
inline ArcReport arc_or_circle_verdict(const PointCloud& cloud, double tol = kDefaultFitTolerance) {
  ArcReport rep;
  rep.fit = circle_fit(cloud);
  if (!(rep.fit.rms_residual < tol)) return rep;
  const auto& f = rep.fit;
  std::vector<double> theta;
  theta.reserve(cloud.size());
  if (f.is_line()) {
    // normalised line: 2 Re(conj(b) w) + c = 0; foot point -c b / (2 |b|^2), direction i b
    const Complex dir = Complex(0, 1) * f.b_n / std::abs(f.b_n);
    const Complex foot = -f.c_n * f.b_n / (2 * std::norm(f.b_n));
    for (const auto& p : cloud.points) {
      if (p.is_infinite()) {
        theta.push_back(std::numbers::pi);
        continue;
      }
      const Complex w = (p.value() - f.centroid) / f.scale;
      theta.push_back(2 * std::atan((std::conj(dir) * (w - foot)).real()));
    }
  } else {
    const Complex c = -f.b_n / f.a_n;
    for (const auto& p : cloud.points) {
      require(!p.is_infinite(), ErrorKind::kDomain, "cloud contains infinity but fits a bounded circle");
      theta.push_back(std::arg((p.value() - f.centroid) / f.scale - c));
    }
  }
  std::sort(theta.begin(), theta.end());
  const std::size_t n = theta.size();
  std::vector<double> gaps;
  gaps.reserve(n);
  for (std::size_t i = 1; i < n; ++i) gaps.push_back(theta[i] - theta[i - 1]);
  gaps.push_back(theta.front() + 2 * std::numbers::pi - theta.back());
  std::partial_sort(gaps.begin(), gaps.begin() + std::min<std::size_t>(2, gaps.size()), gaps.end(), std::greater<>());
  rep.largest_gap = gaps[0];
  rep.second_gap = gaps.size() > 1 ? gaps[1] : 0.0;
  rep.expected_gap = 2 * std::numbers::pi / static_cast<double>(n) * std::log(static_cast<double>(n));
  const double limit = 2 * rep.expected_gap;
  if (rep.largest_gap < limit) rep.verdict = ArcVerdict::kFullCircle;
  else if (rep.second_gap < limit) rep.verdict = ArcVerdict::kArc;
  return rep;
}

// ---------------------------------------------------------------------------
// Lamination probe

/// Sector of the annulus r_inner < |z - center| < r_outer with arg(z - center)
/// within half_width of mid_angle (half_width = pi is the whole annulus).
struct ProbeWindow {
  double r_inner = 0.0;
  double r_outer = 0.0;
  double mid_angle = 0.0;
  double half_width = std::numbers::pi;
};

struct CurveFit {
  std::size_t points = 0;
  double rms = 0.0;  // relative to r_outer
  bool branches = false;
};

struct LaminationReport {
  bool laminated = false;
  int curve_count = 0;
  double rms = 0.0;  // worst curve
  double link_radius = 0.0;
  std::vector<CurveFit> curves;
};

struct LaminationOptions {
  double tol = 1e-3;
  int degree = 4;
  std::size_t min_points = 10;
  std::size_t min_cluster = 5;
  double link_quantile = 0.95;  // nearest-neighbour gap quantile setting the link scale
  double link_factor = 3.0;
};

namespace detail {

inline CurveFit fit_curve(const std::vector<Complex>& pts, double link, double r_outer, int degree) {
  CurveFit cf;
  cf.points = pts.size();
  Complex m = 0.0;
  for (const auto& z : pts) m += z;
  m /= static_cast<double>(pts.size());
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (const auto& z : pts) {
    const Eigen::Vector2d d((z - m).real(), (z - m).imag());
    cov.noalias() += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
  const Eigen::Vector2d ax = es.eigenvectors().col(1);
  const Complex rot = std::conj(Complex(ax[0], ax[1]));
  std::vector<std::pair<double, double>> xy;
  xy.reserve(pts.size());
  for (const auto& z : pts) {
    const Complex w = (z - m) * rot;
    xy.emplace_back(w.real(), w.imag());
  }
  // y = poly(x) in the principal frame, x scaled to [-1, 1]
  double xs = 0.0;
  for (const auto& [x, y] : xy) xs = std::max(xs, std::abs(x));
  xs = std::max(xs, 1e-300);
  const int deg = std::min<int>(degree, static_cast<int>(pts.size()) - 1);
  Eigen::MatrixXd a(static_cast<Eigen::Index>(xy.size()), deg + 1);
  Eigen::VectorXd b(static_cast<Eigen::Index>(xy.size()));
  for (std::size_t i = 0; i < xy.size(); ++i) {
    double pw = 1.0;
    for (int k = 0; k <= deg; ++k, pw *= xy[i].first / xs) a(static_cast<Eigen::Index>(i), k) = pw;
    b[static_cast<Eigen::Index>(i)] = xy[i].second;
  }
  const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(b);
  cf.rms = (a * coef - b).norm() / std::sqrt(static_cast<double>(xy.size())) / r_outer;
  // A single arc is a graph over its principal axis: in every slice of width
  // 3 * link the y values form one run without gaps wider than 3 * link.
  std::sort(xy.begin(), xy.end());
  const double slice = 3 * link;
  for (std::size_t i = 0; i < xy.size() && !cf.branches;) {
    std::size_t j = i;
    std::vector<double> ys;
    while (j < xy.size() && xy[j].first < xy[i].first + slice) ys.push_back(xy[j++].second);
    std::sort(ys.begin(), ys.end());
    for (std::size_t k = 1; k < ys.size(); ++k)
      if (ys[k] - ys[k - 1] > 3 * link) cf.branches = true;
    i = j;
  }
  return cf;
}

}  // namespace detail

/// Splits the cloud inside the window into chains of points linked at a few times
/// the typical spacing and fits each with a low-degree polynomial arc.
inline LaminationReport lamination_probe(const PointCloud& cloud, Complex center, const ProbeWindow& win,
                                         const LaminationOptions& opt = {}) {
  require(win.r_inner > 0.0 && win.r_outer > win.r_inner && win.half_width > 0.0, ErrorKind::kInput,
          "lamination window must be an annular sector excluding its center");
  std::vector<Complex> pts;
  for (const auto& z : detail::affine_points(cloud)) {
    const double r = std::abs(z - center);
    if (r <= win.r_inner || r >= win.r_outer) continue;
    if (win.half_width < std::numbers::pi &&
        detail::angle_gap(std::arg(z - center), win.mid_angle) >= win.half_width)
      continue;
    pts.push_back(z);
  }
  // Duplicates carry no shape information and would make the spacing zero.
  std::sort(pts.begin(), pts.end(), [](Complex a, Complex b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  require(pts.size() >= opt.min_points, ErrorKind::kInput, "too few cloud points in the lamination window");

  std::vector<double> nn(pts.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size() && pts[j].real() - pts[i].real() < nn[i]; ++j)
      nn[i] = std::min(nn[i], std::abs(pts[i] - pts[j]));
    for (std::size_t j = i; j-- > 0 && pts[i].real() - pts[j].real() < nn[i];)
      nn[i] = std::min(nn[i], std::abs(pts[i] - pts[j]));
  }
  const auto q = static_cast<std::size_t>(opt.link_quantile * static_cast<double>(nn.size() - 1));
  std::nth_element(nn.begin(), nn.begin() + static_cast<std::ptrdiff_t>(q), nn.end());
  const double link = opt.link_factor * nn[q];

  // single-linkage clusters by union-find over the x-sorted points
  std::vector<std::size_t> parent(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) parent[i] = i;
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size() && pts[j].real() - pts[i].real() <= link; ++j)
      if (std::abs(pts[i] - pts[j]) <= link) parent[find(i)] = find(j);
  std::map<std::size_t, std::vector<Complex>> clusters;
  for (std::size_t i = 0; i < pts.size(); ++i) clusters[find(i)].push_back(pts[i]);

  LaminationReport rep;
  rep.link_radius = link;
  bool ok = true;
  for (const auto& [root, members] : clusters) {
    if (members.size() < opt.min_cluster) continue;
    auto cf = detail::fit_curve(members, link, win.r_outer, opt.degree);
    rep.rms = std::max(rep.rms, cf.rms);
    ok = ok && cf.rms < opt.tol && !cf.branches;
    rep.curves.push_back(cf);
  }
  rep.curve_count = static_cast<int>(rep.curves.size());
  rep.laminated = ok && rep.curve_count > 0;
  return rep;
}

// ---------------------------------------------------------------------------
// Pair classification

enum class PairVerdict { kCondition1, kCondition2, kUnresolved, kDifferentJulia };

inline const char* to_string(PairVerdict v) {
  switch (v) {
    case PairVerdict::kCondition1: return "condition_1";
    case PairVerdict::kCondition2: return "condition_2";
    case PairVerdict::kUnresolved: return "unresolved";
    case PairVerdict::kDifferentJulia: return "different_julia";
  }
  return "?";
}

struct ClassifyOptions {
  std::size_t n_points = kDefaultComparePoints;
  std::uint64_t seed = 7;
  double hausdorff_tol = 1e-3;
  double fit_tol = kDefaultFitTolerance;
  SearchOptions search;
};

struct PairClassification {
  PairVerdict verdict = PairVerdict::kUnresolved;
  SameJuliaResult same;
  ArcReport shape;
  std::optional<SearchResult> search;
};

/// Same-Julia check, then the circle/arc test on f's cloud, then the bounded
/// functional-equation search.
template <FieldScalar S>
PairClassification classify_pair(const RatMap<S>& f, const RatMap<S>& g, const ClassifyOptions& opt = {}) {
  PairClassification out;
  out.same = same_julia_test(f, g, opt.n_points, opt.seed, opt.hausdorff_tol);
  if (!out.same.verdict) {
    out.verdict = PairVerdict::kDifferentJulia;
    return out;
  }
  out.shape = arc_or_circle_verdict(out.same.cloud_f, opt.fit_tol);
  if (out.shape.verdict != ArcVerdict::kNeither) {
    out.verdict = PairVerdict::kCondition1;
    return out;
  }
  out.search = search_functional_equation(f, g, opt.search);
  out.verdict = out.search->witness ? PairVerdict::kCondition2 : PairVerdict::kUnresolved;
  return out;
}

}  // namespace juliatwin
