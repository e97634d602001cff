#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "juliatwin/sphere.hpp"

namespace juliatwin {

enum class SampleMethod { kInverseIteration, kPreimageTree, kEscapeBoundary };

inline const char* to_string(SampleMethod m) {
  switch (m) {
    case SampleMethod::kInverseIteration: return "inverse_iteration";
    case SampleMethod::kPreimageTree: return "preimage_tree";
    case SampleMethod::kEscapeBoundary: return "escape_boundary";
  }
  return "?";
}

struct CloudMeta {
  std::string map_fingerprint;
  std::uint64_t seed = 0;
  std::size_t n_points = 0;
  int burn_in = 0;
  SampleMethod method = SampleMethod::kInverseIteration;
};

/// Sampled subset of the sphere with its provenance.
struct PointCloud {
  std::vector<SpherePoint> points;
  CloudMeta meta;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

inline PointCloud make_cloud(std::vector<SpherePoint> pts, std::string fingerprint = "synthetic") {
  PointCloud c;
  c.meta.map_fingerprint = std::move(fingerprint);
  c.meta.n_points = pts.size();
  c.points = std::move(pts);
  return c;
}

/// Uniform grids over the unit-sphere embedding, the finest with the requested
/// cell and each further one 8 times coarser. Nearest-neighbour queries are exact
/// in the chordal metric: rings of cells are scanned outward until the current
/// best is certified, moving to a coarser grid after `max_ring` rings.
class SphereGrid {
 public:
  SphereGrid(const std::vector<SpherePoint>& pts, double cell, int max_ring = 3)
      : max_ring_(max_ring) {
    require(cell >= 2e-6, ErrorKind::kInput, "grid cell size must be at least 2e-6");
    pos_.reserve(pts.size());
    for (const auto& p : pts) pos_.push_back(p.embed());
    for (double c = cell;; c *= 8.0) {
      Level lv;
      lv.cell = c;
      for (std::size_t i = 0; i < pos_.size(); ++i) lv.cells[key(cell_of(pos_[i], c))].push_back(i);
      levels_.push_back(std::move(lv));
      if (c * max_ring_ >= 2.0) break;
    }
  }

  std::size_t size() const { return pos_.size(); }
  const std::array<double, 3>& position(std::size_t i) const { return pos_[i]; }

  struct Hit {
    double distance = std::numeric_limits<double>::infinity();
    std::size_t index = 0;
  };

  /// Exact nearest neighbour. If `good_enough` > 0, returns as soon as any point
  /// closer than it is seen (distance is then only an upper bound).
  Hit nearest(const std::array<double, 3>& q, double good_enough = 0.0) const {
    Hit best;
    if (pos_.empty()) return best;
    // A large early-exit radius is served as well by a coarser grid.
    std::size_t first = 0;
    while (first + 1 < levels_.size() && levels_[first + 1].cell <= good_enough / 4) ++first;
    for (std::size_t l = first; l < levels_.size(); ++l) {
      const Level& lv = levels_[l];
      const auto c = cell_of(q, lv.cell);
      for (int r = 0; r <= max_ring_; ++r) {
        if (scan_ring(lv, q, c, r, best, good_enough)) return best;
        // Unseen points lie in rings > r, at least r * cell away.
        if (best.distance <= r * lv.cell) return best;
      }
    }
    return best;
  }

  Hit nearest(const SpherePoint& p, double good_enough = 0.0) const {
    return nearest(p.embed(), good_enough);
  }

  /// Whether some point lies within `radius` of q.
  bool any_within(const std::array<double, 3>& q, double radius) const {
    return nearest(q, radius).distance < radius;
  }

 private:
  using Cell = std::array<std::int64_t, 3>;
  struct Level {
    double cell = 0.0;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells;
  };

  static double dist(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
  }
  static Cell cell_of(const std::array<double, 3>& p, double cell) {
    return {static_cast<std::int64_t>(std::floor((p[0] + 1.0) / cell)),
            static_cast<std::int64_t>(std::floor((p[1] + 1.0) / cell)),
            static_cast<std::int64_t>(std::floor((p[2] + 1.0) / cell))};
  }
  static std::uint64_t key(const Cell& c) {
    constexpr std::uint64_t mask = (1ull << 21) - 1;
    return ((static_cast<std::uint64_t>(c[0]) & mask) << 42) |
           ((static_cast<std::uint64_t>(c[1]) & mask) << 21) |
           (static_cast<std::uint64_t>(c[2]) & mask);
  }

  // Visits the cells at Chebyshev distance exactly r from c. Returns true on an
  // early exit through good_enough.
  bool scan_ring(const Level& lv, const std::array<double, 3>& q, const Cell& c, int r, Hit& best,
                 double good_enough) const {
    for (int dx = -r; dx <= r; ++dx)
      for (int dy = -r; dy <= r; ++dy)
        for (int dz = -r; dz <= r; ++dz) {
          if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != r) continue;
          auto it = lv.cells.find(key({c[0] + dx, c[1] + dy, c[2] + dz}));
          if (it == lv.cells.end()) continue;
          for (std::size_t i : it->second) {
            const double d = dist(q, pos_[i]);
            if (d < best.distance) best = {d, i};
          }
          if (best.distance < good_enough) return true;
        }
    return false;
  }

  int max_ring_;
  std::vector<std::array<double, 3>> pos_;
  std::vector<Level> levels_;
};

/// Chordal distance from p to the nearest cloud point.
inline double distance_to_cloud(const SphereGrid& grid, const SpherePoint& p) {
  return grid.nearest(p).distance;
}

}  // namespace juliatwin
