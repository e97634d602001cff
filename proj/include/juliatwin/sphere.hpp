#pragma once

#include <array>
#include <cmath>
#include <limits>

#include "juliatwin/scalar.hpp"

namespace juliatwin {

/// Point of the Riemann sphere in homogeneous form (z0 : z1), z = z0 / z1.
/// Always stored with max(|z0|, |z1|) = 1.
class SpherePoint {
 public:
  SpherePoint() : z0_(0.0), z1_(1.0) {}
  SpherePoint(Complex z0, Complex z1) : z0_(z0), z1_(z1) { normalize(); }

  static SpherePoint affine(Complex z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return infinity();
    return {z, Complex(1.0)};
  }
  static SpherePoint infinity() { return {Complex(1.0), Complex(0.0)}; }

  const Complex& z0() const { return z0_; }
  const Complex& z1() const { return z1_; }

  bool is_infinite() const { return z1_ == Complex(0.0); }

  /// Affine value; +inf+inf*i at infinity.
  Complex value() const {
    if (is_infinite()) {
      constexpr double inf = std::numeric_limits<double>::infinity();
      return {inf, inf};
    }
    return z0_ / z1_;
  }

  /// Unit-sphere image under stereographic projection; Euclidean distance there
  /// is the chordal metric.
  std::array<double, 3> embed() const {
    const double a = std::norm(z0_), b = std::norm(z1_);
    const Complex m = z0_ * std::conj(z1_);
    const double s = a + b;
    return {2.0 * m.real() / s, 2.0 * m.imag() / s, (a - b) / s};
  }

  friend bool operator==(const SpherePoint&, const SpherePoint&) = default;

 private:
  void normalize() {
    const double m = std::max(std::abs(z0_), std::abs(z1_));
    require(m > 0.0 && std::isfinite(m), ErrorKind::kDomain, "sphere point (0:0) or non-finite");
    z0_ /= m;
    z1_ /= m;
    if (std::abs(z0_) >= std::abs(z1_)) {
      // Canonical phase: z0 real positive when it is the dominant entry.
      const Complex ph = std::abs(z0_) / z0_;
      z0_ *= ph;
      z1_ *= ph;
    } else {
      const Complex ph = std::abs(z1_) / z1_;
      z0_ *= ph;
      z1_ *= ph;
    }
  }

  Complex z0_, z1_;
};

/// Chordal distance 2|z - w| / sqrt((1+|z|^2)(1+|w|^2)), valid at infinity.
inline double chordal(const SpherePoint& a, const SpherePoint& b) {
  const double num = std::abs(a.z0() * b.z1() - b.z0() * a.z1());
  const double den = std::sqrt((std::norm(a.z0()) + std::norm(a.z1())) *
                               (std::norm(b.z0()) + std::norm(b.z1())));
  return 2.0 * num / den;
}

inline double chordal(Complex a, Complex b) {
  return chordal(SpherePoint::affine(a), SpherePoint::affine(b));
}

/// Local chart selection: affine near the disc |z| <= 1, inverted (1/z) outside.
enum class Chart { kAffine, kInverted };

inline Chart chart_of(const SpherePoint& p) {
  return std::abs(p.z0()) <= std::abs(p.z1()) ? Chart::kAffine : Chart::kInverted;
}

/// Coordinate of p in the given chart. Finite whenever p is not the chart's pole.
inline Complex coordinate(const SpherePoint& p, Chart c) {
  return c == Chart::kAffine ? p.z0() / p.z1() : p.z1() / p.z0();
}

inline SpherePoint from_coordinate(Complex s, Chart c) {
  return c == Chart::kAffine ? SpherePoint(s, Complex(1.0)) : SpherePoint(Complex(1.0), s);
}

}  // namespace juliatwin
