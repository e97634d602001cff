#pragma once

#include <array>
#include <vector>

#include "juliatwin/ratmap.hpp"

namespace juliatwin {

/// A float map together with its four chart representatives
/// (affine or inverted coordinate on each side), so derivatives can be read
/// anywhere on the sphere, infinity included.
class ChartedMap {
 public:
  explicit ChartedMap(RatMap<Complex> f) : f_(std::move(f)) {
    const auto inv = RatMap<Complex>::from_coprime(Poly<Complex>::constant(1.0),
                                                   Poly<Complex>::identity());
    const RatMap<Complex> reps[2][2] = {
        {f_, compose(inv, f_)},
        {compose(f_, inv), compose(inv, compose(f_, inv))},
    };
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        auto& r = rep_[a][b];
        r.num = reps[a][b].num();
        r.den = reps[a][b].den();
        r.dnum = r.num.derivative();
        r.dden = r.den.derivative();
      }
  }

  const RatMap<Complex>& map() const { return f_; }

  SpherePoint operator()(const SpherePoint& z) const { return evaluate(f_, z); }

  /// d/ds of (chart `to`) o f o (chart `from`)^-1 at the point z.
  Complex chart_derivative(const SpherePoint& z, Chart from, Chart to) const {
    const auto& r = rep_[index(from)][index(to)];
    const Complex s = coordinate(z, from);
    const Complex p = r.num(s), q = r.den(s);
    return (r.dnum(s) * q - p * r.dden(s)) / (q * q);
  }

  /// Multiplier of a closed orbit z_0 -> z_1 -> ... -> z_{k-1} -> z_0.
  Complex cycle_multiplier(const std::vector<SpherePoint>& orbit) const {
    Complex lambda = 1.0;
    const std::size_t k = orbit.size();
    for (std::size_t j = 0; j < k; ++j) {
      const Chart from = chart_of(orbit[j]);
      const Chart to = chart_of(orbit[(j + 1) % k]);
      lambda *= chart_derivative(orbit[j], from, to);
    }
    return lambda;
  }

  /// f^n(z) and d/ds of f^n read in the chart of z on both ends.
  std::pair<SpherePoint, Complex> iterate_with_derivative(const SpherePoint& z, int n) const {
    const Chart home = chart_of(z);
    SpherePoint cur = z;
    Chart c = home;
    Complex deriv = 1.0;
    for (int j = 0; j < n; ++j) {
      SpherePoint next = (*this)(cur);
      const Chart nc = j + 1 == n ? home : chart_of(next);
      deriv *= chart_derivative(cur, c, nc);
      cur = next;
      c = nc;
    }
    return {cur, deriv};
  }

 private:
  struct Rep {
    Poly<Complex> num, den, dnum, dden;
  };
  static int index(Chart c) { return c == Chart::kAffine ? 0 : 1; }

  RatMap<Complex> f_;
  Rep rep_[2][2];
};

}  // namespace juliatwin
