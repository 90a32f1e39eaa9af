#ifndef FRACHEAT_MEASURE_HPP
#define FRACHEAT_MEASURE_HPP

#include <vector>

#include "fracheat/geometry.hpp"

namespace fracheat {

// A nonnegative Radon measure on M_+ = M x (0,infty) with finitely many atoms.
struct MeasureAtom {
  double t = 0.0; // time coordinate, > 0
  Point x;
  double mass = 0.0; // >= 0
};

struct DiscreteMeasure {
  std::vector<MeasureAtom> atoms;

  double total_mass() const {
    double m = 0.0;
    for (const auto& a : atoms) m += a.mass;
    return m;
  }
};

// B^(alpha)_r(t0,x0) = {(t,x): r^{2 alpha} < t - t0 < 2 r^{2 alpha},
//                              d(x,x0) < r}.
struct ParabolicBall {
  double t0 = 0.0;
  Point x0;
  double r = 0.0;

  template <typename DistFn>
  bool contains(double t, const Point& x, double alpha, DistFn&& dist) const {
    const double r2a = std::pow(r, 2.0 * alpha);
    if (!(t - t0 > r2a && t - t0 < 2.0 * r2a)) return false;
    return dist(x, x0) < r;
  }
};

} // namespace fracheat

#endif
