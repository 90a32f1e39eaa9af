#ifndef FRACHEAT_GEOMETRY_HPP
#define FRACHEAT_GEOMETRY_HPP

#include <array>
#include <cmath>
#include <cstddef>

namespace fracheat {

// A point of one of the supported spaces. At most three coordinates
// (Euclidean n <= 3, or the Heisenberg group H^1 as R^3 with the group law).
struct Point {
  std::array<double, 3> c{0.0, 0.0, 0.0};
  int dim = 1;

  Point() = default;
  explicit Point(double x) : c{x, 0.0, 0.0}, dim(1) {}
  Point(double x, double y) : c{x, y, 0.0}, dim(2) {}
  Point(double x, double y, double z) : c{x, y, z}, dim(3) {}

  double operator[](std::size_t i) const { return c[i]; }
  double& operator[](std::size_t i) { return c[i]; }

  bool operator==(const Point& o) const { return dim == o.dim && c == o.c; }
};

inline double euclidean_distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (int i = 0; i < a.dim; ++i) {
    const double d = a.c[i] - b.c[i];
    s += d * d;
  }
  return std::sqrt(s);
}

// Koranyi gauge |(a,b,c)| = ((a^2+b^2)^2 + c^2)^{1/4}.
inline double koranyi_gauge(const Point& p) {
  const double q = p.c[0] * p.c[0] + p.c[1] * p.c[1];
  return std::pow(q * q + p.c[2] * p.c[2], 0.25);
}

// Group law on H^1: (a,b,c)*(a',b',c') = (a+a', b+b', c+c' + (ab'-ba')/2).
inline Point heisenberg_mul(const Point& x, const Point& y) {
  Point r;
  r.dim = 3;
  r.c[0] = x.c[0] + y.c[0];
  r.c[1] = x.c[1] + y.c[1];
  r.c[2] = x.c[2] + y.c[2] + 0.5 * (x.c[0] * y.c[1] - x.c[1] * y.c[0]);
  return r;
}

inline Point heisenberg_inv(const Point& x) {
  Point r;
  r.dim = 3;
  r.c[0] = -x.c[0];
  r.c[1] = -x.c[1];
  r.c[2] = -x.c[2];
  return r;
}

// Left-invariant quasi-distance d(x,y) = |x^{-1} y| in the Koranyi gauge.
inline double koranyi_distance(const Point& x, const Point& y) {
  return koranyi_gauge(heisenberg_mul(heisenberg_inv(x), y));
}

} // namespace fracheat

#endif
