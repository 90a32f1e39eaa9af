#ifndef FRACHEAT_QUADRATURE_HPP
#define FRACHEAT_QUADRATURE_HPP

#include <functional>
#include <vector>

namespace fracheat {

// Gauss-Legendre rule on [-1,1]; nodes/weights computed once per order by
// Newton iteration on the Legendre recurrence and cached.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
  static const GaussLegendre& get(int order);
};

// Composite Gauss-Legendre panels with geometrically spaced breakpoints on
// [lo, hi]. Integrands with algebraic tails and essential singularities at 0
// are the target, so the panel layout is logarithmic.
struct PanelSpec {
  double lo = 1e-8;
  double hi = 1e8;
  int panels_per_decade = 2;
  int gl_order = 16;
  // Adaptive refinement: double panels_per_decade until the value moves by
  // less than rel_tol, at most max_rounds times.
  double rel_tol = 1e-9;
  int max_rounds = 3;
};

double integrate_log_panels(const std::function<double(double)>& f, const PanelSpec& spec);

// Single fixed pass (no adaptivity); used by the adaptive driver.
double integrate_log_panels_fixed(const std::function<double(double)>& f, double lo, double hi,
                                  int panels_per_decade, int gl_order);

// Plain composite GL on [a,b] with n panels.
double integrate_panels(const std::function<double(double)>& f, double a, double b, int panels,
                        int gl_order);

} // namespace fracheat

#endif
