#include "fracheat/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace fracheat {

static GaussLegendre make_gl(int order) {
  GaussLegendre gl;
  gl.nodes.resize(order);
  gl.weights.resize(order);
  const int m = (order + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev-like initial guess.
    double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < order; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = order * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    gl.nodes[i] = -x;
    gl.nodes[order - 1 - i] = x;
    gl.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    gl.weights[order - 1 - i] = gl.weights[i];
  }
  return gl;
}

const GaussLegendre& GaussLegendre::get(int order) {
  static std::map<int, GaussLegendre> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, make_gl(order)).first;
  return it->second;
}

double integrate_panels(const std::function<double(double)>& f, double a, double b, int panels,
                        int gl_order) {
  const GaussLegendre& gl = GaussLegendre::get(gl_order);
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double mid = lo + 0.5 * h;
    double s = 0.0;
    for (int i = 0; i < gl_order; ++i) s += gl.weights[i] * f(mid + 0.5 * h * gl.nodes[i]);
    total += 0.5 * h * s;
  }
  return total;
}

double integrate_log_panels_fixed(const std::function<double(double)>& f, double lo, double hi,
                                  int panels_per_decade, int gl_order) {
  const GaussLegendre& gl = GaussLegendre::get(gl_order);
  const double llo = std::log(lo), lhi = std::log(hi);
  const int n_panels =
      std::max(1, (int)std::ceil((lhi - llo) / std::log(10.0) * panels_per_decade));
  const double h = (lhi - llo) / n_panels;
  double total = 0.0;
  for (int p = 0; p < n_panels; ++p) {
    const double a = llo + p * h;
    const double mid = a + 0.5 * h;
    double s = 0.0;
    for (int i = 0; i < gl_order; ++i) {
      const double u = std::exp(mid + 0.5 * h * gl.nodes[i]);
      s += gl.weights[i] * f(u) * u; // du = u d(log u)
    }
    total += 0.5 * h * s;
  }
  return total;
}

double integrate_log_panels(const std::function<double(double)>& f, const PanelSpec& spec) {
  int ppd = spec.panels_per_decade;
  double prev = integrate_log_panels_fixed(f, spec.lo, spec.hi, ppd, spec.gl_order);
  for (int round = 0; round < spec.max_rounds; ++round) {
    ppd *= 2;
    const double cur = integrate_log_panels_fixed(f, spec.lo, spec.hi, ppd, spec.gl_order);
    const double scale = std::max(std::abs(cur), 1e-300);
    if (std::abs(cur - prev) <= spec.rel_tol * scale) return cur;
    prev = cur;
  }
  return prev;
}

} // namespace fracheat
