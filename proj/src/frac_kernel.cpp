#include "fracheat/frac_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "fracheat/errors.hpp"
#include "fracheat/util.hpp"

namespace fracheat {

void SpaceTimeField::check_shape(std::size_t n_nodes) const {
  if (times.size() != values.size()) throw input_error("SpaceTimeField: times/values mismatch");
  for (const auto& v : values)
    if (v.size() != n_nodes) throw input_error("SpaceTimeField: slice size mismatch");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]) || !(times[0] > 0.0))
      throw input_error("SpaceTimeField: times must be positive increasing");
}

FracHeatOperator::FracHeatOperator(double alpha, MetricMeasureSpace space, HeatKernelModel model,
                                   QuadratureGrid grid, PanelSpec s_quad)
    : alpha_(alpha),
      space_(std::move(space)),
      model_(std::move(model)),
      grid_(std::move(grid)),
      eta_(alpha),
      squad_(s_quad) {
  // For alpha != 1/2 eta comes from its lookup table (~1e-6 relative); its
  // knots put a noise floor under the panel refinement, so extra rounds only
  // burn time without converging.
  if (alpha_ != 0.5) {
    squad_.rel_tol = std::max(squad_.rel_tol, 1e-6);
    squad_.max_rounds = std::min(squad_.max_rounds, 1);
  }
}

double FracHeatOperator::kernel_radial(double t, double d) const {
  if (!(t > 0.0)) throw input_error("frac_kernel: t must be positive");
  // Substitute s = t^{1/alpha} u so the subordinator is always eta_1.
  const double tsc = std::pow(t, 1.0 / alpha_);
  auto f = [&](double u) { return eta_.eta1(u) * model_.eval_radial(space_, tsc * u, d); };
  PanelSpec spec = squad_;
  // The heat factor pushes the integrand mass up to u ~ d^2 / t^{1/alpha};
  // keep a wide margin above it so the eta tail is truncated harmlessly.
  // Smooth in (t,d): a branch here would put jumps under the t-derivatives.
  spec.hi = squad_.hi * (1.0 + 10.0 * d * d / tsc);
  return integrate_log_panels(f, spec);
}

double FracHeatOperator::kernel(double t, const Point& x, const Point& y) const {
  return kernel_radial(t, space_.distance(x, y));
}

// Log-log monotone-cubic profile of K(t, .) over [lo, hi].
static Pchip build_radial_table(const FracHeatOperator& op, double t, double lo, double hi) {
  const int per_decade = 32;
  const int m = std::max(8, (int)std::ceil(std::log10(hi / lo) * per_decade) + 1);
  std::vector<double> ld(m), lk(m);
  for (int i = 0; i < m; ++i) {
    const double di = lo * std::pow(hi / lo, (double)i / (m - 1));
    ld[i] = std::log(di);
    lk[i] = std::log(std::max(op.kernel_radial(t, di), 1e-300));
  }
  return Pchip(std::move(ld), std::move(lk));
}

std::vector<double> FracHeatOperator::kernel_row(double t, const Point& x) const {
  const auto& nodes = grid_.nodes();
  const std::size_t n = nodes.size();
  std::vector<double> d(n);
  double dmin_pos = 1e300, dmax = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    d[j] = space_.distance(x, nodes[j]);
    if (d[j] > 0.0) dmin_pos = std::min(dmin_pos, d[j]);
    dmax = std::max(dmax, d[j]);
  }
  std::vector<double> row(n);
  // Deduplicate exact distances; uniform grids repeat them heavily.
  std::map<double, double> memo;
  for (std::size_t j = 0; j < n; ++j) memo.emplace(d[j], 0.0);
  if (memo.size() <= radial_table_threshold) {
    for (auto& kv : memo) kv.second = kernel_radial(t, kv.first);
    for (std::size_t j = 0; j < n; ++j) row[j] = memo.find(d[j])->second;
    return row;
  }
  Pchip interp = build_radial_table(*this, t, dmin_pos * 0.999, dmax * 1.001);
  const double k0 = kernel_radial(t, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    row[j] = (d[j] <= 0.0) ? k0 : std::exp(interp(std::log(d[j])));
  return row;
}

std::vector<double> FracHeatOperator::line_profile(double t) const {
  // Kernel values at distances k*h for the uniform line grid.
  const std::size_t n = grid_.size();
  const double h = grid_.spacing();
  std::vector<double> prof(n);
  if (n <= radial_table_threshold) {
    for (std::size_t k = 0; k < n; ++k) prof[k] = kernel_radial(t, k * h);
    return prof;
  }
  auto it = line_table_cache_.find(t);
  if (it == line_table_cache_.end()) {
    if (line_table_cache_.size() > 4096) line_table_cache_.clear();
    it = line_table_cache_
             .emplace(t, build_radial_table(*this, t, h * 0.999, (n - 1) * h * 1.001))
             .first;
  }
  prof[0] = kernel_radial(t, 0.0);
  for (std::size_t k = 1; k < n; ++k) prof[k] = std::exp(it->second(std::log(k * h)));
  return prof;
}

std::vector<double> FracHeatOperator::semigroup_apply(double t,
                                                      const std::vector<double>& f) const {
  const auto& nodes = grid_.nodes();
  const auto& w = grid_.weights();
  const std::size_t n = nodes.size();
  if (f.size() != n) throw input_error("semigroup_apply: field shape mismatch");
  std::vector<double> out(n, 0.0);
  if (space_.dim() == 1) {
    const auto prof = line_profile(t);
    for (std::size_t j = 0; j < n; ++j) {
      const double fj = f[j] * w[j];
      if (fj == 0.0) continue;
      for (std::size_t i = 0; i < n; ++i) out[i] += prof[(i > j) ? i - j : j - i] * fj;
    }
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = kernel_row(t, nodes[i]);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += row[j] * w[j] * f[j];
    out[i] = acc;
  }
  return out;
}

std::vector<double> FracHeatOperator::adjoint_apply(const DiscreteMeasure& nu) const {
  std::vector<double> out(grid_.size(), 0.0);
  for (const auto& atom : nu.atoms) {
    if (!(atom.t > 0.0)) throw input_error("adjoint_apply: atom with t <= 0");
    if (atom.mass < 0.0) throw input_error("adjoint_apply: negative atom mass");
    if (atom.mass == 0.0) continue;
    const auto row = kernel_row(atom.t, atom.x);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += atom.mass * row[i];
  }
  return out;
}

double FracHeatOperator::time_derivative_radial(double t, double d, double* err_estimate) const {
  if (!(t > 0.0)) throw input_error("time_derivative_kernel: t must be positive");
  const double h = t * 1e-3;
  auto diff = [&](double step) {
    return (kernel_radial(t + step, d) - kernel_radial(t - step, d)) / (2.0 * step);
  };
  const double d1 = diff(h);
  const double d2 = diff(0.5 * h);
  const double rich = (4.0 * d2 - d1) / 3.0;
  if (err_estimate) *err_estimate = std::abs(rich - d2);
  return rich;
}

double FracHeatOperator::time_derivative_kernel(double t, const Point& x, const Point& y,
                                                double* err_estimate) const {
  return time_derivative_radial(t, space_.distance(x, y), err_estimate);
}

double FracHeatOperator::frac_derivative_radial(double theta, double t, double d) const {
  if (!(theta > 0.0)) throw input_error("frac_derivative_kernel: theta must be positive");
  const double sigma = theta / (2.0 * alpha_);
  if (sigma > 1.0 + 1e-12)
    throw input_error("frac_derivative_kernel: theta too large for this alpha (sigma > 1)");
  if (sigma >= 1.0 - 1e-12) {
    // L^alpha K = -dK/dt exactly.
    return -time_derivative_radial(t, d);
  }
  const double k_t = kernel_radial(t, d);
  const double s0 = 1e-2 * t;
  // Taylor split on [0, s0]: the naive difference quotient blows up like
  // s^{-sigma} there; the expansion s K' + s^2/2 K'' integrates in closed form.
  const double kp = time_derivative_radial(t, d);
  const double hh = 5e-3 * t;
  const double kpp = (kernel_radial(t + hh, d) - 2.0 * k_t + kernel_radial(t - hh, d)) / (hh * hh);
  double integral = kp * std::pow(s0, 1.0 - sigma) / (1.0 - sigma) +
                    0.5 * kpp * std::pow(s0, 2.0 - sigma) / (2.0 - sigma);
  // Resolved region [s0, S] on log panels, then the exact -K_t tail; the
  // remaining K_{t+s} tail is smaller by (t/S)^{beta*/2alpha}.
  const double S = 1e8 * t;
  PanelSpec spec = squad_;
  spec.lo = s0;
  spec.hi = S;
  auto g = [&](double s) { return (kernel_radial(t + s, d) - k_t) * std::pow(s, -1.0 - sigma); };
  integral += integrate_log_panels(g, spec);
  integral += -k_t * std::pow(S, -sigma) / sigma;
  return integral / std::tgamma(-sigma);
}

double FracHeatOperator::frac_derivative_kernel(double theta, double t, const Point& x,
                                                const Point& y) const {
  return frac_derivative_radial(theta, t, space_.distance(x, y));
}

} // namespace fracheat
