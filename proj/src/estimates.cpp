#include "fracheat/estimates.hpp"

#include <cmath>

#include "fracheat/errors.hpp"
#include "fracheat/util.hpp"

namespace fracheat {

static std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo * std::pow(hi / lo, (double)i / (n - 1));
  return g;
}

static EnvelopeGrid refined(const EnvelopeGrid& g) {
  EnvelopeGrid r = g;
  r.points_per_axis = 2 * g.points_per_axis - 1;
  return r;
}

namespace {

enum class Extremum { sup, inf };

struct ScanResult {
  double value = 0.0;
  double arg_t = 0.0, arg_d = 0.0;
};

template <typename RatioFn>
ScanResult scan(const EnvelopeGrid& g, Extremum which, RatioFn&& ratio) {
  // d gets the same log values as t plus d = 0, so the t = d diagonal and the
  // d = 0 line are on the grid.
  const auto ts = log_grid(g.t_lo, g.t_hi, g.points_per_axis);
  auto ds = log_grid(std::max(g.d_lo, 1e-3), g.d_hi, g.points_per_axis);
  ds.insert(ds.begin(), 0.0);
  ScanResult best;
  best.value = (which == Extremum::sup) ? -1e300 : 1e300;
  for (double t : ts)
    for (double d : ds) {
      const double r = ratio(t, d);
      const bool better = (which == Extremum::sup) ? (r > best.value) : (r < best.value);
      if (better) best = {r, t, d};
    }
  return best;
}

template <typename RatioFn>
EnvelopeReport envelope_report(const EnvelopeGrid& g, Extremum which, RatioFn&& ratio) {
  EnvelopeReport rep;
  rep.t_grid = log_grid(g.t_lo, g.t_hi, g.points_per_axis);
  rep.d_grid = rep.t_grid;
  const auto base = scan(g, which, ratio);
  const auto fine = scan(refined(g), which, ratio);
  if (which == Extremum::sup) {
    rep.sup_ratio = base.value;
    rep.argmax_t = base.arg_t;
    rep.argmax_d = base.arg_d;
    rep.inf_ratio = scan(g, Extremum::inf, ratio).value;
  } else {
    rep.inf_ratio = base.value;
    rep.argmin_t = base.arg_t;
    rep.argmin_d = base.arg_d;
    rep.sup_ratio = scan(g, Extremum::sup, ratio).value;
  }
  rep.refine_delta = std::abs(fine.value - base.value);
  return rep;
}

} // namespace

EnvelopeReport verify_upper_envelope(const FracHeatOperator& op, const EnvelopeGrid& g) {
  if (!op.model().a1()) throw input_error("verify_upper_envelope: model does not claim A1");
  const double ex = op.space().beta_star() + 2.0 * op.alpha();
  auto ratio = [&](double t, double d) {
    const double env = t * std::pow(std::pow(t, 0.5 / op.alpha()) + d, -ex);
    return op.kernel_radial(t, d) / env;
  };
  return envelope_report(g, Extremum::sup, ratio);
}

EnvelopeReport verify_lower_envelope(const FracHeatOperator& op, const EnvelopeGrid& g) {
  if (!op.model().a4()) throw input_error("verify_lower_envelope: model does not satisfy A4");
  const double ex = op.space().beta() + 2.0 * op.alpha();
  auto ratio = [&](double t, double d) {
    const double env = t * std::pow(std::pow(t, 0.5 / op.alpha()) + d, -ex);
    return op.kernel_radial(t, d) / env;
  };
  return envelope_report(g, Extremum::inf, ratio);
}

EnvelopeReport verify_time_derivative_bound(const FracHeatOperator& op, const EnvelopeGrid& g) {
  if (!op.model().a1() || !op.model().a2())
    throw input_error("verify_time_derivative_bound: model needs A1 and A2");
  const double ex = op.space().beta_star() + 2.0 * op.alpha();
  auto ratio = [&](double t, double d) {
    return std::abs(op.time_derivative_radial(t, d)) *
           std::pow(std::pow(t, 0.5 / op.alpha()) + d, ex);
  };
  return envelope_report(g, Extremum::sup, ratio);
}

EnvelopeReport verify_frac_derivative_bound(const FracHeatOperator& op, double theta,
                                            const EnvelopeGrid& g) {
  if (!op.model().a1() || !op.model().a2())
    throw input_error("verify_frac_derivative_bound: model needs A1 and A2");
  const double sigma = theta / (2.0 * op.alpha());
  if (!(sigma > 0.0 && sigma <= 1.0 + 1e-12))
    throw input_error("verify_frac_derivative_bound: sigma out of range");
  // Envelope scans tolerate ~1e-3, so run the kernel quadrature lean.
  PanelSpec lean = op.s_quad();
  lean.gl_order = 12;
  lean.max_rounds = 0;
  FracHeatOperator fast(op.alpha(), op.space(), op.model(), op.grid(), lean);
  const double ex = op.space().beta_star() + theta;
  auto ratio = [&](double t, double d) {
    return std::abs(fast.frac_derivative_radial(theta, t, d)) *
           std::pow(std::pow(t, 0.5 / op.alpha()) + d, ex);
  };
  EnvelopeGrid coarse = g;
  coarse.points_per_axis = std::min(g.points_per_axis, 17);
  return envelope_report(coarse, Extremum::sup, ratio);
}

YoungReport verify_young(const std::vector<std::vector<double>>& kernel,
                         const std::vector<double>& w, double q, double r, double p, int trials,
                         unsigned long long seed) {
  if (std::abs(1.0 / q + 1.0 / r - 1.0 / p - 1.0) > 1e-12)
    throw input_error("verify_young: need 1/q + 1/r = 1/p + 1");
  const std::size_t n = w.size();
  if (kernel.size() != n) throw input_error("verify_young: kernel shape mismatch");
  YoungReport rep;
  for (std::size_t i = 0; i < n; ++i) {
    if (kernel[i].size() != n) throw input_error("verify_young: kernel shape mismatch");
    rep.norm_bound = std::max(rep.norm_bound, weighted_p_norm(kernel[i], w, q));
  }
  std::vector<double> col(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = kernel[i][j];
    rep.norm_bound = std::max(rep.norm_bound, weighted_p_norm(col, w, q));
  }
  Rng rng(seed);
  std::vector<double> f(n), kf(n);
  for (int trial = 0; trial < trials; ++trial) {
    for (std::size_t j = 0; j < n; ++j) f[j] = rng.uniform();
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += w[j] * kernel[i][j] * f[j];
      kf[i] = acc;
    }
    const double ratio = weighted_p_norm(kf, w, p) / weighted_p_norm(f, w, r);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
  }
  rep.max_normalized = rep.max_ratio / rep.norm_bound;
  return rep;
}

SmoothingReport verify_smoothing(const FracHeatOperator& op, double r, double p, double theta) {
  if (!(r >= 1.0 && p >= r)) throw input_error("verify_smoothing: need 1 <= r <= p");
  const double alpha = op.alpha();
  const double sigma = theta / (2.0 * alpha);
  if (theta > 0.0 && std::abs(sigma - 1.0) > 1e-12)
    throw input_error("verify_smoothing: theta must be 0 or 2*alpha here");

  const auto& grid = op.grid();
  const std::size_t n = grid.size();
  const auto& nodes = grid.nodes();
  const auto& w = grid.weights();
  const Point c = op.space().origin();

  // Bump family, widths in geometric progression; a fixed profile only
  // realizes the r = 1 decay rate, the max over widths tracks the operator
  // norm on scale-invariant spaces.
  const double h = grid.spacing();
  const double w_lo = 2.0 * h;
  const double w_hi = 6.0 * std::pow(10.0, 0.5 / alpha);
  std::vector<std::vector<double>> bumps;
  std::vector<double> bump_rnorm;
  {
    // width-zero member: a single grid atom, so the r = 1 rate is exact
    // down to t comparable with the spacing
    std::vector<double> delta(n, 0.0);
    std::size_t jc = 0;
    double dc = 1e300;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = op.space().distance(nodes[j], c);
      if (d < dc) {
        dc = d;
        jc = j;
      }
    }
    delta[jc] = 1.0;
    bumps.push_back(std::move(delta));
    bump_rnorm.push_back(weighted_p_norm(bumps.back(), w, r));
  }
  for (double width = w_lo; width <= w_hi * 1.0001; width *= std::sqrt(2.0)) {
    std::vector<double> phi(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const double d = op.space().distance(nodes[j], c);
      if (d < 6.0 * width) phi[j] = std::exp(-d * d / (width * width));
    }
    bumps.push_back(std::move(phi));
    bump_rnorm.push_back(weighted_p_norm(bumps.back(), w, r));
  }

  SmoothingReport rep;
  const int nt = 25;
  for (int i = 0; i < nt; ++i) {
    const double t = 0.1 * std::pow(100.0, (double)i / (nt - 1));
    double best = 0.0;
    for (std::size_t b = 0; b < bumps.size(); ++b) {
      std::vector<double> out;
      if (theta == 0.0) {
        out = op.semigroup_apply(t, bumps[b]);
      } else {
        // sigma = 1: L^{theta/2} e^{-tL} = -d/dt e^{-tL}, Richardson FD
        const double step = 1e-3 * t;
        auto diff = [&](double s) {
          auto hi = op.semigroup_apply(t + s, bumps[b]);
          auto lo = op.semigroup_apply(t - s, bumps[b]);
          for (std::size_t j = 0; j < n; ++j) hi[j] = (hi[j] - lo[j]) / (2.0 * s);
          return hi;
        };
        auto d1 = diff(step);
        auto d2 = diff(0.5 * step);
        out.resize(n);
        for (std::size_t j = 0; j < n; ++j) out[j] = -(4.0 * d2[j] - d1[j]) / 3.0;
      }
      best = std::max(best, weighted_p_norm(out, w, p) / bump_rnorm[b]);
    }
    rep.t_samples.push_back(t);
    rep.log_ratio.push_back(std::log(best));
  }
  std::vector<double> lt(rep.t_samples.size());
  for (std::size_t i = 0; i < lt.size(); ++i) lt[i] = std::log(rep.t_samples[i]);
  rep.fitted_slope = fit_slope(lt, rep.log_ratio);
  rep.expected_slope =
      -theta / (2.0 * alpha) - op.space().beta_star() * (1.0 / r - 1.0 / p) / (2.0 * alpha);
  return rep;
}

} // namespace fracheat
