#include "fracheat/subordinator.hpp"

#include <cmath>

#include "fracheat/errors.hpp"

namespace fracheat {

// sin(pi x) with the argument reduced exactly, so integer x gives exact zeros.
static double sinpi(double x) {
  double r = std::fmod(x, 2.0);
  if (r < 0) r += 2.0;
  return std::sin(M_PI * r);
}

SubordinatorDensity::SubordinatorDensity(double alpha, int series_cutoff, double target_accuracy)
    : alpha_(alpha), cutoff_(series_cutoff), tol_(target_accuracy) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw input_error("subordinator: alpha must be in (0,1)");
  panels_.lo = 1e-8;
  // The far algebraic tail u^{-1-alpha} carries visible mass for small alpha,
  // so transform/moment checks integrate far out; the series is cheap there.
  panels_.hi = 1e28;
  panels_.panels_per_decade = 2;
  panels_.gl_order = 16;
  panels_.rel_tol = std::min(1e-9, target_accuracy);

  if (alpha_ == 0.5) return;

  const int kmax = std::min(cutoff_, (int)std::floor(169.0 / alpha_));
  coef_sign_.reserve(kmax);
  coef_logmag_.reserve(kmax);
  for (int k = 1; k <= kmax; ++k) {
    const double sp = sinpi(alpha_ * k);
    double sign = ((k + 1) % 2 == 0) ? 1.0 : -1.0;
    if (sp < 0) sign = -sign;
    const double mag = std::abs(sp);
    if (mag == 0.0) {
      coef_sign_.push_back(0.0);
      coef_logmag_.push_back(-1e300);
      continue;
    }
    coef_sign_.push_back(sign);
    coef_logmag_.push_back(std::lgamma(alpha_ * k + 1.0) - std::lgamma(k + 1.0) + std::log(mag) -
                           std::log(M_PI));
  }

  // eta1 lookup table over the working range (kernel quadratures stay inside
  // [1e-8, 1e8] after the time rescaling).
  table_lo_ = 1e-9;
  table_hi_ = 1e9;
  const int per_decade = 128;
  const int m = (int)std::lround(std::log10(table_hi_ / table_lo_)) * per_decade + 1;
  std::vector<double> lu(m), lv(m);
  for (int i = 0; i < m; ++i) {
    const double u = table_lo_ * std::pow(table_hi_ / table_lo_, (double)i / (m - 1));
    lu[i] = std::log(u);
    lv[i] = std::log(std::max(eta1_exact(u), 1e-300));
  }
  table_ = Pchip(std::move(lu), std::move(lv));
  has_table_ = true;
}

double SubordinatorDensity::pollard(double u, double* lost_digits) const {
  // eta^alpha_1(u) = pi^{-1} sum_{k>=1} ((-1)^{k+1}/k!) Gamma(alpha k + 1)
  //                  sin(pi k alpha) u^{-alpha k - 1}
  const double lu = std::log(u);
  double sum = 0.0, comp = 0.0, abs_sum = 0.0;
  int small_terms = 0;
  for (std::size_t i = 0; i < coef_sign_.size(); ++i) {
    if (coef_sign_[i] == 0.0) continue;
    const int k = (int)i + 1;
    const double ln_mag = coef_logmag_[i] + (-alpha_ * k - 1.0) * lu;
    if (ln_mag > 690.0) { // term overflow; cancellation is certainly hopeless
      *lost_digits = 99.0;
      return 0.0;
    }
    const double term = coef_sign_[i] * std::exp(ln_mag);
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    abs_sum += std::abs(term);
    if (std::abs(term) < 1e-18 * std::max(abs_sum, 1e-300)) {
      if (++small_terms >= 2) {
        *lost_digits = std::log10(abs_sum / std::max(std::abs(sum), 1e-300));
        return sum;
      }
    } else {
      small_terms = 0;
    }
  }
  *lost_digits = 99.0; // did not converge within the cutoff
  return sum;
}

double SubordinatorDensity::zolotarev(double u) const {
  // Bromwich integral deformed onto Zolotarev's contour, where the integrand
  // is real and positive:
  //   eta(u) = (alpha/(1-alpha)) u^{-1/(1-alpha)} (1/pi)
  //            int_0^pi A(phi) exp(-u^{-alpha/(1-alpha)} A(phi)) dphi,
  //   A(phi) = sin(alpha phi)^{alpha/(1-alpha)} sin((1-alpha) phi)
  //            / sin(phi)^{1/(1-alpha)}.
  // A straight Talbot contour is unusable here: for alpha > 1/2 the factor
  // exp(-s^alpha) grows along the contour tail faster than exp(su) decays.
  const double a = alpha_, om = 1.0 - alpha_;
  const double c = std::pow(u, -a / om);
  auto f = [&](double phi) {
    const double la = (a / om) * std::log(std::sin(a * phi)) + std::log(std::sin(om * phi)) -
                      (1.0 / om) * std::log(std::sin(phi));
    const double e = la - c * std::exp(la);
    return (e < -745.0) ? 0.0 : std::exp(e);
  };
  double integral = 0.0;
  const int levels = 14;
  double lo = M_PI * std::pow(0.5, levels + 1);
  integral += f(0.5 * lo) * lo;
  for (int k = levels; k >= 0; --k) {
    const double hi = M_PI * std::pow(0.5, k + 1);
    integral += integrate_panels(f, lo, hi, 4, 16);
    lo = hi;
  }
  for (int k = 0; k <= levels; ++k) {
    const double hi = M_PI * (1.0 - std::pow(0.5, k + 2));
    integral += integrate_panels(f, lo, hi, 4, 16);
    lo = hi;
  }
  integral += f(0.5 * (lo + M_PI * (1.0 - 1e-14))) * (M_PI - lo);
  return (a / om) * std::pow(u, -1.0 / om) * integral / M_PI;
}

double SubordinatorDensity::eta1_exact(double u) const {
  if (!(u > 0.0)) throw input_error("eta: s must be positive");
  if (alpha_ == 0.5) {
    // (2 sqrt(pi))^{-1} u^{-3/2} exp(-1/(4u))
    return 0.5 / std::sqrt(M_PI) * std::pow(u, -1.5) * std::exp(-0.25 / u);
  }
  double lost = 0.0;
  const double s = pollard(u, &lost);
  if (lost < 6.0) return std::max(s, 0.0);
  return zolotarev(u);
}

double SubordinatorDensity::eta1(double u) const {
  if (!(u > 0.0)) throw input_error("eta: s must be positive");
  if (!has_table_ || u < table_lo_ || u > table_hi_) return eta1_exact(u);
  return std::exp(table_(std::log(u)));
}

EtaMethod SubordinatorDensity::method_at(double u) const {
  if (alpha_ == 0.5) return EtaMethod::closed_form_half;
  double lost = 0.0;
  pollard(u, &lost);
  return lost < 6.0 ? EtaMethod::pollard_series : EtaMethod::contour_inversion;
}

double SubordinatorDensity::eta(double t, double s) const {
  if (!(t > 0.0)) throw input_error("eta: t must be positive");
  const double scale = std::pow(t, -1.0 / alpha_);
  return scale * eta1(s * scale);
}

double SubordinatorDensity::laplace_check(double t, double lambda) const {
  if (!(t > 0.0)) throw input_error("laplace_check: t must be positive");
  if (lambda < 0.0) throw input_error("laplace_check: lambda must be >= 0");
  // int e^{-lambda s} eta_t(s) ds = int e^{-lambda t^{1/alpha} u} eta_1(u) du
  const double c = lambda * std::pow(t, 1.0 / alpha_);
  auto f = [&](double u) {
    const double e = -c * u;
    return (e < -745.0) ? 0.0 : std::exp(e) * eta1(u);
  };
  const double numeric = integrate_log_panels(f, panels_);
  const double exact = std::exp(-t * std::pow(lambda, alpha_));
  return std::abs(numeric - exact);
}

double SubordinatorDensity::moment_check(double gamma) const {
  if (gamma < 0.0) throw input_error("moment_check: gamma must be >= 0");
  // Certifies the density itself, so it integrates the direct evaluation.
  auto f = [&](double u) { return std::pow(u, -gamma) * eta1_exact(u); };
  const double v1 = integrate_log_panels_fixed(f, panels_.lo, panels_.hi, 4, 16);
  const double v2 = integrate_log_panels_fixed(f, panels_.lo, panels_.hi, 8, 16);
  if (std::abs(v2 - v1) > 1e-6 * std::max(std::abs(v2), 1e-300))
    throw accuracy_error("moment_check: quadrature did not converge",
                         std::abs(v2 - v1) / std::max(std::abs(v2), 1e-300), 1e-6);
  return v2;
}

} // namespace fracheat
