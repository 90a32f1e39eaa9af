#ifndef FRACHEAT_SUBORDINATOR_HPP
#define FRACHEAT_SUBORDINATOR_HPP

#include <vector>

#include "fracheat/quadrature.hpp"
#include "fracheat/util.hpp"

namespace fracheat {

enum class EtaMethod { closed_form_half, pollard_series, contour_inversion };

// One-sided stable subordinator density eta^alpha_t, the kernel of the
// subordination formula. All evaluations go through eta^alpha_1; the time
// scaling eta^alpha_t(s) = t^{-1/alpha} eta^alpha_1(s t^{-1/alpha}) holds
// exactly by construction.
//
// alpha = 1/2 uses the closed form. Otherwise eta1_exact combines Pollard's
// series (compensated summation, cancellation monitor) with a contour
// inversion fallback, and eta1 reads a monotone-cubic log-log table built
// once from eta1_exact, because kernel quadratures evaluate eta millions of
// times.
class SubordinatorDensity {
public:
  explicit SubordinatorDensity(double alpha, int series_cutoff = 400,
                               double target_accuracy = 1e-10);

  double alpha() const { return alpha_; }
  double target_accuracy() const { return tol_; }

  // eta^alpha_1(u), u > 0 (table-backed for alpha != 1/2).
  double eta1(double u) const;
  // Direct evaluation: closed form / Pollard series / contour.
  double eta1_exact(double u) const;
  // eta^alpha_t(s) through the scaling identity.
  double eta(double t, double s) const;
  // Which method eta1_exact uses at this u (diagnostic).
  EtaMethod method_at(double u) const;

  // |int_0^infty e^{-lambda s} eta^alpha_t(s) ds - e^{-t lambda^alpha}|.
  double laplace_check(double t, double lambda) const;
  // int_0^infty s^{-gamma} eta^alpha_1(s) ds, gamma >= 0.
  double moment_check(double gamma) const;

  const PanelSpec& panel_spec() const { return panels_; }

private:
  double pollard(double u, double* lost_digits) const;
  double zolotarev(double u) const;

  double alpha_;
  int cutoff_;
  double tol_;
  PanelSpec panels_;
  // Precomputed Pollard coefficients: sign, log magnitude; zero terms skipped.
  std::vector<double> coef_sign_, coef_logmag_;
  // log-log table of eta1 on [table_lo_, table_hi_].
  Pchip table_;
  double table_lo_ = 0.0, table_hi_ = 0.0;
  bool has_table_ = false;
};

} // namespace fracheat

#endif
