#ifndef FRACHEAT_EVOLUTION_HPP
#define FRACHEAT_EVOLUTION_HPP

#include <functional>
#include <vector>

#include "fracheat/frac_kernel.hpp"

namespace fracheat {

// (q,p,r) with 1/q = beta*(1/r - 1/p)/(2 alpha) inside the admissible range.
struct AdmissibilityResult {
  bool admissible = false;
  bool scaling_ok = false;
  bool range_ok = false;
  double q_from_identity = 0.0;
  std::string failed_clause; // empty when admissible
};

AdmissibilityResult is_admissible(double q, double p, double r, double alpha, double beta_star,
                                  bool generalized);

enum class NormKind { Lq_Lp, Cq_Lp, Cq_dot_Lp };

struct WeightedNorm {
  NormKind kind = NormKind::Lq_Lp;
  double q = 2.0;
  double p = 2.0;
};

// Time slices of the source f(t, .) on the operator's grid.
using SourceFn = std::function<std::vector<double>(double t)>;

// field[t_i] = e^{-t_i L^alpha} phi.
SpaceTimeField homogeneous_solve(const FracHeatOperator& op, const std::vector<double>& phi,
                                 const std::vector<double>& times);

// G(f)(t) = int_0^t e^{-(t-tau) L^alpha} f(tau) dtau on a graded tau-mesh
// clustered at tau = t. Below the grid's smallest resolvable semigroup time
// the propagator acts as the identity (trapezoid slice on [t-eps, t]).
SpaceTimeField duhamel_solve(const FracHeatOperator& op, const SourceFn& f,
                             const std::vector<double>& times, int n_tau = 32);
// Source given as a field on the same times; linear interpolation in t.
SpaceTimeField duhamel_solve(const FracHeatOperator& op, const SpaceTimeField& f,
                             const std::vector<double>& times, int n_tau = 32);

// L^q(I; L^p) by trapezoid over the field's times (plus the [0, t_1) head
// rectangle); C_q as sup of t^{1/q} ||.||_p. A single-slice field returns the
// slice norm.
double spacetime_norm(const FracHeatOperator& op, const SpaceTimeField& field,
                      const WeightedNorm& norm);
// t_1^{1/q} ||u(t_1)||_p at the smallest grid time (the dot-C_q limit proxy).
double cq_limit_value(const FracHeatOperator& op, const SpaceTimeField& field, double q, double p);

struct HomogeneousEstimateReport {
  double max_ratio = 0.0;       // ||e^{-tL}phi|| / ||phi||_r over trials
  double max_ratio_cq = 0.0;    // the C_q variant (generalized triplets)
  int trials = 0;
};

HomogeneousEstimateReport verify_homogeneous_estimate(const FracHeatOperator& op, double q,
                                                      double p, double r, int trials,
                                                      unsigned long long seed, double T = 10.0);

struct InhomogeneousEstimateReport {
  double fitted_T_exponent = 0.0;
  double expected_T_exponent = 0.0; // 1 - beta* b / (2 r alpha)
  std::vector<double> T_list;
  std::vector<double> norms;
};

struct InhomogeneousOptions {
  // Constant-in-time source saturates the T-power at r = b+1; a
  // time-localized source realizes the flat (exponent 0) regime.
  bool time_localized = false;
  double tau0 = 0.5;            // support [0, tau0] when time_localized
  NormKind norm = NormKind::Lq_Lp;
};

InhomogeneousEstimateReport verify_inhomogeneous_estimate(const FracHeatOperator& op, double q,
                                                          double p, double r, double b,
                                                          const std::vector<double>& T_list,
                                                          const InhomogeneousOptions& opt = {});

struct StrichartzReport {
  double max_ratio = 0.0;
  int trials = 0;
};

// ||G(F)||_{L^qt L^pt} <= C ||F||_{L^q L^p} under
// (1/q - 1/qt) + beta* (1/p - 1/pt)/(2 alpha) = 1.
StrichartzReport verify_strichartz(const FracHeatOperator& op, double q, double p, double qt,
                                   double pt, int trials, unsigned long long seed,
                                   double T = 8.0);

struct ExpIntegrabilityReport {
  double c_abs = 0.0;        // smallest C with ball-avg exp((G/C)^{q'}) <= 10
  double c_normalized = 0.0; // c_abs / ||F||
  bool degenerate = false;   // F == 0
};

ExpIntegrabilityReport verify_exponential_integrability(const FracHeatOperator& op,
                                                        const SourceFn& F, double p, double q,
                                                        double t0, const Point& x0,
                                                        int n_tau = 32);

struct HolderReport {
  double spatial_fit = 0.0;
  double temporal_fit = 0.0;
  double claimed_spatial = 0.0;
  double claimed_temporal = 0.0;
  bool degenerate = false;
};

HolderReport estimate_holder_exponents(const FracHeatOperator& op, const SourceFn& F, double p,
                                       double q);

} // namespace fracheat

#endif
