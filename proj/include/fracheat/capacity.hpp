#ifndef FRACHEAT_CAPACITY_HPP
#define FRACHEAT_CAPACITY_HPP

#include <optional>
#include <string>
#include <vector>

#include "fracheat/evolution.hpp"
#include "fracheat/frac_kernel.hpp"

namespace fracheat {

// Discretized compact K in M_+: finitely many constraint points (t_k, x_k).
// A[k][i] = w_i K(t_k, x_k, x_i); the primal asks for f >= 0 on the grid with
// A f >= 1 pointwise on the constraints.
class CapacityInstance {
public:
  CapacityInstance(const FracHeatOperator& op, double p,
                   std::vector<std::pair<double, Point>> constraints);

  const FracHeatOperator& op() const { return *op_; }
  double p() const { return p_; }
  const std::vector<std::pair<double, Point>>& constraints() const { return constraints_; }
  // weighted rows: A[k][i] = w_i K(t_k, x_k, x_i)
  const std::vector<std::vector<double>>& A() const { return A_; }
  // unweighted kernel rows: B[k][i] = K(t_k, x_k, x_i)
  const std::vector<std::vector<double>>& B() const { return B_; }

private:
  const FracHeatOperator* op_;
  double p_;
  std::vector<std::pair<double, Point>> constraints_;
  std::vector<std::vector<double>> A_, B_;
};

struct CapacityResult {
  double value = 0.0;               // C_p = ||f||_p^p at the optimum
  std::vector<double> minimizer;    // primal f on the grid
  std::vector<double> dual_masses;  // extremal measure atoms on the constraints
  double gap = 0.0;                 // filled by duality_check
  int iterations = 0;
  bool converged = true;
  bool heuristic = false;
};

// Projected gradient (Armijo backtracking, feasible max-step) with an
// active-constraint Newton polish. Strictly positive kernels keep the bound
// constraints inactive at the optimum.
CapacityResult capacity_primal(const CapacityInstance& inst, double tol = 1e-9);

// sup{ (sum m)^p : m >= 0, || sum_k m_k K(t_k,x_k,.) ||_{p'} <= 1 }, solved as
// min ||A* m||_{p'} over the probability simplex (projected gradient +
// support Newton polish).
CapacityResult capacity_dual(const CapacityInstance& inst, double tol = 1e-9);

struct DualityReport {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;               // (primal - dual)/max(primal, eps)
  double extremal_residual = 0.0; // sup |f_primal - (A* nu_K)^{1/(p-1)}| / sup
  double threeway_residual = 0.0; // nu_K(K) vs int (A* nu_K)^{p'} dmu vs C
  double complementarity = 0.0;   // dual mass on constraints with A f > 1+10 tol
};

DualityReport duality_check(const CapacityInstance& inst, double tol = 1e-9);

struct PropertiesReport {
  double empty_value = 0.0;
  double monotonicity_violation = 0.0; // max of C(K1) - C(K2) over nested pairs
  double subadditivity_violation = 0.0;
};

PropertiesReport capacity_properties_check(const FracHeatOperator& op, double p,
                                           const std::vector<std::pair<double, Point>>& k_small,
                                           const std::vector<std::pair<double, Point>>& k_large);

struct SphericalScanReport {
  std::vector<double> r_list;
  std::vector<double> capacities;
  double slope = 0.0;
  double min_lower_ratio = 0.0; // min over r of C / r^{beta*}
  double max_upper_ratio = 0.0; // max over r of C / r^{beta}  (t0 ~ r^{2alpha})
};

// Capacity of discretized parabolic balls B_r^(alpha)(t0, x0) with
// t0 = r^{2 alpha}; log-log slope plus the two-sided envelope ratios.
SphericalScanReport spherical_capacity_scan(const FracHeatOperator& op, double p,
                                            const std::vector<double>& r_list, const Point& x0,
                                            int n_constraint_times = 3,
                                            int n_constraint_points = 5);

struct StrongTypeReport {
  double max_ratio = 0.0; // max over samples of S / ||f||_p^p
  double max_weak_ratio = 0.0;
  int samples = 0;
};

// S = sum_j 2^{jp} C(E_{2^j}(f)) over the dyadic levels meeting the field's
// range; level sets live on a coarse space-time lattice.
StrongTypeReport strong_type_check(const FracHeatOperator& op, double p, int n_samples,
                                   unsigned long long seed, int n_lattice_times = 8,
                                   int n_lattice_points = 32);

// kappa(nu; lambda) = inf{ C_p(K) : nu(K) >= lambda }. Exact subset
// enumeration for <= max_exact_atoms atoms, greedy beyond (heuristic flag).
class KappaTable {
public:
  KappaTable(const FracHeatOperator& op, double p, const DiscreteMeasure& nu,
             int max_exact_atoms = 12);

  struct Value {
    double value = 0.0;
    bool infinite = false;
    bool heuristic = false;
  };
  Value kappa(double lambda) const;
  double total_mass() const { return total_mass_; }
  bool heuristic() const { return heuristic_; }

  // Exact integral of (lambda^{p/q}/kappa)^{q/(p-q)} dlambda/lambda over the
  // kappa step function (finite for finite atomic measures).
  double trace_integral(double q) const;

private:
  double p_;
  double total_mass_ = 0.0;
  bool heuristic_ = false;
  // steps: (mass, min capacity among subsets with that mass or more)
  std::vector<std::pair<double, double>> steps_;
};

struct TraceLowerReport {
  double sup_lambda_ratio = 0.0;  // sup lambda^{p/q} / kappa
  double sup_ball_ratio = 0.0;    // sup nu(B_r^(alpha)) / r^{q beta / p}
  double embedding_estimate = 0.0; // Monte-Carlo sup ||e^{-tL}f||_{L^q_nu}/||f||_p
  bool kappa_heuristic = false;
};

TraceLowerReport trace_lower_sector(const FracHeatOperator& op, double p, double q,
                                    const DiscreteMeasure& nu, int mc_trials = 30,
                                    unsigned long long seed = 17);

struct TraceUpperReport {
  double integral = 0.0; // I_{p,q}(nu)
  bool finite = true;
  double embedding_estimate = 0.0;
  bool kappa_heuristic = false;
};

TraceUpperReport trace_upper_sector(const FracHeatOperator& op, double p, double q,
                                    const DiscreteMeasure& nu, int mc_trials = 30,
                                    unsigned long long seed = 17);

// Monte-Carlo estimate of sup ||e^{-tL}f||_{L^q_nu} / ||f||_p over random
// nonnegative bump sums (shared by both trace sectors).
double embedding_norm_estimate(const FracHeatOperator& op, double p, double q,
                               const DiscreteMeasure& nu, int trials, unsigned long long seed);

} // namespace fracheat

#endif
