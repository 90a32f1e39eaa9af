#ifndef FRACHEAT_FRAC_KERNEL_HPP
#define FRACHEAT_FRAC_KERNEL_HPP

#include <map>
#include <memory>
#include <vector>

#include "fracheat/measure.hpp"
#include "fracheat/space.hpp"
#include "fracheat/subordinator.hpp"
#include "fracheat/util.hpp"

namespace fracheat {

// Values over times x grid nodes.
struct SpaceTimeField {
  std::vector<double> times;
  std::vector<std::vector<double>> values; // values[i] is the slice at times[i]

  const std::vector<double>& slice(std::size_t i) const { return values[i]; }
  void check_shape(std::size_t n_nodes) const;
};

// K^L_{alpha,t}(x,y) = int_0^infty eta^alpha_t(s) p_s(x,y) ds, together with
// the semigroup action on grid functions, the adjoint action on discrete
// measures, and the fractional/time derivatives of the kernel.
class FracHeatOperator {
public:
  FracHeatOperator(double alpha, MetricMeasureSpace space, HeatKernelModel model,
                   QuadratureGrid grid, PanelSpec s_quad = {});

  double alpha() const { return alpha_; }
  const MetricMeasureSpace& space() const { return space_; }
  const HeatKernelModel& model() const { return model_; }
  const QuadratureGrid& grid() const { return grid_; }
  const SubordinatorDensity& subordinator() const { return eta_; }
  const PanelSpec& s_quad() const { return squad_; }

  // Kernel evaluation by s-quadrature (both heat models are radial).
  double kernel(double t, const Point& x, const Point& y) const;
  double kernel_radial(double t, double d) const;

  // (e^{-t L^alpha} f)(x_i) = sum_j w_j K(t, x_i, x_j) f_j.
  std::vector<double> semigroup_apply(double t, const std::vector<double>& f) const;

  // ((e^{-t L^alpha})^* nu)(x_i) = sum_k m_k K(t_k, y_k, x_i).
  std::vector<double> adjoint_apply(const DiscreteMeasure& nu) const;

  // d/dt K(t,x,y) by central differences with two-level Richardson
  // extrapolation, h = t * 1e-3. err_estimate (optional) receives the
  // difference between extrapolation levels.
  double time_derivative_kernel(double t, const Point& x, const Point& y,
                                double* err_estimate = nullptr) const;
  double time_derivative_radial(double t, double d, double* err_estimate = nullptr) const;

  // L^{theta/2} K(t,.,.) via sigma = theta/(2 alpha):
  //   L^{alpha sigma} K_t = Gamma(-sigma)^{-1} int_0^inf [K_{t+s} - K_t]
  //                         s^{-1-sigma} ds,  sigma in (0,1);
  // sigma == 1 reduces to -d/dt K exactly.
  double frac_derivative_kernel(double theta, double t, const Point& x, const Point& y) const;
  double frac_derivative_radial(double theta, double t, double d) const;

  // Deduplicated kernel row against all grid nodes for one source point
  // (radial-profile interpolation above `radial_table_threshold` distances).
  std::vector<double> kernel_row(double t, const Point& x) const;

  std::size_t radial_table_threshold = 256;

private:
  std::vector<double> line_profile(double t) const;

  double alpha_;
  MetricMeasureSpace space_;
  HeatKernelModel model_;
  QuadratureGrid grid_;
  SubordinatorDensity eta_;
  PanelSpec squad_;
  // Memo of radial kernel tables per time; evaluations are pure, the cache is
  // a performance detail (single-threaded use).
  mutable std::map<double, Pchip> line_table_cache_;
};

} // namespace fracheat

#endif
