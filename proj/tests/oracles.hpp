// Independent reference computations used by the test suites. Everything in
// this header is deliberately written against closed forms or brute force,
// not against the library's own evaluation paths.
#ifndef FRACHEAT_TEST_ORACLES_HPP
#define FRACHEAT_TEST_ORACLES_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracles {

// Poisson kernel on R^n: the kernel of e^{-t sqrt(-Laplace)}.
// c_n = Gamma((n+1)/2) / pi^{(n+1)/2}.
inline double poisson_kernel(int n, double t, double d) {
  const double c = std::tgamma(0.5 * (n + 1)) / std::pow(M_PI, 0.5 * (n + 1));
  return c * t * std::pow(t * t + d * d, -0.5 * (n + 1));
}

// d/dt of the 1-D Poisson kernel.
inline double poisson_kernel_dt(double t, double d) {
  const double q = t * t + d * d;
  return (d * d - t * t) / (M_PI * q * q);
}

// Closed form of the alpha = 1/2 subordinator density at t = 1.
inline double stable_half_density(double u) {
  return 0.5 / std::sqrt(M_PI) * std::pow(u, -1.5) * std::exp(-0.25 / u);
}

// Trapezoid quadrature of f over [a,b] with n points (refined-grid oracle).
inline double trapezoid(const std::function<double(double)>& f, double a, double b, int n) {
  double s = 0.5 * (f(a) + f(b));
  const double h = (b - a) / (n - 1);
  for (int i = 1; i + 1 < n; ++i) s += f(a + i * h);
  return s * h;
}

// Fractional Laplacian symbol applied on a uniform periodic grid by direct
// DFT; L^theta f with symbol |xi|^theta. Values are real.
std::vector<double> dft_fractional_laplacian(const std::vector<double>& f, double h,
                                             double theta);

// Numeric inverse Fourier transform for the 1-D kernel with symbol
// |xi|^theta exp(-t |xi|^{2 alpha}):  (1/pi) int_0^inf cos(xi d) ... dxi.
double fourier_kernel_1d(double alpha, double theta, double t, double d);

inline std::vector<double> dft_fractional_laplacian(const std::vector<double>& f, double h,
                                                    double theta) {
  // O(N^2) DFT is fine at test sizes.
  const int n = (int)f.size();
  std::vector<std::complex<double>> F(n);
  for (int k = 0; k < n; ++k) {
    std::complex<double> acc = 0.0;
    for (int j = 0; j < n; ++j)
      acc += f[j] * std::exp(std::complex<double>(0.0, -2.0 * M_PI * j * k / n));
    F[k] = acc;
  }
  const double L = n * h;
  for (int k = 0; k < n; ++k) {
    const int kk = (k <= n / 2) ? k : k - n;
    const double xi = 2.0 * M_PI * kk / L;
    F[k] *= std::pow(std::abs(xi), theta);
  }
  std::vector<double> out(n);
  for (int j = 0; j < n; ++j) {
    std::complex<double> acc = 0.0;
    for (int k = 0; k < n; ++k)
      acc += F[k] * std::exp(std::complex<double>(0.0, 2.0 * M_PI * j * k / n));
    out[j] = acc.real() / n;
  }
  return out;
}

inline double fourier_kernel_1d(double alpha, double theta, double t, double d) {
  auto g = [&](double xi) {
    return std::cos(xi * d) * std::pow(xi, theta) * std::exp(-t * std::pow(xi, 2.0 * alpha));
  };
  auto simpson = [&](double a, double b, int n) {
    double acc = 0.0;
    const double h = (b - a) / n;
    for (int i = 0; i < n; ++i) {
      const double x0 = a + i * h;
      acc += (h / 6.0) * (g(x0) + 4.0 * g(x0 + 0.5 * h) + g(x0 + h));
    }
    return acc;
  };
  // Integrand decays like exp(-t xi^{2 alpha}); cut where the exponent
  // reaches ~46. xi^theta has a singular derivative at 0, so the panels are
  // graded dyadically into the origin.
  const double xi_max = std::pow(46.0 / t, 0.5 / alpha);
  double acc = 0.0;
  double hi = xi_max;
  for (int k = 0; k < 60; ++k) {
    const double lo = xi_max * std::pow(0.5, k + 1);
    const int n = std::max(64, (int)((hi - lo) * std::abs(d) / 2.0) + 64);
    acc += simpson(lo, hi, n);
    hi = lo;
  }
  acc += std::pow(hi, 1.0 + theta) / (1.0 + theta); // stub: cos ~ 1, exp ~ 1
  return acc / M_PI;
}

} // namespace oracles

#endif
