#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "fracheat/errors.hpp"
#include "fracheat/evolution.hpp"
#include "oracles.hpp"

using namespace fracheat;

static const double kInf = std::numeric_limits<double>::infinity();

static FracHeatOperator poisson_op(double R = 20.0, double h = 0.1) {
  auto sp = MetricMeasureSpace::euclidean(1);
  return FracHeatOperator(0.5, sp, HeatKernelModel::exact_gaussian(), QuadratureGrid(sp, R, h));
}

TEST_CASE("admissible triplets") {
  // beta* = 1, alpha = 1/2: 1/4 = (1/2 - 1/4)
  auto a = is_admissible(4.0, 4.0, 2.0, 0.5, 1.0, false);
  CHECK(a.admissible);
  CHECK(a.failed_clause.empty());

  // r = p forces q = infinity
  auto b = is_admissible(kInf, 3.0, 3.0, 0.5, 1.0, false);
  CHECK(b.admissible);
  CHECK(std::isinf(b.q_from_identity));

  // beta* = 3, alpha = 1/2, r = 1.2, p = 100: range clause fails
  const double q = 1.0 / (3.0 * (1.0 / 1.2 - 1.0 / 100.0) / 1.0);
  auto c = is_admissible(q, 100.0, 1.2, 0.5, 3.0, false);
  CHECK_FALSE(c.admissible);
  CHECK(c.scaling_ok);
  CHECK_FALSE(c.range_ok);
  CHECK(c.failed_clause == "p exceeds the admissible range bound");
  // bound = beta* r/(beta*-2alpha) = 3*1.2/2 = 1.8
  auto cc = is_admissible(1.0 / (3.0 * (1.0 / 1.2 - 1.0 / 1.5)), 1.5, 1.2, 0.5, 3.0, false);
  CHECK(cc.admissible);

  // generalized bound differs: beta* r/(beta* - 2 alpha r)
  auto g = is_admissible(1.0 / (3.0 * (1.0 / 1.2 - 1.0 / 1.5)), 1.5, 1.2, 0.5, 3.0, true);
  CHECK(g.range_ok == (1.5 < 3.0 * 1.2 / (3.0 - 1.2)));
}

TEST_CASE("homogeneous solve basics") {
  auto op = poisson_op(40.0, 0.05);
  const std::size_t n = op.grid().size();
  std::vector<double> phi(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = op.grid().nodes()[j][0];
    phi[j] = std::exp(-x * x);
  }
  // smallest time at the grid's resolution limit (2h)^{2 alpha}
  const std::vector<double> times = {0.1, 0.5, 1.0};
  auto u = homogeneous_solve(op, phi, times);

  // approximate identity at the smallest time, L2 distance; the deviation is
  // O(t ||L^alpha phi||) ~ 0.08 here
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double d = u.values[0][j] - phi[j];
    num += op.grid().weights()[j] * d * d;
    den += op.grid().weights()[j] * phi[j] * phi[j];
  }
  CHECK(std::sqrt(num / den) < 0.12);

  // mass conservation for phi >= 0 (Poisson tails leak ~2/(pi R) past R)
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    m0 += op.grid().weights()[j] * phi[j];
    m1 += op.grid().weights()[j] * u.values[2][j];
  }
  CHECK(m1 == doctest::Approx(m0).epsilon(0.02));

  CHECK_THROWS_AS(homogeneous_solve(op, phi, {}), input_error);
}

TEST_CASE("duhamel: zero source and linearity") {
  auto op = poisson_op(10.0, 0.1);
  const std::size_t n = op.grid().size();
  SourceFn zero = [n](double) { return std::vector<double>(n, 0.0); };
  auto g0 = duhamel_solve(op, zero, {0.5, 1.0});
  for (const auto& s : g0.values)
    for (double v : s) CHECK(v == 0.0);

  SourceFn f1 = [&](double) {
    std::vector<double> v(n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
      v[j] = std::exp(-op.grid().nodes()[j][0] * op.grid().nodes()[j][0]);
    return v;
  };
  SourceFn f2 = [&](double t) {
    std::vector<double> v(n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
      v[j] = std::cos(t) * std::exp(-std::abs(op.grid().nodes()[j][0]));
    return v;
  };
  SourceFn fsum = [&](double t) {
    auto a = f1(t);
    auto b = f2(t);
    for (std::size_t j = 0; j < a.size(); ++j) a[j] = 2.0 * a[j] - 0.5 * b[j];
    return a;
  };
  auto ga = duhamel_solve(op, f1, {1.0});
  auto gb = duhamel_solve(op, f2, {1.0});
  auto gs = duhamel_solve(op, fsum, {1.0});
  for (std::size_t j = 0; j < n; j += 13)
    CHECK(gs.values[0][j] ==
          doctest::Approx(2.0 * ga.values[0][j] - 0.5 * gb.values[0][j]).epsilon(1e-10));

  // nonnegative source gives nonnegative G
  for (const auto& s : ga.values)
    for (double v : s) CHECK(v >= 0.0);

  CHECK_THROWS_AS(duhamel_solve(op, zero, {}), input_error);
}

TEST_CASE("duhamel against the closed-form time integral of the Poisson kernel") {
  // f(tau, x) = P_{t0}(x) time-independent; G(t, x) =
  //   (1/2pi)[log((t + t0)^2 + x^2) - log(t0^2 + x^2)]
  auto op = poisson_op(40.0, 0.05);
  const std::size_t n = op.grid().size();
  const double t0 = 0.5;
  SourceFn f = [&](double) {
    std::vector<double> v(n);
    for (std::size_t j = 0; j < n; ++j)
      v[j] = oracles::poisson_kernel(1, t0, op.grid().nodes()[j][0]);
    return v;
  };
  const std::vector<double> times = {0.3, 0.7, 1.1};
  auto g = duhamel_solve(op, f, times, 48);
  for (std::size_t i = 0; i < times.size(); ++i) {
    for (double x : {0.0, 0.8}) {
      const std::size_t j = (std::size_t)std::llround((x + 40.0) / 0.05);
      const double t = times[i];
      const double exact = (std::log((t + t0) * (t + t0) + x * x) - std::log(t0 * t0 + x * x)) /
                           (2.0 * M_PI);
      INFO("t=", t, " x=", x);
      CHECK(g.values[i][j] == doctest::Approx(exact).epsilon(2e-3));
    }
  }
}

TEST_CASE("space-time norms") {
  auto op = poisson_op(10.0, 0.1);
  const std::size_t n = op.grid().size();
  std::vector<double> slice(n);
  for (std::size_t j = 0; j < n; ++j)
    slice[j] = std::exp(-op.grid().nodes()[j][0] * op.grid().nodes()[j][0]);

  SpaceTimeField constant;
  constant.times = {0.5, 1.0, 1.5, 2.0};
  constant.values = {slice, slice, slice, slice};
  const double lp = weighted_p_norm(slice, op.grid().weights(), 3.0);
  CHECK(spacetime_norm(op, constant, {NormKind::Lq_Lp, kInf, 3.0}) == doctest::Approx(lp));

  SpaceTimeField single;
  single.times = {1.0};
  single.values = {slice};
  CHECK(spacetime_norm(op, single, {NormKind::Lq_Lp, 4.0, 2.0}) ==
        doctest::Approx(weighted_p_norm(slice, op.grid().weights(), 2.0)));

  // C_q norm of the constant field: sup t^{1/q} ||.||_p at the latest time
  CHECK(spacetime_norm(op, constant, {NormKind::Cq_Lp, 2.0, 3.0}) ==
        doctest::Approx(std::sqrt(2.0) * lp));
  CHECK(cq_limit_value(op, constant, 2.0, 3.0) == doctest::Approx(std::sqrt(0.5) * lp));

  CHECK_THROWS_AS(spacetime_norm(op, constant, {NormKind::Lq_Lp, 0.5, 2.0}), input_error);
}

TEST_CASE("Poisson field norm against a refined-time oracle") {
  auto op = poisson_op(40.0, 0.05);
  const std::size_t n = op.grid().size();
  std::vector<double> phi(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = op.grid().nodes()[j][0];
    if (std::abs(x) < 1.0) phi[j] = 1.0 - std::abs(x); // unit bump
  }
  std::vector<double> coarse, fine;
  for (int i = 0; i < 12; ++i) coarse.push_back(0.05 * std::pow(40.0, i / 11.0));
  for (int i = 0; i < 48; ++i) fine.push_back(0.05 * std::pow(40.0, i / 47.0));
  const double nc =
      spacetime_norm(op, homogeneous_solve(op, phi, coarse), {NormKind::Lq_Lp, 4.0, 4.0});
  const double nf =
      spacetime_norm(op, homogeneous_solve(op, phi, fine), {NormKind::Lq_Lp, 4.0, 4.0});
  CHECK(nc == doctest::Approx(nf).epsilon(0.01));
}

TEST_CASE("homogeneous space-time estimate: finite and trial-stable") {
  auto op = poisson_op(20.0, 0.1);
  auto r1 = verify_homogeneous_estimate(op, 4.0, 4.0, 2.0, 10, 11);
  auto r2 = verify_homogeneous_estimate(op, 4.0, 4.0, 2.0, 20, 11);
  CHECK(r1.max_ratio > 0.0);
  CHECK(std::isfinite(r2.max_ratio));
  // a superset of trials can only raise the max, and not by much
  CHECK(r2.max_ratio >= r1.max_ratio);
  CHECK(r2.max_ratio <= 1.3 * r1.max_ratio + 1e-12);
  CHECK(r1.max_ratio_cq > 0.0);
}

TEST_CASE("inhomogeneous T-power fit") {
  auto op = poisson_op(30.0, 0.1);
  // alpha = 1/2, b = 1, r = 2: expected exponent 1/2, measured in the
  // L^inf(I; L^r) norm where the power law sets in quickly
  {
    InhomogeneousOptions opt;
    auto rep = verify_inhomogeneous_estimate(op, kInf, 2.0, 2.0, 1.0, {1.0, 2.0, 4.0, 8.0}, opt);
    CHECK(rep.expected_T_exponent == doctest::Approx(0.5));
    CHECK(rep.fitted_T_exponent == doctest::Approx(0.5).epsilon(0.10));
  }
  // boundary case r = r0 = beta* b/(2 alpha): flat in T with a localized
  // source and the L^inf(I; L^r) norm
  {
    InhomogeneousOptions opt;
    opt.time_localized = true;
    opt.tau0 = 0.4;
    auto rep = verify_inhomogeneous_estimate(op, kInf, 2.0, 2.0, 2.0, {2.0, 4.0, 8.0, 16.0}, opt);
    CHECK(rep.expected_T_exponent == doctest::Approx(0.0));
    CHECK(std::abs(rep.fitted_T_exponent) <= 0.10);
  }
  CHECK_THROWS_AS(verify_inhomogeneous_estimate(op, 4.0, 4.0, 2.0, 1.0, {1.0}, {}), input_error);
}

TEST_CASE("Strichartz-type estimate") {
  auto op = poisson_op(15.0, 0.1);
  // (q,p,qt,pt) = (4/3, 1, 4, 2): (3/4 - 1/4) + (1 - 1/2) = 1
  CHECK_THROWS_AS(verify_strichartz(op, 4.0 / 3.0, 1.0, 4.0, kInf, 1, 1), input_error);
  CHECK_THROWS_AS(verify_strichartz(op, 4.0, 1.0, 4.0 / 3.0, 2.0, 1, 1), input_error);

  auto r1 = verify_strichartz(op, 4.0 / 3.0, 1.0, 4.0, 2.0, 30, 101);
  auto r2 = verify_strichartz(op, 4.0 / 3.0, 1.0, 4.0, 2.0, 30, 202);
  CHECK(r1.max_ratio > 0.0);
  CHECK(std::isfinite(r1.max_ratio));
  INFO("seed A max=", r1.max_ratio, " seed B max=", r2.max_ratio);
  CHECK(std::abs(r1.max_ratio - r2.max_ratio) <= 0.15 * std::max(r1.max_ratio, r2.max_ratio));
}

TEST_CASE("exponential integrability on the parabolic ball") {
  auto op = poisson_op(15.0, 0.1);
  const std::size_t n = op.grid().size();
  // q = 2, beta*/p = 2 alpha - 2 alpha/q = 1/2 -> p = 2
  const double q = 2.0, p = 2.0, t0 = 0.4;

  SourceFn zero = [n](double) { return std::vector<double>(n, 0.0); };
  auto rz = verify_exponential_integrability(op, zero, p, q, t0, Point(0.0));
  CHECK(rz.degenerate);

  SourceFn F = [&](double t) {
    std::vector<double> v(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double x = op.grid().nodes()[j][0];
      v[j] = std::exp(-x * x) * std::exp(-t);
    }
    return v;
  };
  auto r1 = verify_exponential_integrability(op, F, p, q, t0, Point(0.0));
  CHECK(r1.c_abs > 0.0);
  SourceFn F3 = [&](double t) {
    auto v = F(t);
    for (double& x : v) x *= 3.0;
    return v;
  };
  auto r3 = verify_exponential_integrability(op, F3, p, q, t0, Point(0.0));
  // homogeneity: C scales linearly with ||F|| (within bisection tolerance)
  CHECK(r3.c_abs == doctest::Approx(3.0 * r1.c_abs).epsilon(0.03));
  CHECK(r3.c_normalized == doctest::Approx(r1.c_normalized).epsilon(0.03));

  // grid refinement moves the constant by less than 20%
  auto opf = poisson_op(15.0, 0.05);
  SourceFn Ff = [&](double t) {
    std::vector<double> v(opf.grid().size());
    for (std::size_t j = 0; j < v.size(); ++j) {
      const double x = opf.grid().nodes()[j][0];
      v[j] = std::exp(-x * x) * std::exp(-t);
    }
    return v;
  };
  auto rf = verify_exponential_integrability(opf, Ff, p, q, t0, Point(0.0));
  CHECK(rf.c_abs == doctest::Approx(r1.c_abs).epsilon(0.20));

  CHECK_THROWS_AS(verify_exponential_integrability(op, F, 3.0, q, t0, Point(0.0)), input_error);
}

TEST_CASE("Holder continuity exponents of G(F)") {
  auto op = poisson_op(15.0, 0.05);
  const std::size_t n = op.grid().size();
  SourceFn F = [&](double t) {
    std::vector<double> v(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double x = op.grid().nodes()[j][0];
      v[j] = std::exp(-x * x) * (1.0 + 0.5 * std::sin(t));
    }
    return v;
  };
  // alpha = 1/2, q = p = 4: claimed spatial = 2 alpha (q-1)/q - beta*/p = 1/2
  auto rep = estimate_holder_exponents(op, F, 4.0, 4.0);
  CHECK_FALSE(rep.degenerate);
  CHECK(rep.claimed_spatial == doctest::Approx(0.5));
  CHECK(rep.spatial_fit >= rep.claimed_spatial - 0.1);
  CHECK(rep.temporal_fit >= rep.claimed_temporal - 0.1);

  // larger q: larger claimed spatial exponent, fit still above it
  auto rep8 = estimate_holder_exponents(op, F, 4.0, 8.0);
  CHECK(rep8.claimed_spatial > rep.claimed_spatial);
  CHECK(rep8.spatial_fit >= rep8.claimed_spatial - 0.1);

  SourceFn zero = [n](double) { return std::vector<double>(n, 0.0); };
  auto repz = estimate_holder_exponents(op, zero, 4.0, 4.0);
  CHECK(repz.degenerate);

  CHECK_THROWS_AS(estimate_holder_exponents(op, F, 2.0, 2.0), input_error);
}

TEST_CASE("Duhamel residual with the Fourier symbol oracle") {
  // compact version of the full acceptance criterion: pure inhomogeneous
  // solve, residual dt u + L^alpha u - f at interior nodes
  auto op = poisson_op(30.0, 0.05);
  const std::size_t n = op.grid().size();
  SourceFn f = [&](double t) {
    std::vector<double> v(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double x = op.grid().nodes()[j][0];
      v[j] = std::exp(-x * x) * (1.0 + 0.3 * std::cos(2.0 * t));
    }
    return v;
  };
  const double t = 0.8, dt = 4e-3;
  auto u = duhamel_solve(op, f, {t - dt, t - 0.5 * dt, t + 0.5 * dt, t + dt}, 48);
  // Richardson central differences from the four slices
  std::vector<double> dudt(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double d1 = (u.values[3][j] - u.values[0][j]) / (2.0 * dt);
    const double d2 = (u.values[2][j] - u.values[1][j]) / dt;
    dudt[j] = (4.0 * d2 - d1) / 3.0;
  }
  auto umid = duhamel_solve(op, f, {t}, 48).values[0];
  auto lu = oracles::dft_fractional_laplacian(umid, 0.05, 1.0); // symbol |xi|
  const auto fv = f(t);
  double scale = 0.0;
  for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(fv[j]));
  double worst = 0.0;
  for (std::size_t j = n / 4; j < 3 * n / 4; ++j)
    worst = std::max(worst, std::abs(dudt[j] + lu[j] - fv[j]));
  INFO("relative residual=", worst / scale);
  CHECK(worst / scale <= 1e-3);
}
