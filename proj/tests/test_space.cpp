#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fracheat/errors.hpp"
#include "fracheat/space.hpp"
#include "fracheat/util.hpp"
#include "oracles.hpp"

using namespace fracheat;

TEST_CASE("distances") {
  auto e2 = MetricMeasureSpace::euclidean(2);
  CHECK(e2.distance(Point(0.0, 0.0), Point(3.0, 4.0)) == doctest::Approx(5.0));

  auto h1 = MetricMeasureSpace::heisenberg_h1();
  CHECK(h1.distance(Point(0.0, 0.0, 0.0), Point(1.0, 0.0, 0.0)) == doctest::Approx(1.0));
  CHECK(h1.distance(Point(0.3, -1.0, 2.0), Point(0.3, -1.0, 2.0)) == 0.0);

  auto e1 = MetricMeasureSpace::euclidean(1);
  CHECK(e1.distance(Point(0.7), Point(0.7)) == 0.0);
  CHECK_THROWS_AS(e1.distance(Point(0.0, 1.0), Point(0.0)), input_error);

  // symmetry and triangle inequality on sampled triples
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    Point a(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
    Point b(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
    Point c(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
    CHECK(h1.distance(a, b) == doctest::Approx(h1.distance(b, a)));
    CHECK(h1.distance(a, b) >= 0.0);
    // Koranyi gauge is a true metric on H^1 (quasi-triangle with constant 1)
    CHECK(h1.distance(a, c) <= h1.distance(a, b) + h1.distance(b, c) + 1e-12);
  }
}

TEST_CASE("ball measures") {
  auto e1 = MetricMeasureSpace::euclidean(1);
  CHECK(e1.ball_measure(Point(0.3), 2.0) == doctest::Approx(4.0));
  auto e2 = MetricMeasureSpace::euclidean(2);
  CHECK(e2.ball_measure(Point(0.0, 0.0), 1.0) == doctest::Approx(M_PI));
  CHECK_THROWS_AS(e1.ball_measure(Point(0.0), 0.0), input_error);

  // weighted line, gamma = 1/2: refined-grid oracle over (-1,1)
  auto wsp = MetricMeasureSpace::weighted_euclidean(1, 0.5);
  const double oracle =
      oracles::trapezoid([](double t) { return std::sqrt(std::abs(t)); }, -1.0, 1.0, 1000001);
  CHECK(wsp.ball_measure(Point(0.0), 1.0) == doctest::Approx(oracle).epsilon(1e-6));

  // Koranyi gauge ball: c r^4 with c = pi^2/2 (derived from the exact
  // cross-section integral)
  auto h1 = MetricMeasureSpace::heisenberg_h1();
  const double c = h1.ball_measure(Point(0.0, 0.0, 0.0), 1.0);
  CHECK(c == doctest::Approx(M_PI * M_PI / 2.0).epsilon(1e-6));
  CHECK(h1.ball_measure(Point(1.0, 2.0, -0.5), 2.0) == doctest::Approx(c * 16.0));
}

TEST_CASE("density exponent estimates") {
  std::vector<double> r_range;
  for (int i = 0; i <= 24; ++i) r_range.push_back(std::pow(10.0, -1.0 + 2.5 * i / 24.0));

  auto e1 = MetricMeasureSpace::euclidean(1);
  auto est = density_exponents_estimate(e1, {Point(0.0), Point(3.0)}, r_range);
  CHECK(est.beta_star_hat == doctest::Approx(1.0).epsilon(0.05));
  CHECK(est.beta_hat == doctest::Approx(1.0).epsilon(0.05));

  auto h1 = MetricMeasureSpace::heisenberg_h1();
  auto esth = density_exponents_estimate(h1, {Point(0.0, 0.0, 0.0), Point(1.0, 0.0, 0.5)}, r_range);
  CHECK(esth.beta_star_hat == doctest::Approx(4.0).epsilon(0.025));
  CHECK(esth.beta_hat == doctest::Approx(4.0).epsilon(0.025));

  // weighted: brute-force ball measures separate the exponents
  auto wsp = MetricMeasureSpace::weighted_euclidean(1, 0.5);
  auto estw = density_exponents_estimate(wsp, {Point(0.0), Point(50.0)}, r_range);
  CHECK(estw.beta_hat > estw.beta_star_hat + 0.3);
  CHECK(estw.beta_star_hat == doctest::Approx(wsp.beta_star()).epsilon(0.1));
  CHECK(estw.beta_hat == doctest::Approx(wsp.beta()).epsilon(0.1));

  CHECK_THROWS_AS(density_exponents_estimate(e1, {Point(0.0)}, {0.5, 1.0}), input_error);
  CHECK_THROWS_AS(density_exponents_estimate(e1, {}, r_range), input_error);
}

TEST_CASE("heat kernel evaluation") {
  auto e1 = MetricMeasureSpace::euclidean(1);
  auto g = HeatKernelModel::exact_gaussian();
  CHECK(g.eval(e1, 1.0, Point(0.0), Point(0.0)) ==
        doctest::Approx(std::pow(4.0 * M_PI, -0.5)).epsilon(1e-12));
  CHECK_THROWS_AS(g.eval(e1, 0.0, Point(0.0), Point(0.0)), input_error);

  QuadratureGrid grid(e1, 10.0, 0.05);
  double mass = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j)
    mass += grid.weights()[j] * g.eval(e1, 0.7, Point(0.0), grid.nodes()[j]);
  CHECK(mass == doctest::Approx(1.0).epsilon(grid.declared_tolerance() + 1e-9));

  // symmetry to machine precision
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    Point a(rng.uniform(-3, 3)), b(rng.uniform(-3, 3));
    const double s = rng.uniform(0.1, 2.0);
    CHECK(g.eval(e1, s, a, b) == g.eval(e1, s, b, a));
  }
}

TEST_CASE("Chapman-Kolmogorov by grid convolution") {
  auto e1 = MetricMeasureSpace::euclidean(1);
  auto g = HeatKernelModel::exact_gaussian();
  QuadratureGrid grid(e1, 12.0, 0.04);
  const double s = 0.4, t = 0.6;
  for (double d : {0.0, 0.5, 1.5}) {
    const Point x(0.0), y(d);
    double conv = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j)
      conv += grid.weights()[j] * g.eval(e1, s, x, grid.nodes()[j]) *
              g.eval(e1, t, grid.nodes()[j], y);
    const double direct = g.eval(e1, s + t, x, y);
    CHECK(std::abs(conv - direct) / direct < 1e-4);
  }
}

TEST_CASE("axiom validation") {
  auto e1 = MetricMeasureSpace::euclidean(1);
  QuadratureGrid grid(e1, 10.0, 0.05);
  auto g = HeatKernelModel::exact_gaussian();

  auto rep = validate_axioms(g, e1, grid, 1e-4);
  for (const auto& ax : rep.axioms) {
    INFO(ax.name, " violation=", ax.max_violation);
    CHECK(ax.passed);
  }
  CHECK(rep.all_passed(1e-4));
  CHECK(rep.a1.sup_ratio > 0.0);
  CHECK(rep.a4.inf_ratio > 0.0);

  // model kernel on H^1: A1/A4 envelopes hold, semigroup axiom skipped
  auto h1 = MetricMeasureSpace::heisenberg_h1();
  QuadratureGrid hgrid(h1, 2.0, 0.25);
  auto model = HeatKernelModel::model_gauss_gauge(h1);
  CHECK_FALSE(model.semigroup_axiom());
  auto hrep = validate_axioms(model, h1, hgrid, 1e-3);
  CHECK(hrep.axioms[3].skipped_by_design);
  CHECK(hrep.axioms[0].passed);
  CHECK(hrep.a4.inf_ratio > 0.0);
  CHECK(hrep.a1.sup_ratio < 1e6);

  // adversarial fixture: a kernel that dips negative must be flagged
  KernelFn fake = [&](double s, const Point& x, const Point& y) {
    const double d = e1.distance(x, y);
    return std::pow(4.0 * M_PI * s, -0.5) * (std::exp(-d * d / (4.0 * s)) - 0.05);
  };
  auto frep = validate_axioms(fake, e1, grid, 1e-6, 0.25, true);
  CHECK_FALSE(frep.axioms[0].passed);
  CHECK(frep.axioms[0].max_violation > 1e-6);
}

TEST_CASE("grid refinement stability") {
  auto wsp = MetricMeasureSpace::weighted_euclidean(1, 0.5);
  QuadratureGrid coarse(wsp, 4.0, 0.05), fine(wsp, 4.0, 0.025);
  const Point c(0.0);
  const double m1 = coarse.mass_in_ball(wsp, c, 2.0);
  const double m2 = fine.mass_in_ball(wsp, c, 2.0);
  const double exact = wsp.ball_measure(c, 2.0);
  CHECK(std::abs(m1 - exact) / exact <= coarse.declared_tolerance() + 0.02);
  CHECK(std::abs(m2 - m1) / exact < coarse.declared_tolerance() + 0.02);
}

TEST_CASE("density slopes stay inside the estimated bracket") {
  std::vector<double> r_range;
  for (int i = 0; i <= 20; ++i) r_range.push_back(std::pow(10.0, -1.0 + 2.2 * i / 20.0));
  auto wsp = MetricMeasureSpace::weighted_euclidean(1, 0.5);
  std::vector<Point> pts = {Point(0.0), Point(0.5), Point(8.0), Point(40.0)};
  auto est = density_exponents_estimate(wsp, pts, r_range);
  for (const Point& x : pts) {
    for (std::size_t i = 1; i < r_range.size(); ++i) {
      const double s = (std::log(wsp.ball_measure(x, r_range[i])) -
                        std::log(wsp.ball_measure(x, r_range[i - 1]))) /
                       (std::log(r_range[i]) - std::log(r_range[i - 1]));
      CHECK(s >= est.beta_star_hat - 0.1);
      CHECK(s <= est.beta_hat + 0.1);
    }
  }
}
