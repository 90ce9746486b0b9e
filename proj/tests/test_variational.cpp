#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "fracvar/errors.hpp"
#include "fracvar/lagrangians.hpp"
#include "fracvar/specfun.hpp"
#include "fracvar/variational.hpp"
#include "oracles.hpp"

using namespace fracvar;
namespace L = fracvar::lagrangians;

namespace {

VariationalProblem classical(LagrangianSpec f, double ya = 0.0, double yb = 1.0) {
  VariationalProblem p;
  p.lagrangian = std::move(f);
  p.left = BoundaryCondition::fixed(ya);
  p.right = BoundaryCondition::fixed(yb);
  return p;
}

GridFunction line(std::size_t n) {
  return GridFunction::sample(0, 1, n, [](double t) { return t; }, [](double) { return 1.0; });
}

GridFunction parabola(std::size_t n, double xi) {
  return GridFunction::sample(0, 1, n, [=](double t) { return 6 * xi * t * (1 - t); },
                              [=](double t) { return 6 * xi * (1 - 2 * t); });
}

VariationalProblem classical_iso(double xi) {
  auto p = classical(L::kinetic(), 0.0, 0.0);
  p.constraint = IsoperimetricConstraint{L::value(), xi};
  return p;
}

}  // namespace

TEST_CASE("builtin Lagrangians carry consistent partials") {
  SampleBox box;
  box.lo = {0.0, -1.0, -1.0, -1.0, -0.9};
  box.hi = {1.0, 1.0, 1.0, 1.0, 0.9};
  for (const auto& name : L::builtin_names()) {
    CAPTURE(name);
    CHECK_NOTHROW(validate_lagrangian(L::by_name(name), box));
  }
  CHECK_NOTHROW(validate_lagrangian(L::caldirola_kanai(1.3, 0.2, 2.0), box));
  CHECK_THROWS_AS(L::by_name("no-such-lagrangian"), std::invalid_argument);

  auto bad = L::kinetic();
  bad.d_u = [](const LagrangianPoint& x) { return x.u; };
  CHECK_THROWS_AS(validate_lagrangian(bad, box), std::invalid_argument);
}

TEST_CASE("polynomial Lagrangians") {
  // F = 3 t y^2 u + w^3
  auto f = L::polynomial({{3.0, {1, 2, 1, 0, 0}}, {1.0, {0, 0, 0, 0, 3}}});
  LagrangianPoint x{0.5, -2.0, 0.3, 0.7, 1.5};
  CHECK(f.value(x) == doctest::Approx(3 * 0.5 * 4 * 0.3 + 3.375));
  CHECK(f.d_y(x) == doctest::Approx(3 * 0.5 * 2 * -2.0 * 0.3));
  CHECK(f.d_u(x) == doctest::Approx(3 * 0.5 * 4));
  CHECK(f.d_v(x) == 0.0);
  CHECK(f.d_w(x) == doctest::Approx(3 * 2.25));
  CHECK_NOTHROW(validate_lagrangian(f, SampleBox{}));
}

TEST_CASE("functional values") {
  CHECK(evaluate_functional(classical(L::kinetic()), line(64)) == doctest::Approx(1.0).epsilon(1e-12));

  auto p = classical(L::polynomial({{1.0, {0, 0, 0, 0, 1}}}), 1.0, 1.0);
  p.op_k = OperatorConfig{{0, 1, 1, 0}, 0.5, KernelSpec::identity(), OperatorKind::K};
  auto one = GridFunction::sample(0, 1, 64, [](double) { return 1.0; });
  CHECK(evaluate_functional(p, one) == doctest::Approx(0.5).epsilon(1e-12));

  // arclength functional at the Mittag-Leffler extremal: sqrt(1 + c^2)/Gamma(1 + alpha)
  const double beta = 0.5, c = 0.75;
  auto y = GridFunction::sample(0, 1, 1024, [&](double t) { return oracle::ml_extremal(beta, c, t); },
                                [&](double t) { return oracle::ml_extremal_dt(beta, c, t); });
  VariationalProblem ml;
  ml.outer = KernelSpec::rl_power(0.5);
  ml.op_b = left_caputo(0, 1, beta);
  ml.lagrangian = L::combined_rate_arclength();
  ml.left = BoundaryCondition::fixed(0.0);
  ml.right = BoundaryCondition::fixed(y.values.back());
  CHECK(evaluate_functional(ml, y) == doctest::Approx(1.25 / std::tgamma(1.5)).epsilon(1e-3));

  CHECK_THROWS_AS(evaluate_functional(classical(L::kinetic(), 0.0, 2.0), line(64)), std::invalid_argument);
}

TEST_CASE("classical Euler-Lagrange residual of the line") {
  auto rep = el_residual(classical(L::kinetic()), line(128));
  CHECK(rep.sup_norm <= 1e-10);
  CHECK(rep.band_lo == 1);
  CHECK(rep.band_hi == 127);
}

TEST_CASE("classical residual converges at second order") {
  // F = u^2 + y^2 has the extremal y = sinh t / sinh 1
  auto f = L::polynomial({{1.0, {0, 0, 2, 0, 0}}, {1.0, {0, 2, 0, 0, 0}}});
  std::vector<double> hs, es;
  for (std::size_t n : {32, 64, 128, 256}) {
    auto y = GridFunction::sample(0, 1, n, [](double t) { return std::sinh(t) / std::sinh(1.0); },
                                  [](double t) { return std::cosh(t) / std::sinh(1.0); });
    hs.push_back(1.0 / n);
    es.push_back(el_residual(classical(f), y).sup_norm);
  }
  CHECK(oracle::fitted_order(hs, es) >= 1.8);
}

TEST_CASE("singular outer weight excludes a band at each end") {
  auto p = classical(L::kinetic());
  p.outer = KernelSpec::rl_power(0.5);
  auto rep = el_residual(p, line(256));
  CHECK(rep.band_lo == kSingularBand);
  CHECK(rep.band_hi == 256 - kSingularBand);
}

TEST_CASE("natural boundary residual") {
  auto p = classical(L::kinetic());
  p.left = BoundaryCondition::free_end();
  auto one = GridFunction::sample(0, 1, 64, [](double) { return 1.0; }, [](double) { return 0.0; });
  CHECK(natural_bc_residual(p, one) <= 1e-14);
  CHECK(natural_bc_residual(p, line(64)) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(el_residual(p, one).nbc_residual.has_value());
  CHECK_THROWS_AS(natural_bc_residual(classical(L::kinetic()), line(64)), std::invalid_argument);
}

TEST_CASE("natural boundary residual against a direct right-sided integral") {
  // F = v^2/2 + y v with a Caputo v under an exponential weight:
  // the condition reduces to I_{right}^{1-beta}[(v + y) k](a)
  const double beta = 0.3, rate = 0.8;
  const std::size_t n = 400;
  VariationalProblem p;
  p.outer = KernelSpec::exponential(rate);
  p.op_b = left_caputo(0, 1, beta);
  p.lagrangian = L::polynomial({{0.5, {0, 0, 0, 2, 0}}, {1.0, {0, 1, 0, 1, 0}}});
  p.left = BoundaryCondition::free_end();
  auto y = GridFunction::sample(0, 1, n, [](double t) { return 1 + t - t * t; }, [](double t) { return 1 - 2 * t; });
  p.right = BoundaryCondition::fixed(y.values.back());
  auto v = b_op(*p.op_b, y);
  std::vector<double> s(n + 1);
  for (std::size_t i = 0; i <= n; ++i) s[i] = (v.values[i] + y.values[i]) * std::exp(rate * (1 - y.node(i)));
  double ref = std::abs(oracle::rl_integral(1 - beta, s, 0, 1, false)[0]);
  CHECK(std::abs(natural_bc_residual(p, y) - ref) <= 1e-10 * std::max(1.0, ref));
}

TEST_CASE("constraint values") {
  auto p = classical_iso(0.1);
  CHECK(constraint_value(p, parabola(512, 0.1)) == doctest::Approx(0.1).epsilon(1e-5));
  auto q = classical(L::kinetic());
  q.constraint = IsoperimetricConstraint{L::kinetic(), 1.0};
  CHECK(constraint_value(q, line(64)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(constraint_value(classical(L::kinetic()), line(64)), std::invalid_argument);
}

TEST_CASE("isoperimetric residual") {
  const double xi = 0.1;
  auto p = classical_iso(xi);
  auto y = parabola(512, xi);
  // H = F - lambda G with F = u^2, G = y: 2 y'' = -lambda, so lambda = 24 xi
  CHECK(isoperimetric_el_residual(p, y, 24 * xi).sup_norm <= 1e-6);

  auto r0 = isoperimetric_el_residual(p, y, 0.0);
  auto plain = el_residual(p, y);
  CHECK(r0.grid.values == plain.grid.values);

  auto r1 = isoperimetric_el_residual(p, y, 1.0);
  auto r3 = isoperimetric_el_residual(p, y, 3.7);
  for (std::size_t i = 1; i < 512; ++i) {
    double affine = r0.grid.values[i] - 3.7 * (r0.grid.values[i] - r1.grid.values[i]);
    CHECK(std::abs(r3.grid.values[i] - affine) <= 1e-12 * std::max(1.0, std::abs(affine)));
  }
}

TEST_CASE("multiplier estimate") {
  const double xi = 0.15;
  auto p = classical_iso(xi);
  CHECK(estimate_multiplier(p, parabola(512, xi)) == doctest::Approx(24 * xi).epsilon(1e-4));

  auto q = classical(L::kinetic());
  q.constraint = IsoperimetricConstraint{L::kinetic(), 1.0};
  CHECK_THROWS_AS(estimate_multiplier(q, line(64)), NumericalError);
}

TEST_CASE("direct method on the classical problems") {
  const std::size_t n = 64;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> noise(-0.2, 0.2);
  auto p = classical(L::kinetic());
  auto init = line(n);
  init.derivative_values.reset();
  for (std::size_t i = 1; i < n; ++i) init.values[i] += noise(rng);
  auto r = solve_direct(p, init);
  CHECK(r.converged);
  for (std::size_t i = 0; i <= n; ++i) CHECK(std::abs(r.y.values[i] - r.y.node(i)) <= 1e-4);
  for (std::size_t k = 1; k < r.objective_history.size(); ++k)
    CHECK(r.objective_history[k] <= r.objective_history[k - 1] * (1 + 1e-12));

  auto free = p;
  free.left = BoundaryCondition::free_end();
  auto rf = solve_direct(free, GridFunction::sample(0, 1, n, [](double t) { return t; }));
  CHECK(rf.converged);
  for (double v : rf.y.values) CHECK(std::abs(v - 1.0) <= 1e-4);
  CHECK(natural_bc_residual(free, rf.y) <= 1e-3);

  const double xi = 0.1;
  auto ri = solve_direct(classical_iso(xi), GridFunction::zeros(0, 1, n));
  CHECK(ri.converged);
  for (std::size_t i = 0; i <= n; ++i) {
    double t = ri.y.node(i);
    CHECK(std::abs(ri.y.values[i] - 6 * xi * t * (1 - t)) <= 1e-3);
  }
  CHECK(ri.multiplier == doctest::Approx(24 * xi).epsilon(1e-3));
  CHECK(std::abs(ri.constraint_violation) <= 1e-6);
}

TEST_CASE("direct method reports an exhausted iteration budget") {
  SolverOptions opt;
  opt.max_iters = 3;
  auto r = solve_direct(classical_iso(0.1), GridFunction::zeros(0, 1, 64), opt);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations <= 3);
  CHECK_THROWS_AS(solve_direct(classical(L::kinetic()), GridFunction::zeros(0, 1, 64)), std::invalid_argument);
}

TEST_CASE("discrete minimizer residual shrinks under refinement") {
  auto f = L::polynomial({{1.0, {0, 0, 2, 0, 0}}, {1.0, {0, 2, 0, 0, 0}}});
  double prev = INFINITY;
  for (std::size_t n : {16, 32, 64}) {
    auto r = solve_direct(classical(f), GridFunction::sample(0, 1, n, [](double t) { return t; }));
    REQUIRE(r.converged);
    double s = el_residual(classical(f), r.y).sup_norm;
    CHECK(s < prev);
    prev = s;
  }
}
