#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "fracvar/kernels.hpp"
#include "fracvar/specfun.hpp"

using namespace fracvar;

namespace {

const double kSqrtPi = std::sqrt(std::numbers::pi);

std::vector<KernelSpec> all_families() {
  return {KernelSpec::rl_power(0.4),     KernelSpec::exponential(0.7), KernelSpec::cosh_difference(1.3),
          KernelSpec::power_cosh(0.6),   KernelSpec::katugampola(0.5, 1.5), KernelSpec::identity(),
          KernelSpec::tabulated(0.25, {1.0, 0.8, 0.7, 0.65, 0.6, 0.58, 0.55, 0.5, 0.45, 0.4, 0.38})};
}

// composite Simpson with many panels, for smooth integrands only
template <class F>
double simpson(F f, double lo, double hi, int n = 2000) {
  double h = (hi - lo) / n, s = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4 : 2) * f(lo + i * h);
  return s * h / 3;
}

}  // namespace

TEST_CASE("parameter set dual is an involution") {
  ParameterSet p{0.0, 2.0, 0.3, -1.2};
  CHECK(p.dual() == ParameterSet{0.0, 2.0, -1.2, 0.3});
  CHECK(p.dual().dual() == p);
  CHECK_THROWS_AS((ParameterSet{1.0, 1.0, 1, 0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((ParameterSet{0.0, NAN, 1, 0}).validate(), std::invalid_argument);
}

TEST_CASE("family tags round-trip") {
  for (const auto& k : all_families()) CHECK(family_from_tag(family_tag(k.family)) == k.family);
  CHECK_THROWS_AS(family_from_tag("gaussian"), std::invalid_argument);
  CHECK(family_tag(KernelFamily::RLPower) == "rl-power");
  CHECK(family_tag(KernelFamily::CoshDifference) == "cosh-difference");
}

TEST_CASE("pointwise values") {
  CHECK(eval_kernel(KernelSpec::identity(), 0.3, 0.9) == 1.0);
  CHECK(eval_kernel(KernelSpec::rl_power(0.5), 1.0, 0.0) == doctest::Approx(1 / kSqrtPi).epsilon(1e-14));
  CHECK(eval_kernel(KernelSpec::cosh_difference(1.0), 2.0, 1.0) == doctest::Approx(std::cosh(1.0)).epsilon(1e-15));
  CHECK(eval_kernel(KernelSpec::cosh_difference(2.0), 0.4, 0.4) == 1.0);
  CHECK(eval_kernel(KernelSpec::power_cosh(0.5), 2.0, 1.0) ==
        doctest::Approx(std::pow(std::cosh(2.0) - std::cosh(1.0), -0.5)).epsilon(1e-14));
  double kat = std::pow(2.5, 0.5) / std::tgamma(0.5) * std::pow(std::pow(2.0, 2.5) - 1.0, -0.5);
  CHECK(eval_kernel(KernelSpec::katugampola(0.5, 1.5), 2.0, 1.0) == doctest::Approx(kat).epsilon(1e-13));
}

TEST_CASE("singular families reject the diagonal") {
  CHECK_THROWS_AS(eval_kernel(KernelSpec::rl_power(0.5), 0.7, 0.7), std::domain_error);
  CHECK_THROWS_AS(eval_kernel(KernelSpec::power_cosh(0.5), 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(eval_kernel(KernelSpec::katugampola(0.5, 1.0), 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(eval_kernel_dt(KernelSpec::rl_power(0.5), 0.7, 0.7), std::domain_error);
  CHECK_NOTHROW(eval_kernel(KernelSpec::rl_power(0.5), 0.7, 0.7 - 1e-9));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(KernelSpec::rl_power(1.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(KernelSpec::rl_power(0.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(KernelSpec::katugampola(0.5, -1.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(KernelSpec::tabulated(0.1, {1.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(KernelSpec::tabulated(-0.1, {1.0, 2.0}).validate(), std::invalid_argument);
}

TEST_CASE("difference kernels are shift invariant") {
  for (const auto& k : all_families()) {
    if (!k.is_difference()) continue;
    for (double c : {0.1, 0.37, 1.0})
      CHECK(eval_kernel(k, 1.2 + c, 0.5 + c) == doctest::Approx(eval_kernel(k, 1.2, 0.5)).epsilon(1e-13));
  }
}

TEST_CASE("time derivatives") {
  CHECK(eval_kernel_dt(KernelSpec::identity(), 0.2, 0.9) == 0.0);
  const double a = 0.8, b = 1.0;
  for (double t : {0.0, 0.3, 0.9})
    CHECK(eval_kernel_dt(KernelSpec::exponential(a), b, t) == doctest::Approx(-a * std::exp(a * (b - t))).epsilon(1e-14));

  // central differences at nonsingular points, error O(h^2)
  for (const auto& k : all_families()) {
    for (double t : {0.31, 0.62, 1.37}) {
      const double x = 1.9;
      double e1 = 0, e2 = 0;
      for (double h : {1e-3, 5e-4}) {
        double fd = (eval_kernel(k, x, t + h) - eval_kernel(k, x, t - h)) / (2 * h);
        double err = std::abs(fd - eval_kernel_dt(k, x, t));
        (h == 1e-3 ? e1 : e2) = err;
      }
      CAPTURE(family_tag(k.family));
      CAPTURE(t);
      if (k.family == KernelFamily::Tabulated) {
        CHECK(e2 <= 1e-9);  // linear pieces, knots avoided
      } else {
        double scale = std::max(1.0, std::abs(eval_kernel_dt(k, x, t)));
        CHECK(e1 <= 1e-5 * scale);
        CHECK(e2 <= e1 / 3 + 1e-10 * scale);
      }
    }
  }
}

TEST_CASE("katugampola derivative against central differences") {
  auto k = KernelSpec::katugampola(0.3, 2.0);
  for (double t : {0.05, 0.4, 0.8}) {
    double h = 1e-6;
    double fd = (eval_kernel(k, 1.0, t + h) - eval_kernel(k, 1.0, t - h)) / (2 * h);
    CHECK(std::abs(fd - eval_kernel_dt(k, 1.0, t)) <= 1e-6 * std::abs(fd));
  }
}

TEST_CASE("moments of the worked examples") {
  auto id = kernel_moments(KernelSpec::identity(), 0.5, 0.0, 1.0);
  CHECK(id.m0 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(id.m1 == doctest::Approx(0.5).epsilon(1e-15));
  auto rl = kernel_moments(KernelSpec::rl_power(0.5), 1.0, 0.0, 1.0);
  CHECK(rl.m0 == doctest::Approx(2 / kSqrtPi).epsilon(1e-14));
  // int_0^1 (1-t)^(-1/2) t dt = B(2, 1/2) = 4/3
  CHECK(rl.m1 == doctest::Approx(4.0 / 3.0 / kSqrtPi).epsilon(1e-13));
  auto ex = kernel_moments(KernelSpec::exponential(1.0), 1.0, 0.0, 1.0);
  CHECK(ex.m0 == doctest::Approx(std::numbers::e - 1).epsilon(1e-14));
}

TEST_CASE("moments are additive over adjacent intervals") {
  for (const auto& k : {KernelSpec::rl_power(0.3), KernelSpec::exponential(-1.1), KernelSpec::identity(),
                        KernelSpec::cosh_difference(2.0)}) {
    const double x = 1.0;
    auto whole = kernel_moments(k, x, 0.0, 0.8);
    auto l = kernel_moments(k, x, 0.0, 0.35), r = kernel_moments(k, x, 0.35, 0.8);
    CHECK(std::abs(l.m0 + r.m0 - whole.m0) <= 1e-12 * std::abs(whole.m0));
    CHECK(std::abs(l.m1 + r.m1 - whole.m1) <= 1e-12 * std::abs(whole.m1));
  }
}

TEST_CASE("numeric moments match independent quadrature") {
  // regular cells of every family, including the backward side x < lo
  for (const auto& k : all_families()) {
    for (auto [x, lo, hi] : {std::array<double, 3>{2.0, 0.4, 1.1}, std::array<double, 3>{0.3, 0.9, 1.6}}) {
      if (k.family == KernelFamily::Katugampola && x < lo) continue;  // forward use only
      auto m = kernel_moments(k, x, lo, hi);
      double r0 = simpson([&](double t) { return eval_kernel(k, x, t); }, lo, hi);
      double r1 = simpson([&](double t) { return eval_kernel(k, x, t) * t; }, lo, hi);
      CAPTURE(family_tag(k.family));
      CHECK(m.m0 == doctest::Approx(r0).epsilon(1e-9));
      CHECK(m.m1 == doctest::Approx(r1).epsilon(1e-9));
    }
  }
}

TEST_CASE("singular endpoint moments") {
  // int_0^1 |cosh 1 - cosh t|^(-1/2) dt, reference by substitution t = 1 - s^2
  auto k = KernelSpec::power_cosh(0.5);
  auto m = kernel_moments(k, 1.0, 0.0, 1.0);
  double ref = simpson([](double s) {
    if (s == 0.0) return 2.0 / std::sqrt(std::sinh(1.0));
    double t = 1 - s * s;
    return 2 * s / std::sqrt(std::cosh(1.0) - std::cosh(t));
  }, 0.0, 1.0, 4000);
  CHECK(m.m0 == doctest::Approx(ref).epsilon(1e-8));

  // Katugampola with rho = 0 is the RL kernel
  auto a = kernel_moments(KernelSpec::katugampola(0.4, 0.0), 1.0, 0.2, 1.0);
  auto b = kernel_moments(KernelSpec::rl_power(0.4), 1.0, 0.2, 1.0);
  CHECK(a.m0 == doctest::Approx(b.m0).epsilon(1e-11));
  CHECK(a.m1 == doctest::Approx(b.m1).epsilon(1e-11));
}

TEST_CASE("tabulated kernel interpolates linearly") {
  auto k = KernelSpec::tabulated(0.5, {2.0, 1.0, 0.0});
  CHECK(eval_kernel(k, 0.25, 0.0) == doctest::Approx(1.5));
  CHECK(eval_kernel(k, 0.0, 0.25) == doctest::Approx(1.5));
  CHECK(eval_kernel(k, 1.0, 0.25) == doctest::Approx(0.5));
  CHECK_THROWS_AS(eval_kernel(k, 1.2, 0.0), std::domain_error);
  // k(s) = 2 - 2s on [0, 1]
  auto m = kernel_moments(k, 1.0, 0.0, 1.0);
  CHECK(m.m0 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(m.m1 == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("L1 norms") {
  CHECK(kernel_l1_norm(KernelSpec::rl_power(0.5), 1.0) == doctest::Approx(2 / kSqrtPi).epsilon(1e-14));
  CHECK(kernel_l1_norm(KernelSpec::identity(), 2.0) == doctest::Approx(2.0));
  CHECK(kernel_l1_norm(KernelSpec::cosh_difference(1.5), 1.0) == doctest::Approx(std::sinh(1.5) / 1.5).epsilon(1e-13));
  CHECK(kernel_l1_norm(KernelSpec::exponential(-2.0), 1.0) == doctest::Approx((1 - std::exp(-2.0)) / 2).epsilon(1e-13));
}

TEST_CASE("regular part stays finite on the diagonal") {
  auto k = KernelSpec::rl_power(0.3);
  CHECK(kernel_regular_part(k, 0.5, 0.5) == doctest::Approx(1 / std::tgamma(0.3)).epsilon(1e-13));
  auto pc = KernelSpec::power_cosh(0.5);
  CHECK(std::isfinite(kernel_regular_part(pc, 1.0, 1.0)));
  CHECK(kernel_regular_part(pc, 1.0, 1.0 - 1e-7) == doctest::Approx(kernel_regular_part(pc, 1.0, 1.0)).epsilon(1e-6));
}
