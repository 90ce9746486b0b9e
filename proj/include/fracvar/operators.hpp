#pragma once

#include <cstdint>

#include "fracvar/grid.hpp"
#include "fracvar/kernels.hpp"

namespace fracvar {

enum class OperatorKind {
  K,  // generalized fractional integral
  A,  // D o K  (generalized Riemann-Liouville derivative)
  B,  // K o D  (generalized Caputo derivative)
};

/// Configuration of a generalized operator. For kinds A and B `kernel` is
/// the kernel of the inner integral of complementary order, e.g.
/// RLPower(1 - order) for the classical derivatives.
struct OperatorConfig {
  ParameterSet pset;
  double order = 0.5;
  KernelSpec kernel;
  OperatorKind kind = OperatorKind::K;

  [[nodiscard]] OperatorConfig dual() const;
  [[nodiscard]] OperatorConfig with_kind(OperatorKind k) const;
  void validate() const;
};

/// Generalized fractional integral of f by product integration: f is
/// replaced by its piecewise-linear interpolant and integrated exactly
/// against the kernel cell moments.
GridFunction k_op(const OperatorConfig& config, const GridFunction& f);

/// D o K: k_op followed by second-order finite differences. Values at a
/// singular endpoint (see singular_endpoints) are linearly extrapolated from
/// the two nearest interior nodes.
GridFunction a_op(const OperatorConfig& config, const GridFunction& f);

/// K o D applied to the derivative samples of f (finite differences when
/// absent).
GridFunction b_op(const OperatorConfig& config, const GridFunction& f);

struct EndpointFlags {
  bool left = false;
  bool right = false;
};

/// Endpoints where a_op output is extrapolated because the derivative of the
/// inner integral is unbounded there.
EndpointFlags singular_endpoints(const OperatorConfig& config);

// Classical specializations on [a, b]. The right-sided derivatives carry the
// sign correction: _xD_b = -A with p = 0, q = 1.
OperatorConfig left_rl_integral(double a, double b, double alpha);
OperatorConfig right_rl_integral(double a, double b, double alpha);
OperatorConfig left_rl_derivative(double a, double b, double alpha);
OperatorConfig left_caputo(double a, double b, double alpha);
GridFunction right_rl_derivative(double alpha, const GridFunction& f);
GridFunction right_caputo(double alpha, const GridFunction& f);

/// |int g K_P[f] - int f K_P*[g]|, outer integrals by composite Simpson.
double ibp_defect_k(const OperatorConfig& config, const GridFunction& f, const GridFunction& g);

/// Absolute difference between the two sides of
///   int g B_P[f] = [f K_P*[g]]_a^b - int f A_P*[g].
/// The last integral pairs cell averages of A_P*[g] (differences of
/// K_P*[g] across each cell) with the trapezoid average of f, which stays
/// accurate where A_P*[g] has an integrable endpoint singularity.
double ibp_defect_b(const OperatorConfig& config, const GridFunction& f, const GridFunction& g);

struct NormCheck {
  double empirical_ratio;
  double bound;
};

/// Samples `trials` random piecewise-linear f on a grid of `grid_n` cells and
/// returns max ||K_P f||_1 / ||f||_1 together with (|p|+|q|) ||k||_1. Throws
/// fracvar::NumericalError if the ratio exceeds the bound.
NormCheck operator_norm_check(const OperatorConfig& config, int trials,
                              std::uint64_t seed = 20120227, std::size_t grid_n = 256);

/// Solves int_a^t h(t - tau) y(tau) dtau = rhs(t) for a differentiable
/// difference kernel with h(0) != 0 by differentiating once and marching the
/// resulting second-kind equation with the trapezoid rule.
GridFunction solve_volterra_first_kind(const KernelSpec& kernel, const GridFunction& rhs);

}  // namespace fracvar
