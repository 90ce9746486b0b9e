#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fracvar {

/// Interval [a, b] with the forward weight p and the backward weight q of a
/// two-branch integral operator. The evaluation point is passed separately.
struct ParameterSet {
  double a = 0.0;
  double b = 1.0;
  double p = 1.0;
  double q = 0.0;

  /// Same interval with p and q swapped.
  [[nodiscard]] ParameterSet dual() const { return {a, b, q, p}; }
  [[nodiscard]] double length() const { return b - a; }
  /// Throws std::invalid_argument unless a < b and all fields are finite.
  void validate() const;

  friend bool operator==(const ParameterSet&, const ParameterSet&) = default;
};

enum class KernelFamily {
  RLPower,         // |x-t|^(alpha-1) / Gamma(alpha)
  Exponential,     // exp(alpha (x-t))
  CoshDifference,  // cosh(beta (x-t))
  PowerCosh,       // |cosh x - cosh t|^(alpha-1)
  Katugampola,     // (rho+1)^(1-alpha)/Gamma(alpha) |x^(rho+1) - t^(rho+1)|^(alpha-1)
  Identity,        // 1
  Tabulated,       // piecewise-linear k(|x-t|) from uniform samples
};

/// A kernel k(x, t). Difference kernels depend on x - t only; the forward
/// branch of an operator evaluates k(x, t) with t < x and the backward
/// branch k(t, x) with t > x.
struct KernelSpec {
  KernelFamily family = KernelFamily::Identity;
  double alpha = 0.0;
  double beta = 0.0;
  double rho = 0.0;
  double table_step = 0.0;
  std::vector<double> table;

  static KernelSpec rl_power(double alpha);
  static KernelSpec exponential(double alpha);
  static KernelSpec cosh_difference(double beta);
  static KernelSpec power_cosh(double alpha);
  static KernelSpec katugampola(double alpha, double rho);
  static KernelSpec identity();
  static KernelSpec tabulated(double step, std::vector<double> samples);

  [[nodiscard]] bool is_difference() const;
  [[nodiscard]] bool is_singular() const;
  /// Exponent of the integrable singularity at t = x (alpha - 1); zero for
  /// regular families.
  [[nodiscard]] double singular_exponent() const;
  /// Throws std::invalid_argument on out-of-range parameters.
  void validate() const;
};

std::string_view family_tag(KernelFamily family);
/// Inverse of family_tag; throws std::invalid_argument for unknown tags.
KernelFamily family_from_tag(std::string_view tag);

/// k(x, t). Throws std::domain_error at the singular point of a singular
/// family and outside the domain of a family (negative arguments for
/// Katugampola, beyond the table for Tabulated).
double eval_kernel(const KernelSpec& spec, double x, double t);

/// Partial derivative of k(x, t) with respect to t.
double eval_kernel_dt(const KernelSpec& spec, double x, double t);

/// For singular families, k(x, t) / |x - t|^(alpha-1), evaluated in a form
/// that stays accurate as t -> x (including t == x).
double kernel_regular_part(const KernelSpec& spec, double x, double t);

struct Moments {
  double m0;  // integral of k(x, t) dt over [lo, hi]
  double m1;  // integral of k(x, t) t dt over [lo, hi]
};

/// Moments of t -> k(x, t) over [lo, hi]. Closed forms for RLPower,
/// Exponential, CoshDifference and Identity, exact Gauss pieces for
/// Tabulated; adaptive quadrature otherwise, with the endpoint singularity
/// removed by a power substitution.
Moments kernel_moments(const KernelSpec& spec, double x, double lo, double hi);

/// L1 norm of s -> k(s) over [0, length] for difference kernels.
double kernel_l1_norm(const KernelSpec& spec, double length);

namespace detail {

/// Per-offset cell weights of a difference kernel on a uniform grid of step
/// h. For offset d the cell is s in [d h, (d+1) h] and
///   m0[d] = int k(s) ds,  m1[d] = int k(s) (s/h - d) ds.
struct CellWeights {
  std::vector<double> m0;
  std::vector<double> m1;
};
CellWeights difference_cell_weights(const KernelSpec& spec, double h, std::size_t cells);

enum class Branch { Forward, Backward };

/// Local moments over a cell [lo, hi] for a general kernel:
///   c0 = int kb(t) dt, c1 = int kb(t) (t - lo)/(hi - lo) dt,
/// where kb(t) = k(x, t) (forward, x >= hi) or k(t, x) (backward, x <= lo).
Moments local_cell_moments(const KernelSpec& spec, double x, double lo, double hi, Branch branch);

}  // namespace detail

}  // namespace fracvar
