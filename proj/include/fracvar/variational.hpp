#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "fracvar/grid.hpp"
#include "fracvar/operators.hpp"

namespace fracvar {

/// Argument bundle (t, y, y', B[y], K[y]) of a Lagrangian.
struct LagrangianPoint {
  double t = 0.0;
  double y = 0.0;
  double u = 0.0;
  double v = 0.0;
  double w = 0.0;
};

using ScalarMap = std::function<double(const LagrangianPoint&)>;

/// F(t, y, u, v, w) with its partial derivatives in y, u, v and w.
struct LagrangianSpec {
  ScalarMap value;
  ScalarMap d_y;
  ScalarMap d_u;
  ScalarMap d_v;
  ScalarMap d_w;

  /// H = this - lambda * other, partials included.
  [[nodiscard]] LagrangianSpec minus_scaled(const LagrangianSpec& other, double lambda) const;
};

/// Closed box of sample points used by validate_lagrangian.
struct SampleBox {
  std::array<double, 5> lo{0.0, -1.0, -1.0, -1.0, -1.0};
  std::array<double, 5> hi{1.0, 1.0, 1.0, 1.0, 1.0};
};

/// Compares every supplied partial with a central difference of F at random
/// points of `box`; throws std::invalid_argument naming the first mismatch.
void validate_lagrangian(const LagrangianSpec& spec, const SampleBox& box,
                         std::uint64_t seed = 7, int samples = 32, double rtol = 1e-6);

struct BoundaryCondition {
  bool free = false;
  double value = 0.0;

  static BoundaryCondition fixed(double v) { return {false, v}; }
  static BoundaryCondition free_end() { return {true, 0.0}; }
};

struct IsoperimetricConstraint {
  LagrangianSpec g;
  double xi = 0.0;
};

/// J(y) = int_a^b k(b, t) F(t, y, y', B[y], K[y]) dt, with optional
/// operators (absent means the Lagrangian does not depend on v or w and 0 is
/// passed), fixed right end, fixed or free left end, and an optional
/// isoperimetric constraint.
struct VariationalProblem {
  double a = 0.0;
  double b = 1.0;
  KernelSpec outer = KernelSpec::identity();
  std::optional<OperatorConfig> op_b;
  std::optional<OperatorConfig> op_k;
  LagrangianSpec lagrangian;
  BoundaryCondition left = BoundaryCondition::fixed(0.0);
  BoundaryCondition right = BoundaryCondition::fixed(0.0);
  std::optional<IsoperimetricConstraint> constraint;

  void validate() const;
};

struct ResidualReport {
  GridFunction grid;        // pointwise residual; zero outside the band
  double sup_norm = 0.0;    // over nodes [band_lo, band_hi]
  double l2_norm = 0.0;     // trapezoid over the band
  std::size_t band_lo = 1;
  std::size_t band_hi = 0;
  std::optional<double> nbc_residual;
};

/// Number of nodes at each end excluded from residual norms when the outer
/// weight is singular at t = b.
inline constexpr std::size_t kSingularBand = 5;

double evaluate_functional(const VariationalProblem& problem, const GridFunction& y);

/// Pointwise Euler-Lagrange residual
///   k dF/dy - d/dt(k dF/du) - A_{P2*}[k dF/dv] + K_{P3*}[k dF/dw]
/// with k = k(b, t). For a free left end the natural boundary residual is
/// filled in as well.
ResidualReport el_residual(const VariationalProblem& problem, const GridFunction& y);

/// |dF/du(a) k(b, a) + K_{P2*}^{1-beta}[k dF/dv](a)|; requires a free left end.
double natural_bc_residual(const VariationalProblem& problem, const GridFunction& y);

double constraint_value(const VariationalProblem& problem, const GridFunction& y);

/// el_residual of H = F - lambda G.
ResidualReport isoperimetric_el_residual(const VariationalProblem& problem, const GridFunction& y,
                                         double lambda);

/// lambda minimising the band L2 norm of the residual of F - lambda G.
/// Throws fracvar::NumericalError when the G residual vanishes (y is an
/// extremal of the constraint functional).
double estimate_multiplier(const VariationalProblem& problem, const GridFunction& y);

struct SolverOptions {
  double tol = 1e-8;
  int max_iters = 5000;
  double penalty_init = 10.0;
  double penalty_growth = 4.0;
};

struct SolveResult {
  GridFunction y;
  bool converged = false;
  int iterations = 0;
  double objective = 0.0;
  double multiplier = 0.0;
  double constraint_violation = 0.0;
  double gradient_norm = 0.0;
  std::vector<double> objective_history;
};

/// Direct method: minimises the cell-wise (P1 Ritz) discretization of J over
/// the free nodal values with limited-memory quasi-Newton directions and an
/// Armijo backtracking line search. Constraints go through an augmented
/// Lagrangian. Never throws on non-convergence; check `converged`.
SolveResult solve_direct(const VariationalProblem& problem, const GridFunction& init,
                         const SolverOptions& options = {});

/// Discrete objective minimised by solve_direct (exposed for tests).
double ritz_functional(const VariationalProblem& problem, const LagrangianSpec& lagrangian,
                       const GridFunction& y);

}  // namespace fracvar
