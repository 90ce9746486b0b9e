#include "fracvar/operators.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "fracvar/errors.hpp"
#include "fracvar/parallel.hpp"

namespace fracvar {

namespace {

void require_kind(const OperatorConfig& config, OperatorKind kind, const char* who) {
  if (config.kind != kind) throw std::invalid_argument(std::string(who) + ": operator kind mismatch");
}

void require_grid(const ParameterSet& ps, const GridFunction& f) {
  f.validate();
  const double tol = 1e-12 * std::max(1.0, ps.b - ps.a);
  if (std::abs(f.a - ps.a) > tol || std::abs(f.b - ps.b) > tol)
    throw std::invalid_argument("grid function interval does not match the parameter set");
}

// p int_a^x k(x,t) f(t) dt + q int_x^b k(t,x) f(t) dt at every node, with f
// replaced by its piecewise-linear interpolant.
std::vector<double> product_integral(const ParameterSet& ps, const KernelSpec& kernel,
                                     const GridFunction& f, std::span<const double> fv) {
  const std::size_t n = f.n();
  const double h = f.step();
  std::vector<double> out(n + 1, 0.0);
  const bool fwd = ps.p != 0.0, bwd = ps.q != 0.0;
  if (!fwd && !bwd) return out;

  if (kernel.is_difference()) {
    const detail::CellWeights w = detail::difference_cell_weights(kernel, h, n);
    parallel_for(n + 1, [&](std::size_t i) {
      double forward = 0.0, backward = 0.0;
      if (fwd) {
        for (std::size_t j = 0; j < i; ++j) {
          std::size_t d = i - j - 1;
          forward += w.m1[d] * fv[j] + (w.m0[d] - w.m1[d]) * fv[j + 1];
        }
      }
      if (bwd) {
        for (std::size_t j = i; j < n; ++j) {
          std::size_t d = j - i;
          backward += (w.m0[d] - w.m1[d]) * fv[j] + w.m1[d] * fv[j + 1];
        }
      }
      out[i] = ps.p * forward + ps.q * backward;
    });
    return out;
  }

  parallel_for(n + 1, [&](std::size_t i) {
    const double x = f.node(i);
    double forward = 0.0, backward = 0.0;
    if (fwd) {
      for (std::size_t j = 0; j < i; ++j) {
        Moments c = detail::local_cell_moments(kernel, x, f.node(j), f.node(j + 1), detail::Branch::Forward);
        forward += (c.m0 - c.m1) * fv[j] + c.m1 * fv[j + 1];
      }
    }
    if (bwd) {
      for (std::size_t j = i; j < n; ++j) {
        Moments c = detail::local_cell_moments(kernel, x, f.node(j), f.node(j + 1), detail::Branch::Backward);
        backward += (c.m0 - c.m1) * fv[j] + c.m1 * fv[j + 1];
      }
    }
    out[i] = ps.p * forward + ps.q * backward;
  }, 4);
  return out;
}

GridFunction apply_integral(const OperatorConfig& config, const GridFunction& f,
                            std::span<const double> fv) {
  return GridFunction(f.a, f.b, product_integral(config.pset, config.kernel, f, fv));
}

}  // namespace

OperatorConfig OperatorConfig::dual() const {
  OperatorConfig c = *this;
  c.pset = pset.dual();
  return c;
}

OperatorConfig OperatorConfig::with_kind(OperatorKind k) const {
  OperatorConfig c = *this;
  c.kind = k;
  return c;
}

void OperatorConfig::validate() const {
  pset.validate();
  if (!(order > 0.0 && order < 1.0)) throw std::invalid_argument("operator order must lie in (0, 1)");
  kernel.validate();
}

GridFunction k_op(const OperatorConfig& config, const GridFunction& f) {
  require_kind(config, OperatorKind::K, "k_op");
  config.validate();
  require_grid(config.pset, f);
  return apply_integral(config, f, f.values);
}

EndpointFlags singular_endpoints(const OperatorConfig& config) {
  const bool s = config.kernel.is_singular();
  return {s && config.pset.p != 0.0, s && config.pset.q != 0.0};
}

GridFunction a_op(const OperatorConfig& config, const GridFunction& f) {
  require_kind(config, OperatorKind::A, "a_op");
  config.validate();
  require_grid(config.pset, f);
  GridFunction g = apply_integral(config, f, f.values);
  std::vector<double> d = fd_derivative(g.values, g.step());
  const std::size_t n = f.n();
  EndpointFlags flags = singular_endpoints(config);
  if (flags.left && n >= 3) d[0] = 2.0 * d[1] - d[2];
  if (flags.right && n >= 3) d[n] = 2.0 * d[n - 1] - d[n - 2];
  return GridFunction(f.a, f.b, std::move(d));
}

GridFunction b_op(const OperatorConfig& config, const GridFunction& f) {
  require_kind(config, OperatorKind::B, "b_op");
  config.validate();
  require_grid(config.pset, f);
  std::vector<double> df = f.derivative();
  for (double v : df)
    if (!std::isfinite(v)) throw std::invalid_argument("b_op: non-finite derivative samples");
  return apply_integral(config, f, df);
}

OperatorConfig left_rl_integral(double a, double b, double alpha) {
  return {{a, b, 1.0, 0.0}, alpha, KernelSpec::rl_power(alpha), OperatorKind::K};
}

OperatorConfig right_rl_integral(double a, double b, double alpha) {
  return {{a, b, 0.0, 1.0}, alpha, KernelSpec::rl_power(alpha), OperatorKind::K};
}

OperatorConfig left_rl_derivative(double a, double b, double alpha) {
  return {{a, b, 1.0, 0.0}, alpha, KernelSpec::rl_power(1.0 - alpha), OperatorKind::A};
}

OperatorConfig left_caputo(double a, double b, double alpha) {
  return {{a, b, 1.0, 0.0}, alpha, KernelSpec::rl_power(1.0 - alpha), OperatorKind::B};
}

GridFunction right_rl_derivative(double alpha, const GridFunction& f) {
  OperatorConfig c{{f.a, f.b, 0.0, 1.0}, alpha, KernelSpec::rl_power(1.0 - alpha), OperatorKind::A};
  GridFunction g = a_op(c, f);
  for (double& v : g.values) v = -v;
  return g;
}

GridFunction right_caputo(double alpha, const GridFunction& f) {
  OperatorConfig c{{f.a, f.b, 0.0, 1.0}, alpha, KernelSpec::rl_power(1.0 - alpha), OperatorKind::B};
  GridFunction g = b_op(c, f);
  for (double& v : g.values) v = -v;
  return g;
}

double ibp_defect_k(const OperatorConfig& config, const GridFunction& f, const GridFunction& g) {
  if (!f.same_grid(g)) throw std::invalid_argument("ibp_defect_k: f and g live on different grids");
  const double h = f.step();
  GridFunction kf = k_op(config, f);
  GridFunction kg = k_op(config.dual(), g);
  std::vector<double> lhs(f.values.size()), rhs(f.values.size());
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    lhs[i] = g.values[i] * kf.values[i];
    rhs[i] = f.values[i] * kg.values[i];
  }
  return std::abs(simpson(lhs, h) - simpson(rhs, h));
}

double ibp_defect_b(const OperatorConfig& config, const GridFunction& f, const GridFunction& g) {
  if (!f.same_grid(g)) throw std::invalid_argument("ibp_defect_b: f and g live on different grids");
  const double h = f.step();
  GridFunction bf = b_op(config, f);
  std::vector<double> lhs(f.values.size());
  for (std::size_t i = 0; i < lhs.size(); ++i) lhs[i] = g.values[i] * bf.values[i];

  // G = K_{P*}^{1-alpha}[g]. The boundary term minus int f A_{P*}[g], with
  // A_{P*}[g] = G' averaged over each cell, telescopes to
  // sum (G_j + G_{j+1})/2 (f_{j+1} - f_j).
  GridFunction G = apply_integral(config.dual(), g, g.values);
  double rhs = 0.0;
  for (std::size_t j = 0; j < f.n(); ++j)
    rhs += 0.5 * (G.values[j] + G.values[j + 1]) * (f.values[j + 1] - f.values[j]);
  return std::abs(simpson(lhs, h) - rhs);
}

NormCheck operator_norm_check(const OperatorConfig& config, int trials, std::uint64_t seed,
                              std::size_t grid_n) {
  require_kind(config, OperatorKind::K, "operator_norm_check");
  config.validate();
  if (!config.kernel.is_difference())
    throw std::invalid_argument("operator_norm_check needs a difference kernel");
  if (trials < 1) throw std::invalid_argument("operator_norm_check needs at least one trial");
  const double len = config.pset.length();
  const double bound =
      (std::abs(config.pset.p) + std::abs(config.pset.q)) * kernel_l1_norm(config.kernel, len);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  double worst = 0.0;
  const double h = len / static_cast<double>(grid_n);
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<double> v(grid_n + 1);
    for (double& x : v) x = dist(rng);
    GridFunction f(config.pset.a, config.pset.b, v);
    // exact L1 norm of the piecewise-linear f
    double norm_f = 0.0;
    for (std::size_t j = 0; j < grid_n; ++j) {
      double f0 = v[j], f1 = v[j + 1];
      if (f0 * f1 >= 0.0) {
        norm_f += h * std::abs(f0 + f1) / 2.0;
      } else {
        double r = h * std::abs(f0) / (std::abs(f0) + std::abs(f1));
        norm_f += (r * std::abs(f0) + (h - r) * std::abs(f1)) / 2.0;
      }
    }
    if (norm_f == 0.0) continue;
    GridFunction kf = k_op(config, f);
    std::vector<double> absk(kf.values.size());
    for (std::size_t i = 0; i < absk.size(); ++i) absk[i] = std::abs(kf.values[i]);
    worst = std::max(worst, trapezoid(absk, h) / norm_f);
  }
  if (worst > bound * (1.0 + 1e-9))
    throw NumericalError("operator norm bound violated: ratio " + std::to_string(worst) + " > bound " +
                         std::to_string(bound));
  return {worst, bound};
}

GridFunction solve_volterra_first_kind(const KernelSpec& kernel, const GridFunction& rhs) {
  kernel.validate();
  rhs.validate();
  if (!kernel.is_difference() || kernel.is_singular())
    throw std::invalid_argument("volterra solver needs a regular difference kernel");
  const double h0 = eval_kernel(kernel, 0.0, 0.0);
  if (h0 == 0.0) throw std::invalid_argument("volterra solver needs h(0) != 0");
  double scale = 0.0;
  for (double v : rhs.values) scale = std::max(scale, std::abs(v));
  if (std::abs(rhs.values[0]) > 1e-8 * std::max(1.0, scale))
    throw std::invalid_argument("volterra right-hand side must vanish at the left endpoint");

  const std::size_t n = rhs.n();
  const double dt = rhs.step();
  const std::vector<double> dr = rhs.derivative();
  // h'(s) = -d/dt k(s, 0) for k(x, t) = h(x - t)
  std::vector<double> dh(n + 1);
  for (std::size_t d = 0; d <= n; ++d) dh[d] = -eval_kernel_dt(kernel, static_cast<double>(d) * dt, 0.0);

  std::vector<double> y(n + 1, 0.0);
  y[0] = dr[0] / h0;
  const double diag = h0 + 0.5 * dt * dh[0];
  if (diag == 0.0) throw NumericalError("volterra marching matrix is singular");
  for (std::size_t i = 1; i <= n; ++i) {
    double acc = 0.5 * dh[i] * y[0];
    for (std::size_t j = 1; j < i; ++j) acc += dh[i - j] * y[j];
    y[i] = (dr[i] - dt * acc) / diag;
    if (!std::isfinite(y[i]))
      throw NumericalError("volterra marching produced a non-finite value at node " + std::to_string(i));
  }
  return GridFunction(rhs.a, rhs.b, std::move(y));
}

}  // namespace fracvar
