#include "fracvar/variational.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "fracvar/errors.hpp"
#include "fracvar/parallel.hpp"

namespace fracvar {

namespace {

constexpr double kBoundaryTol = 1e-10;

// Everything the Lagrangian sees at the nodes.
struct NodalBundle {
  std::vector<double> t, y, u, v, w;

  LagrangianPoint at(std::size_t i) const { return {t[i], y[i], u[i], v[i], w[i]}; }
};

NodalBundle make_bundle(const VariationalProblem& pb, const GridFunction& y) {
  NodalBundle nb;
  const std::size_t n = y.n();
  nb.t.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) nb.t[i] = y.node(i);
  nb.y = y.values;
  nb.u = y.derivative();
  nb.v = pb.op_b ? b_op(*pb.op_b, y).values : std::vector<double>(n + 1, 0.0);
  nb.w = pb.op_k ? k_op(*pb.op_k, y).values : std::vector<double>(n + 1, 0.0);
  return nb;
}

void require_grid(const VariationalProblem& pb, const GridFunction& y) {
  y.validate();
  const double tol = 1e-12 * std::max(1.0, pb.b - pb.a);
  if (std::abs(y.a - pb.a) > tol || std::abs(y.b - pb.b) > tol)
    throw std::invalid_argument("grid function interval does not match the problem");
}

void require_boundary(const VariationalProblem& pb, const GridFunction& y) {
  if (!pb.left.free && std::abs(y.values.front() - pb.left.value) > kBoundaryTol)
    throw std::invalid_argument("left boundary condition violated");
  if (std::abs(y.values.back() - pb.right.value) > kBoundaryTol)
    throw std::invalid_argument("right boundary condition violated");
}

// Outer weight cells: c0 = int_cell k(b,t) dt, c1 = int_cell k(b,t) theta dt.
std::vector<Moments> outer_cells(const VariationalProblem& pb, std::size_t n) {
  std::vector<Moments> cells(n);
  const double h = (pb.b - pb.a) / static_cast<double>(n);
  parallel_for(n, [&](std::size_t j) {
    double lo = pb.a + static_cast<double>(j) * h;
    double hi = j + 1 == n ? pb.b : pb.a + static_cast<double>(j + 1) * h;
    cells[j] = detail::local_cell_moments(pb.outer, pb.b, lo, hi, detail::Branch::Forward);
  }, 8);
  return cells;
}

std::vector<double> nodal_outer_weights(const std::vector<Moments>& cells) {
  std::vector<double> w(cells.size() + 1, 0.0);
  for (std::size_t j = 0; j < cells.size(); ++j) {
    w[j] += cells[j].m0 - cells[j].m1;
    w[j + 1] += cells[j].m1;
  }
  return w;
}

// k(b, t_i); at a singular t = b the last value is chosen so that the
// trapezoid mean over the final cell equals the exact cell mean.
std::vector<double> pointwise_outer(const VariationalProblem& pb, const GridFunction& y,
                                    const std::vector<Moments>& cells) {
  const std::size_t n = y.n();
  std::vector<double> k(n + 1);
  for (std::size_t i = 0; i < n; ++i) k[i] = eval_kernel(pb.outer, pb.b, y.node(i));
  if (pb.outer.is_singular())
    k[n] = 2.0 * cells[n - 1].m0 / y.step() - k[n - 1];
  else
    k[n] = eval_kernel(pb.outer, pb.b, pb.b);
  return k;
}

void check_finite(const std::vector<double>& v, const char* what) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i]))
      throw NumericalError(std::string(what) + " is not finite at node " + std::to_string(i));
}

double weighted_functional(const VariationalProblem& pb, const LagrangianSpec& f, const GridFunction& y) {
  require_grid(pb, y);
  NodalBundle nb = make_bundle(pb, y);
  std::vector<double> w = nodal_outer_weights(outer_cells(pb, y.n()));
  double sum = 0.0;
  for (std::size_t i = 0; i <= y.n(); ++i) sum += w[i] * f.value(nb.at(i));
  if (!std::isfinite(sum)) throw NumericalError("functional value is not finite");
  return sum;
}

}  // namespace

void validate_lagrangian(const LagrangianSpec& spec, const SampleBox& box, std::uint64_t seed,
                         int samples, double rtol) {
  if (!spec.value || !spec.d_y || !spec.d_u || !spec.d_v || !spec.d_w)
    throw std::invalid_argument("Lagrangian is missing a component");
  std::mt19937_64 rng(seed);
  const char* names[] = {"dF/dy", "dF/du", "dF/dv", "dF/dw"};
  const ScalarMap* partials[] = {&spec.d_y, &spec.d_u, &spec.d_v, &spec.d_w};
  for (int s = 0; s < samples; ++s) {
    std::array<double, 5> x{};
    for (std::size_t k = 0; k < 5; ++k)
      x[k] = std::uniform_real_distribution<double>(box.lo[k], box.hi[k])(rng);
    auto point = [&](const std::array<double, 5>& c) { return LagrangianPoint{c[0], c[1], c[2], c[3], c[4]}; };
    if (!std::isfinite(spec.value(point(x)))) continue;
    for (std::size_t k = 1; k < 5; ++k) {
      double step = 1e-5 * std::max(1.0, std::abs(x[k]));
      auto xp = x, xm = x;
      xp[k] += step;
      xm[k] -= step;
      double fd = (spec.value(point(xp)) - spec.value(point(xm))) / (2.0 * step);
      double exact = (*partials[k - 1])(point(x));
      if (!std::isfinite(fd)) continue;
      if (!(std::abs(exact - fd) <= rtol * std::max(1.0, std::abs(fd))))
        throw std::invalid_argument(std::string("Lagrangian partial ") + names[k - 1] +
                                    " disagrees with a central difference (" + std::to_string(exact) +
                                    " vs " + std::to_string(fd) + ")");
    }
  }
}

void VariationalProblem::validate() const {
  ParameterSet{a, b, 1.0, 0.0}.validate();
  outer.validate();
  if (!lagrangian.value || !lagrangian.d_y || !lagrangian.d_u || !lagrangian.d_v || !lagrangian.d_w)
    throw std::invalid_argument("Lagrangian is missing a component");
  auto same_interval = [&](const OperatorConfig& c) {
    return std::abs(c.pset.a - a) <= 1e-12 * std::max(1.0, b - a) &&
           std::abs(c.pset.b - b) <= 1e-12 * std::max(1.0, b - a);
  };
  if (op_b) {
    op_b->validate();
    if (op_b->kind != OperatorKind::B) throw std::invalid_argument("opB must be a B-operator");
    if (!same_interval(*op_b)) throw std::invalid_argument("opB interval differs from the problem");
  }
  if (op_k) {
    op_k->validate();
    if (op_k->kind != OperatorKind::K) throw std::invalid_argument("opK must be a K-operator");
    if (!same_interval(*op_k)) throw std::invalid_argument("opK interval differs from the problem");
  }
  if (right.free) throw std::invalid_argument("a free right endpoint is not supported");
  if (!std::isfinite(left.value) || !std::isfinite(right.value))
    throw std::invalid_argument("boundary values must be finite");
  if (constraint) {
    const auto& g = constraint->g;
    if (!g.value || !g.d_y || !g.d_u || !g.d_v || !g.d_w)
      throw std::invalid_argument("constraint Lagrangian is missing a component");
    if (!std::isfinite(constraint->xi)) throw std::invalid_argument("constraint level must be finite");
  }
}

double evaluate_functional(const VariationalProblem& problem, const GridFunction& y) {
  problem.validate();
  require_grid(problem, y);
  require_boundary(problem, y);
  return weighted_functional(problem, problem.lagrangian, y);
}

double constraint_value(const VariationalProblem& problem, const GridFunction& y) {
  problem.validate();
  if (!problem.constraint) throw std::invalid_argument("problem has no isoperimetric constraint");
  require_grid(problem, y);
  require_boundary(problem, y);
  return weighted_functional(problem, problem.constraint->g, y);
}

double natural_bc_residual(const VariationalProblem& problem, const GridFunction& y) {
  problem.validate();
  if (!problem.left.free) throw std::invalid_argument("natural boundary residual needs a free left end");
  require_grid(problem, y);
  NodalBundle nb = make_bundle(problem, y);
  std::vector<Moments> cells = outer_cells(problem, y.n());
  std::vector<double> k = pointwise_outer(problem, y, cells);
  double value = problem.lagrangian.d_u(nb.at(0)) * k[0];
  if (problem.op_b) {
    std::vector<double> kf4(y.n() + 1);
    for (std::size_t i = 0; i <= y.n(); ++i) kf4[i] = k[i] * problem.lagrangian.d_v(nb.at(i));
    check_finite(kf4, "k dF/dv");
    GridFunction g = k_op(problem.op_b->dual().with_kind(OperatorKind::K), GridFunction(y.a, y.b, kf4));
    value += g.values[0];
  }
  return std::abs(value);
}

ResidualReport el_residual(const VariationalProblem& problem, const GridFunction& y) {
  problem.validate();
  require_grid(problem, y);
  const std::size_t n = y.n();
  const double h = y.step();
  const LagrangianSpec& F = problem.lagrangian;
  NodalBundle nb = make_bundle(problem, y);
  std::vector<Moments> cells = outer_cells(problem, n);
  std::vector<double> k = pointwise_outer(problem, y, cells);

  std::vector<double> term1(n + 1), kf3(n + 1), kf4(n + 1), kf5(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    LagrangianPoint x = nb.at(i);
    term1[i] = k[i] * F.d_y(x);
    kf3[i] = k[i] * F.d_u(x);
    kf4[i] = problem.op_b ? k[i] * F.d_v(x) : 0.0;
    kf5[i] = problem.op_k ? k[i] * F.d_w(x) : 0.0;
  }
  check_finite(term1, "k dF/dy");
  check_finite(kf3, "k dF/du");
  check_finite(kf4, "k dF/dv");
  check_finite(kf5, "k dF/dw");

  std::vector<double> term2 = fd_derivative(kf3, h);
  std::vector<double> term3(n + 1, 0.0), term4(n + 1, 0.0);
  if (problem.op_b)
    term3 = a_op(problem.op_b->dual().with_kind(OperatorKind::A), GridFunction(y.a, y.b, kf4)).values;
  if (problem.op_k)
    term4 = k_op(problem.op_k->dual().with_kind(OperatorKind::K), GridFunction(y.a, y.b, kf5)).values;

  ResidualReport rep;
  const std::size_t margin = problem.outer.is_singular() ? kSingularBand : 1;
  if (n < 2 * margin + 1) throw std::invalid_argument("grid too coarse for the residual band");
  rep.band_lo = margin;
  rep.band_hi = n - margin;
  std::vector<double> r(n + 1, 0.0), sq(n + 1, 0.0);
  for (std::size_t i = rep.band_lo; i <= rep.band_hi; ++i) {
    r[i] = term1[i] - term2[i] - term3[i] + term4[i];
    sq[i] = r[i] * r[i];
    rep.sup_norm = std::max(rep.sup_norm, std::abs(r[i]));
  }
  rep.l2_norm = std::sqrt(trapezoid(std::span<const double>(sq).subspan(rep.band_lo, rep.band_hi - rep.band_lo + 1), h));
  rep.grid = GridFunction(y.a, y.b, std::move(r));
  if (problem.left.free) rep.nbc_residual = natural_bc_residual(problem, y);
  return rep;
}

ResidualReport isoperimetric_el_residual(const VariationalProblem& problem, const GridFunction& y,
                                         double lambda) {
  if (!problem.constraint) throw std::invalid_argument("problem has no isoperimetric constraint");
  VariationalProblem h = problem;
  h.lagrangian = problem.lagrangian.minus_scaled(problem.constraint->g, lambda);
  return el_residual(h, y);
}

double estimate_multiplier(const VariationalProblem& problem, const GridFunction& y) {
  if (!problem.constraint) throw std::invalid_argument("problem has no isoperimetric constraint");
  ResidualReport rf = el_residual(problem, y);
  VariationalProblem g = problem;
  g.lagrangian = problem.constraint->g;
  g.left = BoundaryCondition::fixed(y.values.front());
  ResidualReport rg = el_residual(g, y);
  std::vector<double> fg(rf.grid.values.size()), gg(rf.grid.values.size());
  for (std::size_t i = 0; i < fg.size(); ++i) {
    fg[i] = rf.grid.values[i] * rg.grid.values[i];
    gg[i] = rg.grid.values[i] * rg.grid.values[i];
  }
  const double h = y.step();
  double num = trapezoid(fg, h), den = trapezoid(gg, h);
  if (std::sqrt(den) < 1e-12)
    throw NumericalError("constraint residual vanishes: y is an extremal of the constraint functional (|R_G| = " +
                         std::to_string(std::sqrt(den)) + ")");
  return num / den;
}

double ritz_functional(const VariationalProblem& problem, const LagrangianSpec& lagrangian,
                       const GridFunction& y) {
  require_grid(problem, y);
  const std::size_t n = y.n();
  const double h = y.step();
  std::vector<Moments> cells = outer_cells(problem, n);
  std::vector<double> v(n + 1, 0.0), w(n + 1, 0.0);
  GridFunction plain(y.a, y.b, y.values);
  if (problem.op_b) v = b_op(*problem.op_b, plain).values;
  if (problem.op_k) w = k_op(*problem.op_k, plain).values;
  double sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    LagrangianPoint x{y.a + (static_cast<double>(j) + 0.5) * h, 0.5 * (y.values[j] + y.values[j + 1]),
                      (y.values[j + 1] - y.values[j]) / h, 0.5 * (v[j] + v[j + 1]), 0.5 * (w[j] + w[j + 1])};
    sum += cells[j].m0 * lagrangian.value(x);
  }
  return sum;
}

namespace {

// Discrete objective and its central-difference gradient over the free
// nodes. Without operators every node only touches its two cells, so the
// probes are evaluated locally.
class RitzObjective {
public:
  RitzObjective(const VariationalProblem& pb, std::size_t n, double a, double b)
      : pb_(pb), n_(n), a_(a), b_(b), h_((b - a) / static_cast<double>(n)),
        cells_(outer_cells(pb, n)), local_(!pb.op_b && !pb.op_k) {}

  double cell(const LagrangianSpec& f, const std::vector<double>& y, std::size_t j,
              const std::vector<double>& v, const std::vector<double>& w) const {
    LagrangianPoint x{a_ + (static_cast<double>(j) + 0.5) * h_, 0.5 * (y[j] + y[j + 1]), (y[j + 1] - y[j]) / h_,
                      v.empty() ? 0.0 : 0.5 * (v[j] + v[j + 1]), w.empty() ? 0.0 : 0.5 * (w[j] + w[j + 1])};
    return cells_[j].m0 * f.value(x);
  }

  std::pair<std::vector<double>, std::vector<double>> operator_values(const std::vector<double>& y) const {
    std::vector<double> v, w;
    GridFunction g(a_, b_, y);
    if (pb_.op_b) v = b_op(*pb_.op_b, g).values;
    if (pb_.op_k) w = k_op(*pb_.op_k, g).values;
    return {std::move(v), std::move(w)};
  }

  double total(const LagrangianSpec& f, const std::vector<double>& y) const {
    auto [v, w] = operator_values(y);
    double s = 0.0;
    for (std::size_t j = 0; j < n_; ++j) s += cell(f, y, j, v, w);
    return s;
  }

  // gradient of the functional of f with respect to y[idx[k]]
  std::vector<double> gradient(const LagrangianSpec& f, const std::vector<double>& y,
                               const std::vector<std::size_t>& idx) const {
    std::vector<double> g(idx.size());
    parallel_for(idx.size(), [&](std::size_t k) {
      std::size_t i = idx[k];
      std::vector<double> yp = y;
      double step = 1e-6 * std::max(1.0, std::abs(y[i]));
      if (local_) {
        static const std::vector<double> none;
        auto local_sum = [&](const std::vector<double>& z) {
          double s = 0.0;
          if (i > 0) s += cell(f, z, i - 1, none, none);
          if (i < n_) s += cell(f, z, i, none, none);
          return s;
        };
        yp[i] = y[i] + step;
        double fp = local_sum(yp);
        yp[i] = y[i] - step;
        double fm = local_sum(yp);
        g[k] = (fp - fm) / (2.0 * step);
      } else {
        yp[i] = y[i] + step;
        double fp = total(f, yp);
        yp[i] = y[i] - step;
        double fm = total(f, yp);
        g[k] = (fp - fm) / (2.0 * step);
      }
    }, local_ ? 64 : 1);
    return g;
  }

private:
  const VariationalProblem& pb_;
  std::size_t n_;
  double a_, b_, h_;
  std::vector<Moments> cells_;
  bool local_;
};

double dot(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double sup_norm(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s = std::max(s, std::abs(v));
  return s;
}

}  // namespace

SolveResult solve_direct(const VariationalProblem& problem, const GridFunction& init,
                         const SolverOptions& options) {
  problem.validate();
  require_grid(problem, init);
  require_boundary(problem, init);
  if (!(options.tol > 0.0) || options.max_iters < 1 || !(options.penalty_init > 0.0) ||
      !(options.penalty_growth >= 1.0))
    throw std::invalid_argument("invalid solver options");

  const std::size_t n = init.n();
  RitzObjective obj(problem, n, init.a, init.b);
  std::vector<std::size_t> idx;
  if (problem.left.free) idx.push_back(0);
  for (std::size_t i = 1; i < n; ++i) idx.push_back(i);

  std::vector<double> y = init.values;
  const bool constrained = problem.constraint.has_value();
  const LagrangianSpec& F = problem.lagrangian;
  double lambda = 0.0;
  double mu = options.penalty_init;
  const double xi = constrained ? problem.constraint->xi : 0.0;

  auto penalized = [&](const std::vector<double>& z) {
    double j = obj.total(F, z);
    if (!constrained) return j;
    double c = obj.total(problem.constraint->g, z) - xi;
    return j - lambda * c + 0.5 * mu * c * c;
  };
  auto penalized_grad = [&](const std::vector<double>& z) {
    std::vector<double> g = obj.gradient(F, z, idx);
    if (!constrained) return g;
    double c = obj.total(problem.constraint->g, z) - xi;
    std::vector<double> gi = obj.gradient(problem.constraint->g, z, idx);
    for (std::size_t k = 0; k < g.size(); ++k) g[k] += (-lambda + mu * c) * gi[k];
    return g;
  };

  SolveResult res;
  int iterations = 0;
  bool inner_converged = false;
  double grad_norm = std::numeric_limits<double>::infinity();
  double prev_violation = std::numeric_limits<double>::infinity();
  const int max_outer = constrained ? 60 : 1;

  for (int outer = 0; outer < max_outer && iterations < options.max_iters; ++outer) {
    // limited-memory BFGS with Armijo backtracking
    constexpr std::size_t kMemory = 10;
    std::deque<std::pair<std::vector<double>, std::vector<double>>> memory;
    double phi = penalized(y);
    std::vector<double> g = penalized_grad(y);
    inner_converged = false;
    // loose inner solves while the multiplier is still moving
    const double scale = constrained ? std::max(1.0, std::abs(lambda)) : 1.0;
    const double inner_tol = std::max(options.tol * scale, constrained ? 1e-3 * std::pow(0.1, outer) : 0.0);
    while (iterations < options.max_iters) {
      grad_norm = sup_norm(g);
      if (grad_norm < inner_tol) {
        inner_converged = true;
        break;
      }
      // two-loop recursion
      std::vector<double> d = g;
      std::vector<double> alphas(memory.size());
      for (std::size_t m = memory.size(); m-- > 0;) {
        const auto& [s, yv] = memory[m];
        alphas[m] = dot(s, d) / dot(yv, s);
        for (std::size_t k = 0; k < d.size(); ++k) d[k] -= alphas[m] * yv[k];
      }
      if (!memory.empty()) {
        const auto& [s, yv] = memory.back();
        double gamma = dot(s, yv) / dot(yv, yv);
        for (double& x : d) x *= gamma;
      } else {
        double scale = 1.0 / std::max(1.0, grad_norm);
        for (double& x : d) x *= scale;
      }
      for (std::size_t m = 0; m < memory.size(); ++m) {
        const auto& [s, yv] = memory[m];
        double beta = dot(yv, d) / dot(yv, s);
        for (std::size_t k = 0; k < d.size(); ++k) d[k] += s[k] * (alphas[m] - beta);
      }
      for (double& x : d) x = -x;
      double slope = dot(g, d);
      if (!(slope < 0.0)) {
        memory.clear();
        double scale = 1.0 / std::max(1.0, grad_norm);
        for (std::size_t k = 0; k < d.size(); ++k) d[k] = -g[k] * scale;
        slope = dot(g, d);
      }

      double step = 1.0;
      std::vector<double> trial = y;
      double phi_trial = phi;
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls) {
        for (std::size_t k = 0; k < idx.size(); ++k) trial[idx[k]] = y[idx[k]] + step * d[k];
        phi_trial = penalized(trial);
        if (std::isfinite(phi_trial) && phi_trial < phi && phi_trial <= phi + 1e-4 * step * slope) {
          accepted = true;
          break;
        }
        // approximate Wolfe test once phi only moves at rounding level
        if (std::isfinite(phi_trial) && std::abs(phi_trial - phi) <= 1e-13 * std::max(1.0, std::abs(phi))) {
          double d_trial = dot(penalized_grad(trial), d);
          if (d_trial >= 0.9 * slope && d_trial <= -0.8 * slope) {
            accepted = true;
            break;
          }
        }
        step *= 0.5;
      }
      ++iterations;
      if (!accepted) {
        if (memory.empty()) break;  // no further decrease is representable
        memory.clear();
        continue;
      }

      std::vector<double> g_new = penalized_grad(trial);
      std::vector<double> s(idx.size()), yv(idx.size());
      for (std::size_t k = 0; k < idx.size(); ++k) {
        s[k] = trial[idx[k]] - y[idx[k]];
        yv[k] = g_new[k] - g[k];
      }
      double sy = dot(s, yv);
      if (sy > 1e-12 * std::sqrt(dot(s, s) * dot(yv, yv))) {
        memory.emplace_back(std::move(s), std::move(yv));
        if (memory.size() > kMemory) memory.pop_front();
      }
      y = std::move(trial);
      phi = phi_trial;
      g = std::move(g_new);
      res.objective_history.push_back(phi);
    }

    if (!constrained) break;
    double violation = obj.total(problem.constraint->g, y) - xi;
    if (inner_converged && inner_tol <= options.tol * scale && std::abs(violation) < options.tol) break;
    lambda -= mu * violation;
    if (std::abs(violation) > 0.25 * prev_violation) mu *= options.penalty_growth;
    prev_violation = std::abs(violation);
  }

  res.y = GridFunction(init.a, init.b, y);
  res.iterations = iterations;
  res.gradient_norm = grad_norm;
  res.objective = obj.total(F, y);
  res.multiplier = lambda;
  if (constrained) res.constraint_violation = obj.total(problem.constraint->g, y) - xi;
  res.converged = inner_converged && (!constrained || std::abs(res.constraint_violation) < options.tol);
  return res;
}

}  // namespace fracvar
