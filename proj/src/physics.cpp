#include "fracvar/physics.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fracvar/errors.hpp"

namespace fracvar {

namespace {

using State = std::array<double, 2>;

template <class Accel>
GridFunction integrate_rk4(double y0, double v0, double t_end, std::size_t grid_n, int substeps,
                           const Accel& accel) {
  if (grid_n < 2) throw std::invalid_argument("grid needs at least 2 intervals");
  if (substeps < 1) throw std::invalid_argument("substeps must be positive");
  const double h_out = t_end / static_cast<double>(grid_n);
  const double h = h_out / substeps;
  std::vector<double> ys(grid_n + 1), vs(grid_n + 1);
  State s{y0, v0};
  ys[0] = y0;
  vs[0] = v0;
  auto rhs = [&](double t, const State& x) { return State{x[1], accel(t, x[0], x[1])}; };
  for (std::size_t i = 0; i < grid_n; ++i) {
    for (int k = 0; k < substeps; ++k) {
      double t = static_cast<double>(i) * h_out + k * h;
      State k1 = rhs(t, s);
      State k2 = rhs(t + h / 2, {s[0] + h / 2 * k1[0], s[1] + h / 2 * k1[1]});
      State k3 = rhs(t + h / 2, {s[0] + h / 2 * k2[0], s[1] + h / 2 * k2[1]});
      State k4 = rhs(t + h, {s[0] + h * k3[0], s[1] + h * k3[1]});
      for (int c = 0; c < 2; ++c) s[c] += h / 6 * (k1[c] + 2 * k2[c] + 2 * k3[c] + k4[c]);
    }
    if (!std::isfinite(s[0]) || !std::isfinite(s[1]))
      throw NumericalError("trajectory blew up at node " + std::to_string(i + 1));
    ys[i + 1] = s[0];
    vs[i + 1] = s[1];
  }
  return GridFunction(0.0, t_end, std::move(ys), std::move(vs));
}

std::vector<double> log_space(double lo, double hi, int count) {
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i)
    out[i] = std::pow(10.0, std::log10(lo) + (std::log10(hi) - std::log10(lo)) * i / (count - 1));
  return out;
}

}  // namespace

void OscillatorParams::validate() const {
  for (double x : {omega, gamma_ck, mass0, y0, v0, b, alpha, rho})
    if (!std::isfinite(x)) throw std::invalid_argument("oscillator parameters must be finite");
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
  if (!(mass0 > 0.0)) throw std::invalid_argument("mass0 must be positive");
  if (!(b > 0.0)) throw std::invalid_argument("horizon b must be positive");
  if (!(rho > -1.0)) throw std::invalid_argument("rho must exceed -1");
}

double dissipative_delta(const KernelSpec& kernel, double b, double t) {
  double k = eval_kernel(kernel, b, t);
  if (k == 0.0 || !std::isfinite(k))
    throw std::domain_error("dissipative parameter undefined: kernel is zero or singular at t = " +
                            std::to_string(t));
  return eval_kernel_dt(kernel, b, t) / k;
}

GridFunction simulate_damped_oscillator(const OscillatorParams& params,
                                        const std::function<double(double)>& potential_grad,
                                        std::size_t grid_n, int substeps) {
  params.validate();
  if (grid_n < 16) throw std::invalid_argument("damped oscillator needs grid_n >= 16");
  const double alpha = params.alpha, m = params.mass0;
  return integrate_rk4(params.y0, params.v0, params.b, grid_n, substeps,
                       [&](double, double y, double v) { return alpha * v - potential_grad(y) / m; });
}

GridFunction simulate_caldirola_kanai(const OscillatorParams& params, const KernelSpec& kernel,
                                      std::size_t grid_n, int substeps) {
  params.validate();
  kernel.validate();
  if (grid_n < 2) throw std::invalid_argument("grid needs at least 2 intervals");
  const double b = params.b;
  const double t_end = kernel.is_singular() ? b * (1.0 - 0.5 / static_cast<double>(grid_n)) : b;
  const double w2 = params.omega * params.omega, gamma = params.gamma_ck;
  return integrate_rk4(params.y0, params.v0, t_end, grid_n, substeps, [&](double t, double y, double v) {
    return -(dissipative_delta(kernel, b, t) + gamma) * v - w2 * y;
  });
}

std::vector<double> oscillator_energy(const GridFunction& trajectory, double omega) {
  if (!trajectory.derivative_values) throw std::invalid_argument("trajectory carries no velocities");
  std::vector<double> e(trajectory.values.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    double y = trajectory.values[i], v = (*trajectory.derivative_values)[i];
    e[i] = 0.5 * (v * v + omega * omega * y * y);
  }
  return e;
}

DeltaLimitReport delta_limit_report(DeltaLimitFamily family, double alpha, double b, double rho) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (!(b > 0.0)) throw std::invalid_argument("b must be positive");
  DeltaLimitReport rep;
  rep.family = family;
  rep.alpha = alpha;
  auto add = [&](std::string label, double bb, double t, double delta, double expected, bool checked, bool ok) {
    rep.rows.push_back({std::move(label), bb, t, delta, expected, checked, ok});
    if (checked && !ok) rep.passed = false;
  };

  switch (family) {
    case DeltaLimitFamily::KatugampolaRho0: {
      rep.rho = 0.0;
      KernelSpec k = KernelSpec::katugampola(alpha, 0.0);
      const double limit = (1.0 - alpha) / b;
      for (double t : log_space(1e-8 * b, 0.5 * b, 9)) {
        double d = dissipative_delta(k, b, t);
        double exact = (1.0 - alpha) / (b - t);
        add("pointwise", b, t, d, exact, true, std::abs(d - exact) <= 1e-10 * std::abs(exact));
      }
      for (double gap : {1e-1, 1e-3, 1e-6}) {
        double t = b * (1.0 - gap);
        double d = dissipative_delta(k, b, t);
        double exact = (1.0 - alpha) / (b - t);
        add("pointwise-near-horizon", b, t, d, exact, true, std::abs(d - exact) <= 1e-10 * std::abs(exact));
      }
      double t0 = 1e-8 * b;
      double d0 = dissipative_delta(k, b, t0);
      add("limit-t-to-0", b, t0, d0, limit, true, std::abs(d0 - limit) <= 1e-6);
      rep.notes.push_back("delta = (1-alpha)/(b-t) diverges as t -> b; only the t -> 0 limit is finite");
      break;
    }
    case DeltaLimitFamily::KatugampolaRhoPos: {
      if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive for this family");
      rep.rho = rho;
      KernelSpec k = KernelSpec::katugampola(alpha, rho);
      for (double t : log_space(1e-8 * b, 1e-1 * b, 8)) {
        double d = dissipative_delta(k, b, t);
        double r1 = rho + 1.0;
        double exact = (1.0 - alpha) * r1 * std::pow(t, rho) / (std::pow(b, r1) - std::pow(t, r1));
        add("profile", b, t, d, exact, false, std::abs(d - exact) <= 1e-10 * std::abs(exact));
      }
      double t4 = 1e-4;
      double d4 = dissipative_delta(k, b, t4);
      add("early-time", b, t4, d4, 0.0, true, d4 < 1e-6);
      double tl = b * (1.0 - 1e-6);
      add("near-horizon", b, tl, dissipative_delta(k, b, tl), INFINITY, false, true);
      rep.notes.push_back("delta -> 0 as t -> 0+; at finite b it diverges as t -> b-");
      break;
    }
    case DeltaLimitFamily::PowerCosh: {
      rep.rho = 0.0;
      KernelSpec k = KernelSpec::power_cosh(alpha);
      for (double bb : {b, 2.0 * b, 4.0 * b}) {
        double mid = bb / 2.0;
        double dm = dissipative_delta(k, bb, mid);
        add("t=b/2", bb, mid, dm, alpha - 1.0, false, std::abs(dm - (alpha - 1.0)) <= 5e-2);
        double far = 2.0 * bb;
        double d = dissipative_delta(k, bb, far);
        add("t=2b", bb, far, d, alpha - 1.0, true, std::abs(d - (alpha - 1.0)) <= 5e-2);
      }
      rep.notes.push_back(
          "on (0, b) delta is positive and tends to 0 at t = b/2 as b grows; the limit alpha - 1 is "
          "reached for t beyond the horizon, where |cosh b - cosh t|^(alpha-1) is used");
      break;
    }
  }
  return rep;
}

}  // namespace fracvar
