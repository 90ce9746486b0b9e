#pragma once

// Reference implementations used only by the tests. They share no code with
// the library: closed forms use std::tgamma/std::lgamma, quadrature weights
// come from direct antiderivatives, loops are naive.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

inline double ml(double alpha, double beta, double z) {
  double sum = 0.0;
  for (int k = 0; k < 400; ++k) {
    double arg = alpha * k + beta;
    double mag = std::exp(k * std::log(std::abs(z) + 1e-300) - std::lgamma(arg));
    double term = (z < 0 && k % 2) ? -mag : mag;
    if (k == 0) term = 1.0 / std::tgamma(beta);
    sum += term;
    if (k > 5 && std::abs(term) < 1e-18) break;
  }
  return sum;
}

// int_0^x (x-t)^(alpha-1)/Gamma(alpha) t^mu dt
inline double rl_left_integral_power(double alpha, double mu, double x) {
  return std::tgamma(mu + 1.0) / std::tgamma(mu + 1.0 + alpha) * std::pow(x, mu + alpha);
}

// Product integration of the Riemann-Liouville integral of order alpha of the
// piecewise-linear interpolant of v on a uniform grid over [a, b].
// left: int_a^x, right: int_x^b.
inline std::vector<double> rl_integral(double alpha, const std::vector<double>& v, double a, double b,
                                       bool left) {
  const std::size_t n = v.size() - 1;
  const double h = (b - a) / static_cast<double>(n);
  const double g = std::tgamma(alpha);
  std::vector<double> out(n + 1, 0.0);
  for (std::size_t i = 0; i <= n; ++i) {
    double s = 0.0;
    if (left) {
      for (std::size_t j = 0; j < i; ++j) {
        double u_hi = static_cast<double>(i - j) * h, u_lo = static_cast<double>(i - j - 1) * h;
        double A = (std::pow(u_hi, alpha) - std::pow(u_lo, alpha)) / alpha;
        double B = u_hi * A - (std::pow(u_hi, alpha + 1) - std::pow(u_lo, alpha + 1)) / (alpha + 1);
        s += (A - B / h) * v[j] + (B / h) * v[j + 1];
      }
    } else {
      for (std::size_t j = i; j < n; ++j) {
        double u_lo = static_cast<double>(j - i) * h, u_hi = static_cast<double>(j - i + 1) * h;
        double A = (std::pow(u_hi, alpha) - std::pow(u_lo, alpha)) / alpha;
        double B = (std::pow(u_hi, alpha + 1) - std::pow(u_lo, alpha + 1)) / (alpha + 1) - u_lo * A;
        s += (A - B / h) * v[j] + (B / h) * v[j + 1];
      }
    }
    out[i] = s / g;
  }
  return out;
}

inline std::vector<double> diff(const std::vector<double>& v, double h) {
  const std::size_t n = v.size() - 1;
  std::vector<double> d(n + 1);
  d[0] = (-3 * v[0] + 4 * v[1] - v[2]) / (2 * h);
  d[n] = (3 * v[n] - 4 * v[n - 1] + v[n - 2]) / (2 * h);
  for (std::size_t i = 1; i < n; ++i) d[i] = (v[i + 1] - v[i - 1]) / (2 * h);
  return d;
}

// right RL derivative t_D_b^beta = -d/dt t_I_b^(1-beta), endpoint t = b
// extrapolated linearly
inline std::vector<double> rl_right_derivative(double beta, const std::vector<double>& v, double a, double b) {
  const std::size_t n = v.size() - 1;
  const double h = (b - a) / static_cast<double>(n);
  auto d = diff(rl_integral(1.0 - beta, v, a, b, false), h);
  d[n] = 2 * d[n - 1] - d[n - 2];
  for (double& x : d) x = -x;
  return d;
}

// left Caputo derivative from derivative samples dv
inline std::vector<double> caputo_left(double beta, const std::vector<double>& dv, double a, double b) {
  return rl_integral(1.0 - beta, dv, a, b, true);
}

inline double simpson(const std::vector<double>& v, double h) {
  const std::size_t n = v.size() - 1;
  double s = v[0] + v[n];
  for (std::size_t i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * v[i];
  return s * h / 3.0;  // n even only
}

// least-squares slope of log(err) against log(h)
inline double fitted_order(const std::vector<double>& hs, const std::vector<double>& errs) {
  double mx = 0, my = 0;
  const double m = static_cast<double>(hs.size());
  for (std::size_t i = 0; i < hs.size(); ++i) {
    mx += std::log(hs[i]) / m;
    my += std::log(errs[i]) / m;
  }
  double num = 0, den = 0;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    double dx = std::log(hs[i]) - mx;
    num += dx * (std::log(errs[i]) - my);
    den += dx * dx;
  }
  return num / den;
}

// Closed-form solution of y'' = alpha y' - omega^2 y, y(0)=y0, y'(0)=v0,
// underdamped case.
struct LinearOscillator {
  double alpha, omega, y0, v0;
  double wd() const { return std::sqrt(omega * omega - alpha * alpha / 4); }
  double y(double t) const {
    double A = y0, B = (v0 - alpha * y0 / 2) / wd();
    return std::exp(alpha * t / 2) * (A * std::cos(wd() * t) + B * std::sin(wd() * t));
  }
};

// Example curves on [0, 1].
inline double cosh_extremal(double beta, double t) {
  return std::pow(1 + t * t, -1.5) + beta * beta * (1 - std::sqrt(1 + t * t));
}
inline double cosh_extremal_dt(double beta, double t) {
  return -3 * t * std::pow(1 + t * t, -2.5) - beta * beta * t / std::sqrt(1 + t * t);
}
inline double cosh_image(double t) { return t / std::sqrt(1 + t * t); }

inline double ml_extremal(double beta, double c, double t) {
  return c * t * ml(1 - beta, 2, -std::pow(t, 1 - beta));
}
inline double ml_extremal_dt(double beta, double c, double t) {
  return c * ml(1 - beta, 1, -std::pow(t, 1 - beta));
}

}  // namespace oracle
