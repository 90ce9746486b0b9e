#include "fracvar/lagrangians.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fracvar {

LagrangianSpec LagrangianSpec::minus_scaled(const LagrangianSpec& other, double lambda) const {
  auto combine = [lambda](ScalarMap f, ScalarMap g) -> ScalarMap {
    return [f = std::move(f), g = std::move(g), lambda](const LagrangianPoint& x) {
      return f(x) - lambda * g(x);
    };
  };
  return {combine(value, other.value), combine(d_y, other.d_y), combine(d_u, other.d_u),
          combine(d_v, other.d_v), combine(d_w, other.d_w)};
}

namespace lagrangians {

namespace {

ScalarMap zero() {
  return [](const LagrangianPoint&) { return 0.0; };
}

double component(const LagrangianPoint& x, int k) {
  switch (k) {
    case 0: return x.t;
    case 1: return x.y;
    case 2: return x.u;
    case 3: return x.v;
    default: return x.w;
  }
}

}  // namespace

LagrangianSpec kinetic() {
  return {[](const LagrangianPoint& x) { return x.u * x.u; }, zero(),
          [](const LagrangianPoint& x) { return 2.0 * x.u; }, zero(), zero()};
}

LagrangianSpec value() {
  return {[](const LagrangianPoint& x) { return x.y; }, [](const LagrangianPoint&) { return 1.0; },
          zero(), zero(), zero()};
}

LagrangianSpec linear_w_unit_circle() {
  return {[](const LagrangianPoint& x) { return x.t * x.w + std::sqrt(1.0 - x.w * x.w); }, zero(), zero(),
          zero(), [](const LagrangianPoint& x) { return x.t - x.w / std::sqrt(1.0 - x.w * x.w); }};
}

LagrangianSpec combined_rate_arclength() {
  auto slope = [](const LagrangianPoint& x) {
    double z = x.u + x.v;
    return z / std::sqrt(1.0 + z * z);
  };
  return {[](const LagrangianPoint& x) { return std::hypot(1.0, x.u + x.v); }, zero(), slope, slope, zero()};
}

LagrangianSpec combined_rate_squared() {
  auto slope = [](const LagrangianPoint& x) { return 2.0 * (x.u + x.v); };
  return {[](const LagrangianPoint& x) { return (x.u + x.v) * (x.u + x.v); }, zero(), slope, slope, zero()};
}

LagrangianSpec caldirola_kanai(double mass0, double gamma, double omega) {
  auto mass = [mass0, gamma](double t) { return mass0 * std::exp(gamma * t); };
  return {[=](const LagrangianPoint& x) {
            return mass(x.t) * (x.u * x.u / 2.0 - omega * omega * x.y * x.y / 2.0);
          },
          [=](const LagrangianPoint& x) { return -mass(x.t) * omega * omega * x.y; },
          [=](const LagrangianPoint& x) { return mass(x.t) * x.u; }, zero(), zero()};
}

LagrangianSpec polynomial(std::vector<Monomial> terms) {
  for (const auto& m : terms) {
    if (!std::isfinite(m.coef)) throw std::invalid_argument("polynomial Lagrangian: non-finite coefficient");
    for (int p : m.powers)
      if (p < 0) throw std::invalid_argument("polynomial Lagrangian: negative exponent");
  }
  auto eval = [terms](const LagrangianPoint& x, int wrt) {
    double sum = 0.0;
    for (const auto& m : terms) {
      double term = m.coef;
      for (int k = 0; k < 5; ++k) {
        int p = m.powers[static_cast<std::size_t>(k)];
        if (k == wrt) {
          if (p == 0) {
            term = 0.0;
            break;
          }
          term *= p * std::pow(component(x, k), p - 1);
        } else if (p != 0) {
          term *= std::pow(component(x, k), p);
        }
      }
      sum += term;
    }
    return sum;
  };
  auto partial = [eval](int k) -> ScalarMap {
    return [eval, k](const LagrangianPoint& x) { return eval(x, k); };
  };
  return {partial(-1), partial(1), partial(2), partial(3), partial(4)};
}

std::vector<std::string> builtin_names() {
  return {"classical-kinetic", "value", "linear-w-plus-unit-circle", "combined-rate-arclength",
          "combined-rate-squared"};
}

LagrangianSpec by_name(std::string_view name) {
  if (name == "classical-kinetic") return kinetic();
  if (name == "value") return value();
  if (name == "linear-w-plus-unit-circle") return linear_w_unit_circle();
  if (name == "combined-rate-arclength") return combined_rate_arclength();
  if (name == "combined-rate-squared") return combined_rate_squared();
  throw std::invalid_argument("unknown Lagrangian '" + std::string(name) + "'");
}

}  // namespace lagrangians

}  // namespace fracvar
