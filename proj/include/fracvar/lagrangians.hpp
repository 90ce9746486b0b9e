#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "fracvar/variational.hpp"

namespace fracvar::lagrangians {

/// F = u^2
LagrangianSpec kinetic();
/// F = y
LagrangianSpec value();
/// F = t w + sqrt(1 - w^2)
LagrangianSpec linear_w_unit_circle();
/// F = sqrt(1 + (u + v)^2)
LagrangianSpec combined_rate_arclength();
/// F = (u + v)^2
LagrangianSpec combined_rate_squared();
/// F = m0 exp(gamma t) (u^2/2 - omega^2 y^2/2)
LagrangianSpec caldirola_kanai(double mass0, double gamma, double omega);

struct Monomial {
  double coef = 0.0;
  std::array<int, 5> powers{};  // exponents of t, y, u, v, w
};

/// Sum of monomials in (t, y, u, v, w); partials are exact.
LagrangianSpec polynomial(std::vector<Monomial> terms);

/// Names accepted by by_name.
std::vector<std::string> builtin_names();

/// Looks up a parameter-free builtin; throws std::invalid_argument.
LagrangianSpec by_name(std::string_view name);

}  // namespace fracvar::lagrangians
