#pragma once

// JSON problem files. The schema is strict: every object lists the keys it
// accepts and anything else is rejected. See docs/problem-file.md.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "json.hpp"

#include "fracvar/grid.hpp"
#include "fracvar/kernels.hpp"
#include "fracvar/operators.hpp"
#include "fracvar/physics.hpp"
#include "fracvar/variational.hpp"

namespace fracvar::problem {

using Json = nlohmann::json;

/// Malformed or unknown content in a problem file; maps to the usage exit code.
class SchemaError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Reads and parses a JSON file. Throws SchemaError on I/O or syntax errors.
Json load(const std::filesystem::path& path);

/// Throws SchemaError naming the first key of `obj` not in `allowed`.
void expect_keys(const Json& obj, std::initializer_list<std::string_view> allowed, std::string_view where);

double number(const Json& obj, std::string_view key, std::string_view where);
double number_or(const Json& obj, std::string_view key, double fallback, std::string_view where);
std::size_t count(const Json& obj, std::string_view key, std::string_view where);

struct Interval {
  double a = 0.0;
  double b = 1.0;
  std::size_t n = 0;
};

/// `interval: [a, b]` and `grid_n` from the top level.
Interval parse_grid(const Json& doc);

/// A kernel is a family tag or {family, ...params}. Families that carry an
/// order (rl-power, exponential, power-cosh, katugampola) take it from
/// `order`; the object itself never holds alpha.
KernelSpec parse_kernel(const Json& j, std::optional<double> order, std::string_view where);

/// Function forms: a number, {polynomial: [c0, c1, ...]},
/// {power: {coef, exponent}}, {samples: [...]} or {csv: path}. Relative CSV
/// paths resolve against `base`. Analytic forms carry exact derivative
/// samples where they are bounded.
GridFunction parse_function(const Json& j, const Interval& grid, const std::filesystem::path& base,
                            std::string_view where);

/// {kind: "K"|"A"|"B", order, kernel?, p?, q?} on [a, b]. The kernel
/// defaults to rl-power; for kinds A and B it is built at the complementary
/// order 1 - order.
OperatorConfig parse_operator(const Json& j, double a, double b, std::string_view where);

/// A builtin name, {builtin: "caldirola-kanai", mass0, gamma, omega} or
/// {polynomial: [{coef, t, y, u, v, w}, ...]}.
LagrangianSpec parse_lagrangian(const Json& j, std::string_view where);

/// Top-level keys shared by the variational subcommands.
struct VariationalFile {
  Interval grid;
  VariationalProblem problem;
  std::optional<Json> y;     // candidate curve
  std::optional<Json> init;  // solver start
  std::optional<double> lambda;
  std::optional<double> tolerance;
  SolverOptions solver;
};

VariationalFile parse_variational(const Json& doc);

}  // namespace fracvar::problem
