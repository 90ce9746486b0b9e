#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fracvar {

/// Real function sampled at the n+1 nodes t_i = a + i (b-a)/n of a uniform
/// grid, optionally with derivative samples.
struct GridFunction {
  double a = 0.0;
  double b = 1.0;
  std::vector<double> values;
  std::optional<std::vector<double>> derivative_values;

  GridFunction() = default;
  GridFunction(double a_, double b_, std::vector<double> v,
               std::optional<std::vector<double>> dv = std::nullopt);

  static GridFunction sample(double a, double b, std::size_t n,
                             const std::function<double(double)>& f);
  static GridFunction sample(double a, double b, std::size_t n,
                             const std::function<double(double)>& f,
                             const std::function<double(double)>& df);
  static GridFunction zeros(double a, double b, std::size_t n);

  [[nodiscard]] std::size_t n() const { return values.size() - 1; }
  [[nodiscard]] double step() const { return (b - a) / static_cast<double>(n()); }
  [[nodiscard]] double node(std::size_t i) const;
  [[nodiscard]] bool same_grid(const GridFunction& other) const;

  /// Derivative samples if present, else second-order finite differences.
  [[nodiscard]] std::vector<double> derivative() const;

  /// Throws std::invalid_argument on n < 2, a >= b, or a derivative array of
  /// the wrong length.
  void validate() const;
};

/// Second-order finite-difference derivative: centred in the interior,
/// one-sided three-point at both ends.
std::vector<double> fd_derivative(std::span<const double> v, double h);

double trapezoid(std::span<const double> v, double h);

/// Composite Simpson rule; odd interval counts close with a 3/8 panel.
double simpson(std::span<const double> v, double h);

/// Writes `t,value[,dvalue]` with 17 significant digits.
void write_csv(std::ostream& os, const GridFunction& f);
/// Reads the format produced by write_csv. Throws std::invalid_argument on
/// malformed input or non-uniform nodes.
GridFunction read_csv(std::istream& is);

/// Locale-independent shortest-round-trip-safe formatting (17 significant digits).
std::string format_double(double x);

}  // namespace fracvar
