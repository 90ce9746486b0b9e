#include "fracvar/grid.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>

namespace fracvar {

GridFunction::GridFunction(double a_, double b_, std::vector<double> v,
                           std::optional<std::vector<double>> dv)
    : a(a_), b(b_), values(std::move(v)), derivative_values(std::move(dv)) {
  validate();
}

GridFunction GridFunction::sample(double a, double b, std::size_t n,
                                  const std::function<double(double)>& f) {
  if (n < 2) throw std::invalid_argument("grid needs at least 2 intervals");
  std::vector<double> v(n + 1);
  const double h = (b - a) / static_cast<double>(n);
  for (std::size_t i = 0; i <= n; ++i) v[i] = f(i == n ? b : a + static_cast<double>(i) * h);
  return GridFunction(a, b, std::move(v));
}

GridFunction GridFunction::sample(double a, double b, std::size_t n,
                                  const std::function<double(double)>& f,
                                  const std::function<double(double)>& df) {
  GridFunction g = sample(a, b, n, f);
  std::vector<double> d(n + 1);
  for (std::size_t i = 0; i <= n; ++i) d[i] = df(g.node(i));
  g.derivative_values = std::move(d);
  return g;
}

GridFunction GridFunction::zeros(double a, double b, std::size_t n) {
  if (n < 2) throw std::invalid_argument("grid needs at least 2 intervals");
  return GridFunction(a, b, std::vector<double>(n + 1, 0.0));
}

double GridFunction::node(std::size_t i) const {
  if (i == n()) return b;
  return a + static_cast<double>(i) * step();
}

bool GridFunction::same_grid(const GridFunction& other) const {
  return a == other.a && b == other.b && values.size() == other.values.size();
}

std::vector<double> GridFunction::derivative() const {
  if (derivative_values) return *derivative_values;
  return fd_derivative(values, step());
}

void GridFunction::validate() const {
  if (!std::isfinite(a) || !std::isfinite(b) || !(a < b))
    throw std::invalid_argument("grid function needs finite a < b");
  if (values.size() < 3) throw std::invalid_argument("grid function needs n >= 2 intervals");
  if (derivative_values && derivative_values->size() != values.size())
    throw std::invalid_argument("derivative samples do not match the grid");
}

std::vector<double> fd_derivative(std::span<const double> v, double h) {
  const std::size_t m = v.size();
  if (m < 3) throw std::invalid_argument("fd_derivative needs at least 3 samples");
  std::vector<double> d(m);
  // written as differences so that constant data gives exact zeros
  d[0] = (4.0 * (v[1] - v[0]) - (v[2] - v[0])) / (2.0 * h);
  for (std::size_t i = 1; i + 1 < m; ++i) d[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
  d[m - 1] = (4.0 * (v[m - 1] - v[m - 2]) - (v[m - 1] - v[m - 3])) / (2.0 * h);
  return d;
}

double trapezoid(std::span<const double> v, double h) {
  if (v.size() < 2) return 0.0;
  double s = 0.5 * (v.front() + v.back());
  for (std::size_t i = 1; i + 1 < v.size(); ++i) s += v[i];
  return s * h;
}

double simpson(std::span<const double> v, double h) {
  const std::size_t n = v.size() - 1;
  if (v.size() < 2) return 0.0;
  if (n == 1) return trapezoid(v, h);
  std::size_t even_end = (n % 2 == 0) ? n : n - 3;
  double s = 0.0;
  if (even_end >= 2) {
    double acc = v[0] + v[even_end];
    for (std::size_t i = 1; i < even_end; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * v[i];
    s = acc * h / 3.0;
  }
  if (n % 2 == 1) {
    std::size_t j = even_end;
    s += 3.0 * h / 8.0 * (v[j] + 3.0 * v[j + 1] + 3.0 * v[j + 2] + v[j + 3]);
  }
  return s;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& os, const GridFunction& f) {
  const bool with_d = f.derivative_values.has_value();
  os << (with_d ? "t,value,dvalue\n" : "t,value\n");
  for (std::size_t i = 0; i <= f.n(); ++i) {
    os << format_double(f.node(i)) << ',' << format_double(f.values[i]);
    if (with_d) os << ',' << format_double((*f.derivative_values)[i]);
    os << '\n';
  }
}

namespace {

double parse_number(const std::string& field, std::size_t line) {
  double x = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && (last[-1] == ' ' || last[-1] == '\r')) --last;
  auto res = std::from_chars(first, last, x);
  if (res.ec != std::errc() || res.ptr != last)
    throw std::invalid_argument("csv line " + std::to_string(line) + ": bad number '" + field + "'");
  return x;
}

}  // namespace

GridFunction read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  bool with_d;
  if (line == "t,value")
    with_d = false;
  else if (line == "t,value,dvalue")
    with_d = true;
  else
    throw std::invalid_argument("csv: expected header 't,value[,dvalue]', got '" + line + "'");

  std::vector<double> t, v, d;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != (with_d ? 3u : 2u))
      throw std::invalid_argument("csv line " + std::to_string(lineno) + ": wrong column count");
    t.push_back(parse_number(fields[0], lineno));
    v.push_back(parse_number(fields[1], lineno));
    if (with_d) d.push_back(parse_number(fields[2], lineno));
  }
  if (t.size() < 3) throw std::invalid_argument("csv: need at least 3 rows");
  const double a = t.front(), b = t.back();
  const double h = (b - a) / static_cast<double>(t.size() - 1);
  for (std::size_t i = 0; i < t.size(); ++i) {
    double expect = a + static_cast<double>(i) * h;
    if (std::abs(t[i] - expect) > 1e-9 * std::max(1.0, std::abs(b - a)))
      throw std::invalid_argument("csv: nodes are not uniformly spaced (row " + std::to_string(i + 2) + ")");
  }
  std::optional<std::vector<double>> dv;
  if (with_d) dv = std::move(d);
  return GridFunction(a, b, std::move(v), std::move(dv));
}

}  // namespace fracvar
