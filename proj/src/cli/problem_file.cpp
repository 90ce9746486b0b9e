#include "fracvar/problem_file.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fracvar/lagrangians.hpp"

namespace fracvar::problem {

namespace {

std::string at(std::string_view where, std::string_view key) {
  return where.empty() ? std::string(key) : std::string(where) + "." + std::string(key);
}

const Json& field(const Json& obj, std::string_view key, std::string_view where) {
  auto it = obj.find(std::string(key));
  if (it == obj.end()) throw SchemaError("missing field '" + at(where, key) + "'");
  return *it;
}

void require_object(const Json& j, std::string_view where) {
  if (!j.is_object()) throw SchemaError("'" + std::string(where) + "' must be an object");
}

double as_number(const Json& j, std::string_view where) {
  if (!j.is_number()) throw SchemaError("'" + std::string(where) + "' must be a number");
  double x = j.get<double>();
  if (!std::isfinite(x)) throw SchemaError("'" + std::string(where) + "' must be finite");
  return x;
}

std::vector<double> number_array(const Json& j, std::string_view where) {
  if (!j.is_array()) throw SchemaError("'" + std::string(where) + "' must be an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], std::string(where) + "[" + std::to_string(i) + "]"));
  return out;
}

bool needs_order(KernelFamily f) {
  return f == KernelFamily::RLPower || f == KernelFamily::Exponential || f == KernelFamily::PowerCosh ||
         f == KernelFamily::Katugampola;
}

}  // namespace

Json load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open problem file '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SchemaError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void expect_keys(const Json& obj, std::initializer_list<std::string_view> allowed, std::string_view where) {
  require_object(obj, where.empty() ? "document" : where);
  for (const auto& [key, _] : obj.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw SchemaError("unknown field '" + at(where, key) + "'");
}

double number(const Json& obj, std::string_view key, std::string_view where) {
  return as_number(field(obj, key, where), at(where, key));
}

double number_or(const Json& obj, std::string_view key, double fallback, std::string_view where) {
  return obj.contains(std::string(key)) ? number(obj, key, where) : fallback;
}

std::size_t count(const Json& obj, std::string_view key, std::string_view where) {
  const Json& j = field(obj, key, where);
  if (!j.is_number_integer() || j.get<long long>() < 1)
    throw SchemaError("'" + at(where, key) + "' must be a positive integer");
  return static_cast<std::size_t>(j.get<long long>());
}

Interval parse_grid(const Json& doc) {
  const Json& iv = field(doc, "interval", "");
  auto ab = number_array(iv, "interval");
  if (ab.size() != 2 || !(ab[0] < ab[1])) throw SchemaError("'interval' must be [a, b] with a < b");
  Interval g{ab[0], ab[1], count(doc, "grid_n", "")};
  if (g.n < 2) throw SchemaError("'grid_n' must be at least 2");
  return g;
}

KernelSpec parse_kernel(const Json& j, std::optional<double> order, std::string_view where) {
  std::string tag;
  Json params = Json::object();
  if (j.is_string()) {
    tag = j.get<std::string>();
  } else {
    require_object(j, where);
    const Json& fam = field(j, "family", where);
    if (!fam.is_string()) throw SchemaError("'" + at(where, "family") + "' must be a string");
    tag = fam.get<std::string>();
    params = j;
  }
  KernelFamily family;
  try {
    family = family_from_tag(tag);
  } catch (const std::invalid_argument&) {
    throw SchemaError("unknown kernel family '" + tag + "' in '" + std::string(where) + "'");
  }
  if (needs_order(family) && !order)
    throw SchemaError("kernel '" + tag + "' in '" + std::string(where) + "' needs an order (alpha)");

  KernelSpec k;
  switch (family) {
    case KernelFamily::RLPower:
      expect_keys(params, {"family"}, where);
      k = KernelSpec::rl_power(*order);
      break;
    case KernelFamily::Exponential:
      expect_keys(params, {"family"}, where);
      k = KernelSpec::exponential(*order);
      break;
    case KernelFamily::PowerCosh:
      expect_keys(params, {"family"}, where);
      k = KernelSpec::power_cosh(*order);
      break;
    case KernelFamily::Katugampola:
      expect_keys(params, {"family", "rho"}, where);
      k = KernelSpec::katugampola(*order, number_or(params, "rho", 0.0, where));
      break;
    case KernelFamily::CoshDifference:
      if (!j.is_object()) throw SchemaError("kernel 'cosh-difference' in '" + std::string(where) + "' needs beta");
      expect_keys(params, {"family", "beta"}, where);
      k = KernelSpec::cosh_difference(number(params, "beta", where));
      break;
    case KernelFamily::Identity:
      expect_keys(params, {"family"}, where);
      k = KernelSpec::identity();
      break;
    case KernelFamily::Tabulated:
      if (!j.is_object()) throw SchemaError("kernel 'tabulated' in '" + std::string(where) + "' needs step and samples");
      expect_keys(params, {"family", "step", "samples"}, where);
      k = KernelSpec::tabulated(number(params, "step", where),
                                number_array(field(params, "samples", where), at(where, "samples")));
      break;
  }
  try {
    k.validate();
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string(where) + ": " + e.what());
  }
  return k;
}

GridFunction parse_function(const Json& j, const Interval& grid, const std::filesystem::path& base,
                            std::string_view where) {
  if (j.is_number()) {
    double c = as_number(j, where);
    return GridFunction::sample(grid.a, grid.b, grid.n, [c](double) { return c; }, [](double) { return 0.0; });
  }
  require_object(j, where);
  if (j.size() != 1) throw SchemaError("'" + std::string(where) + "' must have exactly one form key");
  const auto& [form, body] = *j.items().begin();
  const std::string sub = at(where, form);

  if (form == "polynomial") {
    auto c = number_array(body, sub);
    if (c.empty()) throw SchemaError("'" + sub + "' must not be empty");
    auto f = [c](double t) {
      double s = 0.0;
      for (std::size_t k = c.size(); k-- > 0;) s = s * t + c[k];
      return s;
    };
    auto df = [c](double t) {
      double s = 0.0;
      for (std::size_t k = c.size(); k-- > 1;) s = s * t + static_cast<double>(k) * c[k];
      return s;
    };
    return GridFunction::sample(grid.a, grid.b, grid.n, f, df);
  }
  if (form == "power") {
    expect_keys(body, {"coef", "exponent"}, sub);
    double c = number_or(body, "coef", 1.0, sub);
    double mu = number(body, "exponent", sub);
    if (grid.a < 0.0 && mu != std::floor(mu)) throw SchemaError("'" + sub + "' needs t >= 0 for a fractional exponent");
    auto f = [c, mu](double t) { return mu == 0.0 ? c : c * std::pow(t, mu); };
    if (mu == 0.0 || mu >= 1.0 || grid.a > 0.0) {
      auto df = [c, mu](double t) { return mu == 0.0 ? 0.0 : c * mu * std::pow(t, mu - 1.0); };
      return GridFunction::sample(grid.a, grid.b, grid.n, f, df);
    }
    return GridFunction::sample(grid.a, grid.b, grid.n, f);
  }
  if (form == "samples") {
    auto v = number_array(body, sub);
    if (v.size() != grid.n + 1)
      throw SchemaError("'" + sub + "' has " + std::to_string(v.size()) + " values, grid needs " +
                        std::to_string(grid.n + 1));
    return GridFunction(grid.a, grid.b, std::move(v));
  }
  if (form == "csv") {
    if (!body.is_string()) throw SchemaError("'" + sub + "' must be a path");
    std::filesystem::path p = body.get<std::string>();
    if (p.is_relative()) p = base / p;
    std::ifstream in(p);
    if (!in) throw SchemaError("cannot open '" + p.string() + "'");
    GridFunction g;
    try {
      g = read_csv(in);
    } catch (const std::invalid_argument& e) {
      throw SchemaError(p.string() + ": " + e.what());
    }
    GridFunction ref = GridFunction::zeros(grid.a, grid.b, grid.n);
    if (!g.same_grid(ref)) throw SchemaError("'" + p.string() + "' is not sampled on the problem grid");
    return g;
  }
  throw SchemaError("unknown function form '" + sub + "'");
}

OperatorConfig parse_operator(const Json& j, double a, double b, std::string_view where) {
  expect_keys(j, {"kind", "order", "kernel", "p", "q"}, where);
  const Json& kind = field(j, "kind", where);
  OperatorConfig c;
  if (kind == "K") c.kind = OperatorKind::K;
  else if (kind == "A") c.kind = OperatorKind::A;
  else if (kind == "B") c.kind = OperatorKind::B;
  else throw SchemaError("'" + at(where, "kind") + "' must be \"K\", \"A\" or \"B\"");
  c.order = number(j, "order", where);
  double kernel_order = c.kind == OperatorKind::K ? c.order : 1.0 - c.order;
  c.kernel = parse_kernel(j.contains("kernel") ? j.at("kernel") : Json("rl-power"), kernel_order, at(where, "kernel"));
  c.pset = {a, b, number_or(j, "p", 1.0, where), number_or(j, "q", 0.0, where)};
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string(where) + ": " + e.what());
  }
  return c;
}

LagrangianSpec parse_lagrangian(const Json& j, std::string_view where) {
  if (j.is_string()) {
    try {
      return lagrangians::by_name(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw SchemaError(std::string(where) + ": " + e.what());
    }
  }
  require_object(j, where);
  if (j.contains("builtin")) {
    const Json& name = j.at("builtin");
    if (name != "caldirola-kanai") {
      expect_keys(j, {"builtin"}, where);
      return parse_lagrangian(name, where);
    }
    expect_keys(j, {"builtin", "mass0", "gamma", "omega"}, where);
    return lagrangians::caldirola_kanai(number_or(j, "mass0", 1.0, where), number(j, "gamma", where),
                                        number(j, "omega", where));
  }
  expect_keys(j, {"polynomial"}, where);
  const Json& terms = j.at("polynomial");
  const std::string sub = at(where, "polynomial");
  if (!terms.is_array() || terms.empty()) throw SchemaError("'" + sub + "' must be a non-empty array");
  std::vector<lagrangians::Monomial> out;
  static constexpr std::array<const char*, 5> vars{"t", "y", "u", "v", "w"};
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string w = sub + "[" + std::to_string(i) + "]";
    expect_keys(terms[i], {"coef", "t", "y", "u", "v", "w"}, w);
    lagrangians::Monomial m;
    m.coef = number(terms[i], "coef", w);
    for (std::size_t k = 0; k < vars.size(); ++k) {
      if (!terms[i].contains(vars[k])) continue;
      const Json& e = terms[i].at(vars[k]);
      if (!e.is_number_integer() || e.get<int>() < 0)
        throw SchemaError("'" + at(w, vars[k]) + "' must be a non-negative integer");
      m.powers[k] = e.get<int>();
    }
    out.push_back(m);
  }
  return lagrangians::polynomial(std::move(out));
}

VariationalFile parse_variational(const Json& doc) {
  expect_keys(doc, {"interval", "grid_n", "outer", "opB", "opK", "lagrangian", "bc", "constraint", "y", "init",
                    "lambda", "tolerance", "solver"},
              "");
  VariationalFile f;
  f.grid = parse_grid(doc);
  VariationalProblem& p = f.problem;
  p.a = f.grid.a;
  p.b = f.grid.b;

  if (doc.contains("outer")) {
    const Json& o = doc.at("outer");
    expect_keys(o, {"alpha", "kernel"}, "outer");
    std::optional<double> alpha;
    if (o.contains("alpha")) alpha = number(o, "alpha", "outer");
    p.outer = parse_kernel(o.contains("kernel") ? o.at("kernel") : Json("rl-power"), alpha, "outer.kernel");
  }
  auto op = [&](const char* key, const char* order_key, OperatorKind kind) -> std::optional<OperatorConfig> {
    if (!doc.contains(key)) return std::nullopt;
    const Json& o = doc.at(key);
    expect_keys(o, {order_key, "kernel", "p", "q"}, key);
    Json cfg = o;
    cfg.erase(order_key);
    cfg["order"] = number(o, order_key, key);
    cfg["kind"] = kind == OperatorKind::B ? "B" : "K";
    return parse_operator(cfg, p.a, p.b, key);
  };
  p.op_b = op("opB", "beta", OperatorKind::B);
  p.op_k = op("opK", "gamma", OperatorKind::K);

  p.lagrangian = parse_lagrangian(field(doc, "lagrangian", ""), "lagrangian");

  const Json& bc = field(doc, "bc", "");
  expect_keys(bc, {"left", "right"}, "bc");
  const Json& left = field(bc, "left", "bc");
  if (left == "free") p.left = BoundaryCondition::free_end();
  else p.left = BoundaryCondition::fixed(as_number(left, "bc.left"));
  const Json& right = field(bc, "right", "bc");
  if (right == "free") throw SchemaError("'bc.right' cannot be free; only the left end supports a natural condition");
  p.right = BoundaryCondition::fixed(as_number(right, "bc.right"));

  if (doc.contains("constraint")) {
    const Json& c = doc.at("constraint");
    expect_keys(c, {"g", "xi"}, "constraint");
    p.constraint = IsoperimetricConstraint{parse_lagrangian(field(c, "g", "constraint"), "constraint.g"),
                                           number(c, "xi", "constraint")};
  }
  if (doc.contains("y")) f.y = doc.at("y");
  if (doc.contains("init")) f.init = doc.at("init");
  if (doc.contains("lambda")) f.lambda = number(doc, "lambda", "");
  if (doc.contains("tolerance")) f.tolerance = number(doc, "tolerance", "");
  if (doc.contains("solver")) {
    const Json& s = doc.at("solver");
    expect_keys(s, {"tol", "max_iters", "penalty_init", "penalty_growth"}, "solver");
    f.solver.tol = number_or(s, "tol", f.solver.tol, "solver");
    if (s.contains("max_iters")) f.solver.max_iters = static_cast<int>(count(s, "max_iters", "solver"));
    f.solver.penalty_init = number_or(s, "penalty_init", f.solver.penalty_init, "solver");
    f.solver.penalty_growth = number_or(s, "penalty_growth", f.solver.penalty_growth, "solver");
  }
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw SchemaError(e.what());
  }
  return f;
}

}  // namespace fracvar::problem
