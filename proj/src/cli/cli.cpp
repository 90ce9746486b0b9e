#include "fracvar/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "fracvar/errors.hpp"
#include "fracvar/operators.hpp"
#include "fracvar/parallel.hpp"
#include "fracvar/physics.hpp"
#include "fracvar/problem_file.hpp"
#include "fracvar/specfun.hpp"
#include "fracvar/variational.hpp"

namespace fracvar::cli {

namespace {

using problem::Json;
using problem::SchemaError;
namespace fs = std::filesystem;

struct Invocation {
  std::string sub;
  std::string input;
  std::string output;
  std::string grid_out;
  bool check = false;
  std::optional<long long> grid_n;
  std::optional<double> alpha, beta, gamma, xi;
  std::vector<std::string> sets;
};

// Failed --check or non-convergence; the artifact has been written.
struct SoftFailure {
  std::string message;
  Json detail;
};

void diag(std::ostream& err, std::string_view level, std::string_view kind, std::string_view message,
          Json extra = Json::object()) {
  Json rec = {{"level", level}, {"kind", kind}, {"message", message}};
  for (auto& [k, v] : extra.items()) rec[k] = v;
  err << rec.dump() << '\n';
}

// Where the named overrides land, per subcommand.
const std::map<std::string, std::map<std::string, std::string>>& override_targets() {
  static const std::map<std::string, std::map<std::string, std::string>> t = [] {
    std::map<std::string, std::string> variational{{"grid-n", "/grid_n"},
                                                   {"alpha", "/outer/alpha"},
                                                   {"beta", "/opB/beta"},
                                                   {"gamma", "/opK/gamma"},
                                                   {"xi", "/constraint/xi"}};
    std::map<std::string, std::string> op{
        {"grid-n", "/grid_n"}, {"alpha", "/operator/order"}, {"beta", "/operator/kernel/beta"}};
    return std::map<std::string, std::map<std::string, std::string>>{
        {"op-eval", op},
        {"verify-ibp", op},
        {"el-residual", variational},
        {"nbc-residual", variational},
        {"iso-residual", variational},
        {"solve", variational},
        {"volterra", {{"grid-n", "/grid_n"}, {"alpha", "/alpha"}, {"beta", "/kernel/beta"}}},
        {"falva-delta", {{"alpha", "/alpha"}}},
        {"falva-sim", {{"grid-n", "/grid_n"}, {"alpha", "/alpha"}, {"gamma", "/gamma"}}},
        {"ml-eval", {{"alpha", "/alpha"}, {"beta", "/beta"}}},
    };
  }();
  return t;
}

void set_at(Json& doc, const std::string& pointer, const Json& value, const std::string& option) {
  // missing parents are created; an existing parent must be an object
  Json::json_pointer ptr(pointer);
  Json::json_pointer up = ptr.parent_pointer();
  while (!up.empty() && !doc.contains(up)) up = up.parent_pointer();
  if (!doc.at(up).is_object())
    throw SchemaError("override " + option + " needs '" + up.to_string() + "' to be an object in the problem file");
  doc[ptr] = value;
}

void apply_overrides(Json& doc, const Invocation& inv) {
  const auto& targets = override_targets().at(inv.sub);
  auto apply = [&](const char* name, const std::optional<Json>& v) {
    if (!v) return;
    auto it = targets.find(name);
    if (it == targets.end()) throw SchemaError(std::string("--") + name + " does not apply to " + inv.sub);
    set_at(doc, it->second, *v, std::string("--") + name);
  };
  auto opt = [](const auto& o) { return o ? std::optional<Json>(*o) : std::nullopt; };
  apply("grid-n", opt(inv.grid_n));
  apply("alpha", opt(inv.alpha));
  apply("beta", opt(inv.beta));
  apply("gamma", opt(inv.gamma));
  apply("xi", opt(inv.xi));
  for (const std::string& s : inv.sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw SchemaError("--set expects key=value, got '" + s + "'");
    std::string path = s.substr(0, eq);
    std::replace(path.begin(), path.end(), '.', '/');
    Json value = Json::parse(s.substr(eq + 1), nullptr, false);
    if (value.is_discarded()) value = s.substr(eq + 1);
    set_at(doc, "/" + path, value, "--set " + s.substr(0, eq));
  }
}

class Sink {
public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path.empty() || path == "-") {
      os_ = &fallback;
      return;
    }
    file_.open(path, std::ios::binary);
    if (!file_) throw SchemaError("cannot write '" + path + "'");
    os_ = &file_;
  }
  std::ostream& operator*() { return *os_; }

private:
  std::ofstream file_;
  std::ostream* os_;
};

void write_json(const std::string& path, std::ostream& out, const Json& j) {
  Sink s(path, out);
  *s << j.dump(2) << '\n';
}

void write_grid(const std::string& path, std::ostream& out, const GridFunction& g) {
  Sink s(path, out);
  write_csv(*s, g);
}

Json band_json(const ResidualReport& r) {
  Json j = {{"sup_norm", r.sup_norm}, {"l2_norm", r.l2_norm}, {"band", {r.band_lo, r.band_hi}},
            {"grid_n", r.grid.n()}};
  if (r.nbc_residual) j["nbc_residual"] = *r.nbc_residual;
  return j;
}

void check_tolerance(const Invocation& inv, double value, double tol, std::string_view what) {
  if (inv.check && !(value <= tol))
    throw SoftFailure{std::string(what) + " exceeds tolerance", {{"value", value}, {"tolerance", tol}}};
}

// ---- subcommands ----

void op_eval(const Invocation& inv, const Json& doc, std::ostream& out) {
  problem::expect_keys(doc, {"interval", "grid_n", "operator", "f"}, "");
  auto grid = problem::parse_grid(doc);
  auto cfg = problem::parse_operator(doc.at("operator"), grid.a, grid.b, "operator");
  if (!doc.contains("f")) throw SchemaError("missing field 'f'");
  auto f = problem::parse_function(doc.at("f"), grid, fs::path(inv.input).parent_path(), "f");
  GridFunction r = cfg.kind == OperatorKind::K ? k_op(cfg, f) : cfg.kind == OperatorKind::A ? a_op(cfg, f) : b_op(cfg, f);
  r.derivative_values.reset();
  write_grid(inv.output, out, r);
}

void verify_ibp(const Invocation& inv, const Json& doc, std::ostream& out) {
  problem::expect_keys(doc, {"interval", "grid_n", "operator", "f", "g", "tolerance"}, "");
  auto grid = problem::parse_grid(doc);
  auto cfg = problem::parse_operator(doc.at("operator"), grid.a, grid.b, "operator");
  const fs::path base = fs::path(inv.input).parent_path();
  for (const char* k : {"f", "g"})
    if (!doc.contains(k)) throw SchemaError(std::string("missing field '") + k + "'");
  auto f = problem::parse_function(doc.at("f"), grid, base, "f");
  auto g = problem::parse_function(doc.at("g"), grid, base, "g");
  double tol = problem::number_or(doc, "tolerance", 1e-3, "");
  double defect;
  if (cfg.kind == OperatorKind::K) defect = ibp_defect_k(cfg, f, g);
  else if (cfg.kind == OperatorKind::B) defect = ibp_defect_b(cfg, f, g);
  else throw SchemaError("verify-ibp takes operator kind K or B");
  write_json(inv.output, out,
             {{"kind", cfg.kind == OperatorKind::K ? "K" : "B"},
              {"defect", defect},
              {"tolerance", tol},
              {"within_tolerance", defect <= tol}});
  check_tolerance(inv, defect, tol, "integration-by-parts defect");
}

GridFunction candidate(const Invocation& inv, const problem::VariationalFile& vf) {
  if (!vf.y) throw SchemaError("missing field 'y' (the curve to test)");
  return problem::parse_function(*vf.y, vf.grid, fs::path(inv.input).parent_path(), "y");
}

void el_residual_cmd(const Invocation& inv, const Json& doc, std::ostream& out) {
  auto vf = problem::parse_variational(doc);
  auto rep = el_residual(vf.problem, candidate(inv, vf));
  double tol = vf.tolerance.value_or(1e-2);
  Json j = band_json(rep);
  j["tolerance"] = tol;
  write_json(inv.output, out, j);
  if (!inv.grid_out.empty()) write_grid(inv.grid_out, out, rep.grid);
  check_tolerance(inv, rep.sup_norm, tol, "Euler-Lagrange residual");
}

void nbc_residual_cmd(const Invocation& inv, const Json& doc, std::ostream& out) {
  auto vf = problem::parse_variational(doc);
  double r = natural_bc_residual(vf.problem, candidate(inv, vf));
  double tol = vf.tolerance.value_or(1e-3);
  write_json(inv.output, out, {{"nbc_residual", r}, {"tolerance", tol}});
  check_tolerance(inv, r, tol, "natural boundary residual");
}

void iso_residual_cmd(const Invocation& inv, const Json& doc, std::ostream& out) {
  auto vf = problem::parse_variational(doc);
  if (!vf.problem.constraint) throw SchemaError("iso-residual needs a 'constraint'");
  auto y = candidate(inv, vf);
  double lambda = vf.lambda ? *vf.lambda : estimate_multiplier(vf.problem, y);
  auto rep = isoperimetric_el_residual(vf.problem, y, lambda);
  double tol = vf.tolerance.value_or(1e-2);
  Json j = band_json(rep);
  j["lambda"] = lambda;
  j["lambda_source"] = vf.lambda ? "file" : "estimated";
  j["constraint_value"] = constraint_value(vf.problem, y);
  j["xi"] = vf.problem.constraint->xi;
  j["tolerance"] = tol;
  write_json(inv.output, out, j);
  if (!inv.grid_out.empty()) write_grid(inv.grid_out, out, rep.grid);
  check_tolerance(inv, rep.sup_norm, tol, "isoperimetric residual");
}

void solve_cmd(const Invocation& inv, const Json& doc, std::ostream& out, std::ostream& err) {
  auto vf = problem::parse_variational(doc);
  const auto& p = vf.problem;
  GridFunction init;
  if (vf.init) {
    init = problem::parse_function(*vf.init, vf.grid, fs::path(inv.input).parent_path(), "init");
  } else {
    double ya = p.left.free ? p.right.value : p.left.value, yb = p.right.value;
    init = GridFunction::sample(vf.grid.a, vf.grid.b, vf.grid.n,
                                [&](double t) { return ya + (yb - ya) * (t - p.a) / (p.b - p.a); });
  }
  init.derivative_values.reset();
  if (!p.left.free) init.values.front() = p.left.value;
  init.values.back() = p.right.value;
  auto res = solve_direct(p, init, vf.solver);
  write_grid(inv.output, out, res.y);
  Json summary = {{"converged", res.converged},
                  {"iterations", res.iterations},
                  {"objective", res.objective},
                  {"gradient_norm", res.gradient_norm}};
  if (p.constraint) {
    summary["multiplier"] = res.multiplier;
    summary["constraint_violation"] = res.constraint_violation;
  }
  if (!res.converged) throw SoftFailure{"solver did not converge; best iterate written", summary};
  diag(err, "info", "solve", "converged", summary);
}

void volterra_cmd(const Invocation& inv, const Json& doc, std::ostream& out) {
  problem::expect_keys(doc, {"interval", "grid_n", "kernel", "alpha", "rhs"}, "");
  auto grid = problem::parse_grid(doc);
  std::optional<double> alpha;
  if (doc.contains("alpha")) alpha = problem::number(doc, "alpha", "");
  if (!doc.contains("kernel") || !doc.contains("rhs")) throw SchemaError("volterra needs 'kernel' and 'rhs'");
  auto k = problem::parse_kernel(doc.at("kernel"), alpha, "kernel");
  auto rhs = problem::parse_function(doc.at("rhs"), grid, fs::path(inv.input).parent_path(), "rhs");
  auto y = solve_volterra_first_kind(k, rhs);
  y.derivative_values.reset();
  write_grid(inv.output, out, y);
}

std::vector<double> sample_points(const Json& spec, double lo_default, double hi_default, std::size_t n_default,
                                  bool log_default, std::string_view where) {
  if (spec.is_array()) {
    std::vector<double> v;
    for (const Json& x : spec) {
      if (!x.is_number()) throw SchemaError("'" + std::string(where) + "' must hold numbers");
      v.push_back(x.get<double>());
    }
    return v;
  }
  problem::expect_keys(spec, {"from", "to", "points", "spacing"}, where);
  double lo = problem::number_or(spec, "from", lo_default, where);
  double hi = problem::number_or(spec, "to", hi_default, where);
  std::size_t n = spec.contains("points") ? problem::count(spec, "points", where) : n_default;
  bool log = log_default;
  if (spec.contains("spacing")) {
    const Json& s = spec.at("spacing");
    if (s == "log") log = true;
    else if (s == "linear") log = false;
    else throw SchemaError("'" + std::string(where) + ".spacing' must be \"log\" or \"linear\"");
  }
  if (log && !(lo > 0.0 && hi > 0.0)) throw SchemaError("log spacing in '" + std::string(where) + "' needs positive ends");
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    double f = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    v[i] = log ? std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo))) : lo + f * (hi - lo);
  }
  v.front() = lo;
  if (n > 1) v.back() = hi;
  return v;
}

void falva_delta(const Invocation& inv, const Json& doc, std::ostream& out) {
  problem::expect_keys(doc, {"kernel", "alpha", "b", "t", "limits"}, "");
  std::optional<double> alpha;
  if (doc.contains("alpha")) alpha = problem::number(doc, "alpha", "");
  const double b = problem::number(doc, "b", "");
  auto k = problem::parse_kernel(doc.contains("kernel") ? doc.at("kernel") : Json("katugampola"), alpha, "kernel");

  bool limits = doc.contains("limits") && doc.at("limits") == true;
  if (!limits) {
    if (inv.check) throw SchemaError("--check needs \"limits\": true");
    auto ts = sample_points(doc.contains("t") ? doc.at("t") : Json::object(), 1e-8 * b, 0.5 * b, 9, true, "t");
    Sink s(inv.output, out);
    *s << "t,delta\n";
    for (double t : ts) *s << format_double(t) << ',' << format_double(dissipative_delta(k, b, t)) << '\n';
    return;
  }
  if (doc.contains("t")) throw SchemaError("'t' is not used with \"limits\": true");
  DeltaLimitFamily fam;
  if (k.family == KernelFamily::Katugampola) fam = k.rho == 0.0 ? DeltaLimitFamily::KatugampolaRho0 : DeltaLimitFamily::KatugampolaRhoPos;
  else if (k.family == KernelFamily::PowerCosh) fam = DeltaLimitFamily::PowerCosh;
  else throw SchemaError("limit reports exist for katugampola and power-cosh kernels only");
  auto rep = fam == DeltaLimitFamily::KatugampolaRhoPos ? delta_limit_report(fam, k.alpha, b, k.rho)
                                                        : delta_limit_report(fam, k.alpha, b);
  Json rows = Json::array();
  for (const auto& r : rep.rows)
    rows.push_back({{"label", r.label}, {"b", r.b}, {"t", r.t}, {"delta", r.delta},
                    {"expected", std::isfinite(r.expected) ? Json(r.expected) : Json("inf")},
                    {"checked", r.checked}, {"ok", r.ok}});
  write_json(inv.output, out,
             {{"alpha", rep.alpha}, {"rho", rep.rho}, {"passed", rep.passed}, {"rows", rows}, {"notes", rep.notes}});
  if (inv.check && !rep.passed) throw SoftFailure{"delta limit checks failed", {{"passed", false}}};
}

void falva_sim(const Invocation& inv, const Json& doc, std::ostream& out) {
  problem::expect_keys(doc, {"model", "kernel", "alpha", "omega", "gamma", "mass0", "y0", "v0", "b", "grid_n",
                             "substeps", "sweep"},
                       "");
  std::string model = doc.value("model", std::string("caldirola-kanai"));
  if (model != "caldirola-kanai" && model != "damped")
    throw SchemaError("'model' must be \"caldirola-kanai\" or \"damped\"");
  OscillatorParams base;
  base.alpha = problem::number_or(doc, "alpha", base.alpha, "");
  base.omega = problem::number_or(doc, "omega", base.omega, "");
  base.gamma_ck = problem::number_or(doc, "gamma", 0.0, "");
  base.mass0 = problem::number_or(doc, "mass0", 1.0, "");
  base.y0 = problem::number_or(doc, "y0", 1.0, "");
  base.v0 = problem::number_or(doc, "v0", 0.0, "");
  base.b = problem::number_or(doc, "b", 1.0, "");
  const std::size_t n = problem::count(doc, "grid_n", "");
  const int substeps = doc.contains("substeps") ? static_cast<int>(problem::count(doc, "substeps", "")) : 1;
  if (model == "damped" && doc.contains("kernel")) throw SchemaError("the damped model takes no 'kernel'");
  const Json kernel_json = doc.contains("kernel") ? doc.at("kernel") : Json("rl-power");

  std::string param = "gamma";
  std::vector<double> values{base.gamma_ck};
  if (doc.contains("sweep")) {
    const Json& sw = doc.at("sweep");
    problem::expect_keys(sw, {"param", "values"}, "sweep");
    if (!sw.contains("param") || !sw.at("param").is_string()) throw SchemaError("'sweep.param' must be a string");
    param = sw.at("param").get<std::string>();
    static const std::vector<std::string> sweepable{"gamma", "alpha", "omega", "b", "y0", "v0", "mass0"};
    if (std::find(sweepable.begin(), sweepable.end(), param) == sweepable.end())
      throw SchemaError("'sweep.param' cannot be '" + param + "'");
    if (!sw.contains("values")) throw SchemaError("missing field 'sweep.values'");
    values.clear();
    for (const Json& v : sw.at("values")) {
      if (!v.is_number()) throw SchemaError("'sweep.values' must hold numbers");
      values.push_back(v.get<double>());
    }
    if (values.empty()) throw SchemaError("'sweep.values' must not be empty");
  }

  struct Run {
    OscillatorParams params;
    KernelSpec kernel;
    GridFunction traj;
  };
  std::vector<Run> runs(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    OscillatorParams p = base;
    double v = values[i];
    if (param == "gamma") p.gamma_ck = v;
    else if (param == "alpha") p.alpha = v;
    else if (param == "omega") p.omega = v;
    else if (param == "b") p.b = v;
    else if (param == "y0") p.y0 = v;
    else if (param == "v0") p.v0 = v;
    else p.mass0 = v;
    try {
      p.validate();
    } catch (const std::invalid_argument& e) {
      throw SchemaError(e.what());
    }
    runs[i].params = p;
    if (model == "caldirola-kanai") {
      runs[i].kernel = problem::parse_kernel(kernel_json, p.alpha, "kernel");
      runs[i].params.rho = runs[i].kernel.rho;
    }
  }
  // independent trajectories run concurrently; each one is sequential
  parallel_for(runs.size(), [&](std::size_t i) {
    Run& r = runs[i];
    if (model == "damped") {
      const double k = r.params.mass0 * r.params.omega * r.params.omega;
      r.traj = simulate_damped_oscillator(r.params, [k](double y) { return k * y; }, n, substeps);
    } else {
      r.traj = simulate_caldirola_kanai(r.params, r.kernel, n, substeps);
    }
  }, 1);

  Sink s(inv.output, out);
  *s << "param,t,y,v,delta\n";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const Run& r = runs[i];
    const auto& vs = *r.traj.derivative_values;
    for (std::size_t j = 0; j <= r.traj.n(); ++j) {
      double t = r.traj.node(j);
      double delta = -r.params.alpha;
      if (model == "caldirola-kanai") {
        try {
          delta = dissipative_delta(r.kernel, r.params.b, t);
        } catch (const std::domain_error&) {
          delta = std::nan("");
        }
      }
      *s << format_double(values[i]) << ',' << format_double(t) << ',' << format_double(r.traj.values[j]) << ','
         << format_double(vs[j]) << ',' << format_double(delta) << '\n';
    }
  }
}

void ml_eval(const Invocation& inv, const Json& doc, std::ostream& out) {
  problem::expect_keys(doc, {"alpha", "beta", "z"}, "");
  MLParams p{problem::number(doc, "alpha", ""), problem::number_or(doc, "beta", 1.0, "")};
  if (!doc.contains("z")) throw SchemaError("missing field 'z'");
  auto zs = sample_points(doc.at("z"), 0.0, 1.0, 11, false, "z");
  std::vector<std::pair<double, double>> rows;
  for (double z : zs) rows.emplace_back(z, mittag_leffler(p, z));
  Sink s(inv.output, out);
  *s << "z,value\n";
  for (auto [z, v] : rows) *s << format_double(z) << ',' << format_double(v) << '\n';
}

int dispatch(const Invocation& inv, std::ostream& out, std::ostream& err) {
  Json doc = problem::load(inv.input);
  apply_overrides(doc, inv);
  if (inv.sub == "op-eval") op_eval(inv, doc, out);
  else if (inv.sub == "verify-ibp") verify_ibp(inv, doc, out);
  else if (inv.sub == "el-residual") el_residual_cmd(inv, doc, out);
  else if (inv.sub == "nbc-residual") nbc_residual_cmd(inv, doc, out);
  else if (inv.sub == "iso-residual") iso_residual_cmd(inv, doc, out);
  else if (inv.sub == "solve") solve_cmd(inv, doc, out, err);
  else if (inv.sub == "volterra") volterra_cmd(inv, doc, out);
  else if (inv.sub == "falva-delta") falva_delta(inv, doc, out);
  else if (inv.sub == "falva-sim") falva_sim(inv, doc, out);
  else ml_eval(inv, doc, out);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generalized fractional operators and variational problems", "fracvar"};
  app.require_subcommand(1, 1);
  Invocation inv;

  struct Entry {
    const char* name;
    const char* help;
    bool checkable;
    bool residual_grid;
  };
  static constexpr Entry entries[] = {
      {"op-eval", "apply a K, A or B operator to a sampled function", false, false},
      {"verify-ibp", "integration-by-parts defect of a K or B operator", true, false},
      {"el-residual", "Euler-Lagrange residual of a candidate curve", true, true},
      {"nbc-residual", "natural boundary residual at a free left end", true, false},
      {"iso-residual", "residual of F - lambda G for a constrained problem", true, true},
      {"solve", "minimize the discretized functional (direct method)", false, false},
      {"volterra", "solve a first-kind Volterra equation", false, false},
      {"falva-delta", "tabulate or check the dissipative parameter delta(t)", true, false},
      {"falva-sim", "simulate damped oscillators, optionally sweeping a parameter", false, false},
      {"ml-eval", "evaluate the Mittag-Leffler function", false, false},
  };
  for (const Entry& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    sub->add_option("input", inv.input, "problem file (JSON)")->required();
    sub->add_option("-o,--output", inv.output, "output path (default: standard output)");
    const auto& targets = override_targets().at(e.name);
    if (targets.count("grid-n")) sub->add_option("--grid-n", inv.grid_n, "override grid_n");
    if (targets.count("alpha")) sub->add_option("--alpha", inv.alpha, "override " + targets.at("alpha"));
    if (targets.count("beta")) sub->add_option("--beta", inv.beta, "override " + targets.at("beta"));
    if (targets.count("gamma")) sub->add_option("--gamma", inv.gamma, "override " + targets.at("gamma"));
    if (targets.count("xi")) sub->add_option("--xi", inv.xi, "override " + targets.at("xi"));
    sub->add_option("--set", inv.sets, "override any field: dotted.path=json-value");
    if (e.checkable) sub->add_flag("--check", inv.check, "exit 1 when a tolerance is violated");
    if (e.residual_grid) sub->add_option("--grid-out", inv.grid_out, "write the pointwise residual as CSV");
    sub->callback([&inv, name = std::string(e.name)] { inv.sub = name; });
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    diag(err, "error", "usage", e.what());
    return kExitUsage;
  }

  try {
    return dispatch(inv, out, err);
  } catch (const SoftFailure& f) {
    diag(err, "error", "numerical", f.message, f.detail);
    return kExitNumerical;
  } catch (const NumericalError& e) {
    diag(err, "error", "numerical", e.what());
    return kExitNumerical;
  } catch (const std::range_error& e) {
    diag(err, "error", "numerical", e.what());
    return kExitNumerical;
  } catch (const std::logic_error& e) {
    diag(err, "error", "usage", e.what());
    return kExitUsage;
  } catch (const Json::exception& e) {
    diag(err, "error", "usage", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    diag(err, "error", "numerical", e.what());
    return kExitNumerical;
  }
}

}  // namespace fracvar::cli
