#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fracvar/cli.hpp"
#include "fracvar/errors.hpp"
#include "fracvar/operators.hpp"
#include "fracvar/physics.hpp"
#include "fracvar/specfun.hpp"

namespace py = pybind11;
using namespace fracvar;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vec(const Array& a) {
  if (a.ndim() != 1) throw std::invalid_argument("expected a one-dimensional array");
  return {a.data(), a.data() + a.size()};
}

Array to_array(const std::vector<double>& v) { return Array(static_cast<py::ssize_t>(v.size()), v.data()); }

OperatorConfig make_config(const KernelSpec& kernel, double a, double b, double p, double q, double order,
                           OperatorKind kind) {
  return {{a, b, p, q}, order, kernel, kind};
}

GridFunction grid(const Array& values, double a, double b, const std::optional<Array>& derivative = std::nullopt) {
  GridFunction f(a, b, to_vec(values));
  if (derivative) f.derivative_values = to_vec(*derivative);
  f.validate();
  return f;
}

}  // namespace

PYBIND11_MODULE(_fracvar, m) {
  m.doc() = "Generalized fractional operators, variational residuals and dissipative dynamics";
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def("gamma", &gamma_fn, py::arg("x"));
  m.def(
      "mittag_leffler",
      py::vectorize([](double alpha, double beta, double z) { return mittag_leffler({alpha, beta}, z); }),
      py::arg("alpha"), py::arg("beta"), py::arg("z"));
  m.attr("ML_Z_MAX") = kMittagLefflerZMax;

  py::class_<KernelSpec>(m, "Kernel")
      .def_static("rl_power", &KernelSpec::rl_power, py::arg("alpha"))
      .def_static("exponential", &KernelSpec::exponential, py::arg("alpha"))
      .def_static("cosh_difference", &KernelSpec::cosh_difference, py::arg("beta"))
      .def_static("power_cosh", &KernelSpec::power_cosh, py::arg("alpha"))
      .def_static("katugampola", &KernelSpec::katugampola, py::arg("alpha"), py::arg("rho"))
      .def_static("identity", &KernelSpec::identity)
      .def_static("tabulated", &KernelSpec::tabulated, py::arg("step"), py::arg("samples"))
      .def_property_readonly("family", [](const KernelSpec& k) { return std::string(family_tag(k.family)); })
      .def_readonly("alpha", &KernelSpec::alpha)
      .def_readonly("beta", &KernelSpec::beta)
      .def_readonly("rho", &KernelSpec::rho)
      .def_property_readonly("is_singular", &KernelSpec::is_singular)
      .def("__call__", [](const KernelSpec& k, double x, double t) { return eval_kernel(k, x, t); })
      .def("dt", [](const KernelSpec& k, double x, double t) { return eval_kernel_dt(k, x, t); })
      .def("__repr__", [](const KernelSpec& k) {
        std::ostringstream os;
        os << "Kernel(" << family_tag(k.family) << ", alpha=" << k.alpha << ", beta=" << k.beta << ", rho=" << k.rho
           << ")";
        return os.str();
      });

  m.def(
      "k_op",
      [](const KernelSpec& kernel, const Array& f, double a, double b, double p, double q) {
        return to_array(k_op(make_config(kernel, a, b, p, q, 0.5, OperatorKind::K), grid(f, a, b)).values);
      },
      py::arg("kernel"), py::arg("f"), py::arg("a") = 0.0, py::arg("b") = 1.0, py::arg("p") = 1.0,
      py::arg("q") = 0.0);
  m.def(
      "a_op",
      [](const KernelSpec& kernel, const Array& f, double a, double b, double p, double q) {
        return to_array(a_op(make_config(kernel, a, b, p, q, 0.5, OperatorKind::A), grid(f, a, b)).values);
      },
      py::arg("kernel"), py::arg("f"), py::arg("a") = 0.0, py::arg("b") = 1.0, py::arg("p") = 1.0,
      py::arg("q") = 0.0);
  m.def(
      "b_op",
      [](const KernelSpec& kernel, const Array& f, double a, double b, double p, double q,
         const std::optional<Array>& df) {
        return to_array(b_op(make_config(kernel, a, b, p, q, 0.5, OperatorKind::B), grid(f, a, b, df)).values);
      },
      py::arg("kernel"), py::arg("f"), py::arg("a") = 0.0, py::arg("b") = 1.0, py::arg("p") = 1.0,
      py::arg("q") = 0.0, py::arg("df") = py::none());
  m.def(
      "ibp_defect",
      [](const KernelSpec& kernel, const Array& f, const Array& g, double a, double b, double p, double q) {
        return ibp_defect_k(make_config(kernel, a, b, p, q, 0.5, OperatorKind::K), grid(f, a, b), grid(g, a, b));
      },
      py::arg("kernel"), py::arg("f"), py::arg("g"), py::arg("a") = 0.0, py::arg("b") = 1.0, py::arg("p") = 1.0,
      py::arg("q") = 0.0);
  m.def(
      "solve_volterra",
      [](const KernelSpec& kernel, const Array& rhs, double a, double b) {
        return to_array(solve_volterra_first_kind(kernel, grid(rhs, a, b)).values);
      },
      py::arg("kernel"), py::arg("rhs"), py::arg("a") = 0.0, py::arg("b") = 1.0);

  m.def("dissipative_delta", &dissipative_delta, py::arg("kernel"), py::arg("b"), py::arg("t"));
  m.def(
      "simulate_caldirola_kanai",
      [](const KernelSpec& kernel, double omega, double gamma, double b, std::size_t grid_n, double y0, double v0,
         int substeps) {
        OscillatorParams p;
        p.omega = omega;
        p.gamma_ck = gamma;
        p.b = b;
        p.y0 = y0;
        p.v0 = v0;
        p.alpha = kernel.alpha;
        p.rho = kernel.rho;
        GridFunction r = simulate_caldirola_kanai(p, kernel, grid_n, substeps);
        std::vector<double> t(r.values.size());
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = r.node(i);
        return py::make_tuple(to_array(t), to_array(r.values), to_array(*r.derivative_values));
      },
      py::arg("kernel"), py::arg("omega"), py::arg("gamma"), py::arg("b"), py::arg("grid_n"), py::arg("y0") = 1.0,
      py::arg("v0") = 0.0, py::arg("substeps") = 1);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
