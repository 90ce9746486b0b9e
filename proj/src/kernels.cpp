#include "fracvar/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fracvar/specfun.hpp"

namespace fracvar {

namespace {

constexpr double kSingularRelTol = 1e-14;
constexpr double kQuadTol = 1e-12;  // the Kronrod error estimate bottoms out near 1e-13 relative

bool near_singular(double x, double t) {
  return std::abs(x - t) < kSingularRelTol * std::max({1.0, std::abs(x), std::abs(t)});
}

[[noreturn]] void singular_point(const KernelSpec& spec, double x) {
  throw std::domain_error("kernel '" + std::string(family_tag(spec.family)) +
                          "' is singular at x = t = " + std::to_string(x));
}

template <class F>
double gk(F f, double lo, double hi) {
  if (hi <= lo) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 10, kQuadTol);
}

// (r+1)^g - r^g without cancellation for large r.
double power_gap(double g, double r) {
  if (r == 0.0) return 1.0;
  return std::pow(r, g) * std::expm1(g * std::log1p(1.0 / r));
}

// expm1(z)/z
double exprel(double z) {
  if (std::abs(z) < 1e-5) return 1.0 + z / 2.0 + z * z / 6.0;
  return std::expm1(z) / z;
}

// int_0^1 e^{z m} m dm = (e^z (z - 1) + 1) / z^2
double exprel_weighted(double z) {
  if (std::abs(z) < 0.1) {
    // sum_{m>=2} z^{m-2} (m-1)/m!
    double term_pow = 1.0;
    double fact = 2.0;
    double sum = 0.0;
    for (int m = 2; m < 30; ++m) {
      sum += term_pow * (m - 1) / fact;
      term_pow *= z;
      fact *= (m + 1);
    }
    return sum;
  }
  return (std::exp(z) * (z - 1.0) + 1.0) / (z * z);
}

double table_value(const KernelSpec& spec, double s) {
  s = std::abs(s);
  const double last = spec.table_step * static_cast<double>(spec.table.size() - 1);
  if (s > last * (1.0 + 1e-12)) throw std::domain_error("tabulated kernel evaluated beyond its table");
  double pos = std::min(s, last) / spec.table_step;
  std::size_t i = std::min(static_cast<std::size_t>(pos), spec.table.size() - 2);
  double frac = pos - static_cast<double>(i);
  return spec.table[i] * (1.0 - frac) + spec.table[i + 1] * frac;
}

// kappa(s) with k(x, t) = kappa(x - t) for difference families.
double kappa(const KernelSpec& spec, double s) {
  switch (spec.family) {
    case KernelFamily::RLPower:
      return std::pow(std::abs(s), spec.alpha - 1.0) / gamma_fn(spec.alpha);
    case KernelFamily::Exponential:
      return std::exp(spec.alpha * s);
    case KernelFamily::CoshDifference:
      return std::cosh(spec.beta * s);
    case KernelFamily::Identity:
      return 1.0;
    case KernelFamily::Tabulated:
      return table_value(spec, s);
    default:
      throw std::logic_error("kappa: not a difference kernel");
  }
}

double katugampola_scale(const KernelSpec& spec) {
  return std::pow(spec.rho + 1.0, 1.0 - spec.alpha) / gamma_fn(spec.alpha);
}

// |x^(rho+1) - t^(rho+1)| / |x - t| for x, t >= 0, accurate as t -> x.
double katugampola_quotient(double rho, double x, double t) {
  double m = std::min(x, t);
  double d = std::abs(x - t);
  if (d == 0.0) return (rho + 1.0) * std::pow(m, rho);
  if (m == 0.0) return std::pow(d, rho);
  return std::pow(m, rho + 1.0) * std::expm1((rho + 1.0) * std::log1p(d / m)) / d;
}

// 2 sinh((x+t)/2) sinh((x-t)/2) / (x - t)
double cosh_quotient(double x, double t) {
  double d = x - t;
  double half = d == 0.0 ? 0.5 : std::sinh(d / 2.0) / d;
  return 2.0 * std::sinh((x + t) / 2.0) * half;
}

// Moments of s -> kappa(s) over [s0, s1] (s0 >= 0):
//   {int kappa, int kappa (s - s0)/(s1 - s0)}.
Moments offset_moments(const KernelSpec& spec, double s0, double s1) {
  const double len = s1 - s0;
  switch (spec.family) {
    case KernelFamily::RLPower: {
      const double a = spec.alpha;
      const double r = s0 / len;
      const double scale = std::pow(len, a) / gamma_fn(a);
      const double da = power_gap(a, r);
      const double da1 = power_gap(a + 1.0, r);
      return {scale * da / a, scale * (da1 / (a + 1.0) - r * da / a)};
    }
    case KernelFamily::Exponential: {
      const double z = spec.alpha * len;
      const double base = std::exp(spec.alpha * s0) * len;
      return {base * exprel(z), base * exprel_weighted(z)};
    }
    case KernelFamily::Identity:
      return {len, len / 2.0};
    case KernelFamily::Tabulated: {
      // The integrand is piecewise polynomial of degree <= 2 between table
      // knots, so two-point Gauss-Legendre on each piece is exact.
      constexpr double g = 0.57735026918962576;  // 1/sqrt(3)
      Moments out{0.0, 0.0};
      double lo = s0;
      while (lo < s1) {
        double knot = (std::floor(lo / spec.table_step + 1e-12) + 1.0) * spec.table_step;
        double hi = std::min(s1, knot);
        if (hi <= lo) hi = s1;
        double mid = (lo + hi) / 2.0, rad = (hi - lo) / 2.0;
        for (double sgn : {-1.0, 1.0}) {
          double s = mid + sgn * g * rad;
          double k = table_value(spec, s);
          out.m0 += rad * k;
          out.m1 += rad * k * (s - s0) / len;
        }
        lo = hi;
      }
      return out;
    }
    case KernelFamily::CoshDifference: {
      // about the midpoint m: int cosh = L cosh(bm) sinh(z)/z, z = bL/2, and
      // the first moment adds sinh(bm) b L^2 (z cosh z - sinh z)/(4 z^3)
      const double beta = spec.beta;
      const double m = 0.5 * (s0 + s1);
      const double z = 0.5 * beta * len;
      double shc, g;
      if (std::abs(z) < 0.1) {
        double z2 = z * z;
        shc = 1.0 + z2 / 6.0 + z2 * z2 / 120.0 + z2 * z2 * z2 / 5040.0;
        g = 1.0 / 3.0 + z2 / 30.0 + z2 * z2 / 840.0 + z2 * z2 * z2 / 45360.0;
      } else {
        shc = std::sinh(z) / z;
        g = (z * std::cosh(z) - std::sinh(z)) / (z * z * z);
      }
      const double i0 = len * std::cosh(beta * m) * shc;
      return {i0, 0.5 * i0 + std::sinh(beta * m) * beta * len * len * g / 4.0};
    }
    default:
      throw std::logic_error("offset_moments: not a difference kernel");
  }
}

// {int kb, int kb (t - lo)/(hi - lo)} for a kernel slice kb that may carry an
// |t - sing|^(alpha - 1) singularity at one endpoint. `regular` is
// kb / |t - sing|^(alpha - 1). sing_side: -1 at lo, +1 at hi, 0 none.
Moments numeric_cell(const std::function<double(double)>& kb,
                     const std::function<double(double)>& regular, double alpha, double lo,
                     double hi, int sing_side) {
  const double len = hi - lo;
  if (sing_side == 0) {
    auto f1 = [&](double t) { return kb(t) * (t - lo) / len; };
    return {gk(kb, lo, hi), gk(f1, lo, hi)};
  }
  // s = len w^(1/alpha) turns s^(alpha-1) ds into (len^alpha / alpha) dw.
  const double scale = std::pow(len, alpha) / alpha;
  auto frac = [&](double w) { return std::pow(w, 1.0 / alpha); };
  if (sing_side > 0) {
    auto g0 = [&](double w) { return regular(hi - len * frac(w)); };
    auto g1 = [&](double w) { return regular(hi - len * frac(w)) * (1.0 - frac(w)); };
    return {scale * gk(g0, 0.0, 1.0), scale * gk(g1, 0.0, 1.0)};
  }
  auto g0 = [&](double w) { return regular(lo + len * frac(w)); };
  auto g1 = [&](double w) { return regular(lo + len * frac(w)) * frac(w); };
  return {scale * gk(g0, 0.0, 1.0), scale * gk(g1, 0.0, 1.0)};
}

int singular_side(const KernelSpec& spec, double x, double lo, double hi) {
  if (!spec.is_singular()) return 0;
  if (near_singular(x, hi)) return 1;
  if (near_singular(x, lo)) return -1;
  return 0;
}

}  // namespace

void ParameterSet::validate() const {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(p) || !std::isfinite(q))
    throw std::invalid_argument("parameter set has non-finite fields");
  if (!(a < b)) throw std::invalid_argument("parameter set requires a < b");
}

KernelSpec KernelSpec::rl_power(double alpha) {
  KernelSpec k;
  k.family = KernelFamily::RLPower;
  k.alpha = alpha;
  k.validate();
  return k;
}

KernelSpec KernelSpec::exponential(double alpha) {
  KernelSpec k;
  k.family = KernelFamily::Exponential;
  k.alpha = alpha;
  k.validate();
  return k;
}

KernelSpec KernelSpec::cosh_difference(double beta) {
  KernelSpec k;
  k.family = KernelFamily::CoshDifference;
  k.beta = beta;
  k.validate();
  return k;
}

KernelSpec KernelSpec::power_cosh(double alpha) {
  KernelSpec k;
  k.family = KernelFamily::PowerCosh;
  k.alpha = alpha;
  k.validate();
  return k;
}

KernelSpec KernelSpec::katugampola(double alpha, double rho) {
  KernelSpec k;
  k.family = KernelFamily::Katugampola;
  k.alpha = alpha;
  k.rho = rho;
  k.validate();
  return k;
}

KernelSpec KernelSpec::identity() { return KernelSpec{}; }

KernelSpec KernelSpec::tabulated(double step, std::vector<double> samples) {
  KernelSpec k;
  k.family = KernelFamily::Tabulated;
  k.table_step = step;
  k.table = std::move(samples);
  k.validate();
  return k;
}

bool KernelSpec::is_difference() const {
  switch (family) {
    case KernelFamily::RLPower:
    case KernelFamily::Exponential:
    case KernelFamily::CoshDifference:
    case KernelFamily::Identity:
    case KernelFamily::Tabulated:
      return true;
    default:
      return false;
  }
}

bool KernelSpec::is_singular() const {
  return family == KernelFamily::RLPower || family == KernelFamily::PowerCosh ||
         family == KernelFamily::Katugampola;
}

double KernelSpec::singular_exponent() const { return is_singular() ? alpha - 1.0 : 0.0; }

void KernelSpec::validate() const {
  auto order_in_unit = [&] {
    if (!(alpha > 0.0 && alpha < 1.0))
      throw std::invalid_argument(std::string(family_tag(family)) + " kernel needs 0 < alpha < 1");
  };
  switch (family) {
    case KernelFamily::RLPower:
    case KernelFamily::PowerCosh:
      order_in_unit();
      break;
    case KernelFamily::Katugampola:
      order_in_unit();
      if (!(rho > -1.0) || !std::isfinite(rho))
        throw std::invalid_argument("katugampola kernel needs rho > -1");
      break;
    case KernelFamily::Exponential:
      if (!std::isfinite(alpha)) throw std::invalid_argument("exponential kernel needs finite alpha");
      break;
    case KernelFamily::CoshDifference:
      if (!std::isfinite(beta)) throw std::invalid_argument("cosh-difference kernel needs finite beta");
      break;
    case KernelFamily::Identity:
      break;
    case KernelFamily::Tabulated:
      if (!(table_step > 0.0) || !std::isfinite(table_step))
        throw std::invalid_argument("tabulated kernel needs a positive step");
      if (table.size() < 2) throw std::invalid_argument("tabulated kernel needs at least two samples");
      for (double v : table)
        if (!std::isfinite(v)) throw std::invalid_argument("tabulated kernel has non-finite samples");
      break;
  }
}

std::string_view family_tag(KernelFamily family) {
  switch (family) {
    case KernelFamily::RLPower: return "rl-power";
    case KernelFamily::Exponential: return "exponential";
    case KernelFamily::CoshDifference: return "cosh-difference";
    case KernelFamily::PowerCosh: return "power-cosh";
    case KernelFamily::Katugampola: return "katugampola";
    case KernelFamily::Identity: return "identity";
    case KernelFamily::Tabulated: return "tabulated";
  }
  return "unknown";
}

KernelFamily family_from_tag(std::string_view tag) {
  static constexpr std::array families = {
      KernelFamily::RLPower,     KernelFamily::Exponential, KernelFamily::CoshDifference,
      KernelFamily::PowerCosh,   KernelFamily::Katugampola, KernelFamily::Identity,
      KernelFamily::Tabulated};
  for (auto f : families)
    if (family_tag(f) == tag) return f;
  throw std::invalid_argument("unknown kernel family '" + std::string(tag) + "'");
}

double eval_kernel(const KernelSpec& spec, double x, double t) {
  if (spec.is_singular() && near_singular(x, t)) singular_point(spec, x);
  switch (spec.family) {
    case KernelFamily::PowerCosh: {
      double c = 2.0 * std::sinh((x + t) / 2.0) * std::sinh((x - t) / 2.0);
      if (c == 0.0) singular_point(spec, x);
      return std::pow(std::abs(c), spec.alpha - 1.0);
    }
    case KernelFamily::Katugampola: {
      if (x < 0.0 || t < 0.0) throw std::domain_error("katugampola kernel needs x, t >= 0");
      double r1 = spec.rho + 1.0;
      double c = std::pow(x, r1) - std::pow(t, r1);
      if (c == 0.0) singular_point(spec, x);
      return katugampola_scale(spec) * std::pow(std::abs(c), spec.alpha - 1.0);
    }
    default:
      return kappa(spec, x - t);
  }
}

double eval_kernel_dt(const KernelSpec& spec, double x, double t) {
  if (spec.is_singular() && near_singular(x, t)) singular_point(spec, x);
  const double s = x - t;
  switch (spec.family) {
    case KernelFamily::RLPower: {
      double sgn = s > 0.0 ? 1.0 : -1.0;
      return -sgn * (spec.alpha - 1.0) * std::pow(std::abs(s), spec.alpha - 2.0) / gamma_fn(spec.alpha);
    }
    case KernelFamily::Exponential:
      return -spec.alpha * std::exp(spec.alpha * s);
    case KernelFamily::CoshDifference:
      return -spec.beta * std::sinh(spec.beta * s);
    case KernelFamily::Identity:
      return 0.0;
    case KernelFamily::PowerCosh: {
      double c = 2.0 * std::sinh((x + t) / 2.0) * std::sinh((x - t) / 2.0);
      if (c == 0.0) singular_point(spec, x);
      return (spec.alpha - 1.0) * std::pow(std::abs(c), spec.alpha - 1.0) * (-std::sinh(t)) / c;
    }
    case KernelFamily::Katugampola: {
      if (x < 0.0 || t < 0.0) throw std::domain_error("katugampola kernel needs x, t >= 0");
      double r1 = spec.rho + 1.0;
      double c = std::pow(x, r1) - std::pow(t, r1);
      if (c == 0.0) singular_point(spec, x);
      double dc = -r1 * std::pow(t, spec.rho);
      return katugampola_scale(spec) * (spec.alpha - 1.0) * std::pow(std::abs(c), spec.alpha - 1.0) *
             dc / c;
    }
    case KernelFamily::Tabulated: {
      // slope of the piece containing |s|; mean of both slopes on a knot
      const std::size_t n = spec.table.size();
      double pos = std::min(std::abs(s) / spec.table_step, static_cast<double>(n - 1));
      auto slope = [&](std::size_t i) { return (spec.table[i + 1] - spec.table[i]) / spec.table_step; };
      std::size_t i = std::min(static_cast<std::size_t>(pos), n - 2);
      double dk_ds = slope(i);
      double knot = std::round(pos);
      if (std::abs(pos - knot) < 1e-12 && knot > 0.0 && knot < static_cast<double>(n - 1))
        dk_ds = (slope(static_cast<std::size_t>(knot) - 1) + slope(static_cast<std::size_t>(knot))) / 2.0;
      double sgn = s >= 0.0 ? 1.0 : -1.0;
      return -sgn * dk_ds;
    }
  }
  return 0.0;
}

double kernel_regular_part(const KernelSpec& spec, double x, double t) {
  switch (spec.family) {
    case KernelFamily::RLPower:
      return 1.0 / gamma_fn(spec.alpha);
    case KernelFamily::PowerCosh:
      return std::pow(std::abs(cosh_quotient(x, t)), spec.alpha - 1.0);
    case KernelFamily::Katugampola:
      if (x < 0.0 || t < 0.0) throw std::domain_error("katugampola kernel needs x, t >= 0");
      return katugampola_scale(spec) *
             std::pow(katugampola_quotient(spec.rho, x, t), spec.alpha - 1.0);
    default:
      return eval_kernel(spec, x, t);
  }
}

Moments kernel_moments(const KernelSpec& spec, double x, double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("kernel_moments requires lo < hi");
  if (spec.is_singular() && x > lo && x < hi && !near_singular(x, lo) && !near_singular(x, hi)) {
    Moments left = kernel_moments(spec, x, lo, x);
    Moments right = kernel_moments(spec, x, x, hi);
    return {left.m0 + right.m0, left.m1 + right.m1};
  }
  const double len = hi - lo;
  if (spec.is_difference()) {
    if (x >= hi || near_singular(x, hi)) {
      double s0 = std::max(0.0, x - hi);
      Moments o = offset_moments(spec, s0, s0 + len);
      // t = x - s
      return {o.m0, x * o.m0 - (s0 * o.m0 + len * o.m1)};
    }
    if (x <= lo || near_singular(x, lo)) {
      KernelSpec mirrored = spec;
      if (spec.family == KernelFamily::Exponential) mirrored.alpha = -spec.alpha;
      double s0 = std::max(0.0, lo - x);
      Moments o = offset_moments(mirrored, s0, s0 + len);
      // t = x + s
      return {o.m0, x * o.m0 + s0 * o.m0 + len * o.m1};
    }
    // regular difference kernel with x inside the interval
    Moments left = kernel_moments(spec, x, lo, x);
    Moments right = kernel_moments(spec, x, x, hi);
    return {left.m0 + right.m0, left.m1 + right.m1};
  }
  auto kb = [&](double t) { return eval_kernel(spec, x, t); };
  auto reg = [&](double t) { return kernel_regular_part(spec, x, t); };
  Moments c = numeric_cell(kb, reg, spec.alpha, lo, hi, singular_side(spec, x, lo, hi));
  return {c.m0, lo * c.m0 + len * c.m1};
}

double kernel_l1_norm(const KernelSpec& spec, double length) {
  if (!spec.is_difference()) throw std::invalid_argument("kernel_l1_norm needs a difference kernel");
  if (!(length > 0.0)) throw std::invalid_argument("kernel_l1_norm needs a positive length");
  switch (spec.family) {
    case KernelFamily::RLPower:
      return std::pow(length, spec.alpha) / gamma_fn(spec.alpha + 1.0);
    case KernelFamily::Exponential:
      return length * exprel(spec.alpha * length);
    case KernelFamily::CoshDifference:
      return spec.beta == 0.0 ? length : std::sinh(std::abs(spec.beta) * length) / std::abs(spec.beta);
    case KernelFamily::Identity:
      return length;
    case KernelFamily::Tabulated: {
      // exact integral of |piecewise linear|
      double total = 0.0;
      double lo = 0.0;
      while (lo < length) {
        double knot = (std::floor(lo / spec.table_step + 1e-12) + 1.0) * spec.table_step;
        double hi = std::min(length, knot);
        if (hi <= lo) hi = length;
        double k0 = table_value(spec, lo), k1 = table_value(spec, hi);
        double w = hi - lo;
        if (k0 * k1 >= 0.0) {
          total += w * std::abs(k0 + k1) / 2.0;
        } else {
          double root = w * std::abs(k0) / (std::abs(k0) + std::abs(k1));
          total += root * std::abs(k0) / 2.0 + (w - root) * std::abs(k1) / 2.0;
        }
        lo = hi;
      }
      return total;
    }
    default:
      break;
  }
  return 0.0;
}

namespace detail {

CellWeights difference_cell_weights(const KernelSpec& spec, double h, std::size_t cells) {
  if (!spec.is_difference()) throw std::invalid_argument("difference_cell_weights needs a difference kernel");
  CellWeights w;
  w.m0.resize(cells);
  w.m1.resize(cells);
  for (std::size_t d = 0; d < cells; ++d) {
    double s0 = static_cast<double>(d) * h;
    Moments o = offset_moments(spec, s0, s0 + h);
    w.m0[d] = o.m0;
    w.m1[d] = o.m1;
  }
  return w;
}

Moments local_cell_moments(const KernelSpec& spec, double x, double lo, double hi, Branch branch) {
  if (!(lo < hi)) throw std::invalid_argument("local_cell_moments requires lo < hi");
  const double len = hi - lo;
  if (spec.is_difference()) {
    if (branch == Branch::Forward) {
      // s = x - t runs backwards over the cell: theta = 1 - (s - s0)/len
      double s0 = std::max(0.0, x - hi);
      Moments o = offset_moments(spec, s0, s0 + len);
      return {o.m0, o.m0 - o.m1};
    }
    double s0 = std::max(0.0, lo - x);
    return offset_moments(spec, s0, s0 + len);
  }
  if (branch == Branch::Forward) {
    auto kb = [&](double t) { return eval_kernel(spec, x, t); };
    auto reg = [&](double t) { return kernel_regular_part(spec, x, t); };
    return numeric_cell(kb, reg, spec.alpha, lo, hi, singular_side(spec, x, lo, hi));
  }
  auto kb = [&](double t) { return eval_kernel(spec, t, x); };
  auto reg = [&](double t) { return kernel_regular_part(spec, t, x); };
  return numeric_cell(kb, reg, spec.alpha, lo, hi, singular_side(spec, x, lo, hi));
}

}  // namespace detail

}  // namespace fracvar
