#pragma once

namespace fracvar {

/// Gamma function for real arguments. Throws std::domain_error at the poles
/// (zero and negative integers).
double gamma_fn(double x);

/// log|Gamma(x)| for x > 0.
double log_gamma_fn(double x);

struct MLParams {
  double alpha;
  double beta;
};

/// Largest |z| accepted by mittag_leffler; plain series summation is not
/// trustworthy beyond it.
inline constexpr double kMittagLefflerZMax = 30.0;

/// Two-parameter Mittag-Leffler function E_{alpha,beta}(z) by direct power
/// series summation. Throws std::range_error for |z| > kMittagLefflerZMax and
/// std::invalid_argument for non-positive parameters.
double mittag_leffler(const MLParams& params, double z);

}  // namespace fracvar
