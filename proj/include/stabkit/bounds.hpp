#ifndef STABKIT_BOUNDS_HPP
#define STABKIT_BOUNDS_HPP

#include <algorithm>
#include <cmath>

#include "stabkit/core.hpp"

namespace stabkit::bounds {

/// Pointwise bound on |(y, z)(t)| for the leakage loop in error coordinates:
///   e^{-min(c,sigma) t/2} sqrt(max(Gamma, 1/Gamma)) |x0|
///   + sqrt(max(Gamma, 1)/(c min(c, sigma))) |d|_inf
///   + |theta| sqrt(sigma/(min(Gamma, 1) min(c, sigma))).
inline double sigma_mod_state(double theta, double c, double gamma, double sigma, double x0_norm, double d_sup,
                              double t) {
  if (!(c > 0.0) || !(gamma > 0.0) || !(sigma > 0.0)) throw ParameterError("sigma-mod bound: c, Gamma, sigma > 0");
  const double m = std::min(c, sigma);
  return std::exp(-m * t / 2.0) * std::sqrt(std::max(gamma, 1.0 / gamma)) * x0_norm +
         std::sqrt(std::max(gamma, 1.0) / (c * m)) * d_sup +
         std::abs(theta) * std::sqrt(sigma / (std::min(gamma, 1.0) * m));
}

/// Transient bound on |xi(t)| for the deadzone loop:
///   e^{-ct/2}|xi0| + sqrt(2a/(c(1 + e^{z0}))) (|d|_inf + (|theta|_inf - 1 - e^{z0})^+).
inline double deadzone_transient(double a, double c, double xi0, double z0, double d_sup, double theta_sup,
                                 double t) {
  if (!(a > 0.0) || !(c > 0.0)) throw ParameterError("deadzone bound: a, c > 0");
  const double ez = std::exp(z0);
  return std::exp(-c * t / 2.0) * std::abs(xi0) +
         std::sqrt(2.0 * a / (c * (1.0 + ez))) * (d_sup + positive_part(theta_sup - 1.0 - ez));
}

/// Asymptotic bound sqrt(2 eps) on |xi| for the deadzone loop.
inline double deadzone_residual(double eps) { return std::sqrt(2.0 * eps); }

/// Lower bound ln(1 + 4 i^2)/(2 sqrt 2) on the time the adaptive scalar loop
/// started at (1/i, -2) with k = 1 needs before |xi| stays below 1/2.
inline double settling_lower_bound(int i) {
  return std::log(1.0 + 4.0 * i * i) / (2.0 * std::sqrt(2.0));
}

}  // namespace stabkit::bounds

#endif  // STABKIT_BOUNDS_HPP
