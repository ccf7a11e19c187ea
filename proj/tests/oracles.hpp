#ifndef STABKIT_TESTS_ORACLES_HPP
#define STABKIT_TESTS_ORACLES_HPP

// Reference values computed without the library, for comparison in tests.

#include <array>
#include <cmath>
#include <functional>

namespace oracle {

/// Adaptive scalar loop xi' = -(z + k) xi, z' = xi^2, written with cosh/sinh.
inline double adaptive_scalar_xi(double xi0, double z0, double k, double t) {
  const double K = std::sqrt(xi0 * xi0 + (z0 + k) * (z0 + k));
  return K * xi0 / (K * std::cosh(K * t) + (z0 + k) * std::sinh(K * t));
}

/// z(t) by composite Simpson quadrature of z' = xi^2.
inline double adaptive_scalar_z(double xi0, double z0, double k, double t, int steps = 20000) {
  double z = z0, h = t / steps;
  for (int i = 0; i < steps; ++i) {
    const double a = adaptive_scalar_xi(xi0, z0, k, i * h), m = adaptive_scalar_xi(xi0, z0, k, (i + 0.5) * h),
                 b = adaptive_scalar_xi(xi0, z0, k, (i + 1) * h);
    z += h / 6.0 * (a * a + 4.0 * m * m + b * b);
  }
  return z;
}

/// Maximizer of f on [a, b] by golden-section search (f unimodal there).
inline double golden_argmax(const std::function<double(double)>& f, double a, double b, double tol = 1e-12) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  while (b - a > tol) {
    if (f(c) > f(d)) b = d;
    else a = c;
    c = b - r * (b - a);
    d = a + r * (b - a);
  }
  return 0.5 * (a + b);
}

/// Energy of two unit masses joined by a linear spring, state (z1, z2, v1, v2).
inline double oscillator_energy(const std::array<double, 4>& x) {
  const double s = x[0] - x[1];
  return 0.5 * (x[2] * x[2] + x[3] * x[3]) + 0.5 * s * s;
}

/// Newton's method in the plane with a central-difference Jacobian.
inline std::array<double, 2> newton2(const std::function<std::array<double, 2>(double, double)>& F,
                                     std::array<double, 2> x, int iters = 50) {
  for (int it = 0; it < iters; ++it) {
    const auto f = F(x[0], x[1]);
    const double h = 1e-7;
    const auto fxp = F(x[0] + h, x[1]), fxm = F(x[0] - h, x[1]);
    const auto fyp = F(x[0], x[1] + h), fym = F(x[0], x[1] - h);
    const double a = (fxp[0] - fxm[0]) / (2 * h), b = (fyp[0] - fym[0]) / (2 * h);
    const double c = (fxp[1] - fxm[1]) / (2 * h), d = (fyp[1] - fym[1]) / (2 * h);
    const double det = a * d - b * c;
    x[0] -= (d * f[0] - b * f[1]) / det;
    x[1] -= (-c * f[0] + a * f[1]) / det;
  }
  return x;
}

/// Minimum over z of z + k + sigma (theta + z)^2 (sigma > 0), by calculus.
inline double ugaos_gain_minimum(double k, double sigma, double theta) { return k - theta - 1.0 / (4.0 * sigma); }

}  // namespace oracle

#endif  // STABKIT_TESTS_ORACLES_HPP
