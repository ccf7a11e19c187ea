#ifndef STABKIT_SYSTEMS_HPP
#define STABKIT_SYSTEMS_HPP

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "stabkit/core.hpp"
#include "stabkit/system.hpp"

// Catalogue of concrete systems with outputs. User-supplied nonlinearities are
// opaque callables; declared properties (sign, bound) are spot-checked on a
// coarse grid and reported through DynamicalSystem::warnings().

namespace stabkit::systems {

using Scalar1 = std::function<double(double)>;
using Scalar2 = std::function<double(double, double)>;
using Scalar3 = std::function<double(double, double, double)>;
/// Nonlinearity depending on the state and a scalar disturbance, e.g. p(x, d).
using StateInputMap = std::function<double(const Vector& x, double d)>;

namespace detail {

inline std::vector<double> probe_grid(double lo = -5.0, double hi = 5.0, int n = 21) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  return g;
}

}  // namespace detail

/// Two masses coupled by a spring force g:
/// z1' = v1, z2' = v2, v1' = -g(z1 - z2), v2' = g(z1 - z2); output (v1, v2).
inline DynamicalSystem make_oscillator_pair(Scalar1 g) {
  std::vector<std::string> warnings;
  for (double s : detail::probe_grid())
    if (s * g(s) < 0.0) {
      warnings.push_back("oscillator: s*g(s) < 0 at s = " + std::to_string(s));
      break;
    }
  DynamicalSystem::Spec spec;
  spec.id = "eq8";
  spec.name = "coupled oscillator pair";
  spec.state_dim = 4;
  spec.disturbance_dim = 0;
  spec.output_dim = 2;
  spec.field = [g](const Vector& x, const Vector&) {
    const double force = g(x[0] - x[1]);
    return Vector{x[2], x[3], -force, force};
  };
  spec.output = project({2, 3});
  spec.warnings = std::move(warnings);
  return DynamicalSystem(std::move(spec));
}

/// State (y, z, w) with bounded coupling g, |g| <= bound:
/// y' = -(1 + w^2) y + 2 z g(z, w) / (1 + z^2)^2, z' = -g(z, w) y, w' = w + |y|.
/// Output y. The w-component grows at least exponentially whenever w(0) > 0.
inline DynamicalSystem make_three_dim_gaos(Scalar2 g, double bound) {
  if (!(bound > 0.0)) throw ParameterError("three-dim GAOS system: declared bound on |g| must be > 0");
  std::vector<std::string> warnings;
  for (double z : detail::probe_grid())
    for (double w : detail::probe_grid())
      if (std::abs(g(z, w)) > bound && warnings.empty())
        warnings.push_back("three-dim GAOS system: |g| exceeds declared bound at (" + std::to_string(z) +
                           ", " + std::to_string(w) + ")");
  DynamicalSystem::Spec spec;
  spec.id = "eq20";
  spec.name = "three-dimensional GAOS system with unbounded solutions";
  spec.state_dim = 3;
  spec.output_dim = 1;
  spec.field = [g](const Vector& x, const Vector&) {
    const double y = x[0], z = x[1], w = x[2];
    const double gz = g(z, w);
    const double den = (1.0 + z * z) * (1.0 + z * z);
    return Vector{-(1.0 + w * w) * y + 2.0 * z * gz / den, -gz * y, w + std::abs(y)};
  };
  spec.output = project({0});
  spec.params = {{"R", bound}};
  spec.warnings = std::move(warnings);
  return DynamicalSystem(std::move(spec));
}

/// xi' = -(z + k + sigma (theta + z)^2) xi [+ d], z' = xi^2; output xi.
inline DynamicalSystem make_adaptive_scalar(double theta, double k, double sigma, bool disturbed) {
  if (!(k > 0.0)) throw ParameterError("adaptive scalar system: k must be > 0");
  if (!(sigma >= 0.0)) throw ParameterError("adaptive scalar system: sigma must be >= 0");
  DynamicalSystem::Spec spec;
  spec.id = disturbed ? "eq62" : "eq24";
  spec.name = disturbed ? "disturbed adaptive scalar loop" : "adaptive scalar loop";
  spec.state_dim = 2;
  spec.disturbance_dim = disturbed ? 1 : 0;
  spec.output_dim = 1;
  spec.field = [theta, k, sigma, disturbed](const Vector& x, const Vector& d) {
    const double xi = x[0], z = x[1];
    const double gain = z + k + sigma * (theta + z) * (theta + z);
    return Vector{-gain * xi + (disturbed ? d[0] : 0.0), xi * xi};
  };
  spec.output = project({0});
  spec.params = {{"theta", theta}, {"k", k}, {"sigma", sigma}};
  return DynamicalSystem(std::move(spec));
}

/// Closed-form solution of the sigma = 0 adaptive scalar loop.
///
/// With K = sqrt(xi0^2 + (k + z0)^2):
///   xi(t) = K xi0 / (K cosh(Kt) + (z0 + k) sinh(Kt)),
///   z(t)  = -k - K + 2K (z0 + k + K) e^{2Kt} / ((z0 + k + K)(e^{2Kt} - 1) + 2K).
/// Both are evaluated in a form scaled by e^{-Kt} / e^{-2Kt} so that large t
/// does not overflow.
class ClosedFormAdaptiveScalar {
 public:
  ClosedFormAdaptiveScalar(double xi0, double z0, double k) : xi0_(xi0), z0_(z0), k_(k) {
    if (!(k > 0.0)) throw ParameterError("closed form: k must be > 0");
    K_ = std::hypot(xi0, k + z0);
  }

  double xi0() const noexcept { return xi0_; }
  double z0() const noexcept { return z0_; }
  double k() const noexcept { return k_; }
  double K() const noexcept { return K_; }

  std::pair<double, double> operator()(double t) const {
    if (t == 0.0) return {xi0_, z0_};
    if (K_ == 0.0) return {0.0, z0_};  // xi0 = 0 and z0 = -k: rest point
    const double e1 = std::exp(-K_ * t);
    const double e2 = e1 * e1;
    const double m = z0_ + k_;
    const double xi = 2.0 * K_ * xi0_ * e1 / (K_ * (1.0 + e2) + m * (1.0 - e2));
    const double a = m + K_;
    const double z = -k_ - K_ + 2.0 * K_ * a / (a * (1.0 - e2) + 2.0 * K_ * e2);
    return {xi, z};
  }

  /// Time of the output peak; defined when xi0 > 0 and z0 + k < 0.
  std::optional<double> peak_time() const {
    if (!(xi0_ > 0.0 && z0_ + k_ < 0.0)) return std::nullopt;
    const double m = z0_ + k_;
    return std::log((K_ - m) / (K_ + m)) / (2.0 * K_);
  }

  /// Peak value max_t xi(t) = K; defined when xi0 > 0 and z0 + k < 0.
  std::optional<double> peak_value() const {
    if (!(xi0_ > 0.0 && z0_ + k_ < 0.0)) return std::nullopt;
    return K_;
  }

 private:
  double xi0_, z0_, k_;
  double K_ = 0.0;
};

/// x1' = p(x, d)((1 + d - x1^2) x1 + d), x2' = -q(x, d)(x2 + d); output x.
inline DynamicalSystem make_pubibs_example(StateInputMap p, StateInputMap q) {
  std::vector<std::string> warnings;
  for (double a : detail::probe_grid(-3, 3, 7))
    for (double b : detail::probe_grid(-3, 3, 7))
      for (double d : detail::probe_grid(-2, 2, 5)) {
        const Vector x{a, b};
        if ((p(x, d) < 0.0 || q(x, d) < 0.0) && warnings.empty())
          warnings.push_back("p-UBIBS example: p or q negative at sampled point");
      }
  DynamicalSystem::Spec spec;
  spec.id = "eq57";
  spec.name = "p-UBIBS example";
  spec.state_dim = 2;
  spec.disturbance_dim = 1;
  spec.output_dim = 2;
  spec.field = [p, q](const Vector& x, const Vector& dv) {
    const double d = dv[0];
    return Vector{p(x, d) * ((1.0 + d - x[0] * x[0]) * x[0] + d), -q(x, d) * (x[1] + d)};
  };
  spec.output = project({0, 1});
  spec.warnings = std::move(warnings);
  return DynamicalSystem(std::move(spec));
}

/// x1' = -x1 + b x2^m + d, x2' = -x2^m + x1 with |b| < 1 and odd m; output x.
inline DynamicalSystem make_small_gain_pair(double b, int m) {
  if (!(std::abs(b) < 1.0)) throw ParameterError("small-gain pair: need |b| < 1");
  if (m < 1 || m % 2 == 0) throw ParameterError("small-gain pair: m must be an odd positive integer");
  DynamicalSystem::Spec spec;
  spec.id = "eq73";
  spec.name = "small-gain interconnection";
  spec.state_dim = 2;
  spec.disturbance_dim = 1;
  spec.output_dim = 2;
  spec.field = [b, m](const Vector& x, const Vector& d) {
    const double x2m = std::pow(x[1], m);
    return Vector{-x[0] + b * x2m + d[0], -x2m + x[0]};
  };
  spec.output = project({0, 1});
  spec.params = {{"b", b}, {"m", static_cast<double>(m)}};
  return DynamicalSystem(std::move(spec));
}

/// Damping gain of the deadzone loop's static law:
/// c + (1 + e^z)^2 / (2c) + (1 + e^z)(1 + xi^2) / (4a).
inline double deadzone_damping(double a, double c, double xi, double z) {
  const double ez1 = 1.0 + std::exp(z);
  return c + ez1 * ez1 / (2.0 * c) + ez1 * (1.0 + xi * xi) / (4.0 * a);
}

/// Deadzone adaptive loop in state (xi, z) with disturbance channels (d, theta):
/// xi' = theta xi - damping(xi, z) xi + d, z' = Gamma e^{-z} (xi^2/2 - eps)^+; output xi.
inline DynamicalSystem make_deadzone_loop(double a, double c, double gamma, double eps) {
  if (!(a > 0.0) || !(c > 0.0) || !(gamma > 0.0) || !(eps > 0.0))
    throw ParameterError("deadzone loop: a, c, Gamma, eps must be > 0");
  DynamicalSystem::Spec spec;
  spec.id = "eq111";
  spec.name = "deadzone adaptive loop";
  spec.state_dim = 2;
  spec.disturbance_dim = 2;
  spec.output_dim = 1;
  spec.field = [a, c, gamma, eps](const Vector& x, const Vector& dv) {
    const double xi = x[0], z = x[1];
    const double d = dv[0], theta = dv[1];
    const double xidot = theta * xi - deadzone_damping(a, c, xi, z) * xi + d;
    const double zdot = gamma * std::exp(-z) * positive_part(0.5 * xi * xi - eps);
    return Vector{xidot, zdot};
  };
  spec.output = project({0});
  spec.params = {{"a", a}, {"c", c}, {"Gamma", gamma}, {"eps", eps}};
  return DynamicalSystem(std::move(spec));
}

/// xi' = 0, y' = -y p(xi, y, d) + (1 - y^2)^+ q(xi, y, d); output y.
inline DynamicalSystem make_planar_saturated(Scalar3 p, Scalar3 q) {
  std::vector<std::string> warnings;
  for (double a : detail::probe_grid(-3, 3, 7))
    for (double b : detail::probe_grid(-3, 3, 7))
      for (double d : detail::probe_grid(-2, 2, 5))
        if (!(p(a, b, d) > 0.0) && warnings.empty())
          warnings.push_back("planar saturated system: p not positive at sampled point");
  DynamicalSystem::Spec spec;
  spec.id = "eq121";
  spec.name = "planar system with saturated forcing";
  spec.state_dim = 2;
  spec.disturbance_dim = 1;
  spec.output_dim = 1;
  spec.field = [p, q](const Vector& x, const Vector& dv) {
    const double xi = x[0], y = x[1], d = dv[0];
    return Vector{0.0, -y * p(xi, y, d) + positive_part(1.0 - y * y) * q(xi, y, d)};
  };
  spec.output = project({1});
  spec.warnings = std::move(warnings);
  return DynamicalSystem(std::move(spec));
}

}  // namespace stabkit::systems

#endif  // STABKIT_SYSTEMS_HPP
