#ifndef STABKIT_CONTROLLERS_HPP
#define STABKIT_CONTROLLERS_HPP

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "stabkit/core.hpp"
#include "stabkit/fields.hpp"
#include "stabkit/ode.hpp"
#include "stabkit/system.hpp"
#include "stabkit/systems.hpp"

namespace stabkit {

/// A plant in closed loop with an adaptive controller, available both in the
/// estimate coordinates (y, theta_hat) and the error coordinates (y, z) with
/// z = theta_hat - theta, i.e. x_error = x_estimate - offset.
struct ClosedLoop {
  DynamicalSystem estimate_form;
  DynamicalSystem error_form;
  Vector offset;
  /// Control input u evaluated on an estimate-form state.
  std::function<double(const Vector&)> control;
  /// Lyapunov function in error coordinates, for monitoring.
  std::function<double(const Vector&)> lyapunov;

  Vector to_error(const Vector& x) const {
    require_dim(x, offset.size(), "estimate-form state");
    Vector z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] - offset[i];
    return z;
  }

  Vector to_estimate(const Vector& x) const {
    require_dim(x, offset.size(), "error-form state");
    Vector e(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) e[i] = x[i] + offset[i];
    return e;
  }

  /// u(t) at every stored sample of an estimate-form trajectory.
  std::vector<double> control_signal(const Trajectory& tr) const {
    std::vector<double> u;
    u.reserve(tr.size());
    for (const auto& x : tr.states) u.push_back(control(x));
    return u;
  }
};

/// Which gain multiplies the update law: the inverse gain (estimate update
/// Gamma^{-1} grad P g phi, Lyapunov weight Gamma) or the gain itself
/// (update Gamma grad P g phi, Lyapunov weight Gamma^{-1}).
enum class UpdateGainConvention { inverse_gamma, gamma };

struct MatchingPlant {
  std::size_t n = 1;  // plant state dimension
  std::size_t p = 1;  // number of unknown parameters
  std::function<Vector(const Vector&)> f;    // drift, R^n -> R^n
  std::function<Vector(const Vector&)> g;    // input direction, R^n -> R^n
  std::function<Vector(const Vector&)> phi;  // regressor, R^n -> R^p
};

/// Certainty-equivalence adaptive loop for plants satisfying the matching
/// condition: u = k(y) - phi(y)' theta_hat with gradient update law.
inline ClosedLoop make_matching_condition_loop(const MatchingPlant& plant, const ScalarField& P,
                                               std::function<double(const Vector&)> k_law,
                                               const Eigen::MatrixXd& Gamma, const Vector& theta,
                                               UpdateGainConvention convention = UpdateGainConvention::inverse_gamma) {
  const std::size_t n = plant.n, p = plant.p;
  if (n == 0 || p == 0) throw DimensionError("matching loop: dimensions must be positive");
  if (!plant.f || !plant.g || !plant.phi || !k_law) throw ParameterError("matching loop: f, g, phi, k are required");
  if (P.dim() != n) throw DimensionError("matching loop: P must be a field on the plant state");
  require_dim(theta, p, "matching loop parameter vector");
  if (Gamma.rows() != static_cast<Eigen::Index>(p) || Gamma.cols() != static_cast<Eigen::Index>(p))
    throw DimensionError("matching loop: Gamma must be p x p");
  if (!Gamma.isApprox(Gamma.transpose(), 1e-12)) throw ParameterError("matching loop: Gamma must be symmetric");
  const Eigen::LLT<Eigen::MatrixXd> llt(Gamma);
  if (llt.info() != Eigen::Success) throw ParameterError("matching loop: Gamma must be positive definite");
  const Eigen::MatrixXd Gamma_inv = llt.solve(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p)));
  const bool inverse = convention == UpdateGainConvention::inverse_gamma;
  const Eigen::MatrixXd update_gain = inverse ? Gamma_inv : Gamma;
  const Eigen::MatrixXd weight = inverse ? Gamma : Gamma_inv;

  // Shared pieces: plant right-hand side for a given parameter error and the update direction.
  auto plant_rhs = [plant, k_law, n, p](const Vector& y, const Vector& z) {
    const Vector fy = plant.f(y), gy = plant.g(y), ph = plant.phi(y);
    double scalar = k_law(y);
    for (std::size_t i = 0; i < p; ++i) scalar -= ph[i] * z[i];
    Vector out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = fy[i] + gy[i] * scalar;
    return out;
  };
  auto update = [plant, P, update_gain, n, p](const Vector& y) {
    const Vector gp = P.gradient(y), gy = plant.g(y), ph = plant.phi(y);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += gp[i] * gy[i];
    Eigen::VectorXd v(static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < p; ++i) v[static_cast<Eigen::Index>(i)] = s * ph[i];
    const Eigen::VectorXd r = update_gain * v;
    return Vector(r.data(), r.data() + r.size());
  };

  auto split = [n](const Vector& x) {
    return std::pair<Vector, Vector>{Vector(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n)),
                                     Vector(x.begin() + static_cast<std::ptrdiff_t>(n), x.end())};
  };

  ParameterSet params;
  for (std::size_t i = 0; i < p; ++i) params.set("theta" + std::to_string(i + 1), theta[i]);

  DynamicalSystem::Spec err;
  err.id = "loop-matching-error";
  err.name = "matching-condition adaptive loop (error coordinates)";
  err.state_dim = n + p;
  err.output_dim = n;
  err.params = params;
  err.field = [plant_rhs, update, split](const Vector& x, const Vector&) {
    auto [y, z] = split(x);
    Vector out = plant_rhs(y, z);
    const Vector u = update(y);
    out.insert(out.end(), u.begin(), u.end());
    return out;
  };
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  err.output = project(idx);

  DynamicalSystem::Spec est = err;
  est.id = "loop-matching";
  est.name = "matching-condition adaptive loop";
  est.field = [plant_rhs, update, split, theta, p](const Vector& x, const Vector&) {
    auto [y, th] = split(x);
    Vector z(p);
    for (std::size_t i = 0; i < p; ++i) z[i] = th[i] - theta[i];
    Vector out = plant_rhs(y, z);
    const Vector u = update(y);
    out.insert(out.end(), u.begin(), u.end());
    return out;
  };

  Vector offset(n + p, 0.0);
  for (std::size_t i = 0; i < p; ++i) offset[n + i] = theta[i];

  ClosedLoop loop{DynamicalSystem(std::move(est)), DynamicalSystem(std::move(err)), offset, {}, {}};
  loop.control = [plant, k_law, split](const Vector& x) {
    auto [y, th] = split(x);
    const Vector ph = plant.phi(y);
    double u = k_law(y);
    for (std::size_t i = 0; i < ph.size(); ++i) u -= ph[i] * th[i];
    return u;
  };
  loop.lyapunov = [P, weight, split, p](const Vector& x) {
    auto [y, z] = split(x);
    Eigen::Map<const Eigen::VectorXd> zv(z.data(), static_cast<Eigen::Index>(p));
    return P(y) + 0.5 * zv.dot(weight * zv);
  };
  return loop;
}

/// Scalar instance: f = 0, g = 1, phi(y) = y, P = y^2/2, k(y) = -c y - q y^3.
inline ClosedLoop make_scalar_matching_loop(double theta, double c, double q, double gamma,
                                            UpdateGainConvention convention) {
  if (!(c > 0.0) || !(gamma > 0.0) || !(q >= 0.0)) throw ParameterError("scalar matching loop: need c, Gamma > 0, q >= 0");
  MatchingPlant plant;
  plant.f = [](const Vector&) { return Vector{0.0}; };
  plant.g = [](const Vector&) { return Vector{1.0}; };
  plant.phi = [](const Vector& y) { return Vector{y[0]}; };
  const auto P = ScalarField(
      "P", 1, [](const Vector& y) { return 0.5 * y[0] * y[0]; }, [](const Vector& y) { return Vector{y[0]}; });
  Eigen::MatrixXd G(1, 1);
  G(0, 0) = gamma;
  return make_matching_condition_loop(plant, P, [c, q](const Vector& y) { return -c * y[0] - q * y[0] * y[0] * y[0]; },
                                      G, {theta}, convention);
}

namespace detail {

inline void require_loop_gains(double c, double gamma, double q, const char* what) {
  if (!(c > 0.0) || !(gamma > 0.0)) throw ParameterError(std::string(what) + ": c and Gamma must be > 0");
  if (!(q >= 0.0)) throw ParameterError(std::string(what) + ": q must be >= 0");
}

}  // namespace detail

/// Plant y' = theta y + u + d with u = -c y - theta_hat y - q y^3 and
/// theta_hat' = Gamma y^2 - leak theta_hat (leak = 0 for the pure integrator).
inline ClosedLoop make_adaptive_gain_loop(double theta, double c, double gamma, double q, double leak,
                                          std::string id, std::string error_id, std::string name) {
  auto control = [c, q](const Vector& x) { return -c * x[0] - x[1] * x[0] - q * x[0] * x[0] * x[0]; };

  DynamicalSystem::Spec est;
  est.id = std::move(id);
  est.name = name;
  est.state_dim = 2;
  est.disturbance_dim = 1;
  est.output_dim = 1;
  est.params = {{"theta", theta}, {"c", c}, {"Gamma", gamma}, {"q", q}, {"sigma", leak}};
  est.field = [theta, gamma, leak, control](const Vector& x, const Vector& d) {
    const double y = x[0];
    return Vector{theta * y + control(x) + d[0], gamma * y * y - leak * x[1]};
  };
  est.output = project({0});

  DynamicalSystem::Spec err = est;
  err.id = std::move(error_id);
  err.name = name + " (error coordinates)";
  err.field = [theta, c, gamma, q, leak](const Vector& x, const Vector& d) {
    const double y = x[0], z = x[1];
    return Vector{-c * y - z * y - q * y * y * y + d[0], gamma * y * y - leak * z - leak * theta};
  };
  // With leakage the error-form origin is not an equilibrium: z' = -leak theta there.
  err.check_origin = leak == 0.0 || theta == 0.0;

  ClosedLoop loop{DynamicalSystem(std::move(est)), DynamicalSystem(std::move(err)), Vector{0.0, theta}, control, {}};
  loop.lyapunov = [gamma](const Vector& x) { return 0.5 * x[0] * x[0] + x[1] * x[1] / (2.0 * gamma); };
  return loop;
}

/// Adaptive loop with update theta_hat' = Gamma y^2.
inline ClosedLoop make_high_gain_loop(double theta, double c, double gamma, double q) {
  detail::require_loop_gains(c, gamma, q, "high-gain loop");
  return make_adaptive_gain_loop(theta, c, gamma, q, 0.0, "loop-highgain", "eq126", "adaptive high-gain loop");
}

/// Adaptive loop with leakage: theta_hat' = Gamma y^2 - sigma theta_hat.
inline ClosedLoop make_sigma_mod_loop(double theta, double c, double gamma, double q, double sigma) {
  detail::require_loop_gains(c, gamma, q, "sigma-modification loop");
  if (!(sigma > 0.0)) throw ParameterError("sigma-modification loop: sigma must be > 0");
  return make_adaptive_gain_loop(theta, c, gamma, q, sigma, "loop-sigma", "eq129",
                                 "adaptive loop with sigma-modification");
}

/// Equilibria (y, z) of the leakage loop in error coordinates: (0, -theta)
/// and, when theta > c, (+-sqrt(sigma (theta - c)/(Gamma + sigma q)),
/// -(Gamma c + theta sigma q)/(Gamma + sigma q)). Every point is checked to
/// satisfy |f| <= 1e-12 before being returned.
inline std::vector<Vector> sigma_mod_equilibria(double theta, double c, double gamma, double sigma, double q) {
  const ClosedLoop loop = make_sigma_mod_loop(theta, c, gamma, q, sigma);
  std::vector<Vector> pts{{0.0, -theta}};
  if (theta > c) {
    const double den = gamma + sigma * q;
    const double y = std::sqrt(sigma * (theta - c) / den);
    const double z = -(gamma * c + theta * sigma * q) / den;
    pts.push_back({y, z});
    pts.push_back({-y, z});
  }
  for (const auto& p : pts) {
    const double r = norm_inf(loop.error_form.field(p, {0.0}));
    if (r > 1e-12)
      throw ParameterError("sigma-modification equilibrium candidate " + to_string(p) + " has residual " +
                           std::to_string(r));
  }
  return pts;
}

/// The deadzone loop read as a plant xi' = theta xi + u + d under the static
/// law u = -damping(xi, z) xi and update z' = Gamma e^{-z} (xi^2/2 - eps)^+.
/// State (xi, z), disturbance channels (d, theta).
inline ClosedLoop make_deadzone_controller_loop(double a, double c, double gamma, double eps) {
  // Reuse the catalogue constructor for parameter validation.
  const DynamicalSystem reference = systems::make_deadzone_loop(a, c, gamma, eps);
  auto control = [a, c](const Vector& x) { return -systems::deadzone_damping(a, c, x[0], x[1]) * x[0]; };
  DynamicalSystem::Spec spec;
  spec.id = "loop-deadzone";
  spec.name = "deadzone adaptive controller loop";
  spec.state_dim = 2;
  spec.disturbance_dim = 2;
  spec.output_dim = 1;
  spec.params = reference.params();
  spec.field = [gamma, eps, control](const Vector& x, const Vector& dv) {
    const double xi = x[0], z = x[1];
    const double xidot = dv[1] * xi + control(x) + dv[0];
    return Vector{xidot, gamma * std::exp(-z) * positive_part(0.5 * xi * xi - eps)};
  };
  spec.output = project({0});
  DynamicalSystem sys(std::move(spec));
  ClosedLoop loop{sys, sys, Vector{0.0, 0.0}, control, {}};
  loop.lyapunov = [](const Vector& x) { return 0.5 * x[0] * x[0]; };
  return loop;
}

}  // namespace stabkit

#endif  // STABKIT_CONTROLLERS_HPP
