#ifndef STABKIT_ODE_HPP
#define STABKIT_ODE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "stabkit/core.hpp"
#include "stabkit/signal.hpp"
#include "stabkit/system.hpp"

namespace stabkit {

enum class Method { rk4_fixed, rk45_adaptive };

struct IntegratorConfig {
  Method method = Method::rk45_adaptive;
  /// Fixed step for rk4 (upper bound; segments are split evenly).
  double step = 1e-3;
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
  double min_step = 1e-13;
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 20'000'000;
  /// State-norm bound beyond which a run is flagged as diverged and stopped.
  double blow_up = 1e12;
  /// Spacing of the dense output grid (0 = internal steps only). Grid points
  /// are hit exactly by the integrator.
  double sample_interval = 0.0;
  /// Extra times to be hit exactly, in addition to the regular grid.
  std::vector<double> sample_times;

  static IntegratorConfig fixed(double h) {
    IntegratorConfig c;
    c.method = Method::rk4_fixed;
    c.step = h;
    return c;
  }
  static IntegratorConfig adaptive(double abs_tol = 1e-9, double rel_tol = 1e-9) {
    IntegratorConfig c;
    c.abs_tol = abs_tol;
    c.rel_tol = rel_tol;
    return c;
  }
  IntegratorConfig& sampled_every(double dt) {
    sample_interval = dt;
    return *this;
  }

  void validate() const {
    if (method == Method::rk4_fixed && !(step > 0.0)) throw ParameterError("integrator: step must be > 0");
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw ParameterError("integrator: tolerances must be > 0");
    if (!(min_step > 0.0) || !(max_step > 0.0) || min_step > max_step)
      throw ParameterError("integrator: need 0 < min_step <= max_step");
    if (max_steps == 0) throw ParameterError("integrator: max_steps must be positive");
    if (!(blow_up > 0.0)) throw ParameterError("integrator: blow-up bound must be positive");
    if (sample_interval < 0.0) throw ParameterError("integrator: sample interval must be >= 0");
  }
};

/// Result of one integration run: times[0] = 0 and states[0] = x0 exactly.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<Vector> outputs;
  bool diverged = false;

  std::size_t size() const noexcept { return times.size(); }
  double final_time() const { return times.back(); }
  const Vector& final_state() const { return states.back(); }

  std::vector<double> component(std::size_t i) const {
    std::vector<double> c(states.size());
    for (std::size_t k = 0; k < states.size(); ++k) c[k] = states[k][i];
    return c;
  }

  std::vector<double> output_norms() const {
    std::vector<double> c(outputs.size());
    for (std::size_t k = 0; k < outputs.size(); ++k) c[k] = norm2(outputs[k]);
    return c;
  }

  /// Linear interpolation between stored samples; t is clamped to the covered range.
  Vector state_at(double t) const {
    if (t <= times.front()) return states.front();
    if (t >= times.back()) return states.back();
    auto it = std::lower_bound(times.begin(), times.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - times.begin());
    if (times[i] == t) return states[i];
    const double w = (t - times[i - 1]) / (times[i] - times[i - 1]);
    Vector x(states[i].size());
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = (1.0 - w) * states[i - 1][j] + w * states[i][j];
    return x;
  }

  /// The stored samples that lie on the grid 0, dt, 2 dt, ... (plus the final
  /// sample). With `sample_interval = dt` these are exactly the grid points.
  Trajectory on_grid(double dt) const {
    if (!(dt > 0.0)) throw ParameterError("on_grid: dt must be > 0");
    Trajectory g;
    g.diverged = diverged;
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double k = std::round(times[i] / dt);
      if (k * dt == times[i] || i + 1 == times.size()) {
        g.times.push_back(times[i]);
        g.states.push_back(states[i]);
        if (i < outputs.size()) g.outputs.push_back(outputs[i]);
      }
    }
    return g;
  }
};

namespace detail {

// Dormand-Prince 5(4) tableau.
struct DormandPrince {
  static constexpr std::array<double, 7> c{0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

class Stepper {
 public:
  Stepper(const DynamicalSystem& sys, const Disturbance& d) : sys_(sys), d_(d) {}

  // Disturbance evaluation is clamped strictly below `limit` so that a step
  // ending on a jump never sees the post-jump level.
  void set_limit(double limit) { limit_ = limit; }

  Vector f(double t, const Vector& x) const {
    double te = t;
    if (te >= limit_) te = std::nextafter(limit_, -INFINITY);
    if (te < 0.0) te = 0.0;
    return sys_.field(x, d_(te));
  }

 private:
  const DynamicalSystem& sys_;
  const Disturbance& d_;
  double limit_ = INFINITY;
};

inline Vector axpy(const Vector& x, double h, std::initializer_list<std::pair<double, const Vector*>> terms) {
  Vector y = x;
  for (const auto& [coef, k] : terms) {
    if (coef == 0.0) continue;
    const double hc = h * coef;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += hc * (*k)[i];
  }
  return y;
}

inline Vector rk4_step(const Stepper& s, double t, const Vector& x, double h) {
  const Vector k1 = s.f(t, x);
  const Vector k2 = s.f(t + h / 2, axpy(x, h, {{0.5, &k1}}));
  const Vector k3 = s.f(t + h / 2, axpy(x, h, {{0.5, &k2}}));
  const Vector k4 = s.f(t + h, axpy(x, h, {{1.0, &k3}}));
  return axpy(x, h, {{1.0 / 6, &k1}, {1.0 / 3, &k2}, {1.0 / 3, &k3}, {1.0 / 6, &k4}});
}

inline double scaled_rms(const Vector& v, const Vector& x, const IntegratorConfig& cfg) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double sc = cfg.abs_tol + cfg.rel_tol * std::abs(x[i]);
    s += (v[i] / sc) * (v[i] / sc);
  }
  return std::sqrt(s / static_cast<double>(v.size()));
}

// Starting step heuristic (Hairer, Norsett & Wanner, Sec. II.4).
inline double initial_step(const Stepper& s, double t, const Vector& x, const Vector& f0,
                           const IntegratorConfig& cfg, double span) {
  const double d0 = scaled_rms(x, x, cfg);
  const double d1 = scaled_rms(f0, x, cfg);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, span);
  const Vector x1 = axpy(x, h0, {{1.0, &f0}});
  const Vector f1 = s.f(t + h0, x1);
  Vector df(f0.size());
  for (std::size_t i = 0; i < df.size(); ++i) df[i] = f1[i] - f0[i];
  const double d2 = scaled_rms(df, x, cfg) / h0;
  const double dm = std::max(d1, d2);
  const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 5.0);
  return std::clamp(std::min(100.0 * h0, h1), cfg.min_step, cfg.max_step);
}

}  // namespace detail

/// Integrates x' = f(x, d(t)) on [0, horizon].
///
/// Steps are split at disturbance breakpoints and at every dense-output grid
/// point, so both are hit exactly. If |x| exceeds `cfg.blow_up` the run stops
/// at that step with `diverged` set.
inline Trajectory integrate(const DynamicalSystem& sys, const Vector& x0, const Disturbance& d,
                            double horizon, const IntegratorConfig& cfg = {}) {
  cfg.validate();
  require_dim(x0, sys.state_dim(), "initial condition");
  if (d.dim() != sys.disturbance_dim()) {
    throw DimensionError("disturbance: expected dimension " + std::to_string(sys.disturbance_dim()) +
                         ", got " + std::to_string(d.dim()));
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ParameterError("integrate: horizon must be positive");
  if (!all_finite(x0)) throw NonFiniteError("integrate: non-finite initial condition", x0);

  // Segment ends: breakpoints must not be straddled; grid points must be hit.
  const std::vector<double> jumps = d.breakpoints(horizon);
  std::vector<double> stops = jumps;
  if (cfg.sample_interval > 0.0) {
    const auto n = static_cast<std::size_t>(std::floor(horizon / cfg.sample_interval + 1e-9));
    for (std::size_t k = 1; k <= n; ++k) {
      const double t = static_cast<double>(k) * cfg.sample_interval;
      if (t < horizon) stops.push_back(t);
    }
  }
  for (double t : cfg.sample_times)
    if (t > 0.0 && t < horizon) stops.push_back(t);
  stops.push_back(horizon);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(x0);

  detail::Stepper stepper(sys, d);
  double t = 0.0;
  Vector x = x0;
  std::size_t attempts = 0;
  double h_target = 0.0;

  auto accept = [&](double t_new, Vector x_new) {
    t = t_new;
    if (!all_finite(x_new) || norm2(x_new) > cfg.blow_up) {
      traj.diverged = true;
      if (all_finite(x_new)) {
        traj.times.push_back(t);
        traj.states.push_back(std::move(x_new));
      }
      return false;
    }
    x = std::move(x_new);
    traj.times.push_back(t);
    traj.states.push_back(x);
    return true;
  };

  bool running = true;
  for (std::size_t si = 0; si < stops.size() && running; ++si) {
    const double seg_end = stops[si];
    const bool at_jump = std::binary_search(jumps.begin(), jumps.end(), seg_end);
    stepper.set_limit(at_jump ? seg_end : INFINITY);

    if (cfg.method == Method::rk4_fixed) {
      const double len = seg_end - t;
      const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(len / cfg.step - 1e-9)));
      const double h = len / static_cast<double>(n);
      const double t_start = t;
      for (std::size_t k = 1; k <= n; ++k) {
        if (++attempts > cfg.max_steps) throw StepLimitError("integrate: step budget exhausted");
        const double t_new = k == n ? seg_end : t_start + static_cast<double>(k) * h;
        Vector x_new = detail::rk4_step(stepper, t, x, t_new - t);
        if (!accept(t_new, std::move(x_new))) {
          running = false;
          break;
        }
      }
      continue;
    }

    using DP = detail::DormandPrince;
    Vector k1 = stepper.f(t, x);
    if (h_target == 0.0) h_target = detail::initial_step(stepper, t, x, k1, cfg, horizon);
    while (t < seg_end) {
      if (++attempts > cfg.max_steps) throw StepLimitError("integrate: step budget exhausted");
      double h = std::min(h_target, cfg.max_step);
      bool clipped = false;
      if (t + h >= seg_end || seg_end - (t + h) < 1e-12 * std::max(1.0, std::abs(seg_end))) {
        h = seg_end - t;
        clipped = true;
      }
      const Vector k2 = stepper.f(t + DP::c[1] * h, detail::axpy(x, h, {{DP::a21, &k1}}));
      const Vector k3 = stepper.f(t + DP::c[2] * h, detail::axpy(x, h, {{DP::a31, &k1}, {DP::a32, &k2}}));
      const Vector k4 = stepper.f(
          t + DP::c[3] * h, detail::axpy(x, h, {{DP::a41, &k1}, {DP::a42, &k2}, {DP::a43, &k3}}));
      const Vector k5 = stepper.f(
          t + DP::c[4] * h,
          detail::axpy(x, h, {{DP::a51, &k1}, {DP::a52, &k2}, {DP::a53, &k3}, {DP::a54, &k4}}));
      const Vector k6 = stepper.f(t + h, detail::axpy(x, h,
                                                      {{DP::a61, &k1},
                                                       {DP::a62, &k2},
                                                       {DP::a63, &k3},
                                                       {DP::a64, &k4},
                                                       {DP::a65, &k5}}));
      Vector x_new =
          detail::axpy(x, h, {{DP::b1, &k1}, {DP::b3, &k3}, {DP::b4, &k4}, {DP::b5, &k5}, {DP::b6, &k6}});
      const bool finite_new = all_finite(x_new);
      Vector k7 = finite_new ? stepper.f(t + h, x_new) : Vector(x.size(), 0.0);

      double err = INFINITY;
      if (finite_new) {
        err = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
          const double e = h * (DP::e1 * k1[i] + DP::e3 * k3[i] + DP::e4 * k4[i] + DP::e5 * k5[i] +
                                DP::e6 * k6[i] + DP::e7 * k7[i]);
          const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(x[i]), std::abs(x_new[i]));
          err = std::max(err, std::abs(e) / sc);
        }
      }

      if (err <= 1.0) {
        const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        const double suggestion = h * factor;
        h_target = clipped ? std::max(h_target, suggestion) : suggestion;
        const double t_new = clipped ? seg_end : t + h;
        if (!accept(t_new, std::move(x_new))) {
          running = false;
          break;
        }
        k1 = std::move(k7);
      } else {
        const double factor = std::isfinite(err) ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0) : 0.2;
        h_target = h * factor;
        if (h_target < cfg.min_step)
          throw StepLimitError("integrate: step size fell below min_step at t = " + std::to_string(t));
      }
    }
  }

  traj.outputs.reserve(traj.states.size());
  for (const auto& s : traj.states) traj.outputs.push_back(sys.output(s));
  return traj;
}

}  // namespace stabkit

#endif  // STABKIT_ODE_HPP
