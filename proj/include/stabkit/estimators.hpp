#ifndef STABKIT_ESTIMATORS_HPP
#define STABKIT_ESTIMATORS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "stabkit/core.hpp"
#include "stabkit/ode.hpp"
#include "stabkit/sampling.hpp"
#include "stabkit/signal.hpp"
#include "stabkit/system.hpp"

namespace stabkit {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

enum class EstimateKind { output_envelope, settling_table, tail_limsup, gain_curve, state_bound };

inline std::string to_string(EstimateKind k) {
  switch (k) {
    case EstimateKind::output_envelope: return "output-envelope";
    case EstimateKind::settling_table: return "settling-table";
    case EstimateKind::tail_limsup: return "tail-limsup";
    case EstimateKind::gain_curve: return "gain-curve";
    case EstimateKind::state_bound: return "state-bound";
  }
  return "?";
}

/// Paired abscissa/value data of one empirical estimate. Infinite values mark
/// divergence or a cell that did not settle within the horizon.
struct StabilityEstimate {
  EstimateKind kind = EstimateKind::output_envelope;
  std::vector<double> abscissae;
  std::vector<double> values;
  /// Per-abscissa values before any monotone post-processing.
  std::vector<double> raw;
  double tail_window = 0.0;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  /// Extra scalar tag, e.g. the tolerance eps of a settling-table row.
  double parameter = 0.0;
  std::string label;
};

/// Initial-condition ensemble and disturbance family for an estimate.
struct EnsembleSpec {
  std::vector<double> radii{1.0};
  std::size_t samples_per_radius = 8;
  std::uint64_t seed = 1;
  double horizon = 10.0;
  double tail_window = 2.0;
  std::vector<Disturbance> disturbances;
  IntegratorConfig integrator = IntegratorConfig::adaptive().sampled_every(0.01);
  /// Initial conditions added to every radius regardless of their norm.
  std::vector<Vector> extra_initial_conditions;

  void validate() const {
    if (radii.empty()) throw ParameterError("ensemble: radii must be nonempty");
    for (std::size_t i = 0; i < radii.size(); ++i) {
      if (!(radii[i] > 0.0)) throw ParameterError("ensemble: radii must be > 0");
      if (i > 0 && !(radii[i] > radii[i - 1])) throw ParameterError("ensemble: radii must be increasing");
    }
    if (!(horizon > 0.0)) throw ParameterError("ensemble: horizon must be > 0");
  }
};

/// Deterministic points of the ball |x| < R: seeded Halton points of the cube
/// [-1, 1]^n kept when inside the unit ball, scaled by R, followed by the 2n
/// axis extremes +-R e_i.
inline std::vector<Vector> ball_samples(std::size_t n, double R, std::size_t count, std::uint64_t seed) {
  std::vector<Vector> out;
  const Vector shift = cranley_patterson_shift(n, seed);
  for (std::uint64_t i = 1; out.size() < count && i < 1000 * (count + 1); ++i) {
    Vector u = halton_point(i, n, shift);
    for (double& v : u) v = 2.0 * v - 1.0;
    if (norm2(u) >= 1.0) continue;
    for (double& v : u) v *= R;
    out.push_back(std::move(u));
  }
  for (std::size_t k = 0; k < n; ++k)
    for (double sign : {1.0, -1.0}) {
      Vector e(n, 0.0);
      e[k] = sign * R;
      out.push_back(std::move(e));
    }
  return out;
}

inline std::vector<Vector> ensemble_initial_conditions(const EnsembleSpec& spec, std::size_t n, double R) {
  auto ics = ball_samples(n, R, spec.samples_per_radius, spec.seed);
  ics.insert(ics.end(), spec.extra_initial_conditions.begin(), spec.extra_initial_conditions.end());
  return ics;
}

inline std::vector<Disturbance> ensemble_disturbances(const EnsembleSpec& spec, const DynamicalSystem& sys) {
  if (spec.disturbances.empty()) return {Disturbance::zero(sys.disturbance_dim())};
  return spec.disturbances;
}

inline double max_output_norm(const Trajectory& tr) {
  if (tr.diverged) return infinity;
  double m = 0.0;
  for (const auto& y : tr.outputs) m = std::max(m, norm2(y));
  return m;
}

inline double max_state_norm(const Trajectory& tr) {
  if (tr.diverged) return infinity;
  double m = 0.0;
  for (const auto& x : tr.states) m = std::max(m, norm2(x));
  return m;
}

/// Per radius R: max over sampled x0 in B_R and t in [0, horizon] of |y(t)|,
/// followed by a running max over R.
inline StabilityEstimate estimate_output_envelope(const DynamicalSystem& sys, const EnsembleSpec& spec) {
  spec.validate();
  StabilityEstimate est;
  est.kind = EstimateKind::output_envelope;
  est.horizon = spec.horizon;
  est.seed = spec.seed;
  const auto family = ensemble_disturbances(spec, sys);
  double running = 0.0;
  for (double R : spec.radii) {
    double m = 0.0;
    for (const auto& x0 : ensemble_initial_conditions(spec, sys.state_dim(), R))
      for (const auto& d : family) m = std::max(m, max_output_norm(integrate(sys, x0, d, spec.horizon, spec.integrator)));
    est.raw.push_back(m);
    running = std::max(running, m);
    est.abscissae.push_back(R);
    est.values.push_back(running);
  }
  return est;
}

/// Last time |y(t)| > eps, with the crossing located by linear interpolation
/// between stored samples. 0 if |y| never exceeds eps; infinite if |y| still
/// exceeds eps at the final sample or the run diverged.
inline double last_exceedance_time(const Trajectory& tr, double eps) {
  if (tr.diverged) return infinity;
  const auto y = tr.output_norms();
  std::size_t k = y.size();
  for (std::size_t i = y.size(); i-- > 0;)
    if (y[i] > eps) {
      k = i;
      break;
    }
  if (k == y.size()) return 0.0;
  if (k + 1 == y.size()) return infinity;
  const double w = (y[k] - eps) / (y[k] - y[k + 1]);
  return tr.times[k] + w * (tr.times[k + 1] - tr.times[k]);
}

/// One row per eps: empirical settling time T(eps, R) over the ensemble.
inline std::vector<StabilityEstimate> estimate_settling_table(const DynamicalSystem& sys, const EnsembleSpec& spec,
                                                              const std::vector<double>& eps_levels) {
  spec.validate();
  if (eps_levels.empty()) throw ParameterError("settling table: eps levels must be nonempty");
  for (double e : eps_levels)
    if (!(e > 0.0)) throw ParameterError("settling table: eps levels must be > 0");
  const auto family = ensemble_disturbances(spec, sys);
  std::vector<StabilityEstimate> rows(eps_levels.size());
  for (std::size_t j = 0; j < eps_levels.size(); ++j) {
    rows[j].kind = EstimateKind::settling_table;
    rows[j].horizon = spec.horizon;
    rows[j].seed = spec.seed;
    rows[j].parameter = eps_levels[j];
  }
  for (double R : spec.radii) {
    std::vector<double> worst(eps_levels.size(), 0.0);
    for (const auto& x0 : ensemble_initial_conditions(spec, sys.state_dim(), R))
      for (const auto& d : family) {
        const auto tr = integrate(sys, x0, d, spec.horizon, spec.integrator);
        for (std::size_t j = 0; j < eps_levels.size(); ++j)
          worst[j] = std::max(worst[j], last_exceedance_time(tr, eps_levels[j]));
      }
    for (std::size_t j = 0; j < eps_levels.size(); ++j) {
      rows[j].abscissae.push_back(R);
      rows[j].values.push_back(worst[j]);
      rows[j].raw.push_back(worst[j]);
    }
  }
  return rows;
}

/// Max of |y| over the final `window` seconds; an upper proxy for the limsup
/// that is meaningful once transients have died out.
inline double tail_limsup(const Trajectory& tr, double window) {
  if (!(window > 0.0)) throw ParameterError("tail limsup: window must be > 0");
  if (tr.diverged) return infinity;
  const double T = tr.final_time();
  if (T < 2.0 * window) throw ParameterError("tail limsup: horizon must be at least twice the tail window");
  double m = 0.0;
  for (std::size_t i = 0; i < tr.size(); ++i)
    if (tr.times[i] >= T - window) m = std::max(m, norm2(tr.outputs[i]));
  return m;
}

struct TailCheck {
  double value = 0.0;           // tail max at the horizon
  double doubled = 0.0;         // tail max at twice the horizon
  double increase() const { return doubled - value; }
};

/// Tail proxy at the horizon and at twice the horizon, same window.
inline TailCheck tail_limsup_doubling(const DynamicalSystem& sys, const Vector& x0, const Disturbance& d,
                                      double horizon, double window, const IntegratorConfig& cfg) {
  TailCheck c;
  c.value = tail_limsup(integrate(sys, x0, d, horizon, cfg), window);
  c.doubled = tail_limsup(integrate(sys, x0, d, 2.0 * horizon, cfg), window);
  return c;
}

/// Ensemble tail proxy: max over members of the tail max.
inline double estimate_tail_limsup(const DynamicalSystem& sys, const EnsembleSpec& spec) {
  spec.validate();
  double m = 0.0;
  for (double R : spec.radii)
    for (const auto& x0 : ensemble_initial_conditions(spec, sys.state_dim(), R))
      for (const auto& d : ensemble_disturbances(spec, sys))
        m = std::max(m, tail_limsup(integrate(sys, x0, d, spec.horizon, spec.integrator), spec.tail_window));
  return m;
}

/// Disturbances of amplitude s on one channel: constant +s, constant -s and
/// s sin(omega t). Other channels keep the corresponding channel of `base`.
inline std::vector<Disturbance> amplitude_family(const Disturbance& base, std::size_t channel, double s,
                                                 double omega = 1.0) {
  if (channel >= base.dim()) throw DimensionError("amplitude family: channel out of range");
  std::vector<Disturbance> out;
  for (const Signal& sig : {Signal::constant(s), Signal::constant(-s), Signal::sinusoid(s, omega)}) {
    auto ch = base.channels();
    ch[channel] = sig;
    out.emplace_back(std::move(ch));
  }
  return out;
}

struct GainCurveSpec {
  std::vector<double> amplitudes{0.0, 0.5, 1.0};
  std::size_t channel = 0;
  double omega = 1.0;
  /// Values of the non-probed channels (defaults to zero).
  Disturbance base;
};

/// Per amplitude s: max over the amplitude family and the ensemble's initial
/// conditions of the tail proxy of |y|. A lower bound on the true gain.
inline StabilityEstimate estimate_gain_curve(const DynamicalSystem& sys, const EnsembleSpec& spec,
                                             const GainCurveSpec& gain) {
  spec.validate();
  if (sys.disturbance_dim() == 0) throw ParameterError("gain curve: system has no disturbance input");
  const Disturbance base = gain.base.dim() == 0 ? Disturbance::zero(sys.disturbance_dim()) : gain.base;
  StabilityEstimate est;
  est.kind = EstimateKind::gain_curve;
  est.horizon = spec.horizon;
  est.tail_window = spec.tail_window;
  est.seed = spec.seed;
  for (double s : gain.amplitudes) {
    if (!(s >= 0.0)) throw ParameterError("gain curve: amplitudes must be >= 0");
    double m = 0.0;
    for (double R : spec.radii)
      for (const auto& x0 : ensemble_initial_conditions(spec, sys.state_dim(), R))
        for (const auto& d : amplitude_family(base, gain.channel, s, gain.omega))
          m = std::max(m, tail_limsup(integrate(sys, x0, d, spec.horizon, spec.integrator), spec.tail_window));
    est.abscissae.push_back(s);
    est.values.push_back(m);
    est.raw.push_back(m);
  }
  return est;
}

/// sup_t |x(t)| indexed by (radius, amplitude).
struct StateBoundTable {
  std::vector<double> radii;
  std::vector<double> amplitudes;
  std::vector<std::vector<double>> values;  // values[radius][amplitude]

  bool all_finite() const {
    for (const auto& row : values)
      for (double v : row)
        if (!std::isfinite(v)) return false;
    return true;
  }

  /// One estimate per amplitude with the radius as abscissa.
  std::vector<StabilityEstimate> estimates(const EnsembleSpec& spec) const {
    std::vector<StabilityEstimate> out;
    for (std::size_t j = 0; j < amplitudes.size(); ++j) {
      StabilityEstimate e;
      e.kind = EstimateKind::state_bound;
      e.horizon = spec.horizon;
      e.seed = spec.seed;
      e.parameter = amplitudes[j];
      e.abscissae = radii;
      for (const auto& row : values) e.values.push_back(row[j]);
      e.raw = e.values;
      out.push_back(std::move(e));
    }
    return out;
  }
};

inline StateBoundTable estimate_state_bound(const DynamicalSystem& sys, const EnsembleSpec& spec,
                                            const GainCurveSpec& amp) {
  spec.validate();
  StateBoundTable t;
  t.radii = spec.radii;
  t.amplitudes = amp.amplitudes;
  const bool disturbed = sys.disturbance_dim() > 0;
  const Disturbance base =
      amp.base.dim() == 0 ? Disturbance::zero(sys.disturbance_dim()) : amp.base;
  for (double R : spec.radii) {
    std::vector<double> row;
    for (double s : amp.amplitudes) {
      const auto family = disturbed ? amplitude_family(base, amp.channel, s, amp.omega)
                                    : std::vector<Disturbance>{Disturbance::zero(0)};
      double m = 0.0;
      for (const auto& x0 : ensemble_initial_conditions(spec, sys.state_dim(), R))
        for (const auto& d : family) m = std::max(m, max_state_norm(integrate(sys, x0, d, spec.horizon, spec.integrator)));
      row.push_back(m);
    }
    t.values.push_back(std::move(row));
  }
  return t;
}

enum class DriftVerdict { drifting, settled, fluctuating };

inline std::string to_string(DriftVerdict v) {
  switch (v) {
    case DriftVerdict::drifting: return "drifting";
    case DriftVerdict::settled: return "settled";
    case DriftVerdict::fluctuating: return "fluctuating";
  }
  return "?";
}

struct DriftReport {
  DriftVerdict verdict = DriftVerdict::settled;
  double delta_early = 0.0;  // value(t2) - value(t1)
  double delta_late = 0.0;   // value(t3) - value(t2)
  bool monotone = false;     // non-decreasing over [t1, t3] within tolerance
};

/// Classifies the late growth of one state component (an adaptive gain).
/// Drifting: non-decreasing on [t1, t3] and value(t3) - value(t2) >= drift_min.
/// Settled: value(t3) - value(t2) < drift_min. Anything else (large late
/// change without monotone growth) is reported as fluctuating.
inline DriftReport detect_gain_drift(const Trajectory& tr, std::size_t component, double t1, double t2, double t3,
                                     double drift_min = 1e-3, double mono_tol = 1e-9) {
  if (!(t1 < t2 && t2 < t3)) throw ParameterError("drift detection: need t1 < t2 < t3");
  if (t3 > tr.final_time() + 1e-12) throw ParameterError("drift detection: windows exceed the trajectory horizon");
  if (component >= tr.states.front().size()) throw DimensionError("drift detection: component out of range");
  DriftReport r;
  const double v1 = tr.state_at(t1)[component], v2 = tr.state_at(t2)[component], v3 = tr.state_at(t3)[component];
  r.delta_early = v2 - v1;
  r.delta_late = v3 - v2;
  r.monotone = true;
  double prev = v1;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    if (tr.times[i] <= t1 || tr.times[i] > t3) continue;
    const double v = tr.states[i][component];
    if (v < prev - mono_tol) r.monotone = false;
    prev = v;
  }
  if (r.delta_late < drift_min) r.verdict = DriftVerdict::settled;
  else if (r.monotone) r.verdict = DriftVerdict::drifting;
  else r.verdict = DriftVerdict::fluctuating;
  return r;
}

}  // namespace stabkit

#endif  // STABKIT_ESTIMATORS_HPP
