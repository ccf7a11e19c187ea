#ifndef STABKIT_SCENARIOS_HPP
#define STABKIT_SCENARIOS_HPP

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "stabkit/bounds.hpp"
#include "stabkit/certify.hpp"
#include "stabkit/config.hpp"
#include "stabkit/controllers.hpp"
#include "stabkit/estimators.hpp"
#include "stabkit/io.hpp"
#include "stabkit/plot.hpp"
#include "stabkit/registry.hpp"
#include "stabkit/systems.hpp"

namespace stabkit {

inline constexpr int summary_schema_version = 1;

struct Assertion {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ScenarioResult {
  std::string id;
  std::vector<Assertion> assertions;
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::vector<std::string> artifacts;

  bool passed() const {
    return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.passed; });
  }
};

/// Scenario parameters: declared defaults overridden by `--set` values.
/// Overrides of undeclared keys are rejected, except `param.*` where allowed.
class ScenarioParams {
 public:
  ScenarioParams(std::vector<std::pair<std::string, std::string>> defaults, const Config& overrides,
                 bool open_params = false)
      : values_(std::move(defaults)) {
    for (const auto& [k, v] : overrides.values()) {
      auto it = std::find_if(values_.begin(), values_.end(), [&](const auto& p) { return p.first == k; });
      if (it != values_.end()) it->second = v;
      else if (open_params && k.rfind("param.", 0) == 0) values_.emplace_back(k, v);
      else throw ConfigError("scenario has no parameter '" + k + "'");
    }
  }

  std::string text(const std::string& key) const {
    for (const auto& [k, v] : values_)
      if (k == key) return v;
    throw ConfigError("scenario parameter '" + key + "' is not declared");
  }

  double number(const std::string& key) const {
    try {
      return io::parse_double(text(key));
    } catch (const ConfigError&) {
      throw;
    } catch (const ParameterError&) {
      throw ConfigError("scenario parameter '" + key + "' must be a number");
    }
  }

  double positive(const std::string& key) const {
    const double v = number(key);
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("scenario parameter '" + key + "' must be > 0");
    return v;
  }

  std::uint64_t seed(const std::string& key) const {
    const double v = number(key);
    if (!(v >= 0.0) || v != std::floor(v) || v > 9e15) throw ConfigError("'" + key + "' must be a nonnegative integer");
    return static_cast<std::uint64_t>(v);
  }

  Vector vector(const std::string& key) const {
    Vector out;
    for (const auto& c : io::split(text(key), ',')) {
      try {
        out.push_back(io::parse_double(c));
      } catch (const ParameterError&) {
        throw ConfigError("scenario parameter '" + key + "' must be a comma-separated list of numbers");
      }
    }
    return out;
  }

  const std::vector<std::pair<std::string, std::string>>& values() const noexcept { return values_; }

 private:
  std::vector<std::pair<std::string, std::string>> values_;
};

/// Default ensemble seed, overridable through the STABKIT_SEED environment variable.
inline std::string default_seed_text(std::uint64_t fallback) {
  if (const char* env = std::getenv("STABKIT_SEED")) {
    const std::string s = io::trim(env);
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
      throw ConfigError("STABKIT_SEED must be a nonnegative integer");
    return s;
  }
  return std::to_string(fallback);
}

/// Disturbance channel spec: `0`, `const:v` or `sin:amplitude:omega`.
inline Signal parse_signal(const std::string& spec) {
  const auto parts = io::split(spec, ':');
  try {
    if (parts.size() == 1) {
      const double v = io::parse_double(parts[0]);
      return v == 0.0 ? Signal::zero() : Signal::constant(v);
    }
    if (parts.size() == 2 && parts[0] == "const") return Signal::constant(io::parse_double(parts[1]));
    if (parts.size() == 3 && parts[0] == "sin")
      return Signal::sinusoid(io::parse_double(parts[1]), io::parse_double(parts[2]));
  } catch (const ParameterError&) {
  }
  throw ConfigError("bad disturbance spec '" + spec + "' (expected 0, const:v or sin:amplitude:omega)");
}

/// Writes artifacts into one directory and records their names relative to it.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::string dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + dir_ + "': " + ec.message());
  }

  std::string write(const std::string& name, const std::string& text, ScenarioResult& r) {
    const std::string path = (std::filesystem::path(dir_) / name).string();
    io::write_text(path, text);
    r.artifacts.push_back(name);
    return path;
  }

  /// CSV plus its SVG rendering.
  void write_csv_and_plot(const std::string& stem, const std::string& csv, ScenarioResult& r,
                          const std::string& title) {
    write(stem + ".csv", csv, r);
    const io::Table t = io::parse_csv(csv);
    write(stem + ".svg", plot::render_svg(t, plot::default_style(t), title), r);
  }

  const std::string& dir() const noexcept { return dir_; }

 private:
  std::string dir_;
};

inline nlohmann::ordered_json summary_json(const ScenarioResult& r) {
  nlohmann::ordered_json j;
  j["schema_version"] = summary_schema_version;
  j["scenario"] = r.id;
  j["passed"] = r.passed();
  auto a = nlohmann::ordered_json::array();
  for (const auto& x : r.assertions) a.push_back({{"name", x.name}, {"passed", x.passed}, {"detail", x.detail}});
  j["assertions"] = std::move(a);
  auto m = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.metrics) {
    if (std::isfinite(v)) m[k] = v;
    else m[k] = io::format_double(v);
  }
  j["metrics"] = std::move(m);
  auto p = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.parameters) p[k] = v;
  j["parameters"] = std::move(p);
  j["artifacts"] = r.artifacts;
  return j;
}

namespace scenario_detail {

inline std::string num(double v) { return io::format_double(v); }

inline void check(ScenarioResult& r, std::string name, bool ok, std::string detail) {
  r.assertions.push_back({std::move(name), ok, std::move(detail)});
}

inline IntegratorConfig loop_integrator(double dt) { return IntegratorConfig::adaptive(1e-10, 1e-10).sampled_every(dt); }

/// Simulates a loop in estimate coordinates and writes trajectory.csv/.svg with the u column.
inline Trajectory run_loop(const ClosedLoop& loop, const Vector& x0, const Disturbance& d, double horizon, double dt,
                           ArtifactWriter& out, ScenarioResult& r, const std::string& title) {
  const Trajectory tr = integrate(loop.estimate_form, x0, d, horizon, loop_integrator(dt));
  const Trajectory grid = tr.on_grid(dt);
  const auto u = loop.control_signal(grid);
  out.write_csv_and_plot("trajectory", io::trajectory_csv(grid, &u), r, title);
  return tr;
}

inline std::vector<std::pair<std::string, std::string>> loop_defaults(bool sigma, const std::string& amplitude,
                                                                      const std::string& horizon) {
  std::vector<std::pair<std::string, std::string>> d{{"theta", "3"}, {"c", "1"}, {"Gamma", "10"}, {"q", "0.5"}};
  if (sigma) d.emplace_back("sigma", "0.5");
  d.insert(d.end(), {{"y0", "0.5"}, {"thetahat0", "0"}, {"d_amplitude", amplitude}, {"d_omega", "3.141592653589793"},
                     {"horizon", horizon}, {"dt", "0.01"}});
  return d;
}

inline Disturbance loop_disturbance(const ScenarioParams& p) {
  const double a = p.number("d_amplitude");
  return Disturbance{a == 0.0 ? Signal::zero() : Signal::sinusoid(a, p.number("d_omega"))};
}

/// fig1 / fig2: adaptive high-gain loop, drift verdict on theta_hat.
inline void high_gain_figure(const ScenarioParams& p, ArtifactWriter& out, ScenarioResult& r, bool expect_drift) {
  const ClosedLoop loop = make_high_gain_loop(p.number("theta"), p.number("c"), p.number("Gamma"), p.number("q"));
  const double T = p.positive("horizon");
  const Trajectory tr = run_loop(loop, {p.number("y0"), p.number("thetahat0")}, loop_disturbance(p), T,
                                 p.positive("dt"), out, r, r.id + ": adaptive high-gain loop");
  const double t1 = T / 4, t2 = T / 2, t3 = T;
  const DriftReport drift = detect_gain_drift(tr, 1, t1, t2, t3);
  r.metrics.emplace_back("y_final", tr.final_state()[0]);
  r.metrics.emplace_back("thetahat_final", tr.final_state()[1]);
  r.metrics.emplace_back("thetahat_delta_early", drift.delta_early);
  r.metrics.emplace_back("thetahat_delta_late", drift.delta_late);
  const std::string windows = "windows (" + num(t1) + ", " + num(t2) + ", " + num(t3) + ")";
  check(r, "no_divergence", !tr.diverged, tr.diverged ? "trajectory diverged" : "finite");
  if (expect_drift) {
    check(r, "thetahat_drifting", drift.verdict == DriftVerdict::drifting,
          "verdict " + to_string(drift.verdict) + " over " + windows + ", late increase " + num(drift.delta_late));
  } else {
    const double y = std::abs(tr.final_state()[0]);
    check(r, "output_decayed", y < 1e-3, "|y(T)| = " + num(y) + " < 1e-3");
    check(r, "thetahat_settled", drift.verdict == DriftVerdict::settled,
          "verdict " + to_string(drift.verdict) + " over " + windows + ", late change " + num(drift.delta_late));
  }
}

/// Max over stored samples of |x_err(t)| - bound(t) for the leakage loop.
inline double sigma_bound_excess(const ClosedLoop& loop, const Trajectory& tr, const ScenarioParams& p, double d_sup) {
  const Vector e0 = loop.to_error(tr.states.front());
  double worst = -INFINITY;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const double b = bounds::sigma_mod_state(p.number("theta"), p.number("c"), p.number("Gamma"), p.number("sigma"),
                                             norm2(e0), d_sup, tr.times[i]);
    worst = std::max(worst, norm2(loop.to_error(tr.states[i])) - b);
  }
  return worst;
}

/// fig3 / fig4: loop with sigma-modification.
inline void sigma_figure(const ScenarioParams& p, ArtifactWriter& out, ScenarioResult& r, bool disturbed) {
  const double theta = p.number("theta"), c = p.number("c"), gamma = p.number("Gamma"), q = p.number("q"),
               sigma = p.number("sigma");
  const ClosedLoop loop = make_sigma_mod_loop(theta, c, gamma, q, sigma);
  const double T = p.positive("horizon");
  const Disturbance d = loop_disturbance(p);
  const Trajectory tr = run_loop(loop, {p.number("y0"), p.number("thetahat0")}, d, T, p.positive("dt"), out, r,
                                 r.id + ": adaptive loop with sigma-modification");
  check(r, "no_divergence", !tr.diverged, tr.diverged ? "trajectory diverged" : "finite");
  const double excess = sigma_bound_excess(loop, tr, p, d.sup_norm(T));
  r.metrics.emplace_back("state_bound_excess", excess);
  check(r, "state_bound", excess <= 1e-6, "max(|x(t)| - bound(t)) = " + num(excess) + " <= 1e-6");
  const double window = 10.0;
  double tail_abs = 0.0;
  for (std::size_t i = 0; i < tr.size(); ++i)
    if (tr.times[i] >= T - window) tail_abs = std::max(tail_abs, std::abs(tr.states[i][0]));
  r.metrics.emplace_back("tail_max_abs_y", tail_abs);
  if (!disturbed) {
    const auto eq = sigma_mod_equilibria(theta, c, gamma, sigma, q);
    double y_star = 0.0, z_star = -theta;
    for (const auto& e : eq)
      if (e[0] > y_star) y_star = e[0], z_star = e[1];
    const double residual = norm_inf(loop.error_form.field({y_star, z_star}, {0.0}));
    double dev = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i)
      if (tr.times[i] >= T - window) dev = std::max(dev, std::abs(std::abs(tr.states[i][0]) - y_star));
    r.metrics.emplace_back("equilibrium_y", y_star);
    r.metrics.emplace_back("equilibrium_z", z_star);
    r.metrics.emplace_back("equilibrium_residual", residual);
    r.metrics.emplace_back("tail_offset_deviation", dev);
    check(r, "equilibrium_residual", residual <= 1e-12, "|f(y*, z*)| = " + num(residual) + " <= 1e-12");
    check(r, "tail_offset", dev <= 1e-2,
          "max over the last 10 s of ||y| - " + num(y_star) + "| = " + num(dev) + " <= 1e-2");
  } else {
    const DriftReport drift = detect_gain_drift(tr, 1, T / 4, T / 2, T);
    r.metrics.emplace_back("thetahat_delta_late", drift.delta_late);
    check(r, "thetahat_not_drifting", drift.verdict != DriftVerdict::drifting,
          "verdict " + to_string(drift.verdict) + ", late change " + num(drift.delta_late));
  }
}

/// Peak of sampled data refined by the parabola through the three samples around the maximum.
inline std::pair<double, double> refined_peak(const std::vector<double>& t, const std::vector<double>& v) {
  const std::size_t i = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
  if (i == 0 || i + 1 == v.size()) return {t[i], v[i]};
  const double h1 = t[i] - t[i - 1], h2 = t[i + 1] - t[i];
  const double d1 = (v[i] - v[i - 1]) / h1, d2 = (v[i + 1] - v[i]) / h2;
  const double a = (d2 - d1) / (h1 + h2);  // half the second derivative
  if (!(a < 0.0)) return {t[i], v[i]};
  // Parabola p(s) = v[i] + b s + a s^2 with s = tau - t[i], matching both neighbours.
  const double b = (d1 * h2 + d2 * h1) / (h1 + h2);
  const double s = -b / (2.0 * a);
  return {t[i] + s, v[i] + b * s + a * s * s};
}

inline void closed_form(const ScenarioParams& p, ArtifactWriter& out, ScenarioResult& r) {
  const std::size_t cases = static_cast<std::size_t>(p.seed("cases"));
  const double T = p.positive("horizon"), dt = p.positive("dt");
  std::mt19937_64 rng(p.seed("seed"));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto cfg = IntegratorConfig::adaptive(1e-12, 1e-12).sampled_every(dt);
  double worst_err = 0.0, worst_peak = 0.0, worst_time = 0.0;
  std::size_t peaks = 0;
  std::ostringstream table;
  table << "case,xi0,z0,k,max_abs_error,peak_value_error,peak_time_error\n";
  std::optional<Trajectory> shown;
  for (std::size_t c = 0; c < cases; ++c) {
    const double k = 3.0 * (1.0 - unit(rng));  // (0, 3]
    double xi0, z0;
    if (c % 2 == 0) {
      xi0 = -2.0 + 4.0 * unit(rng);
      z0 = -4.0 + 6.0 * unit(rng);
    } else {  // peak regime: xi0 > 0, z0 + k < 0
      xi0 = 2.0 * (1.0 - unit(rng));
      z0 = -k - 0.2 - 2.8 * unit(rng);
    }
    const systems::ClosedFormAdaptiveScalar exact(xi0, z0, k);
    const DynamicalSystem sys = systems::make_adaptive_scalar(0.0, k, 0.0, false);
    const Trajectory tr = integrate(sys, {xi0, z0}, Disturbance::zero(0), T, cfg).on_grid(dt);
    double err = tr.diverged ? INFINITY : 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i) err = std::max(err, std::abs(tr.states[i][0] - exact(tr.times[i]).first));
    worst_err = std::max(worst_err, err);
    double pv = NAN, pt = NAN;
    if (exact.peak_time()) {
      ++peaks;
      const auto [tp, vp] = refined_peak(tr.times, tr.component(0));
      pv = std::abs(vp - *exact.peak_value());
      pt = std::abs(tp - *exact.peak_time());
      worst_peak = std::max(worst_peak, pv);
      worst_time = std::max(worst_time, pt);
      if (!shown) shown = tr;
    }
    table << c << ',' << num(xi0) << ',' << num(z0) << ',' << num(k) << ',' << num(err) << ',' << num(pv) << ','
          << num(pt) << '\n';
  }
  out.write("cases.csv", table.str(), r);
  if (shown) out.write_csv_and_plot("trajectory", io::trajectory_csv(*shown), r, "ex4-closedform: first peak case");
  r.metrics.emplace_back("max_abs_error", worst_err);
  r.metrics.emplace_back("max_peak_value_error", worst_peak);
  r.metrics.emplace_back("max_peak_time_error", worst_time);
  r.metrics.emplace_back("peak_cases", static_cast<double>(peaks));
  check(r, "trajectory_matches_formula", worst_err <= 1e-6, "max |xi_sim - xi_exact| = " + num(worst_err) + " <= 1e-6");
  check(r, "peak_value", peaks > 0 && worst_peak <= 1e-6,
        num(static_cast<double>(peaks)) + " peak cases, max value error " + num(worst_peak) + " <= 1e-6");
  check(r, "peak_time", peaks > 0 && worst_time <= 1e-3, "max argmax-time error " + num(worst_time) + " <= 1e-3");
}

inline void nonuniformity(const ScenarioParams& p, ArtifactWriter& out, ScenarioResult& r) {
  const double eps = p.positive("eps"), T = p.positive("horizon");
  const auto count = static_cast<int>(p.seed("count"));
  if (count < 2) throw ConfigError("count must be at least 2");
  const DynamicalSystem sys = systems::make_adaptive_scalar(0.0, p.positive("k"), 0.0, false);
  const auto cfg = IntegratorConfig::adaptive(1e-10, 1e-10).sampled_every(p.positive("dt"));
  StabilityEstimate est;
  est.kind = EstimateKind::settling_table;
  est.horizon = T;
  est.parameter = eps;
  est.label = "last exceedance time of |xi| > eps from (1/i, z0), abscissa i";
  bool above = true, increasing = true, finite = true;
  double prev = -INFINITY;
  for (int i = 1; i <= count; ++i) {
    const Trajectory tr = integrate(sys, {1.0 / i, p.number("z0")}, Disturbance::zero(0), T, cfg);
    const double t = last_exceedance_time(tr, eps);
    const double lb = bounds::settling_lower_bound(i);
    est.abscissae.push_back(i);
    est.values.push_back(t);
    est.raw.push_back(t);
    r.metrics.emplace_back("settling_time_" + std::to_string(i), t);
    r.metrics.emplace_back("lower_bound_" + std::to_string(i), lb);
    finite = finite && std::isfinite(t);
    above = above && t > lb;
    increasing = increasing && t > prev;
    prev = t;
  }
  out.write_csv_and_plot("settling", io::estimate_csv(est), r, "ex4-nonuniformity: settling time against i");
  check(r, "settled_within_horizon", finite, "every run settles below eps before the horizon");
  check(r, "exceeds_lower_bound", above, "T_i > ln(1 + 4 i^2)/(2 sqrt 2) for every i");
  check(r, "strictly_increasing", increasing, "T_i strictly increasing in i");
}

inline void deadzone_bounds(const ScenarioParams& p, ArtifactWriter& out, ScenarioResult& r) {
  const double a = p.positive("a"), c = p.positive("c"), gamma = p.positive("Gamma"), eps = p.positive("eps");
  const double theta = p.number("theta"), T = p.positive("horizon"), dt = p.positive("dt");
  const double window = p.positive("tail_window");
  const ClosedLoop loop = make_deadzone_controller_loop(a, c, gamma, eps);
  const Vector x0{p.number("xi0"), p.number("z0")};
  const std::vector<std::pair<std::string, double>> runs{{"undisturbed", 0.0}, {"sinusoid", p.number("d_amplitude")}};
  for (const auto& [name, amp] : runs) {
    const Disturbance d{amp == 0.0 ? Signal::zero() : Signal::sinusoid(amp, 1.0), Signal::constant(theta)};
    const Trajectory tr = integrate(loop.estimate_form, x0, d, T, loop_integrator(dt));
    const Trajectory grid = tr.on_grid(dt);
    const auto u = loop.control_signal(grid);
    out.write_csv_and_plot("trajectory_" + name, io::trajectory_csv(grid, &u), r, "ex9-bounds: " + name);
    double min_step = INFINITY, tail = 0.0, excess = -INFINITY;
    for (std::size_t i = 0; i < tr.size(); ++i) {
      if (i > 0) min_step = std::min(min_step, tr.states[i][1] - tr.states[i - 1][1]);
      if (tr.times[i] >= T - window) tail = std::max(tail, std::abs(tr.states[i][0]));
      const double b = bounds::deadzone_transient(a, c, x0[0], x0[1], std::abs(amp), std::abs(theta), tr.times[i]);
      excess = std::max(excess, std::abs(tr.states[i][0]) - b);
    }
    const double limit = bounds::deadzone_residual(eps) + 0.01;
    r.metrics.emplace_back(name + "_min_z_increment", min_step);
    r.metrics.emplace_back(name + "_tail_max_abs_xi", tail);
    r.metrics.emplace_back(name + "_transient_bound_excess", excess);
    r.metrics.emplace_back(name + "_z_final", tr.final_state()[1]);
    check(r, name + "_no_divergence", !tr.diverged, tr.diverged ? "trajectory diverged" : "finite");
    check(r, name + "_z_nondecreasing", min_step >= 0.0, "min z(t_{i+1}) - z(t_i) = " + num(min_step) + " >= 0");
    check(r, name + "_tail_bound", tail <= limit, "tail max |xi| = " + num(tail) + " <= " + num(limit));
    check(r, name + "_transient_bound", excess <= 1e-6, "max(|xi(t)| - bound(t)) = " + num(excess) + " <= 1e-6");
  }
}

inline void small_gain_example(const ScenarioParams& p, ArtifactWriter& out, ScenarioResult& r) {
  Config cert_cfg = Config::parse(find_builtin_certificate("eq73")->config);
  cert_cfg.set("param.b", p.text("b"));
  cert_cfg.set("plan.grid", p.text("grid"));
  const CertificateReport rep = certificate_from_config(cert_cfg).run();
  out.write("certificate.json", io::report_json(rep).dump(2) + "\n", r);
  r.metrics.emplace_back("certificate_worst_margin", rep.worst_margin);
  check(r, "certificate_passes", !rep.violated(), "small-gain certificate verdict " + rep.verdict());

  EnsembleSpec spec;
  spec.radii = p.vector("radii");
  spec.samples_per_radius = 8;
  spec.seed = p.seed("seed");
  spec.horizon = p.positive("horizon");
  GainCurveSpec amp;
  amp.amplitudes = p.vector("amplitudes");
  const DynamicalSystem sys = build_system("eq73", {{"b", p.number("b")}, {"m", 3.0}});
  const StateBoundTable table = estimate_state_bound(sys, spec, amp);
  const auto ests = table.estimates(spec);
  for (std::size_t j = 0; j < ests.size(); ++j) {
    auto e = ests[j];
    e.label = "sup |x| over the horizon against initial radius, disturbance amplitude " + num(amp.amplitudes[j]);
    out.write_csv_and_plot("state_bound_" + std::to_string(j), io::estimate_csv(e), r,
                           "ex8-smallgain: state bound, amplitude " + num(amp.amplitudes[j]));
  }
  double worst = 0.0;
  for (const auto& row : table.values)
    for (double v : row) worst = std::max(worst, v);
  r.metrics.emplace_back("state_bound_max", worst);
  check(r, "state_bound_finite", table.all_finite(), "all state-bound cells finite (max " + num(worst) + ")");

  Config comp = Config::parse(find_builtin_certificate("eq73-composition")->config);
  comp.set("const.b", p.text("b_large"));
  const CertificateReport crep = certificate_from_config(comp).run();
  out.write("composition_large_b.json", io::report_json(crep).dump(2) + "\n", r);
  r.metrics.emplace_back("composition_large_b_worst_margin", crep.worst_margin);
  check(r, "composition_fails_for_large_b", crep.violated(),
        "composition check with b = " + p.text("b_large") + " is " + crep.verdict());
}

inline void simulate(const ScenarioParams& p, ArtifactWriter& out, ScenarioResult& r) {
  const SystemEntry& entry = find_system(p.text("system"));
  ParameterSet overrides;
  for (const auto& [k, v] : p.values())
    if (k.rfind("param.", 0) == 0) overrides.set(k.substr(6), p.number(k));
  const ParameterSet params = merge_parameters(entry, overrides);
  const DynamicalSystem sys = entry.build(params);
  Vector x0 = p.vector("x0");
  if (x0.size() == 1 && sys.state_dim() > 1) x0.assign(sys.state_dim(), x0[0]);
  if (x0.size() != sys.state_dim())
    throw ConfigError("x0 needs " + std::to_string(sys.state_dim()) + " components for system " + entry.id);
  std::vector<Signal> parsed;
  for (const auto& spec : io::split(p.text("d"), ';')) parsed.push_back(parse_signal(spec));
  if (parsed.size() > 1 && parsed.size() != sys.disturbance_dim())
    throw ConfigError("d lists " + std::to_string(parsed.size()) + " channels, system has " +
                      std::to_string(sys.disturbance_dim()));
  std::vector<Signal> channels;
  for (std::size_t i = 0; i < sys.disturbance_dim(); ++i) channels.push_back(parsed[parsed.size() == 1 ? 0 : i]);
  const double T = p.positive("horizon"), dt = p.positive("dt");
  const Trajectory tr = integrate(sys, x0, Disturbance(channels), T, IntegratorConfig::adaptive().sampled_every(dt));
  const Trajectory grid = tr.on_grid(dt);
  if (entry.loop) {
    const ClosedLoop loop = entry.loop(params);
    std::vector<double> u;
    for (const auto& x : grid.states)
      u.push_back(loop.control(sys.id() == loop.error_form.id() ? loop.to_estimate(x) : x));
    out.write_csv_and_plot("trajectory", io::trajectory_csv(grid, &u), r, "simulate: " + entry.id);
  } else {
    out.write_csv_and_plot("trajectory", io::trajectory_csv(grid), r, "simulate: " + entry.id);
  }
  r.metrics.emplace_back("final_time", tr.final_time());
  r.metrics.emplace_back("max_state_norm", max_state_norm(tr));
  r.metrics.emplace_back("max_output_norm", max_output_norm(tr));
  check(r, "no_divergence", !tr.diverged, tr.diverged ? "trajectory diverged" : "finite");
}

}  // namespace scenario_detail

struct ScenarioInfo {
  std::string id;
  /// What the scenario runs and asserts, including the chosen horizon.
  std::string description;
  std::function<std::vector<std::pair<std::string, std::string>>()> defaults;
  std::function<void(const ScenarioParams&, ArtifactWriter&, ScenarioResult&)> run;
  bool open_params = false;
};

inline const std::vector<ScenarioInfo>& scenario_catalogue() {
  namespace sd = scenario_detail;
  using Defaults = std::vector<std::pair<std::string, std::string>>;
  static const std::vector<ScenarioInfo> s{
      {"fig1",
       "high-gain adaptive loop, d = 0, theta = 3, c = 1, Gamma = 10, q = 0.5, y(0) = 0.5, theta_hat(0) = 0; "
       "horizon 40 s so the drift windows (10, 20, 40) see the settled gain; asserts |y(40)| < 1e-3 and a "
       "settled theta_hat",
       [] { return sd::loop_defaults(false, "0", "40"); },
       [](const ScenarioParams& p, ArtifactWriter& o, ScenarioResult& r) { sd::high_gain_figure(p, o, r, false); }},
      {"fig2",
       "high-gain adaptive loop under d = 2 sin(pi t), other settings as fig1; horizon 200 s so the windows "
       "(50, 100, 200) expose the slow growth; asserts a drifting theta_hat",
       [] { return sd::loop_defaults(false, "2", "200"); },
       [](const ScenarioParams& p, ArtifactWriter& o, ScenarioResult& r) { sd::high_gain_figure(p, o, r, true); }},
      {"fig3",
       "adaptive loop with sigma-modification (sigma = q = 0.5), d = 0; horizon 60 s with a 10 s tail window; "
       "asserts the residual-checked offset equilibrium, the tail offset of |y| and the pointwise state bound",
       [] { return sd::loop_defaults(true, "0", "60"); },
       [](const ScenarioParams& p, ArtifactWriter& o, ScenarioResult& r) { sd::sigma_figure(p, o, r, false); }},
      {"fig4",
       "adaptive loop with sigma-modification under d = 2 sin(pi t); horizon 200 s; asserts the pointwise state "
       "bound and that theta_hat does not drift",
       [] { return sd::loop_defaults(true, "2", "200"); },
       [](const ScenarioParams& p, ArtifactWriter& o, ScenarioResult& r) { sd::sigma_figure(p, o, r, true); }},
      {"ex4-closedform",
       "adaptive scalar loop with sigma = 0 against its closed-form solution for seeded random (xi0, z0, k), "
       "k in (0, 3], every other case in the peak regime xi0 > 0, z0 + k < 0; horizon 10 s",
       [] {
         return Defaults{{"cases", "20"}, {"horizon", "10"}, {"dt", "0.001"}, {"seed", default_seed_text(20240601)}};
       },
       sd::closed_form},
      {"ex4-nonuniformity",
       "adaptive scalar loop with sigma = 0, k = 1 from (1/i, -2), i = 1..6: last time |xi| > 0.5 exceeds "
       "ln(1 + 4 i^2)/(2 sqrt 2) and grows with i; horizon 60 s",
       [] {
         return Defaults{{"k", "1"}, {"z0", "-2"}, {"eps", "0.5"}, {"count", "6"}, {"horizon", "60"}, {"dt", "0.01"}};
       },
       sd::nonuniformity},
      {"ex9-bounds",
       "deadzone adaptive loop, a = c = Gamma = 1, eps = 0.125, theta = 3, x0 = (2, 0), once with d = 0 and once "
       "with d = 0.2 sin(t); horizon 60 s, tail window 10 s; asserts monotone z, the tail bound sqrt(2 eps) + "
       "0.01 and the pointwise transient bound",
       [] {
         return Defaults{{"a", "1"},    {"c", "1"},     {"Gamma", "1"},          {"eps", "0.125"},
                         {"theta", "3"}, {"xi0", "2"},  {"z0", "0"},             {"d_amplitude", "0.2"},
                         {"horizon", "60"}, {"dt", "0.01"}, {"tail_window", "10"}};
       },
       sd::deadzone_bounds},
      {"ex8-smallgain",
       "small-gain pair with b = 0.5, m = 3: certificate on [-3, 3]^2 x [-1, 1], finite state-bound table for "
       "radii {1, 2} and amplitudes {0, 0.5, 1} over 20 s, and a failing gain composition for b = 1.2",
       [] {
         return Defaults{{"b", "0.5"},        {"b_large", "1.2"}, {"grid", "41"}, {"radii", "1, 2"},
                         {"amplitudes", "0, 0.5, 1"}, {"horizon", "20"}, {"seed", default_seed_text(7)}};
       },
       sd::small_gain_example},
      {"simulate",
       "generic run of any registered system: system id, param.<name> overrides, x0 (comma list or one value "
       "for every component), d (0, const:v or sin:amplitude:omega, ';' between channels), horizon, dt",
       [] {
         return Defaults{{"system", "eq24"}, {"x0", "1"}, {"d", "0"}, {"horizon", "10"}, {"dt", "0.01"}};
       },
       sd::simulate, true},
  };
  return s;
}

inline const ScenarioInfo& find_scenario(const std::string& id) {
  for (const auto& s : scenario_catalogue())
    if (s.id == id) return s;
  throw ConfigError("unknown scenario '" + id + "'");
}

/// Runs a scenario, writing its artifacts and summary.json into `out_dir`.
/// Configuration problems throw ConfigError before anything is written.
inline ScenarioResult run_scenario(const std::string& id, const Config& overrides, const std::string& out_dir) {
  const ScenarioInfo& info = find_scenario(id);
  const ScenarioParams params(info.defaults(), overrides, info.open_params);
  ScenarioResult r;
  r.id = id;
  r.parameters = params.values();
  ArtifactWriter out(out_dir);
  info.run(params, out, r);
  r.artifacts.push_back("summary.json");
  io::write_text((std::filesystem::path(out_dir) / "summary.json").string(), summary_json(r).dump(2) + "\n");
  return r;
}

}  // namespace stabkit

#endif  // STABKIT_SCENARIOS_HPP
