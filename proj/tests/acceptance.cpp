// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "stabkit/stabkit.hpp"

using namespace stabkit;
namespace fs = std::filesystem;

namespace {

const fs::path work = fs::temp_directory_path() / "stabkit_acceptance";

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

int cli(const std::string& args) {
  const std::string cmd = "cd '" + work.string() + "' && '" + STABKIT_CLI_PATH + "' " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

ScenarioResult scenario(const std::string& id, const std::vector<std::string>& sets = {}) {
  Config c;
  for (const auto& s : sets) c.apply_override(s);
  return run_scenario(id, c, (work / id).string());
}

double metric(const ScenarioResult& r, const std::string& name) {
  for (const auto& [k, v] : r.metrics)
    if (k == name) return v;
  return NAN;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

io::Table read_csv(const fs::path& p) { return io::parse_csv(io::read_text(p.string())); }

double value_at(const io::Table& t, std::size_t col, double time) {
  for (const auto& r : t.rows)
    if (r[0] == time) return r[col];
  return NAN;
}

// 1. Simulated adaptive scalar loop against its closed form.
void closed_form(Outcome& o) {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto cfg = IntegratorConfig::adaptive(1e-12, 1e-12).sampled_every(0.001);
  double err = 0.0, peak_err = 0.0, time_err = 0.0;
  int peaks = 0;
  for (int c = 0; c < 20; ++c) {
    const double k = 3.0 * (1.0 - unit(rng));
    double xi0, z0;
    if (c % 2 == 0) {
      xi0 = -2.0 + 4.0 * unit(rng);
      z0 = -4.0 + 6.0 * unit(rng);
    } else {
      xi0 = 2.0 * (1.0 - unit(rng));
      z0 = -k - 0.2 - 2.8 * unit(rng);
    }
    const auto tr = integrate(systems::make_adaptive_scalar(0.0, k, 0.0, false), {xi0, z0}, Disturbance::zero(0), 10.0, cfg)
                        .on_grid(0.001);
    for (std::size_t i = 0; i < tr.size(); ++i)
      err = std::max(err, std::abs(tr.states[i][0] - oracle::adaptive_scalar_xi(xi0, z0, k, tr.times[i])));
    if (xi0 > 0.0 && z0 + k < 0.0) {
      ++peaks;
      const auto [tp, vp] = scenario_detail::refined_peak(tr.times, tr.component(0));
      const double t_star =
          oracle::golden_argmax([&](double t) { return oracle::adaptive_scalar_xi(xi0, z0, k, t); }, 0.0, 10.0);
      peak_err = std::max(peak_err, std::abs(vp - std::hypot(xi0, k + z0)));
      time_err = std::max(time_err, std::abs(tp - t_star));
    }
  }
  o.require(err <= 1e-6, "trajectory error");
  o.require(peaks > 0 && peak_err <= 1e-6, "peak value");
  o.require(time_err <= 1e-3, "peak time");
  const auto r = scenario("ex4-closedform");
  o.require(r.passed(), "scenario ex4-closedform");
  o.detail << "max |xi - formula| " << num(err) << ", " << peaks << " peak cases, value error " << num(peak_err)
           << ", time error " << num(time_err);
}

// 2. Settling times grow with i and exceed ln(1 + 4 i^2)/(2 sqrt 2).
void nonuniformity(Outcome& o) {
  const auto sys = systems::make_adaptive_scalar(0.0, 1.0, 0.0, false);
  double prev = -INFINITY;
  for (int i = 1; i <= 6; ++i) {
    const auto tr = integrate(sys, {1.0 / i, -2.0}, Disturbance::zero(0), 60.0,
                              IntegratorConfig::adaptive(1e-10, 1e-10).sampled_every(0.01));
    const double T = last_exceedance_time(tr, 0.5);
    const double lb = std::log(1.0 + 4.0 * i * i) / (2.0 * std::sqrt(2.0));
    o.require(T > lb, "T_" + std::to_string(i) + " above bound");
    o.require(T > prev, "T_" + std::to_string(i) + " increasing");
    o.detail << "T" << i << "=" << num(T) << " (>" << num(lb) << ") ";
    prev = T;
  }
  o.require(scenario("ex4-nonuniformity").passed(), "scenario ex4-nonuniformity");
}

// 3. Energy of the linear oscillator pair is conserved.
void conservation(Outcome& o) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const auto sys = build_system("eq8");
  double worst = 0.0;
  for (int c = 0; c < 5; ++c) {
    const Vector x0{u(rng), u(rng), u(rng), u(rng)};
    const double h0 = oracle::oscillator_energy({x0[0], x0[1], x0[2], x0[3]});
    const auto tr = integrate(sys, x0, Disturbance::zero(0), 10.0, IntegratorConfig::adaptive().sampled_every(0.01));
    for (const auto& x : tr.states) worst = std::max(worst, std::abs(oracle::oscillator_energy({x[0], x[1], x[2], x[3]}) - h0));
  }
  o.require(worst <= 1e-6, "energy drift");
  o.detail << "max |H(x(t)) - H(x0)| = " << num(worst) << " over 5 initial conditions";
}

// 4. UGAOS certificate passes for k = 1 and fails with a witness for k = 0.2.
void ugaos(Outcome& o) {
  const int pass = cli("certify eq24 --report eq24.json");
  const int fail = cli("certify eq24 --set param.k=0.2 --report eq24_k02.json");
  o.require(pass == 0, "exit 0 for k = 1");
  o.require(fail == 1, "exit 1 for k = 0.2");
  std::size_t witnesses = 0;
  if (fail == 1) {
    const auto j = nlohmann::json::parse(io::read_text((work / "eq24_k02.json").string()));
    witnesses = j["witnesses"].size();
    if (witnesses > 0) o.detail << "first witness x = " << j["witnesses"][0]["x"].dump() << "; ";
  }
  o.require(witnesses > 0, "witness present");
  o.detail << "exit codes " << pass << "/" << fail << ", " << witnesses << " witnesses";
}

// 5. Deadzone loop: monotone z, tail bound and transient bound, with and without disturbance.
void deadzone(Outcome& o) {
  const auto r = scenario("ex9-bounds");
  o.require(r.passed(), "scenario ex9-bounds");
  const double limit = std::sqrt(2.0 * 0.125) + 0.01;
  for (const std::string run : {"undisturbed", "sinusoid"}) {
    const auto t = read_csv(work / "ex9-bounds" / ("trajectory_" + run + ".csv"));
    double tail = 0.0, min_dz = INFINITY;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      if (i > 0) min_dz = std::min(min_dz, t.rows[i][2] - t.rows[i - 1][2]);
      if (t.rows[i][0] >= 50.0) tail = std::max(tail, std::abs(t.rows[i][1]));
    }
    o.require(min_dz >= 0.0 && tail <= limit, run + " csv re-check");
    o.detail << run << ": tail |xi| " << num(tail) << " <= " << num(limit) << ", transient excess "
             << num(metric(r, run + "_transient_bound_excess")) << "; ";
  }
}

// 6. Sigma-modification equilibrium and tail offset.
void sigma_offset(Outcome& o) {
  const auto loop = make_sigma_mod_loop(3.0, 1.0, 10.0, 0.5, 0.5);
  const auto root = oracle::newton2(
      [&](double y, double z) {
        const Vector f = loop.error_form.field({y, z}, {0.0});
        return std::array<double, 2>{f[0], f[1]};
      },
      {0.3, -1.0});
  const double residual = norm_inf(loop.error_form.field({root[0], root[1]}, {0.0}));
  o.require(residual <= 1e-12, "equilibrium residual");
  o.require(std::abs(root[0] - 0.31235) < 1e-5 && std::abs(root[1] + 1.04878) < 1e-5, "equilibrium location");
  const auto r = scenario("fig3");
  o.require(r.passed(), "scenario fig3");
  const auto t = read_csv(work / "fig3" / "trajectory.csv");
  double tail = 0.0;
  for (const auto& row : t.rows)
    if (row[0] >= 50.0) tail = std::max(tail, std::abs(std::abs(row[1]) - root[0]));
  o.require(tail <= 1e-2, "tail offset");
  o.detail << "equilibrium (" << num(root[0]) << ", " << num(root[1]) << "), residual " << num(residual)
           << ", tail ||y| - y*| " << num(tail) << ", bound excess " << num(metric(r, "state_bound_excess"));
}

// 7. High-gain loop: settled gain without disturbance, drifting gain with d = 2 sin(pi t).
void drift(Outcome& o) {
  const auto r1 = scenario("fig1");
  const auto r2 = scenario("fig2");
  o.require(r1.passed() && r2.passed(), "scenarios fig1/fig2");
  const auto t1 = read_csv(work / "fig1" / "trajectory.csv");
  const double settle = value_at(t1, 2, 40.0) - value_at(t1, 2, 20.0);
  o.require(settle < 1e-3, "settled");
  const auto t2 = read_csv(work / "fig2" / "trajectory.csv");
  bool monotone = true;
  for (std::size_t i = 1; i < t2.rows.size(); ++i)
    if (t2.rows[i][0] > 50.0 && t2.rows[i][2] < t2.rows[i - 1][2] - 1e-9) monotone = false;
  const double late = value_at(t2, 2, 200.0) - value_at(t2, 2, 100.0);
  o.require(monotone && late >= 1e-3, "drifting");
  o.detail << "d = 0: theta_hat(40) - theta_hat(20) = " << num(settle) << "; d = 2 sin(pi t): theta_hat(200) - "
           << "theta_hat(100) = " << num(late) << (monotone ? ", non-decreasing" : ", NOT monotone");
}

// 8. Small-gain example: certificate, finite state-bound table, failing composition for b = 1.2.
void small_gain(Outcome& o) {
  const int code = cli("certify eq73 --report eq73.json");
  o.require(code == 0, "certify eq73 exit 0");
  const int comp = cli("certify eq73-composition --set const.b=1.2");
  o.require(comp == 1, "composition with b = 1.2 fails");
  const auto r = scenario("ex8-smallgain");
  o.require(r.passed(), "scenario ex8-smallgain");
  o.detail << "certify eq73 exit " << code << ", composition b = 1.2 exit " << comp << ", state-bound max "
           << num(metric(r, "state_bound_max"));
}

// 9. p-UBIBS and p-OAG certificates plus the tail estimate of the saturated planar system.
void ubibs_oag(Outcome& o) {
  for (const char* name : {"eq57", "eq111-oag", "eq121-oag"}) {
    const int code = cli(std::string("certify ") + name);
    o.require(code == 0, std::string("certify ") + name);
    o.detail << name << " exit " << code << "; ";
  }
  EnsembleSpec spec;
  spec.radii = {0.5, 1.0, 2.0};
  spec.horizon = 40.0;
  spec.tail_window = 10.0;
  spec.disturbances = {Disturbance{Signal::sinusoid(1.0, 1.0)}};
  const double v = estimate_tail_limsup(build_system("eq121"), spec);
  o.require(v <= 1.01, "tail limsup");
  o.detail << "tail limsup " << num(v) << " <= 1.01";
}

// 10. Property suites.
void properties(Outcome& o) {
  // Fourth-order convergence of the fixed-step integrator on a rotation.
  DynamicalSystem::Spec s;
  s.id = "rotation";
  s.name = "rotation";
  s.state_dim = 2;
  s.output_dim = 2;
  s.field = [](const Vector& x, const Vector&) { return Vector{x[1], -x[0]}; };
  s.output = project({0, 1});
  const DynamicalSystem rot(std::move(s));
  auto err = [&](double h) {
    return std::abs(integrate(rot, {1.0, 0.0}, Disturbance::zero(0), 1.0, IntegratorConfig::fixed(h)).final_state()[0] -
                    std::cos(1.0));
  };
  const double order = std::log2(err(0.05) / err(0.025));
  o.require(std::abs(order - 4.0) < 0.15, "convergence order");

  // Gradients of every built-in certificate field.
  double grad = 0.0;
  std::size_t fields = 0;
  for (const auto& b : builtin_certificates())
    for (const auto& f : certificate_fields(Config::parse(b.config))) {
      grad = std::max(grad, f.check_gradient().max_relative_error);
      ++fields;
    }
  o.require(grad <= 1e-4, "gradient agreement");

  // Witnesses recomputed from their stored points.
  Config cfg = Config::parse(find_builtin_certificate("eq24")->config);
  cfg.apply_override("param.k=0.2");
  const Certificate cert = certificate_from_config(cfg);
  const auto rep = cert.run();
  bool reproducible = !rep.witnesses.empty();
  for (const auto& w : rep.witnesses) reproducible = reproducible && cert.reproduces(w);
  o.require(reproducible, "witness reproducibility");

  // (y, theta_hat) and (y, z) coordinates.
  double gap = 0.0;
  for (const auto& loop : {make_high_gain_loop(3, 1, 10, 0.5), make_sigma_mod_loop(3, 1, 10, 0.5, 0.5)}) {
    const Disturbance d{Signal::sinusoid(2.0, std::numbers::pi)};
    const auto c = IntegratorConfig::adaptive(1e-12, 1e-12).sampled_every(0.05);
    const auto a = integrate(loop.estimate_form, {0.5, 0.0}, d, 20.0, c).on_grid(0.05);
    const auto b = integrate(loop.error_form, loop.to_error({0.5, 0.0}), d, 20.0, c).on_grid(0.05);
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
      const Vector e = loop.to_error(a.states[i]);
      gap = std::max({gap, std::abs(e[0] - b.states[i][0]), std::abs(e[1] - b.states[i][1])});
    }
  }
  o.require(gap <= 1e-9, "coordinate equivalence");

  // Byte-identical reruns of fig1 through the command line.
  const int c1 = cli("run fig1 --out rerun_a"), c2 = cli("run fig1 --out rerun_b");
  bool identical = c1 == 0 && c2 == 0;
  for (const auto& e : fs::directory_iterator(work / "rerun_a"))
    identical = identical && io::read_text(e.path().string()) ==
                                 io::read_text((work / "rerun_b" / e.path().filename()).string());
  o.require(identical, "byte-identical reruns");

  o.detail << "RK4 order " << num(order) << "; gradient error " << num(grad) << " over "
           << fields << " fields; " << rep.witnesses.size() << " witnesses reproduced; coordinate gap " << num(gap)
           << "; fig1 reruns " << (identical ? "identical" : "DIFFER");
}

}  // namespace

int main() {
  fs::remove_all(work);
  fs::create_directories(work);
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"closed-form oracle", closed_form},
      {"non-uniform settling", nonuniformity},
      {"energy conservation", conservation},
      {"UGAOS certificate dichotomy", ugaos},
      {"deadzone loop bounds", deadzone},
      {"sigma-modification offset", sigma_offset},
      {"gain drift dichotomy", drift},
      {"small-gain example", small_gain},
      {"p-UBIBS and p-OAG certificates", ubibs_oag},
      {"property suites", properties},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %2zu. %s (%.2f s): %s\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs,
                o.detail.str().c_str());
    if (!o.ok) ++failed;
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  fs::remove_all(work);
  return failed == 0 ? 0 : 1;
}
