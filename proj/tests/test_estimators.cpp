#include <cmath>

#include <gtest/gtest.h>

#include "stabkit/estimators.hpp"
#include "stabkit/registry.hpp"

using namespace stabkit;

namespace {

DynamicalSystem decay(std::size_t m = 0) {
  DynamicalSystem::Spec s;
  s.id = "decay";
  s.name = "x' = -x + d";
  s.state_dim = 1;
  s.disturbance_dim = m;
  s.output_dim = 1;
  s.field = [m](const Vector& x, const Vector& d) { return Vector{-x[0] + (m ? d[0] : 0.0)}; };
  s.output = project({0});
  return DynamicalSystem(std::move(s));
}

Trajectory synthetic(const std::function<double(double)>& f, double T, double dt) {
  Trajectory tr;
  const auto n = static_cast<int>(std::lround(T / dt));
  for (int i = 0; i <= n; ++i) {
    const double t = i * dt;
    tr.times.push_back(t);
    tr.states.push_back({f(t)});
    tr.outputs.push_back({f(t)});
  }
  return tr;
}

}  // namespace

TEST(BallSamples, InsideBallDeterministicAndSeeded) {
  const auto a = ball_samples(3, 2.0, 16, 4);
  EXPECT_EQ(a.size(), 16u + 6u);
  for (const auto& x : a) EXPECT_LE(norm2(x), 2.0 + 1e-15);
  EXPECT_EQ(a, ball_samples(3, 2.0, 16, 4));
  EXPECT_NE(a, ball_samples(3, 2.0, 16, 5));
  EXPECT_DOUBLE_EQ(norm2(a.back()), 2.0);
}

TEST(LastExceedance, InterpolatesCrossing) {
  const auto tr = synthetic([](double t) { return std::exp(-t); }, 10.0, 0.01);
  EXPECT_NEAR(last_exceedance_time(tr, 0.1), std::log(10.0), 1e-4);
  EXPECT_EQ(last_exceedance_time(tr, 2.0), 0.0);
  EXPECT_TRUE(std::isinf(last_exceedance_time(tr, 1e-6)));
}

TEST(OutputEnvelope, DecayingScalarEqualsRadius) {
  EnsembleSpec spec;
  spec.radii = {0.5, 1.0, 2.0};
  spec.horizon = 2.0;
  const auto est = estimate_output_envelope(decay(), spec);
  ASSERT_EQ(est.values.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(est.values[i], spec.radii[i]);
  EXPECT_EQ(est.kind, EstimateKind::output_envelope);
}

TEST(SettlingTable, DecayingScalarLogRule) {
  EnsembleSpec spec;
  spec.radii = {1.0, 4.0};
  spec.horizon = 12.0;
  spec.integrator = IntegratorConfig::adaptive(1e-11, 1e-11).sampled_every(0.001);
  const auto rows = estimate_settling_table(decay(), spec, {0.1, 0.01});
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& row : rows)
    for (std::size_t i = 0; i < row.abscissae.size(); ++i)
      EXPECT_NEAR(row.values[i], std::log(row.abscissae[i] / row.parameter), 1e-5);
  EXPECT_THROW(estimate_settling_table(decay(), spec, {}), ParameterError);
  EXPECT_THROW(estimate_settling_table(decay(), spec, {0.0}), ParameterError);
}

TEST(TailLimsup, WindowAndErrors) {
  const auto tr = synthetic([](double t) { return 0.3 + std::exp(-t) * std::sin(5 * t); }, 20.0, 0.01);
  EXPECT_NEAR(tail_limsup(tr, 5.0), 0.3, 1e-5);
  EXPECT_THROW(tail_limsup(tr, 11.0), ParameterError);
  EXPECT_THROW(tail_limsup(tr, 0.0), ParameterError);
}

TEST(TailLimsup, DoublingCheckIsStable) {
  const auto c = tail_limsup_doubling(decay(1), {1.0}, Disturbance{Signal::constant(0.5)}, 20.0, 5.0,
                                      IntegratorConfig::adaptive().sampled_every(0.01));
  EXPECT_NEAR(c.value, 0.5, 1e-6);
  EXPECT_NEAR(c.increase(), 0.0, 1e-6);
}

TEST(GainCurve, LinearDecayHasUnitDcGain) {
  EnsembleSpec spec;
  spec.horizon = 30.0;
  spec.tail_window = 8.0;
  GainCurveSpec g;
  g.amplitudes = {0.0, 0.5, 1.0};
  const auto est = estimate_gain_curve(decay(1), spec, g);
  // Constant input s gives y -> s; s sin(t) gives amplitude s/sqrt(2).
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(est.values[i], g.amplitudes[i], 1e-6);
  EXPECT_THROW(estimate_gain_curve(decay(0), spec, g), ParameterError);
}

TEST(GainCurve, DisturbedAdaptiveLoopStaysUnderIosGain) {
  const auto sys = build_system("eq62");
  const double eps = 0.5 * (2.0 - 0.25);
  EnsembleSpec spec;
  spec.radii = {0.5, 1.0};
  spec.horizon = 40.0;
  spec.tail_window = 10.0;
  GainCurveSpec g;
  g.amplitudes = {0.25, 0.5, 1.0};
  const auto est = estimate_gain_curve(sys, spec, g);
  for (std::size_t i = 0; i < 3; ++i) {
    const double s = g.amplitudes[i];
    EXPECT_GT(est.values[i], 0.0);
    EXPECT_LE(est.values[i], std::max(s / eps, s / (eps * eps)) * 1.05) << "s = " << s;
  }
}

TEST(TailLimsup, SaturatedPlanarSystemBelowOne) {
  EnsembleSpec spec;
  spec.radii = {0.5, 1.0, 2.0};
  spec.horizon = 40.0;
  spec.tail_window = 10.0;
  spec.disturbances = {Disturbance{Signal::sinusoid(1.0, 1.0)}};
  const double v = estimate_tail_limsup(build_system("eq121"), spec);
  EXPECT_LE(v, 1.01);
  // Every positive start converges to the rest point 1/sqrt(2) of y' = y (1 - 2 y^2).
  EXPECT_NEAR(v, 1.0 / std::sqrt(2.0), 1e-6);
}

TEST(StateBound, PubibsExampleTableIsFinite) {
  EnsembleSpec spec;
  spec.radii = {1.0, 2.0};
  spec.horizon = 10.0;
  GainCurveSpec amp;
  amp.amplitudes = {0.0, 0.5, 1.0};
  const auto t = estimate_state_bound(build_system("eq57"), spec, amp);
  ASSERT_TRUE(t.all_finite());
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t a = 0; a < 3; ++a) EXPECT_GE(t.values[r][a], spec.radii[r] - 1e-12);
  EXPECT_EQ(t.estimates(spec).size(), 3u);
}

TEST(Drift, ThreeVerdicts) {
  auto ramp = synthetic([](double t) { return 0.1 * t; }, 200.0, 0.1);
  auto flat = synthetic([](double t) { return 1.0 - std::exp(-t); }, 200.0, 0.1);
  auto wave = synthetic([](double t) { return std::sin(t / 7.0) + 0.05 * t; }, 200.0, 0.1);
  EXPECT_EQ(detect_gain_drift(ramp, 0, 50, 100, 200).verdict, DriftVerdict::drifting);
  EXPECT_EQ(detect_gain_drift(flat, 0, 50, 100, 200).verdict, DriftVerdict::settled);
  EXPECT_EQ(detect_gain_drift(wave, 0, 50, 100, 200).verdict, DriftVerdict::fluctuating);
  EXPECT_NEAR(detect_gain_drift(ramp, 0, 50, 100, 200).delta_late, 10.0, 1e-9);
  EXPECT_THROW(detect_gain_drift(ramp, 0, 100, 50, 200), ParameterError);
  EXPECT_THROW(detect_gain_drift(ramp, 0, 50, 100, 300), ParameterError);
  EXPECT_THROW(detect_gain_drift(ramp, 1, 50, 100, 200), DimensionError);
}

TEST(Ensemble, Validation) {
  EnsembleSpec s;
  s.radii = {};
  EXPECT_THROW(s.validate(), ParameterError);
  s.radii = {2.0, 1.0};
  EXPECT_THROW(s.validate(), ParameterError);
  s.radii = {1.0};
  s.horizon = 0.0;
  EXPECT_THROW(s.validate(), ParameterError);
}
