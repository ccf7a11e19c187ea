#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "stabkit/ode.hpp"
#include "stabkit/systems.hpp"

using namespace stabkit;

namespace {

DynamicalSystem linear_scalar(double a, std::size_t m = 0) {
  DynamicalSystem::Spec s;
  s.id = "linear";
  s.name = "x' = a x + d";
  s.state_dim = 1;
  s.disturbance_dim = m;
  s.output_dim = 1;
  s.field = [a, m](const Vector& x, const Vector& d) { return Vector{a * x[0] + (m ? d[0] : 0.0)}; };
  s.output = project({0});
  return DynamicalSystem(std::move(s));
}

DynamicalSystem rotation() {
  DynamicalSystem::Spec s;
  s.id = "rotation";
  s.name = "harmonic oscillator";
  s.state_dim = 2;
  s.output_dim = 2;
  s.field = [](const Vector& x, const Vector&) { return Vector{x[1], -x[0]}; };
  s.output = project({0, 1});
  return DynamicalSystem(std::move(s));
}

DynamicalSystem quadratic_blowup() {
  DynamicalSystem::Spec s;
  s.id = "blowup";
  s.name = "x' = x^2";
  s.state_dim = 1;
  s.output_dim = 1;
  s.check_origin = false;
  s.field = [](const Vector& x, const Vector&) { return Vector{x[0] * x[0]}; };
  s.output = project({0});
  return DynamicalSystem(std::move(s));
}

}  // namespace

TEST(Integrate, ExponentialDecayAdaptive) {
  const auto tr = integrate(linear_scalar(-1.0), {1.0}, Disturbance::zero(0), 1.0);
  EXPECT_EQ(tr.times.front(), 0.0);
  EXPECT_EQ(tr.final_time(), 1.0);
  EXPECT_NEAR(tr.final_state()[0], std::exp(-1.0), 1e-8);
  EXPECT_EQ(tr.states.size(), tr.times.size());
  EXPECT_EQ(tr.outputs.size(), tr.times.size());
}

TEST(Integrate, ExponentialDecayFixedStep) {
  const auto tr = integrate(linear_scalar(-1.0), {1.0}, Disturbance::zero(0), 1.0, IntegratorConfig::fixed(1e-3));
  EXPECT_NEAR(tr.final_state()[0], std::exp(-1.0), 1e-12);
}

TEST(Integrate, RotationPreservesRadius) {
  const auto tr = integrate(rotation(), {1.0, 0.0}, Disturbance::zero(0), 2.0 * std::numbers::pi);
  EXPECT_NEAR(tr.final_state()[0], 1.0, 1e-7);
  EXPECT_NEAR(tr.final_state()[1], 0.0, 1e-7);
}

TEST(Integrate, InitialStateStoredExactly) {
  const Vector x0{0.1 + 0.2, -1.0 / 3.0};
  const auto tr = integrate(rotation(), x0, Disturbance::zero(0), 0.5);
  EXPECT_EQ(tr.states.front(), x0);
}

TEST(Integrate, GridPointsAndBreakpointsHitExactly) {
  const Disturbance d{Signal::piecewise_constant({0.3, 0.77}, {0.0, 1.0, -1.0})};
  const auto tr = integrate(linear_scalar(-1.0, 1), {0.0}, d, 2.0, IntegratorConfig::adaptive().sampled_every(0.25));
  for (double t : {0.25, 0.3, 0.5, 0.75, 0.77, 1.0, 1.75, 2.0})
    EXPECT_NE(std::find(tr.times.begin(), tr.times.end(), t), tr.times.end()) << t;
  const auto g = tr.on_grid(0.25);
  ASSERT_EQ(g.size(), 9u);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_DOUBLE_EQ(g.times[i], 0.25 * static_cast<double>(i));
}

TEST(Integrate, PiecewiseDisturbanceMatchesClosedForm) {
  // x' = -x + d with d = 1 on [0.3, 0.77) and 0 elsewhere.
  const Disturbance d{Signal::piecewise_constant({0.3, 0.77}, {0.0, 1.0, 0.0})};
  const auto tr = integrate(linear_scalar(-1.0, 1), {0.0}, d, 2.0);
  const double at_off = 1.0 - std::exp(-(0.77 - 0.3));
  EXPECT_NEAR(tr.final_state()[0], at_off * std::exp(-(2.0 - 0.77)), 1e-8);
}

TEST(Integrate, FourthOrderConvergence) {
  const double exact = std::cos(1.0);
  auto err = [&](double h) {
    return std::abs(integrate(rotation(), {1.0, 0.0}, Disturbance::zero(0), 1.0, IntegratorConfig::fixed(h))
                        .final_state()[0] -
                    exact);
  };
  for (double h : {0.1, 0.05, 0.025}) {
    const double order = std::log2(err(h) / err(h / 2));
    EXPECT_NEAR(order, 4.0, 0.15) << "h = " << h;
  }
}

TEST(Integrate, DivergenceFlagStopsRun) {
  IntegratorConfig cfg;
  cfg.blow_up = 1e6;
  const auto tr = integrate(quadratic_blowup(), {1.0}, Disturbance::zero(0), 2.0, cfg);
  EXPECT_TRUE(tr.diverged);
  EXPECT_LT(tr.final_time(), 1.0 + 1e-3);
  EXPECT_GT(tr.final_time(), 0.99);
}

TEST(Integrate, StepLimitExhaustion) {
  IntegratorConfig cfg = IntegratorConfig::fixed(1e-3);
  cfg.max_steps = 10;
  EXPECT_THROW(integrate(rotation(), {1.0, 0.0}, Disturbance::zero(0), 1.0, cfg), StepLimitError);
}

TEST(Integrate, DimensionAndParameterErrors) {
  EXPECT_THROW(integrate(rotation(), {1.0}, Disturbance::zero(0), 1.0), DimensionError);
  EXPECT_THROW(integrate(rotation(), {1.0, 0.0}, Disturbance::zero(1), 1.0), DimensionError);
  EXPECT_THROW(integrate(rotation(), {1.0, 0.0}, Disturbance::zero(0), 0.0), ParameterError);
  EXPECT_THROW(integrate(rotation(), {NAN, 0.0}, Disturbance::zero(0), 1.0), NonFiniteError);
}

TEST(Integrate, NonFiniteFieldReportsState) {
  DynamicalSystem::Spec s;
  s.id = "log";
  s.name = "x' = log(x)";
  s.state_dim = 1;
  s.output_dim = 1;
  s.check_origin = false;
  s.field = [](const Vector& x, const Vector&) { return Vector{x[0] > 0.5 ? -1.0 : std::log(x[0] - 0.5)}; };
  s.output = project({0});
  try {
    integrate(DynamicalSystem(std::move(s)), {1.0}, Disturbance::zero(0), 2.0, IntegratorConfig::fixed(0.01));
    FAIL() << "expected NonFiniteError";
  } catch (const NonFiniteError& e) {
    ASSERT_EQ(e.state().size(), 1u);
    EXPECT_LE(e.state()[0], 0.5);
    EXPECT_NE(std::string(e.what()).find("non-finite"), std::string::npos) << e.what();
  }
}

TEST(Integrate, Deterministic) {
  const auto a = integrate(rotation(), {1.0, 0.5}, Disturbance::zero(0), 3.0, IntegratorConfig::adaptive().sampled_every(0.1));
  const auto b = integrate(rotation(), {1.0, 0.5}, Disturbance::zero(0), 3.0, IntegratorConfig::adaptive().sampled_every(0.1));
  EXPECT_EQ(a.times, b.times);
  EXPECT_EQ(a.states, b.states);
}

TEST(Signal, EvaluationAndSupNorm) {
  EXPECT_EQ(Signal::zero()(3.0), 0.0);
  EXPECT_EQ(Signal::constant(-2.0).sup_norm(5.0), 2.0);
  const auto s = Signal::sinusoid(2.0, std::numbers::pi);
  EXPECT_NEAR(s(0.5), 2.0, 1e-15);
  EXPECT_DOUBLE_EQ(s.sup_norm(10.0), 2.0);
  EXPECT_NEAR(Signal::sinusoid(1.0, 1.0).sup_norm(0.5), std::sin(0.5), 1e-15);
  const auto p = Signal::piecewise_constant({1.0, 2.0}, {0.5, -3.0, 1.0});
  EXPECT_EQ(p(0.99), 0.5);
  EXPECT_EQ(p(1.0), -3.0);
  EXPECT_EQ(p.sup_norm(0.5), 0.5);
  EXPECT_EQ(p.sup_norm(5.0), 3.0);
  const auto tb = Signal::table({0.0, 1.0, 2.0}, {0.0, 2.0, -1.0});
  EXPECT_DOUBLE_EQ(tb(0.5), 1.0);
  EXPECT_DOUBLE_EQ(tb(1.5), 0.5);
  EXPECT_DOUBLE_EQ(tb.sup_norm(2.0), 2.0);
}

TEST(Signal, RejectsBadBreakpoints) {
  EXPECT_THROW(Signal::piecewise_constant({2.0, 1.0}, {0.0, 1.0, 2.0}), ParameterError);
  EXPECT_THROW(Signal::piecewise_constant({1.0}, {0.0}), ParameterError);
  EXPECT_THROW(Signal::table({0.0, 0.0}, {1.0, 2.0}), ParameterError);
}
