#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "stabkit/ode.hpp"
#include "stabkit/registry.hpp"

using namespace stabkit;

TEST(OscillatorPair, FieldAndOutput) {
  const auto sys = systems::make_oscillator_pair([](double s) { return s; });
  EXPECT_EQ(sys.state_dim(), 4u);
  EXPECT_EQ(sys.disturbance_dim(), 0u);
  EXPECT_EQ(sys.field({1, 0, 0, 0}, {}), (Vector{0, 0, -1, 1}));
  EXPECT_EQ(sys.field({0, 0, 0, 0}, {}), (Vector{0, 0, 0, 0}));
  const Vector y = sys.output({0, 0, 3, 4});
  EXPECT_EQ(y, (Vector{3, 4}));
  EXPECT_DOUBLE_EQ(norm2(y), 5.0);
}

TEST(OscillatorPair, WarnsOnWrongSignForce) {
  const auto sys = systems::make_oscillator_pair([](double s) { return -s; });
  EXPECT_FALSE(sys.warnings().empty());
}

TEST(OscillatorPair, EnergyConserved) {
  const auto sys = build_system("eq8");
  const Vector x0{0.3, -0.7, 1.1, 0.2};
  const auto tr = integrate(sys, x0, Disturbance::zero(0), 10.0, IntegratorConfig::adaptive(1e-11, 1e-11));
  const double h0 = oracle::oscillator_energy({x0[0], x0[1], x0[2], x0[3]});
  for (const auto& x : tr.states) EXPECT_NEAR(oracle::oscillator_energy({x[0], x[1], x[2], x[3]}), h0, 1e-8);
}

TEST(ThreeDimGaos, OutputDecaysWhileStateGrows) {
  const auto sys = build_system("eq20");
  EXPECT_EQ(sys.field({1, 2, 3}, {}), (Vector{-10, 0, 4}));
  const auto tr = integrate(sys, {1.0, 0.5, 0.1}, Disturbance::zero(0), 5.0);
  EXPECT_LT(std::abs(tr.final_state()[0]), 1e-3);
  EXPECT_GT(tr.final_state()[2], 0.1 * std::exp(5.0));
}

TEST(ThreeDimGaos, RejectsNonPositiveBound) {
  EXPECT_THROW(systems::make_three_dim_gaos([](double, double) { return 0.0; }, 0.0), ParameterError);
}

TEST(AdaptiveScalar, FieldValues) {
  const auto sys = systems::make_adaptive_scalar(1.0, 2.0, 0.5, true);
  // gain = z + k + sigma (theta + z)^2 = 1 + 2 + 0.5 * 4 = 5
  EXPECT_EQ(sys.field({2.0, 1.0}, {0.25}), (Vector{-10.0 + 0.25, 4.0}));
  EXPECT_THROW(systems::make_adaptive_scalar(0.0, 0.0, 1.0, false), ParameterError);
  EXPECT_THROW(systems::make_adaptive_scalar(0.0, 1.0, -1.0, false), ParameterError);
}

TEST(ClosedForm, MatchesIndependentFormula) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0), kk(0.05, 3.0);
  for (int c = 0; c < 30; ++c) {
    const double xi0 = u(rng), z0 = 2.0 * u(rng), k = kk(rng);
    const systems::ClosedFormAdaptiveScalar cf(xi0, z0, k);
    for (double t : {0.0, 0.1, 0.7, 2.0, 5.0}) {
      EXPECT_NEAR(cf(t).first, oracle::adaptive_scalar_xi(xi0, z0, k, t), 1e-12);
      EXPECT_NEAR(cf(t).second, oracle::adaptive_scalar_z(xi0, z0, k, t), 1e-9);
    }
  }
}

TEST(ClosedForm, AgreesWithSimulation) {
  const double xi0 = 1.3, z0 = -2.5, k = 0.7;
  const systems::ClosedFormAdaptiveScalar cf(xi0, z0, k);
  const auto tr = integrate(systems::make_adaptive_scalar(0.0, k, 0.0, false), {xi0, z0}, Disturbance::zero(0), 10.0,
                            IntegratorConfig::adaptive(1e-12, 1e-12));
  for (std::size_t i = 0; i < tr.size(); ++i) {
    EXPECT_NEAR(tr.states[i][0], cf(tr.times[i]).first, 1e-8);
    EXPECT_NEAR(tr.states[i][1], cf(tr.times[i]).second, 1e-8);
  }
}

TEST(ClosedForm, PeakTimeAndValue) {
  const double xi0 = 0.8, z0 = -3.0, k = 1.0;
  const systems::ClosedFormAdaptiveScalar cf(xi0, z0, k);
  ASSERT_TRUE(cf.peak_time().has_value());
  const double t_star = oracle::golden_argmax([&](double t) { return oracle::adaptive_scalar_xi(xi0, z0, k, t); }, 0.0, 10.0);
  EXPECT_NEAR(*cf.peak_time(), t_star, 1e-5);
  EXPECT_NEAR(*cf.peak_value(), oracle::adaptive_scalar_xi(xi0, z0, k, t_star), 1e-10);
  EXPECT_DOUBLE_EQ(*cf.peak_value(), std::hypot(xi0, z0 + k));
  EXPECT_GE(cf.K(), std::abs(xi0));
}

TEST(ClosedForm, NoPeakOutsideRegime) {
  EXPECT_FALSE(systems::ClosedFormAdaptiveScalar(1.0, 0.5, 1.0).peak_time());
  EXPECT_FALSE(systems::ClosedFormAdaptiveScalar(-1.0, -3.0, 1.0).peak_value());
}

TEST(ClosedForm, LargeTimeDoesNotOverflow) {
  const systems::ClosedFormAdaptiveScalar cf(1.0, 1.0, 2.0);
  const auto [xi, z] = cf(1e4);
  EXPECT_TRUE(std::isfinite(xi));
  EXPECT_TRUE(std::isfinite(z));
  EXPECT_NEAR(xi, 0.0, 1e-300);
}

TEST(PubibsExample, FieldValues) {
  const auto sys = build_system("eq57");
  // x1' = (1 + d - x1^2) x1 + d, x2' = -(x2 + d)
  EXPECT_EQ(sys.field({2.0, 1.0}, {0.5}), (Vector{(1.5 - 4.0) * 2.0 + 0.5, -1.5}));
}

TEST(SmallGainPair, FieldAndValidation) {
  const auto sys = build_system("eq73");
  EXPECT_EQ(sys.field({1.0, 2.0}, {0.5}), (Vector{-1.0 + 0.5 * 8.0 + 0.5, -8.0 + 1.0}));
  EXPECT_THROW(systems::make_small_gain_pair(1.2, 3), ParameterError);
  EXPECT_THROW(systems::make_small_gain_pair(0.5, 2), ParameterError);
  EXPECT_THROW(build_system("eq73", {{"m", 2.5}}), ParameterError);
}

TEST(DeadzoneLoop, FieldValues) {
  const auto sys = build_system("eq111");
  const double xi = 1.0, z = 0.0;
  const double damping = 1.0 + 4.0 / 2.0 + 2.0 * 2.0 / 4.0;
  EXPECT_DOUBLE_EQ(systems::deadzone_damping(1, 1, xi, z), damping);
  const Vector f = sys.field({xi, z}, {0.2, 3.0});
  EXPECT_DOUBLE_EQ(f[0], 3.0 - damping + 0.2);
  EXPECT_DOUBLE_EQ(f[1], 0.5 - 0.125);
  EXPECT_EQ(sys.field({0.4, 0.0}, {0.0, 0.0})[1], 0.0);
}

TEST(PlanarSaturated, FieldValues) {
  const auto sys = build_system("eq121");
  EXPECT_EQ(sys.field({5.0, 0.5}, {0.0}), (Vector{0.0, -0.5 + 0.75 * 1.0}));
  EXPECT_EQ(sys.field({5.0, 2.0}, {0.0}), (Vector{0.0, -2.0}));
}

TEST(Registry, EveryBuiltinVanishesAtOrigin) {
  for (const auto& e : system_registry()) {
    const auto sys = e.build(e.defaults);
    EXPECT_FALSE(sys.id().empty()) << e.id;
    if (!sys.check_origin()) continue;
    const Vector f = sys.field(Vector(sys.state_dim(), 0.0), Vector(sys.disturbance_dim(), 0.0));
    EXPECT_EQ(norm_inf(f), 0.0) << e.id;
    EXPECT_EQ(norm_inf(sys.output(Vector(sys.state_dim(), 0.0))), 0.0) << e.id;
  }
}

TEST(Registry, UnknownIdsAndParameters) {
  EXPECT_THROW(find_system("nope"), ParameterError);
  EXPECT_THROW(build_system("eq24", {{"zeta", 1.0}}), ParameterError);
  EXPECT_EQ(build_system("eq24", {{"k", 0.2}}).params().at("k"), 0.2);
}
