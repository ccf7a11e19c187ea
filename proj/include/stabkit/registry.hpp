#ifndef STABKIT_REGISTRY_HPP
#define STABKIT_REGISTRY_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stabkit/controllers.hpp"
#include "stabkit/core.hpp"
#include "stabkit/system.hpp"
#include "stabkit/systems.hpp"

namespace stabkit {

/// A built-in system addressable by a stable string id.
struct SystemEntry {
  std::string id;
  std::string description;
  ParameterSet defaults;
  std::function<DynamicalSystem(const ParameterSet&)> build;
  /// Set for closed loops that also expose estimate/error forms and u.
  std::function<ClosedLoop(const ParameterSet&)> loop;
};

namespace detail {

inline int odd_exponent(double m) {
  if (m != std::floor(m) || m < 1.0) throw ParameterError("exponent m must be a positive integer");
  return static_cast<int>(m);
}

inline std::vector<SystemEntry> make_registry() {
  using P = const ParameterSet&;
  std::vector<SystemEntry> r;
  r.push_back({"eq8", "coupled oscillator pair with spring force g(s) = s; output (v1, v2)", {},
               [](P) { return systems::make_oscillator_pair([](double s) { return s; }); }, {}});
  r.push_back({"eq20", "three-dimensional GAOS system with g = 0 (bound R); output y", {{"R", 1.0}},
               [](P p) { return systems::make_three_dim_gaos([](double, double) { return 0.0; }, p.at("R")); }, {}});
  r.push_back({"eq24", "adaptive scalar loop xi' = -(z + k + sigma (theta + z)^2) xi, z' = xi^2",
               {{"theta", 0.0}, {"k", 1.0}, {"sigma", 0.0}},
               [](P p) { return systems::make_adaptive_scalar(p.at("theta"), p.at("k"), p.at("sigma"), false); }, {}});
  r.push_back({"eq62", "disturbed adaptive scalar loop (additive d on xi')",
               {{"theta", 0.0}, {"k", 2.0}, {"sigma", 1.0}},
               [](P p) { return systems::make_adaptive_scalar(p.at("theta"), p.at("k"), p.at("sigma"), true); }, {}});
  r.push_back({"eq57", "p-UBIBS example with p = q = 1", {},
               [](P) {
                 auto one = [](const Vector&, double) { return 1.0; };
                 return systems::make_pubibs_example(one, one);
               },
               {}});
  r.push_back({"eq73", "small-gain interconnection x1' = -x1 + b x2^m + d, x2' = -x2^m + x1",
               {{"b", 0.5}, {"m", 3.0}},
               [](P p) { return systems::make_small_gain_pair(p.at("b"), odd_exponent(p.at("m"))); }, {}});
  r.push_back({"eq111", "deadzone adaptive loop, disturbance channels (d, theta)",
               {{"a", 1.0}, {"c", 1.0}, {"Gamma", 1.0}, {"eps", 0.125}},
               [](P p) { return systems::make_deadzone_loop(p.at("a"), p.at("c"), p.at("Gamma"), p.at("eps")); }, {}});
  r.push_back({"eq121", "planar saturated system with p = 1, q = 2y; output y", {},
               [](P) {
                 return systems::make_planar_saturated([](double, double, double) { return 1.0; },
                                                       [](double, double y, double) { return 2.0 * y; });
               },
               {}});
  auto highgain = [](P p) { return make_high_gain_loop(p.at("theta"), p.at("c"), p.at("Gamma"), p.at("q")); };
  auto sigma = [](P p) {
    return make_sigma_mod_loop(p.at("theta"), p.at("c"), p.at("Gamma"), p.at("q"), p.at("sigma"));
  };
  const ParameterSet hg{{"theta", 3.0}, {"c", 1.0}, {"Gamma", 10.0}, {"q", 0.5}};
  const ParameterSet sg{{"theta", 3.0}, {"c", 1.0}, {"Gamma", 10.0}, {"q", 0.5}, {"sigma", 0.5}};
  r.push_back({"eq126", "adaptive high-gain loop in error coordinates (y, z)", hg,
               [highgain](P p) { return highgain(p).error_form; }, highgain});
  r.push_back({"eq129", "sigma-modification loop in error coordinates (y, z)", sg,
               [sigma](P p) { return sigma(p).error_form; }, sigma});
  r.push_back({"loop-highgain", "adaptive high-gain loop in estimate coordinates (y, theta_hat)", hg,
               [highgain](P p) { return highgain(p).estimate_form; }, highgain});
  r.push_back({"loop-sigma", "sigma-modification loop in estimate coordinates (y, theta_hat)", sg,
               [sigma](P p) { return sigma(p).estimate_form; }, sigma});
  auto matching = [](P p) {
    const double conv = p.at("convention");
    if (conv != 0.0 && conv != 1.0) throw ParameterError("convention must be 0 (inverse gain) or 1 (direct gain)");
    return make_scalar_matching_loop(p.at("theta"), p.at("c"), p.at("q"), p.at("Gamma"),
                                     conv == 0.0 ? UpdateGainConvention::inverse_gamma : UpdateGainConvention::gamma);
  };
  r.push_back({"loop-matching",
               "scalar matching-condition loop; convention 0 = inverse gain in the update, 1 = direct gain",
               {{"theta", 3.0}, {"c", 1.0}, {"Gamma", 10.0}, {"q", 0.5}, {"convention", 0.0}},
               [matching](P p) { return matching(p).estimate_form; }, matching});
  auto deadzone = [](P p) {
    return make_deadzone_controller_loop(p.at("a"), p.at("c"), p.at("Gamma"), p.at("eps"));
  };
  r.push_back({"loop-deadzone", "deadzone controller loop with control extractor",
               {{"a", 1.0}, {"c", 1.0}, {"Gamma", 1.0}, {"eps", 0.125}},
               [deadzone](P p) { return deadzone(p).estimate_form; }, deadzone});
  return r;
}

}  // namespace detail

inline const std::vector<SystemEntry>& system_registry() {
  static const std::vector<SystemEntry> r = detail::make_registry();
  return r;
}

inline const SystemEntry& find_system(const std::string& id) {
  for (const auto& e : system_registry())
    if (e.id == id) return e;
  throw ParameterError("unknown system id '" + id + "'");
}

/// Defaults of `entry` overridden by `overrides`; unknown names are rejected.
inline ParameterSet merge_parameters(const SystemEntry& entry, const ParameterSet& overrides) {
  ParameterSet p = entry.defaults;
  for (const auto& [k, v] : overrides.values()) {
    if (!entry.defaults.contains(k)) throw ParameterError("system " + entry.id + " has no parameter '" + k + "'");
    p.set(k, v);
  }
  return p;
}

inline DynamicalSystem build_system(const std::string& id, const ParameterSet& overrides = {}) {
  const auto& e = find_system(id);
  return e.build(merge_parameters(e, overrides));
}

}  // namespace stabkit

#endif  // STABKIT_REGISTRY_HPP
