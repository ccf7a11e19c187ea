#ifndef STABKIT_CERTIFY_HPP
#define STABKIT_CERTIFY_HPP

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stabkit/certificates.hpp"
#include "stabkit/config.hpp"
#include "stabkit/expr.hpp"
#include "stabkit/fields.hpp"
#include "stabkit/registry.hpp"

namespace stabkit {

/// Certificate kinds accepted by the `kind` key.
inline const std::vector<std::string>& certificate_kinds() {
  static const std::vector<std::string> k{"forward-completeness", "output-pair", "gaos",     "ugaos",      "pubibs",
                                          "pios",                 "small-gain",  "deadzone", "composition", "oag"};
  return k;
}

namespace detail {

/// Declared class of a comparison function, by the role its name plays.
inline ComparisonKind comparison_role(const std::string& name) {
  static const std::map<std::string, ComparisonKind> roles{
      {"a", ComparisonKind::class_k_inf},      {"rho", ComparisonKind::positive_definite},
      {"rho1", ComparisonKind::positive_definite}, {"rho2", ComparisonKind::positive_definite},
      {"gamma1", ComparisonKind::class_k},      {"gamma2", ComparisonKind::class_k},
  };
  if (const auto it = roles.find(name); it != roles.end()) return it->second;
  if (name.rfind("rho", 0) == 0) return ComparisonKind::positive_definite;
  return ComparisonKind::nondecreasing;
}

class CertifyBuilder {
 public:
  explicit CertifyBuilder(const Config& cfg) : cfg_(cfg) {
    kind_ = cfg_.text("kind");
    if (std::find(certificate_kinds().begin(), certificate_kinds().end(), kind_) == certificate_kinds().end())
      throw ConfigError("unknown certificate kind '" + kind_ + "'");
    if (cfg_.has("system")) {
      ParameterSet overrides;
      for (const auto& name : cfg_.suffixes("param.")) overrides.set(name, cfg_.number("param." + name));
      try {
        sys_ = build_system(cfg_.text("system"), overrides);
      } catch (const ParameterError& e) {
        throw ConfigError(e.what());
      }
      for (const auto& [k, v] : sys_->params().values()) constants_[k] = v;
    } else if (kind_ != "composition") {
      throw ConfigError("missing config key 'system'");
    }
    for (const auto& name : cfg_.suffixes("const.")) constants_[name] = scalar("const." + name);
  }

  Certificate build() {
    if (kind_ == "composition") return composition();
    const DynamicalSystem& sys = *sys_;
    const Region region = make_region(sys);
    const SamplingPlan plan = make_plan();
    if (kind_ == "forward-completeness") {
      ForwardCompletenessOptions opt;
      if (cfg_.has("fn.c")) opt.c = fn("c");
      if (cfg_.has("fn.sigma")) opt.sigma = fn("sigma");
      if (cfg_.has("opt.sublevel")) opt.sublevel = scalar("opt.sublevel");
      return build_forward_completeness(sys, field("H"), opt, region, plan);
    }
    if (kind_ == "output-pair") return build_output_stability_pair(sys, field("W"), fn("a"), region, plan);
    if (kind_ == "ugaos") return build_ugaos(sys, field("V"), field("W"), fn("a"), fn("rho"), region, plan);
    if (kind_ == "gaos") {
      GaosVariant v;
      const std::string rate = cfg_.text("variant.rate");
      if (rate == "upper") v.rate = GaosVariant::RateBound::upper;
      else if (rate == "lower") v.rate = GaosVariant::RateBound::lower;
      else throw ConfigError("variant.rate must be 'upper' or 'lower'");
      const std::string rho = cfg_.text("variant.rho");
      if (rho == "nondecreasing") v.rho_condition = GaosVariant::RhoCondition::nondecreasing;
      else if (rho == "dominated") v.rho_condition = GaosVariant::RhoCondition::dominated;
      else throw ConfigError("variant.rho must be 'nondecreasing' or 'dominated'");
      v.gamma = fn("gamma");
      if (v.rho_condition == GaosVariant::RhoCondition::dominated) v.zeta = fn("zeta");
      return build_gaos(sys, field("V"), field("W"), fn("a"), fn("rho"), v, region, plan);
    }
    if (kind_ == "pubibs") return build_pubibs(sys, family("H"), fn("R"), region, plan);
    if (kind_ == "pios") {
      const auto fam = family("V");
      std::vector<ComparisonFunction> rhos;
      if (cfg_.has("fn.rho")) {
        rhos.assign(fam.size(), fn("rho"));
      } else {
        for (std::size_t i = 1; i <= fam.size(); ++i) rhos.push_back(fn("rho" + std::to_string(i)));
      }
      std::vector<double> gains{0.25, 0.5, 1.0, 2.0};
      if (cfg_.has("levels.gain")) gains = cfg_.numbers("levels.gain");
      return build_pios(sys, fam, fn("a"), fn("phi"), rhos, region, plan, gains);
    }
    if (kind_ == "small-gain") {
      SmallGainFunctions f;
      f.a = fn("a");
      f.gamma1 = fn("gamma1");
      f.gamma2 = fn("gamma2");
      f.zeta = fn("zeta");
      f.p = fn("p");
      f.c = cfg_.has("opt.c") ? scalar("opt.c") : 0.0;
      f.rho1 = fn("rho1");
      if (cfg_.has("fn.rho2")) f.rho2 = fn("rho2");
      return build_small_gain(sys, field("V1"), field("V2"), field("U"), f, region, plan);
    }
    if (kind_ == "deadzone") {
      DeadzoneFunctions f;
      f.rho = fn("rho");
      f.kappa = fn("kappa");
      f.lambda = fn("lambda");
      f.a = scalar("opt.a");
      f.b = scalar("opt.b");
      f.c = scalar("opt.c");
      f.delta = cfg_.has("opt.delta") ? scalar("opt.delta") : 1.0;
      f.theta_channels = cfg_.count_or("opt.theta_channels", 1);
      return build_deadzone(sys, field("V"), f, region, plan);
    }
    // oag
    OagOptions o;
    o.levels = cfg_.numbers("levels.s");
    const std::string h = cfg_.text("field.H"), q = cfg_.text("field.Q");
    const std::size_t n = sys.state_dim();
    auto consts = constants_;
    o.H = [h, n, consts](double s) {
      auto c = consts;
      c["s"] = s;
      return ScalarField::from_expression("H", h, n, c);
    };
    o.Q = [q, n, consts](double s) {
      auto c = consts;
      c["s"] = s;
      return ScalarField::from_expression("Q", q, n, c);
    };
    o.b = fn("b");
    if (cfg_.has("opt.q_tol")) o.q_tol = scalar("opt.q_tol");
    if (cfg_.has("opt.h_tol")) o.h_tol = scalar("opt.h_tol");
    return build_oag(sys, o, region, plan);
  }

  /// Every `field.*` entry as a ScalarField; oag fields are taken at s = `level`.
  std::vector<ScalarField> scalar_fields(double level = 1.0) const {
    std::vector<ScalarField> out;
    if (!sys_) return out;
    auto consts = constants_;
    if (kind_ == "oag") consts["s"] = level;
    for (const auto& name : cfg_.suffixes("field."))
      out.push_back(ScalarField::from_expression(name, cfg_.text("field." + name), sys_->state_dim(), consts));
    return out;
  }

 private:
  Certificate composition() {
    std::vector<double> grid = default_composition_grid();
    if (cfg_.has("levels.s")) grid = cfg_.numbers("levels.s");
    const auto g1 = fn("gamma1"), g2 = fn("gamma2");
    Certificate cert("small-gain-composition", std::nullopt, Region::cube(1, 1.0), SamplingPlan{1, 0, 0, 1});
    cert.add(small_gain_composition(g1, g2, true, grid));
    cert.add(small_gain_composition(g1, g2, false, grid));
    return cert;
  }

  double scalar(const std::string& key) const {
    const std::string t = cfg_.text(key);
    try {
      return expr::Expression::parse(t, {}, constants_)(Vector{});
    } catch (const ParameterError& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  }

  ScalarField field(const std::string& name) const {
    const std::string key = "field." + name;
    try {
      return ScalarField::from_expression(name, cfg_.text(key), sys_->state_dim(), constants_);
    } catch (const ConfigError&) {
      throw;
    } catch (const ParameterError& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  }

  std::vector<ScalarField> family(const std::string& base) const {
    std::vector<ScalarField> out;
    for (std::size_t i = 1; cfg_.has("field." + base + std::to_string(i)); ++i)
      out.push_back(field(base + std::to_string(i)));
    if (out.empty()) throw ConfigError("need at least field." + base + "1");
    return out;
  }

  ComparisonFunction fn(const std::string& name) const {
    const std::string key = "fn." + name;
    try {
      return ComparisonFunction::from_expression(comparison_role(name), cfg_.text(key), constants_);
    } catch (const ConfigError&) {
      throw;
    } catch (const ParameterError& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  }

  std::vector<Interval> axes(const std::string& prefix, std::size_t count) const {
    std::vector<Interval> out;
    std::optional<Interval> all;
    if (cfg_.has("region." + prefix)) all = interval("region." + prefix);
    for (std::size_t i = 1; i <= count; ++i) {
      const std::string key = "region." + prefix + std::to_string(i);
      if (cfg_.has(key)) out.push_back(interval(key));
      else if (all) out.push_back(*all);
      else if (prefix == "d") out.push_back({0.0, 0.0});
      else throw ConfigError("missing config key '" + key + "' (or region.x for every axis)");
    }
    for (const auto& s : cfg_.suffixes("region." + prefix)) {
      const double v = std::atof(s.c_str());
      if (v < 1 || v > static_cast<double>(count)) throw ConfigError("region." + prefix + s + " is out of range");
    }
    return out;
  }

  Interval interval(const std::string& key) const {
    const auto v = cfg_.numbers(key);
    if (v.size() != 2 || !(v[0] <= v[1])) throw ConfigError("config key '" + key + "' must be 'lo, hi' with lo <= hi");
    return {v[0], v[1]};
  }

  Region make_region(const DynamicalSystem& sys) const {
    try {
      return Region::box(axes("x", sys.state_dim()), axes("d", sys.disturbance_dim()));
    } catch (const ConfigError&) {
      throw;
    } catch (const ParameterError& e) {
      throw ConfigError(e.what());
    }
  }

  SamplingPlan make_plan() const {
    SamplingPlan p;
    p.grid = cfg_.count_or("plan.grid", p.grid);
    p.grid_d = cfg_.count_or("plan.grid_d", p.grid_d);
    p.random = cfg_.count_or("plan.random", p.random);
    p.seed = cfg_.count_or("plan.seed", p.seed);
    try {
      p.validate();
    } catch (const ParameterError& e) {
      throw ConfigError(e.what());
    }
    return p;
  }

  const Config& cfg_;
  std::string kind_;
  std::optional<DynamicalSystem> sys_;
  std::map<std::string, double> constants_;
};

}  // namespace detail

/// Builds the certificate described by `cfg`; unknown keys raise ConfigError.
inline Certificate certificate_from_config(const Config& cfg) {
  detail::CertifyBuilder b(cfg);
  Certificate cert = b.build();
  cfg.reject_unused();
  return cert;
}

/// The scalar fields named by a certificate config (see CertifyBuilder::scalar_fields).
inline std::vector<ScalarField> certificate_fields(const Config& cfg, double level = 1.0) {
  return detail::CertifyBuilder(cfg).scalar_fields(level);
}

struct BuiltinCertificate {
  std::string name;
  std::string description;
  std::string config;
};

/// Ready-made certificate configurations for the catalogue systems.
inline const std::vector<BuiltinCertificate>& builtin_certificates() {
  static const std::vector<BuiltinCertificate> b{
      {"eq8", "oscillator pair: energy is conserved, so forward completeness holds with c = sigma = 0",
       R"(system = eq8
kind = forward-completeness
field.H = 0.5*x3^2 + 0.5*x4^2 + 0.5*(x1 - x2)^2
fn.c = 0
fn.sigma = 0
opt.sublevel = 2
region.x = -5, 5
plan.grid = 11
)"},
      {"eq8-pair", "oscillator pair: Lagrange and Lyapunov output stability via W = energy",
       R"(system = eq8
kind = output-pair
field.W = 0.5*x3^2 + 0.5*x4^2 + 0.5*(x1 - x2)^2
fn.a = 0.5*s^2
region.x = -5, 5
plan.grid = 11
)"},
      {"eq20", "three-dimensional GAOS system with g = 0, upper rate bound R^2/4",
       R"(system = eq20
kind = gaos
field.V = 0.5*x1^2 + x2^2/(1 + x2^2)
field.W = 0.5*x1^2
fn.a = 0.5*s^2
fn.rho = 2*s
fn.gamma = R^2/4
variant.rate = upper
variant.rho = nondecreasing
region.x = -3, 3
plan.grid = 21
)"},
      {"eq24", "adaptive scalar loop: UGAOS when k >= 1/(4 sigma) + theta",
       R"(system = eq24
param.k = 1
param.sigma = 1
param.theta = 0
kind = ugaos
field.V = 0.5*x1^2 + 0.5*x2^2
field.W = 0.5*x1^2
fn.a = 0.5*s^2
fn.rho = 2*k*s
region.x = -5, 5
plan.grid = 41
)"},
      {"eq57", "p-UBIBS example with R(s) = max(s + 2, s^2)/2",
       R"(system = eq57
kind = pubibs
field.H1 = 0.5*x1^2
field.H2 = 0.5*x2^2
fn.R = max(s + 2, s^2)/2
region.x = -4, 4
region.d = -2, 2
plan.grid = 41
plan.grid_d = 9
)"},
      {"eq62", "disturbed adaptive scalar loop: p-IOS with gain s/eps, eps = (k - 1/(4 sigma) - theta)/2",
       R"(system = eq62
kind = pios
const.epsilon = (k - 1/(4*sigma) - theta)/2
field.V1 = 0.5*x1^2
fn.a = 0.5*s^2
fn.phi = s^2/(2*epsilon^2)
fn.rho = 2*epsilon*s
region.x = -3, 3
region.d = -2, 2
plan.grid = 41
plan.grid_d = 9
)"},
      {"eq73", "small-gain pair with lambda = 0.8; dissipation rate 0.2 min(s, (2s)^2)",
       R"(system = eq73
param.b = 0.5
param.m = 3
kind = small-gain
const.lambda = 0.8
field.V1 = 0.5*x1^2
field.V2 = 0.5*x2^2
field.U = 0.5*x1^2 + 0.5*x2^2
fn.a = 0.25*s^2
fn.gamma1 = 2^(m - 1)*b^2*s^m/lambda^2
fn.gamma2 = 2^((1 - m)/m)*s^(1/m)/lambda^(2/m)
fn.zeta = 2*s^2/(1 - lambda)^2
fn.p = 3*s + 4*s^3
fn.rho1 = (1 - lambda)*min(s, (2*s)^((m + 1)/2))
opt.c = 0
region.x = -3, 3
region.d = -1, 1
plan.grid = 41
plan.grid_d = 9
)"},
      {"eq73-composition", "small-gain contraction of the pair gains alone (any b, including |b| >= 1)",
       R"(kind = composition
const.b = 0.5
const.m = 3
const.lambda = 0.8
fn.gamma1 = 2^(m - 1)*b^2*s^m/lambda^2
fn.gamma2 = 2^((1 - m)/m)*s^(1/m)/lambda^(2/m)
)"},
      {"eq111", "deadzone adaptive loop: dissipation with b = 1, kappa = lambda = identity",
       R"(system = eq111
kind = deadzone
field.V = 0.5*x1^2
fn.rho = c*s
fn.kappa = s
fn.lambda = s
opt.a = a
opt.b = 1
opt.c = c
opt.delta = 1
opt.theta_channels = 1
region.x1 = -3, 3
region.x2 = -2, 3
region.d1 = -1, 1
region.d2 = -4, 4
plan.grid = 41
plan.grid_d = 9
)"},
      {"eq111-oag", "deadzone adaptive loop: zero p-OAG with residual sqrt(2 eps)",
       R"(system = eq111
kind = oag
field.H = -exp(x2)
field.Q = Gamma*pos(0.5*x1^2 - eps)
fn.b = sqrt(2*eps)
levels.s = 0, 0.5, 1, 2
region.x1 = -3, 3
region.x2 = -2, 3
plan.grid = 41
plan.grid_d = 5
)"},
      {"eq121", "planar saturated system: p-UBIBS with H1 = xi^2/2, H2 = y^2/2, R = 1/2",
       R"(system = eq121
kind = pubibs
field.H1 = 0.5*x1^2
field.H2 = 0.5*x2^2
fn.R = 0.5
region.x = -3, 3
region.d = -2, 2
plan.grid = 41
plan.grid_d = 9
)"},
      {"eq121-oag", "planar saturated system: asymptotic output bound 1",
       R"(system = eq121
kind = oag
field.H = 0.5*pos(0.5*x2^2 - 0.5)^2
field.Q = x2^2*pos(0.5*x2^2 - 0.5)
fn.b = 1
levels.s = 0, 0.5, 1, 2
region.x = -3, 3
plan.grid = 41
plan.grid_d = 9
)"},
  };
  return b;
}

inline const BuiltinCertificate* find_builtin_certificate(const std::string& name) {
  for (const auto& b : builtin_certificates())
    if (b.name == name) return &b;
  return nullptr;
}

/// Loads a config from a file path, or by built-in name when no such file exists.
inline Config load_certificate_config(const std::string& path_or_name) {
  if (std::ifstream(path_or_name)) return Config::parse(io::read_text(path_or_name));
  if (const auto* b = find_builtin_certificate(path_or_name)) return Config::parse(b->config);
  throw ConfigError("'" + path_or_name + "' is neither a readable config file nor a built-in certificate");
}

}  // namespace stabkit

#endif  // STABKIT_CERTIFY_HPP
