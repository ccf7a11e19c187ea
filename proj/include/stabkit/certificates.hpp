#ifndef STABKIT_CERTIFICATES_HPP
#define STABKIT_CERTIFICATES_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "stabkit/core.hpp"
#include "stabkit/fields.hpp"
#include "stabkit/sampling.hpp"
#include "stabkit/system.hpp"

// Sampling-based falsification of Lyapunov-like certificates. Every checker
// assembles a Certificate (a list of named inequalities over a region) and
// runs it. A pass only means no sampled point violated an inequality.

namespace stabkit {

/// Raised when a checker's own precondition (not a sampled inequality) fails.
class PreconditionError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

enum class Scope {
  state_disturbance,  // samples over the x box times the d box
  state,              // samples over the x box only (d = 0 when evaluated)
  points              // an explicit list of points (e.g. scalar s-grids)
};

enum class Relation { le, lt };

struct Evaluation {
  double lhs = 0.0;
  double rhs = 0.0;
};

struct Inequality {
  std::string id;
  std::string description;
  Scope scope = Scope::state_disturbance;
  Relation relation = Relation::le;
  std::optional<double> level;
  /// Implication premise; samples where it returns false are skipped.
  std::function<bool(const Vector& x, const Vector& d)> premise;
  std::function<Evaluation(const Vector& x, const Vector& d)> evaluate;
  /// Sample points for Scope::points.
  std::vector<Vector> points;
};

struct Witness {
  std::string inequality_id;
  std::optional<double> level;
  std::size_t sample_index = 0;
  Vector x;
  Vector d;
  double lhs = 0.0;
  double rhs = 0.0;
  bool strict = false;
};

struct InequalitySummary {
  std::string id;
  std::string description;
  std::optional<double> level;
  std::size_t samples = 0;
  std::size_t premise_held = 0;
  std::size_t violations = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  Vector worst_x;
  Vector worst_d;
};

struct CertificateReport {
  std::string certificate;
  std::string system_id;
  std::vector<Witness> witnesses;
  std::vector<InequalitySummary> inequalities;
  std::vector<std::string> notes;
  std::vector<std::pair<std::string, double>> info;
  double worst_margin = std::numeric_limits<double>::infinity();

  bool violated() const noexcept { return !witnesses.empty(); }
  std::string verdict() const { return violated() ? "violated" : "no-violation-found"; }

  std::size_t violation_count(const std::string& id) const {
    std::size_t n = 0;
    for (const auto& s : inequalities)
      if (s.id == id) n += s.violations;
    return n;
  }

  const InequalitySummary* summary(const std::string& id) const {
    for (const auto& s : inequalities)
      if (s.id == id) return &s;
    return nullptr;
  }

  std::optional<double> info_value(const std::string& name) const {
    for (const auto& [k, v] : info)
      if (k == name) return v;
    return std::nullopt;
  }
};

struct Tolerances {
  double abs = 1e-9;
  double rel = 1e-9;
  /// An implication premise "a >= b" holds only when a - b >= premise.
  double premise = 1e-9;
  std::size_t max_witnesses = 20;
};

/// True when lhs <= rhs fails beyond the tolerance (or lhs < rhs fails, for strict checks).
inline bool is_violation(Relation r, double lhs, double rhs, const Tolerances& tol) {
  if (std::isnan(lhs) || std::isnan(rhs)) return true;
  if (r == Relation::lt) return !(lhs < rhs);
  return lhs > rhs + tol.abs + tol.rel * std::max(std::abs(lhs), std::abs(rhs));
}

class Certificate {
 public:
  Certificate(std::string name, std::optional<DynamicalSystem> sys, Region region, SamplingPlan plan,
              Tolerances tol = {})
      : name_(std::move(name)), sys_(std::move(sys)), region_(std::move(region)), plan_(plan), tol_(tol) {
    plan_.validate();
    region_.validate();
    if (sys_) {
      if (region_.x.size() != sys_->state_dim())
        throw DimensionError(name_ + ": region has " + std::to_string(region_.x.size()) +
                             " state axes, system has " + std::to_string(sys_->state_dim()));
      if (region_.d.size() != sys_->disturbance_dim())
        throw DimensionError(name_ + ": region has " + std::to_string(region_.d.size()) +
                             " disturbance axes, system has " + std::to_string(sys_->disturbance_dim()));
    }
  }

  const std::string& name() const noexcept { return name_; }
  const Region& region() const noexcept { return region_; }
  const SamplingPlan& plan() const noexcept { return plan_; }
  const Tolerances& tolerances() const noexcept { return tol_; }
  const std::vector<Inequality>& inequalities() const noexcept { return ineqs_; }

  void add(Inequality q) { ineqs_.push_back(std::move(q)); }
  void note(std::string n) { notes_.push_back(std::move(n)); }
  void info(std::string k, double v) { info_.emplace_back(std::move(k), v); }

  /// Samples of the x box (first) or of the x box times the d box.
  SampleSet samples(Scope scope) const {
    std::vector<Interval> axes = region_.x;
    if (scope == Scope::state_disturbance) axes.insert(axes.end(), region_.d.begin(), region_.d.end());
    return SampleSet(axes, region_.x.size(), plan_);
  }

  std::pair<Vector, Vector> split(const Vector& p) const {
    const std::size_t n = region_.x.size();
    Vector x(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(n));
    Vector d(p.begin() + static_cast<std::ptrdiff_t>(n), p.end());
    if (d.empty()) d.assign(region_.d.size(), 0.0);
    return {std::move(x), std::move(d)};
  }

  CertificateReport run() const {
    CertificateReport rep;
    rep.certificate = name_;
    rep.system_id = sys_ ? sys_->id() : "";
    rep.notes = notes_;
    rep.info = info_;
    std::optional<SampleSet> sampled_xd, sampled_x;
    for (const auto& q : ineqs_) {
      InequalitySummary sum;
      sum.id = q.id;
      sum.description = q.description;
      sum.level = q.level;
      std::size_t kept = 0;
      auto visit = [&](std::size_t idx, const Vector& x, const Vector& d) {
        ++sum.samples;
        if (q.premise && !q.premise(x, d)) return;
        ++sum.premise_held;
        const Evaluation ev = q.evaluate(x, d);
        const double margin = ev.rhs - ev.lhs;
        if (margin < sum.worst_margin || sum.worst_x.empty()) {
          sum.worst_margin = std::isnan(margin) ? -INFINITY : margin;
          sum.worst_x = x;
          sum.worst_d = d;
        }
        if (is_violation(q.relation, ev.lhs, ev.rhs, tol_)) {
          ++sum.violations;
          if (kept < tol_.max_witnesses) {
            ++kept;
            rep.witnesses.push_back({q.id, q.level, idx, x, d, ev.lhs, ev.rhs, q.relation == Relation::lt});
          }
        }
      };
      if (q.scope == Scope::points) {
        const Vector dz(region_.d.size(), 0.0);
        for (std::size_t i = 0; i < q.points.size(); ++i) visit(i, q.points[i], dz);
      } else {
        auto& set = q.scope == Scope::state ? sampled_x : sampled_xd;
        if (!set) set.emplace(samples(q.scope));
        for (std::size_t i = 0; i < set->size(); ++i) {
          auto [x, d] = split((*set)[i]);
          if (region_.contains && !region_.contains(x, d)) continue;
          visit(i, x, d);
        }
      }
      if (sum.premise_held > 0) rep.worst_margin = std::min(rep.worst_margin, sum.worst_margin);
      rep.inequalities.push_back(std::move(sum));
    }
    std::stable_sort(rep.witnesses.begin(), rep.witnesses.end(), [](const Witness& a, const Witness& b) {
      return std::tie(a.inequality_id, a.level, a.sample_index) < std::tie(b.inequality_id, b.level, b.sample_index);
    });
    return rep;
  }

  /// Recomputes a witness's two sides from its stored point.
  Evaluation reevaluate(const Witness& w) const {
    for (const auto& q : ineqs_)
      if (q.id == w.inequality_id && q.level == w.level) return q.evaluate(w.x, w.d);
    throw ParameterError("reevaluate: unknown inequality " + w.inequality_id);
  }

  bool reproduces(const Witness& w) const {
    const Evaluation ev = reevaluate(w);
    return ev.lhs == w.lhs && ev.rhs == w.rhs && is_violation(w.strict ? Relation::lt : Relation::le, ev.lhs, ev.rhs, tol_);
  }

 private:
  std::string name_;
  std::optional<DynamicalSystem> sys_;
  Region region_;
  SamplingPlan plan_;
  Tolerances tol_;
  std::vector<Inequality> ineqs_;
  std::vector<std::string> notes_;
  std::vector<std::pair<std::string, double>> info_;
};

namespace detail {

inline bool premise_ge(double a, double b, double tol) { return a - b >= tol; }

inline std::vector<Vector> scalar_points(const std::vector<double>& s) {
  std::vector<Vector> p;
  for (double v : s) p.push_back({v});
  return p;
}

inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
  return g;
}

inline std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

inline void require_field(const ScalarField& f, const DynamicalSystem& sys, const char* what) {
  if (!f.valid()) throw ParameterError(std::string(what) + ": field is required");
  if (f.dim() != sys.state_dim())
    throw DimensionError(std::string(what) + ": field dimension " + std::to_string(f.dim()) +
                         " does not match system dimension " + std::to_string(sys.state_dim()));
}

inline void require_fn(const ComparisonFunction& f, const char* what) {
  if (!f.valid()) throw ParameterError(std::string(what) + " is required");
}

inline void require_autonomous(const DynamicalSystem& sys, const char* what) {
  if (sys.disturbance_dim() != 0)
    throw ParameterError(std::string(what) + ": system " + sys.id() + " has disturbance inputs");
}

// a(|h(x)|) <= F(x)
inline Inequality output_bound(std::string id, const DynamicalSystem& sys, ComparisonFunction a, ScalarField F,
                               std::string desc) {
  Inequality q;
  q.id = std::move(id);
  q.description = std::move(desc);
  q.scope = Scope::state;
  q.evaluate = [sys, a, F](const Vector& x, const Vector&) { return Evaluation{a(norm2(sys.output(x))), F(x)}; };
  return q;
}

// grad F(x) f(x, d) <= bound(x, d)
inline Inequality decay(std::string id, const DynamicalSystem& sys, ScalarField F,
                        std::function<double(const Vector&, const Vector&)> bound, std::string desc,
                        Scope scope = Scope::state_disturbance) {
  Inequality q;
  q.id = std::move(id);
  q.description = std::move(desc);
  q.scope = scope;
  q.evaluate = [sys, F, bound](const Vector& x, const Vector& d) {
    return Evaluation{F.lie_derivative(sys, x, d), bound(x, d)};
  };
  return q;
}

inline Inequality nondecreasing_on_grid(std::string id, ComparisonFunction f, std::string desc) {
  Inequality q;
  q.id = std::move(id);
  q.description = std::move(desc);
  q.scope = Scope::points;
  auto grid = comparison_probe_grid();
  grid.pop_back();
  q.points = scalar_points(grid);
  const auto full = comparison_probe_grid();
  q.evaluate = [f, full](const Vector& p, const Vector&) {
    auto it = std::upper_bound(full.begin(), full.end(), p[0]);
    const double next = it == full.end() ? p[0] : *it;
    return Evaluation{f(p[0]), f(next)};
  };
  return q;
}

}  // namespace detail

/// Growth bound grad H . f <= c(|d|) H + sigma(|d|) with H >= 0.
struct ForwardCompletenessOptions {
  ComparisonFunction c = cf::constant(0.0);
  ComparisonFunction sigma = cf::constant(0.0);
  /// When set, sup |f| over sampled points with H(x) <= r (and |d| <= r) is reported.
  std::optional<double> sublevel;
};

inline Certificate build_forward_completeness(const DynamicalSystem& sys, const ScalarField& H,
                                              const ForwardCompletenessOptions& opt, const Region& region,
                                              const SamplingPlan& plan, const Tolerances& tol = {}) {
  detail::require_field(H, sys, "forward completeness");
  Certificate cert("forward-completeness", sys, region, plan, tol);
  Inequality nonneg;
  nonneg.id = "nonnegative";
  nonneg.description = "H(x) >= 0";
  nonneg.scope = Scope::state;
  nonneg.evaluate = [H](const Vector& x, const Vector&) { return Evaluation{-H(x), 0.0}; };
  cert.add(std::move(nonneg));
  const auto c = opt.c, sigma = opt.sigma;
  cert.add(detail::decay(
      "growth", sys, H,
      [H, c, sigma](const Vector& x, const Vector& d) {
        const double nd = norm2(d);
        return c(nd) * H(x) + sigma(nd);
      },
      "grad H . f <= c(|d|) H + sigma(|d|)"));
  if (opt.sublevel) {
    const double r = *opt.sublevel;
    double sup_f = 0.0;
    const auto set = cert.samples(Scope::state_disturbance);
    for (std::size_t i = 0; i < set.size(); ++i) {
      auto [x, d] = cert.split(set[i]);
      if (H(x) <= r && norm2(d) <= r) sup_f = std::max(sup_f, norm2(sys.field(x, d)));
    }
    cert.info("sup_f_on_sublevel", sup_f);
    cert.note("boundedness of f on sublevel sets is reported, not adjudicated");
  }
  return cert;
}

inline CertificateReport check_forward_completeness(const DynamicalSystem& sys, const ScalarField& H,
                                                    const ForwardCompletenessOptions& opt, const Region& region,
                                                    const SamplingPlan& plan) {
  return build_forward_completeness(sys, H, opt, region, plan).run();
}

/// a(|h(x)|) <= W(x), grad W . f <= 0 and W(0) = 0, for systems without inputs.
inline Certificate build_output_stability_pair(const DynamicalSystem& sys, const ScalarField& W,
                                               const ComparisonFunction& a, const Region& region,
                                               const SamplingPlan& plan, const Tolerances& tol = {}) {
  detail::require_autonomous(sys, "output stability pair");
  detail::require_field(W, sys, "output stability pair");
  detail::require_fn(a, "output stability pair: comparison function a");
  Certificate cert("output-stability-pair", sys, region, plan, tol);
  cert.add(detail::output_bound("output_bound", sys, a, W, "a(|h(x)|) <= W(x)"));
  cert.add(detail::decay(
      "nonincreasing", sys, W, [](const Vector&, const Vector&) { return 0.0; }, "grad W . f <= 0", Scope::state));
  Inequality origin;
  origin.id = "vanishes_at_origin";
  origin.description = "W(0) = 0";
  origin.scope = Scope::points;
  origin.points = {Vector(sys.state_dim(), 0.0)};
  origin.evaluate = [W](const Vector& x, const Vector&) { return Evaluation{std::abs(W(x)), 0.0}; };
  cert.add(std::move(origin));
  return cert;
}

inline CertificateReport check_output_stability_pair(const DynamicalSystem& sys, const ScalarField& W,
                                                     const ComparisonFunction& a, const Region& region,
                                                     const SamplingPlan& plan) {
  return build_output_stability_pair(sys, W, a, region, plan).run();
}

/// The two independent hypothesis choices of the GAOS test: a one-sided rate
/// bound on W and a condition on the dissipation rate rho. No default is
/// imposed; the caller must choose both.
struct GaosVariant {
  enum class RateBound { upper, lower };
  enum class RhoCondition { nondecreasing, dominated };
  RateBound rate = RateBound::upper;
  ComparisonFunction gamma;  // grad W . f <= gamma(V)  or  >= -gamma(V)
  RhoCondition rho_condition = RhoCondition::nondecreasing;
  ComparisonFunction zeta;  // W <= zeta(V), needed for RhoCondition::dominated
};

inline Certificate build_gaos(const DynamicalSystem& sys, const ScalarField& V, const ScalarField& W,
                              const ComparisonFunction& a, const ComparisonFunction& rho, const GaosVariant& variant,
                              const Region& region, const SamplingPlan& plan, const Tolerances& tol = {}) {
  detail::require_autonomous(sys, "GAOS");
  detail::require_field(V, sys, "GAOS V");
  detail::require_field(W, sys, "GAOS W");
  detail::require_fn(a, "GAOS: comparison function a");
  detail::require_fn(rho, "GAOS: dissipation rate rho");
  detail::require_fn(variant.gamma, "GAOS: rate bound gamma");
  if (variant.rho_condition == GaosVariant::RhoCondition::dominated)
    detail::require_fn(variant.zeta, "GAOS: domination function zeta");

  Certificate cert("gaos", sys, region, plan, tol);
  cert.add(detail::output_bound("output_bound_V", sys, a, V, "a(|h(x)|) <= V(x)"));
  cert.add(detail::output_bound("output_bound_W", sys, a, W, "a(|h(x)|) <= W(x)"));
  cert.add(detail::decay(
      "dissipation", sys, V, [W, rho](const Vector& x, const Vector&) { return -rho(W(x)); },
      "grad V . f <= -rho(W(x))", Scope::state));
  const auto gamma = variant.gamma;
  if (variant.rate == GaosVariant::RateBound::upper) {
    cert.add(detail::decay(
        "rate_upper", sys, W, [V, gamma](const Vector& x, const Vector&) { return gamma(V(x)); },
        "grad W . f <= gamma(V(x))", Scope::state));
  } else {
    Inequality q;
    q.id = "rate_lower";
    q.description = "grad W . f >= -gamma(V(x))";
    q.scope = Scope::state;
    q.evaluate = [sys, V, W, gamma](const Vector& x, const Vector& d) {
      return Evaluation{-W.lie_derivative(sys, x, d), gamma(V(x))};
    };
    cert.add(std::move(q));
  }
  if (variant.rho_condition == GaosVariant::RhoCondition::nondecreasing) {
    cert.add(detail::nondecreasing_on_grid("rho_nondecreasing", rho, "rho(s) <= rho(s') on a log grid"));
  } else {
    Inequality q;
    q.id = "dominated";
    q.description = "W(x) <= zeta(V(x))";
    q.scope = Scope::state;
    const auto zeta = variant.zeta;
    q.evaluate = [V, W, zeta](const Vector& x, const Vector&) { return Evaluation{W(x), zeta(V(x))}; };
    cert.add(std::move(q));
  }
  return cert;
}

inline CertificateReport check_gaos(const DynamicalSystem& sys, const ScalarField& V, const ScalarField& W,
                                    const ComparisonFunction& a, const ComparisonFunction& rho,
                                    const GaosVariant& variant, const Region& region, const SamplingPlan& plan) {
  return build_gaos(sys, V, W, a, rho, variant, region, plan).run();
}

/// a(|h|) <= W, grad W . f <= 0, grad V . f <= -rho(W).
inline Certificate build_ugaos(const DynamicalSystem& sys, const ScalarField& V, const ScalarField& W,
                               const ComparisonFunction& a, const ComparisonFunction& rho, const Region& region,
                               const SamplingPlan& plan, const Tolerances& tol = {}) {
  detail::require_autonomous(sys, "UGAOS");
  detail::require_field(V, sys, "UGAOS V");
  detail::require_field(W, sys, "UGAOS W");
  detail::require_fn(a, "UGAOS: comparison function a");
  detail::require_fn(rho, "UGAOS: dissipation rate rho");
  Certificate cert("ugaos", sys, region, plan, tol);
  cert.add(detail::output_bound("output_bound", sys, a, W, "a(|h(x)|) <= W(x)"));
  cert.add(detail::decay(
      "nonincreasing", sys, W, [](const Vector&, const Vector&) { return 0.0; }, "grad W . f <= 0", Scope::state));
  cert.add(detail::decay(
      "dissipation", sys, V, [W, rho](const Vector& x, const Vector&) { return -rho(W(x)); },
      "grad V . f <= -rho(W(x))", Scope::state));
  return cert;
}

inline CertificateReport check_ugaos(const DynamicalSystem& sys, const ScalarField& V, const ScalarField& W,
                                     const ComparisonFunction& a, const ComparisonFunction& rho, const Region& region,
                                     const SamplingPlan& plan) {
  return build_ugaos(sys, V, W, a, rho, region, plan).run();
}

/// H_i(x) >= R(|d|)  =>  grad H_i . f(x, d) <= 0 for every member of the family.
inline Certificate build_pubibs(const DynamicalSystem& sys, const std::vector<ScalarField>& family,
                                const ComparisonFunction& R, const Region& region, const SamplingPlan& plan,
                                const Tolerances& tol = {}) {
  if (family.empty()) throw ParameterError("p-UBIBS: family of fields must be nonempty");
  detail::require_fn(R, "p-UBIBS: level function R");
  Certificate cert("pubibs", sys, region, plan, tol);
  for (std::size_t i = 0; i < family.size(); ++i) {
    const ScalarField H = family[i];
    detail::require_field(H, sys, "p-UBIBS member");
    auto q = detail::decay(
        "invariance_" + std::to_string(i + 1), sys, H, [](const Vector&, const Vector&) { return 0.0; },
        "H_i(x) >= R(|d|) => grad H_i . f <= 0");
    const double ptol = tol.premise;
    q.premise = [H, R, ptol](const Vector& x, const Vector& d) { return detail::premise_ge(H(x), R(norm2(d)), ptol); };
    cert.add(std::move(q));
  }
  // Radial growth probe: min over sampled boundary points of max_i H_i.
  double boundary_min = INFINITY;
  const auto set = cert.samples(Scope::state);
  for (std::size_t k = 0; k < set.size(); ++k) {
    const Vector x = cert.split(set[k]).first;
    bool on_boundary = false;
    for (std::size_t j = 0; j < x.size(); ++j)
      if (x[j] == region.x[j].lo || x[j] == region.x[j].hi) on_boundary = true;
    if (!on_boundary) continue;
    double m = -INFINITY;
    for (const auto& H : family) m = std::max(m, H(x));
    boundary_min = std::min(boundary_min, m);
  }
  if (std::isfinite(boundary_min)) cert.info("boundary_min_max_H", boundary_min);
  return cert;
}

inline CertificateReport check_pubibs(const DynamicalSystem& sys, const std::vector<ScalarField>& family,
                                      const ComparisonFunction& R, const Region& region, const SamplingPlan& plan) {
  return build_pubibs(sys, family, R, region, plan).run();
}

/// a(|h|) <= max_i V_i and V_i >= phi(|d|) => grad V_i . f <= -rho_i(V_i).
/// The implied gain a^{-1}(phi(s)) is reported at `gain_levels`.
inline Certificate build_pios(const DynamicalSystem& sys, const std::vector<ScalarField>& family,
                              const ComparisonFunction& a, const ComparisonFunction& phi,
                              const std::vector<ComparisonFunction>& rhos, const Region& region,
                              const SamplingPlan& plan, std::vector<double> gain_levels = {0.25, 0.5, 1.0, 2.0},
                              const Tolerances& tol = {}) {
  if (family.empty()) throw ParameterError("p-IOS: family of fields must be nonempty");
  if (family.size() != rhos.size()) throw ParameterError("p-IOS: need one dissipation rate per field");
  detail::require_fn(a, "p-IOS: comparison function a");
  detail::require_fn(phi, "p-IOS: threshold function phi");
  for (const auto& V : family) detail::require_field(V, sys, "p-IOS member");
  Certificate cert("pios", sys, region, plan, tol);
  Inequality bound;
  bound.id = "output_bound";
  bound.description = "a(|h(x)|) <= max_i V_i(x)";
  bound.scope = Scope::state;
  bound.evaluate = [sys, a, family](const Vector& x, const Vector&) {
    double m = -INFINITY;
    for (const auto& V : family) m = std::max(m, V(x));
    return Evaluation{a(norm2(sys.output(x))), m};
  };
  cert.add(std::move(bound));
  for (std::size_t i = 0; i < family.size(); ++i) {
    const ScalarField V = family[i];
    const ComparisonFunction rho = rhos[i];
    detail::require_fn(rho, "p-IOS: dissipation rate");
    auto q = detail::decay(
        "dissipation_" + std::to_string(i + 1), sys, V, [V, rho](const Vector& x, const Vector&) { return -rho(V(x)); },
        "V_i(x) >= phi(|d|) => grad V_i . f <= -rho_i(V_i(x))");
    const double ptol = tol.premise;
    q.premise = [V, phi, ptol](const Vector& x, const Vector& d) {
      return detail::premise_ge(V(x), phi(norm2(d)), ptol);
    };
    cert.add(std::move(q));
  }
  for (double s : gain_levels) cert.info("gain(" + std::to_string(s) + ")", a.inverse(phi(s)));
  cert.info("residual", a.inverse(phi(0.0)));
  return cert;
}

inline CertificateReport check_pios(const DynamicalSystem& sys, const std::vector<ScalarField>& family,
                                    const ComparisonFunction& a, const ComparisonFunction& phi,
                                    const std::vector<ComparisonFunction>& rhos, const Region& region,
                                    const SamplingPlan& plan) {
  return build_pios(sys, family, a, phi, rhos, region, plan).run();
}

/// Robustness margin (k - 1/(4 sigma) - theta)/2 of the disturbed adaptive
/// scalar loop; the threshold phi(s) = s^2/(2 eps^2) and rate rho(s) = 2 eps s
/// certify its input-to-output stability.
inline double adaptive_scalar_ios_margin(double k, double sigma, double theta) {
  if (!(sigma > 0.0)) throw PreconditionError("IOS margin: sigma must be > 0");
  const double eps = 0.5 * (k - 1.0 / (4.0 * sigma) - theta);
  if (!(eps > 0.0))
    throw PreconditionError("IOS margin: k - 1/(4 sigma) - theta must be positive (margin " + std::to_string(eps) + ")");
  return eps;
}

/// Standalone small-gain contraction test: gamma1(gamma2(s)) < s and
/// gamma2(gamma1(s)) < s on a log-spaced grid.
inline Inequality small_gain_composition(const ComparisonFunction& g1, const ComparisonFunction& g2, bool first,
                                         const std::vector<double>& grid) {
  Inequality q;
  q.id = first ? "contraction_12" : "contraction_21";
  q.description = first ? "gamma1(gamma2(s)) < s" : "gamma2(gamma1(s)) < s";
  q.scope = Scope::points;
  q.relation = Relation::lt;
  q.points = detail::scalar_points(grid);
  q.evaluate = [g1, g2, first](const Vector& p, const Vector&) {
    const double s = p[0];
    return Evaluation{first ? g1(g2(s)) : g2(g1(s)), s};
  };
  return q;
}

inline std::vector<double> default_composition_grid() { return detail::log_grid(1e-6, 1e6, 64); }

inline CertificateReport check_small_gain_composition(const ComparisonFunction& g1, const ComparisonFunction& g2,
                                                      const std::vector<double>& grid = default_composition_grid()) {
  Certificate cert("small-gain-composition", std::nullopt, Region::cube(1, 1.0), SamplingPlan{1, 0, 0, 1});
  cert.add(small_gain_composition(g1, g2, true, grid));
  cert.add(small_gain_composition(g1, g2, false, grid));
  return cert.run();
}

struct SmallGainFunctions {
  ComparisonFunction a;       // a(|h|) <= max(V1, V2)
  ComparisonFunction gamma1;  // gain from V2 into V1
  ComparisonFunction gamma2;  // gain from V1 into V2
  ComparisonFunction zeta;    // disturbance threshold
  ComparisonFunction p;       // growth of U in terms of V1, V2
  double c = 0.0;             // linear growth of U
  ComparisonFunction rho1;    // dissipation rate of V1
  ComparisonFunction rho2;    // dissipation rate of V2 (defaults to rho1)
};

inline Certificate build_small_gain(const DynamicalSystem& sys, const ScalarField& V1, const ScalarField& V2,
                                    const ScalarField& U, const SmallGainFunctions& fn, const Region& region,
                                    const SamplingPlan& plan,
                                    const std::vector<double>& grid = default_composition_grid(),
                                    const Tolerances& tol = {}) {
  detail::require_field(V1, sys, "small gain V1");
  detail::require_field(V2, sys, "small gain V2");
  detail::require_field(U, sys, "small gain U");
  detail::require_fn(fn.a, "small gain: comparison function a");
  detail::require_fn(fn.gamma1, "small gain: gamma1");
  detail::require_fn(fn.gamma2, "small gain: gamma2");
  detail::require_fn(fn.zeta, "small gain: zeta");
  detail::require_fn(fn.p, "small gain: p");
  detail::require_fn(fn.rho1, "small gain: rho");
  if (!(fn.c >= 0.0)) throw ParameterError("small gain: c must be >= 0");
  const ComparisonFunction rho1 = fn.rho1;
  const ComparisonFunction rho2 = fn.rho2.valid() ? fn.rho2 : fn.rho1;

  Certificate cert("small-gain", sys, region, plan, tol);
  Inequality bound;
  bound.id = "output_bound";
  bound.description = "a(|h(x)|) <= max(V1(x), V2(x))";
  bound.scope = Scope::state;
  bound.evaluate = [sys, a = fn.a, V1, V2](const Vector& x, const Vector&) {
    return Evaluation{a(norm2(sys.output(x))), std::max(V1(x), V2(x))};
  };
  cert.add(std::move(bound));

  Inequality upos;
  upos.id = "positive_definite";
  upos.description = "U(x) > 0 for x != 0";
  upos.scope = Scope::state;
  upos.relation = Relation::lt;
  upos.premise = [](const Vector& x, const Vector&) { return norm_inf(x) > 0.0; };
  upos.evaluate = [U](const Vector& x, const Vector&) { return Evaluation{0.0, U(x)}; };
  cert.add(std::move(upos));

  cert.add(detail::decay(
      "growth", sys, U,
      [c = fn.c, p = fn.p, zeta = fn.zeta, U, V1, V2](const Vector& x, const Vector& d) {
        return c * U(x) + p(V1(x)) + p(V2(x)) + zeta(norm2(d));
      },
      "grad U . f <= c U + p(V1) + p(V2) + zeta(|d|)"));

  const double ptol = tol.premise;
  auto q1 = detail::decay(
      "dissipation_1", sys, V1, [V1, rho1](const Vector& x, const Vector&) { return -rho1(V1(x)); },
      "V1 >= max(zeta(|d|), gamma1(V2)) => grad V1 . f <= -rho(V1)");
  q1.premise = [V1, V2, g1 = fn.gamma1, zeta = fn.zeta, ptol](const Vector& x, const Vector& d) {
    return detail::premise_ge(V1(x), std::max(zeta(norm2(d)), g1(V2(x))), ptol);
  };
  cert.add(std::move(q1));
  auto q2 = detail::decay(
      "dissipation_2", sys, V2, [V2, rho2](const Vector& x, const Vector&) { return -rho2(V2(x)); },
      "V2 >= max(zeta(|d|), gamma2(V1)) => grad V2 . f <= -rho(V2)");
  q2.premise = [V1, V2, g2 = fn.gamma2, zeta = fn.zeta, ptol](const Vector& x, const Vector& d) {
    return detail::premise_ge(V2(x), std::max(zeta(norm2(d)), g2(V1(x))), ptol);
  };
  cert.add(std::move(q2));
  cert.add(small_gain_composition(fn.gamma1, fn.gamma2, true, grid));
  cert.add(small_gain_composition(fn.gamma1, fn.gamma2, false, grid));
  return cert;
}

inline CertificateReport check_small_gain(const DynamicalSystem& sys, const ScalarField& V1, const ScalarField& V2,
                                          const ScalarField& U, const SmallGainFunctions& fn, const Region& region,
                                          const SamplingPlan& plan) {
  return build_small_gain(sys, V1, V2, U, fn, region, plan).run();
}

/// Dissipation test for loops of the form xi' = f(xi, z, theta, d),
/// z' = Gamma e^{-z} (V - eps)^+. The state is (xi, z) with z last; the last
/// `theta_channels` disturbance channels carry theta, the rest carry d.
struct DeadzoneFunctions {
  ComparisonFunction rho;
  ComparisonFunction kappa;
  ComparisonFunction lambda;
  double a = 1.0;
  double b = 0.0;
  double c = 1.0;
  double delta = 1.0;
  std::size_t theta_channels = 1;
  /// Levels M for the informational probe of {|z| <= M, V <= M}.
  std::vector<double> probe_levels{1.0, 10.0};
};

/// chi(s1, s2, s3) = a (s1^2 + ((s2 - b - lambda(s3))^+)^2) / (1 + kappa(s3)).
inline double deadzone_chi(const DeadzoneFunctions& fn, double s1, double s2, double s3) {
  const double t = positive_part(s2 - fn.b - fn.lambda(s3));
  return fn.a * (s1 * s1 + t * t) / (1.0 + fn.kappa(s3));
}

inline Certificate build_deadzone(const DynamicalSystem& sys, const ScalarField& V, const DeadzoneFunctions& fn,
                                  const Region& region, const SamplingPlan& plan, const Tolerances& tol = {}) {
  detail::require_field(V, sys, "deadzone V");
  detail::require_fn(fn.rho, "deadzone: rho");
  detail::require_fn(fn.kappa, "deadzone: kappa");
  detail::require_fn(fn.lambda, "deadzone: lambda");
  if (!(fn.a > 0.0) || !(fn.c > 0.0) || !(fn.delta > 0.0) || !(fn.b >= 0.0))
    throw ParameterError("deadzone: need a, c, delta > 0 and b >= 0");
  if (sys.state_dim() < 2) throw DimensionError("deadzone: state must be (xi, z) with z last");
  if (fn.theta_channels > sys.disturbance_dim())
    throw DimensionError("deadzone: more theta channels than disturbance channels");
  if (!sys.params().contains("Gamma") || !sys.params().contains("eps"))
    throw ParameterError("deadzone: system must carry parameters Gamma and eps");
  const double gamma = sys.params().at("Gamma");
  const double eps = sys.params().at("eps");
  const std::size_t zi = sys.state_dim() - 1;
  const std::size_t nd = sys.disturbance_dim() - fn.theta_channels;

  auto split_d = [nd](const Vector& d) {
    double sd = 0.0, st = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) (i < nd ? sd : st) += d[i] * d[i];
    return std::pair<double, double>{std::sqrt(sd), std::sqrt(st)};
  };

  Certificate cert("deadzone", sys, region, plan, tol);
  Inequality diss;
  diss.id = "dissipation";
  diss.description = "dV/dxi . f + Gamma e^{-z} dV/dz (V - eps)^+ <= -rho(V) + chi(|d|, |theta|, e^z)";
  diss.evaluate = [sys, V, fn, gamma, eps, zi, split_d](const Vector& x, const Vector& d) {
    const Vector g = V.gradient(x);
    const Vector f = sys.field(x, d);
    const double v = V(x);
    double lhs = 0.0;
    for (std::size_t i = 0; i < zi; ++i) lhs += g[i] * f[i];
    lhs += gamma * std::exp(-x[zi]) * g[zi] * positive_part(v - eps);
    const auto [sd, st] = split_d(d);
    return Evaluation{lhs, -fn.rho(v) + deadzone_chi(fn, sd, st, std::exp(x[zi]))};
  };
  cert.add(std::move(diss));

  Inequality law;
  law.id = "update_law";
  law.description = "z' = Gamma e^{-z} (V - eps)^+";
  law.evaluate = [sys, V, gamma, eps, zi](const Vector& x, const Vector& d) {
    const double expected = gamma * std::exp(-x[zi]) * positive_part(V(x) - eps);
    return Evaluation{std::abs(sys.field(x, d)[zi] - expected), 0.0};
  };
  cert.add(std::move(law));

  Inequality lin;
  lin.id = "rho_linear_near_zero";
  lin.description = "rho(s) >= c s on [0, delta]";
  lin.scope = Scope::points;
  lin.points = detail::scalar_points(detail::linear_grid(0.0, fn.delta, 64));
  lin.evaluate = [fn](const Vector& p, const Vector&) { return Evaluation{fn.c * p[0], fn.rho(p[0])}; };
  cert.add(std::move(lin));

  const auto set = cert.samples(Scope::state);
  for (double M : fn.probe_levels) {
    double extent = 0.0;
    for (std::size_t k = 0; k < set.size(); ++k) {
      const Vector x = cert.split(set[k]).first;
      if (std::abs(x[zi]) <= M && V(x) <= M) {
        double r = 0.0;
        for (std::size_t i = 0; i < zi; ++i) r = std::max(r, std::abs(x[i]));
        extent = std::max(extent, r);
      }
    }
    cert.info("sublevel_extent(" + std::to_string(M) + ")", extent);
  }
  cert.note("boundedness of {|z| <= M, V <= M} is probed on the sampled box, not adjudicated");
  return cert;
}

inline CertificateReport check_deadzone(const DynamicalSystem& sys, const ScalarField& V, const DeadzoneFunctions& fn,
                                        const Region& region, const SamplingPlan& plan) {
  return build_deadzone(sys, V, fn, region, plan).run();
}

/// Asymptotic-gain test with level-indexed families H_s, Q_s:
///   max over sampled |d| <= s of grad H_s . f(x, d) <= -Q_s(x), and
///   Q_s(x) <= q_tol  =>  |h(x)| <= b(s) + h_tol.
struct OagOptions {
  std::vector<double> levels;
  std::function<ScalarField(double s)> H;
  std::function<ScalarField(double s)> Q;
  ComparisonFunction b;
  double q_tol = 1e-9;
  double h_tol = 1e-6;
};

/// Samples of the disturbance ball |d| <= s: a tensor grid over [-s, s]^m
/// restricted to the ball, plus the points +-s e_i.
inline std::vector<Vector> disturbance_ball_samples(std::size_t m, double s, std::size_t per_axis) {
  std::vector<Vector> out;
  if (m == 0) return {Vector{}};
  if (s == 0.0) return {Vector(m, 0.0)};
  const Region r = Region::cube(m, s);
  SamplingPlan plan;
  plan.grid = std::max<std::size_t>(per_axis, 2);
  const SampleSet set(r.x, m, plan);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Vector d = set[i];
    if (norm2(d) <= s) out.push_back(d);
  }
  for (std::size_t i = 0; i < m; ++i)
    for (double sign : {-1.0, 1.0}) {
      Vector d(m, 0.0);
      d[i] = sign * s;
      out.push_back(d);
    }
  return out;
}

inline Certificate build_oag(const DynamicalSystem& sys, const OagOptions& opt, const Region& region,
                             const SamplingPlan& plan, const Tolerances& tol = {}) {
  if (opt.levels.empty()) throw ParameterError("OAG: s-level grid must be nonempty");
  if (!opt.H || !opt.Q) throw ParameterError("OAG: families H_s and Q_s are required");
  detail::require_fn(opt.b, "OAG: output bound b");
  Certificate cert("oag", sys, region, plan, tol);
  for (double s : opt.levels) {
    if (!(s >= 0.0)) throw ParameterError("OAG: s-levels must be >= 0");
    const ScalarField H = opt.H(s);
    const ScalarField Q = opt.Q(s);
    detail::require_field(H, sys, "OAG H_s");
    detail::require_field(Q, sys, "OAG Q_s");
    const auto ball = disturbance_ball_samples(sys.disturbance_dim(), s, plan.disturbance_grid());

    Inequality dec;
    dec.id = "decrease";
    dec.level = s;
    dec.description = "max over sampled |d| <= s of grad H_s . f <= -Q_s(x)";
    dec.scope = Scope::state;
    dec.evaluate = [sys, H, Q, ball](const Vector& x, const Vector&) {
      const Vector g = H.gradient(x);
      double worst = -INFINITY;
      for (const auto& d : ball) {
        const Vector f = sys.field(x, d);
        double v = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) v += g[i] * f[i];
        worst = std::max(worst, v);
      }
      return Evaluation{worst, -Q(x)};
    };
    cert.add(std::move(dec));

    Inequality lim;
    lim.id = "output_limit";
    lim.level = s;
    lim.description = "Q_s(x) = 0 => |h(x)| <= b(s)";
    lim.scope = Scope::state;
    const double q_tol = opt.q_tol, h_tol = opt.h_tol;
    lim.premise = [Q, q_tol](const Vector& x, const Vector&) { return Q(x) <= q_tol; };
    lim.evaluate = [sys, b = opt.b, s, h_tol](const Vector& x, const Vector&) {
      return Evaluation{norm2(sys.output(x)), b(s) + h_tol};
    };
    cert.add(std::move(lim));
  }
  cert.note("the inner maximum over the disturbance ball is sampled, so it under-approximates the true maximum");
  return cert;
}

inline CertificateReport check_oag(const DynamicalSystem& sys, const OagOptions& opt, const Region& region,
                                   const SamplingPlan& plan) {
  return build_oag(sys, opt, region, plan).run();
}

}  // namespace stabkit

#endif  // STABKIT_CERTIFICATES_HPP
