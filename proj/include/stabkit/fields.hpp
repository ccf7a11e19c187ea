#ifndef STABKIT_FIELDS_HPP
#define STABKIT_FIELDS_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "stabkit/core.hpp"
#include "stabkit/expr.hpp"
#include "stabkit/system.hpp"

namespace stabkit {

/// Central-difference gradient with per-coordinate step max(1e-6, 1e-6 |x_i|).
inline Vector finite_difference_gradient(const std::function<double(const Vector&)>& f, const Vector& x) {
  Vector g(x.size());
  Vector p = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double h = std::max(1e-6, 1e-6 * std::abs(x[i]));
    p[i] = x[i] + h;
    const double fp = f(p);
    p[i] = x[i] - h;
    const double fm = f(p);
    p[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

/// Result of comparing an analytic gradient with central differences.
struct GradientCheck {
  double max_relative_error = 0.0;
  Vector worst_point;
  std::size_t probes = 0;
};

/// Scalar function V: R^n -> R with gradient access (analytic or by central
/// differences). Fields built from expressions get exact gradients from dual
/// numbers. A caller-supplied analytic gradient is compared with central
/// differences at 100 seeded probes in [-2, 2]^n on construction.
class ScalarField {
 public:
  using Value = std::function<double(const Vector&)>;
  using Gradient = std::function<Vector(const Vector&)>;

  static constexpr double gradient_tolerance = 1e-4;

  ScalarField() = default;

  ScalarField(std::string name, std::size_t dim, Value value, Gradient gradient = {},
              bool verify_gradient = true)
      : name_(std::move(name)), dim_(dim), value_(std::move(value)), gradient_(std::move(gradient)) {
    if (dim_ == 0) throw DimensionError("scalar field " + name_ + ": dimension must be positive");
    if (!value_) throw ParameterError("scalar field " + name_ + ": value function is required");
    if (gradient_ && verify_gradient) {
      const GradientCheck c = check_gradient();
      if (c.max_relative_error > gradient_tolerance)
        throw ParameterError("scalar field " + name_ + ": analytic gradient disagrees with finite differences (" +
                             std::to_string(c.max_relative_error) + ") at " + to_string(c.worst_point));
    }
  }

  /// Field given by an expression in x1..xn (plus named constants).
  static ScalarField from_expression(std::string name, const std::string& text, std::size_t dim,
                                     const std::map<std::string, double>& constants = {}) {
    const auto e = expr::Expression::parse(text, expr::state_variables(dim), constants);
    ScalarField f(
        std::move(name), dim, [e](const Vector& x) { return e(x); },
        [e](const Vector& x) { return e.value_and_gradient(x).g; }, false);
    f.text_ = text;
    return f;
  }

  const std::string& name() const noexcept { return name_; }
  const std::string& text() const noexcept { return text_; }
  std::size_t dim() const noexcept { return dim_; }
  bool has_analytic_gradient() const noexcept { return static_cast<bool>(gradient_); }
  bool valid() const noexcept { return static_cast<bool>(value_); }

  double operator()(const Vector& x) const {
    require_dim(x, dim_, "scalar field argument");
    return value_(x);
  }

  Vector gradient(const Vector& x) const {
    require_dim(x, dim_, "scalar field argument");
    if (gradient_) return gradient_(x);
    return finite_difference_gradient(value_, x);
  }

  /// Directional derivative along the system field, grad V(x) . f(x, d).
  double lie_derivative(const DynamicalSystem& sys, const Vector& x, const Vector& d) const {
    const Vector g = gradient(x);
    const Vector f = sys.field(x, d);
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += g[i] * f[i];
    return s;
  }

  /// Compares the analytic gradient with central differences at seeded probes.
  GradientCheck check_gradient(std::size_t probes = 100, std::uint64_t seed = 20240601) const {
    GradientCheck out;
    if (!gradient_) return out;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    Vector x(dim_);
    for (std::size_t k = 0; k < probes; ++k) {
      for (double& xi : x) xi = unif(rng);
      if (!std::isfinite(value_(x))) continue;
      const Vector ga = gradient_(x);
      const Vector gf = finite_difference_gradient(value_, x);
      ++out.probes;
      for (std::size_t i = 0; i < dim_; ++i) {
        const double err = std::abs(ga[i] - gf[i]) / std::max(1.0, std::abs(gf[i]));
        if (err > out.max_relative_error) {
          out.max_relative_error = err;
          out.worst_point = x;
        }
      }
    }
    return out;
  }

 private:
  std::string name_;
  std::string text_;
  std::size_t dim_ = 0;
  Value value_;
  Gradient gradient_;
};

enum class ComparisonKind { class_k, class_k_inf, nondecreasing, positive_definite };

inline std::string to_string(ComparisonKind k) {
  switch (k) {
    case ComparisonKind::class_k: return "class-K";
    case ComparisonKind::class_k_inf: return "class-K-infinity";
    case ComparisonKind::nondecreasing: return "nondecreasing";
    case ComparisonKind::positive_definite: return "positive-definite";
  }
  return "?";
}

/// 64 log-spaced points on [1e-6, 1e6], preceded by 0.
inline std::vector<double> comparison_probe_grid() {
  std::vector<double> g{0.0};
  for (int i = 0; i < 64; ++i) g.push_back(std::pow(10.0, -6.0 + 12.0 * i / 63.0));
  return g;
}

/// Scalar function R+ -> R+ with a declared class, spot-checked on construction.
class ComparisonFunction {
 public:
  using Fn = std::function<double(double)>;

  ComparisonFunction() = default;

  ComparisonFunction(ComparisonKind kind, Fn fn, std::string label = {})
      : kind_(kind), fn_(std::move(fn)), label_(std::move(label)) {
    if (!fn_) throw ParameterError("comparison function: callable is required");
    spot_check();
  }

  static ComparisonFunction from_expression(ComparisonKind kind, const std::string& text,
                                            const std::map<std::string, double>& constants = {}) {
    const auto e = expr::Expression::parse(text, {"s"}, constants);
    return ComparisonFunction(kind, [e](double s) { return e(s); }, text);
  }

  ComparisonKind kind() const noexcept { return kind_; }
  const std::string& label() const noexcept { return label_; }
  bool valid() const noexcept { return static_cast<bool>(fn_); }

  double operator()(double s) const {
    if (s < 0.0) throw ParameterError("comparison function evaluated at negative argument");
    return fn_(s);
  }

  /// Smallest-bracket inverse by bisection to tolerance 1e-10: returns s with
  /// value(s) = y. The upper bracket doubles from 1 up to `max_arg`.
  double inverse(double y, double max_arg = 1e12) const {
    if (y < 0.0) throw ParameterError("comparison function inverse of a negative value");
    if (fn_(0.0) >= y) return 0.0;
    double hi = 1.0;
    while (!(fn_(hi) >= y)) {
      hi *= 2.0;
      if (hi > max_arg) throw ParameterError("comparison function " + label_ + ": inverse bracket failure");
    }
    double lo = 0.0;
    while (hi - lo > 1e-10 * std::max(1.0, hi)) {
      const double mid = 0.5 * (lo + hi);
      if (fn_(mid) >= y) hi = mid;
      else lo = mid;
    }
    return 0.5 * (lo + hi);
  }

 private:
  void spot_check() const {
    const auto grid = comparison_probe_grid();
    const bool k_kind = kind_ == ComparisonKind::class_k || kind_ == ComparisonKind::class_k_inf;
    double prev = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double s = grid[i];
      const double v = fn_(s);
      if (std::isnan(v) || v < 0.0) fail("negative or NaN value", s);
      if (std::isinf(v)) break;
      if (i == 0) {
        if (kind_ != ComparisonKind::nondecreasing && v != 0.0) fail("nonzero value at 0", s);
      } else {
        if (k_kind && !(v > prev)) fail("not strictly increasing", s);
        if (kind_ == ComparisonKind::nondecreasing && v < prev) fail("decreasing", s);
        if (kind_ == ComparisonKind::positive_definite && !(v > 0.0)) fail("not positive", s);
      }
      prev = v;
    }
  }

  [[noreturn]] void fail(const std::string& what, double s) const {
    throw ParameterError("comparison function " + (label_.empty() ? std::string("<callable>") : label_) +
                         " declared " + to_string(kind_) + ": " + what + " at s = " + std::to_string(s));
  }

  ComparisonKind kind_ = ComparisonKind::nondecreasing;
  Fn fn_;
  std::string label_;
};

/// Convenience constructors for common comparison functions.
namespace cf {

inline ComparisonFunction constant(double c) {
  if (!(c >= 0.0)) throw ParameterError("constant comparison function must be >= 0");
  return ComparisonFunction(ComparisonKind::nondecreasing, [c](double) { return c; }, std::to_string(c));
}

inline ComparisonFunction linear(double k) {
  return ComparisonFunction(ComparisonKind::class_k_inf, [k](double s) { return k * s; },
                            std::to_string(k) + "*s");
}

inline ComparisonFunction power(double k, double p) {
  return ComparisonFunction(ComparisonKind::class_k_inf, [k, p](double s) { return k * std::pow(s, p); },
                            std::to_string(k) + "*s^" + std::to_string(p));
}

inline ComparisonFunction identity() { return linear(1.0); }

}  // namespace cf

}  // namespace stabkit

#endif  // STABKIT_FIELDS_HPP
