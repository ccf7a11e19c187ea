#ifndef STABKIT_SYSTEM_HPP
#define STABKIT_SYSTEM_HPP

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "stabkit/core.hpp"

namespace stabkit {

/// Named real parameters of a system (theta, k, sigma, Gamma, ...).
class ParameterSet {
 public:
  ParameterSet() = default;
  ParameterSet(std::initializer_list<std::pair<const std::string, double>> init) : values_(init) {}

  double at(const std::string& name) const {
    auto it = values_.find(name);
    if (it == values_.end()) throw ParameterError("unknown parameter '" + name + "'");
    return it->second;
  }
  bool contains(const std::string& name) const { return values_.count(name) != 0; }
  void set(const std::string& name, double v) { values_[name] = v; }
  const std::map<std::string, double>& values() const noexcept { return values_; }

 private:
  std::map<std::string, double> values_;
};

using VectorField = std::function<Vector(const Vector& x, const Vector& d)>;
using OutputMap = std::function<Vector(const Vector& x)>;

/// x' = f(x, d), y = h(x) with x in R^n, d in R^m, y in R^p.
///
/// Immutable after construction. Built-in systems verify f(0, 0) = 0 and
/// h(0) = 0 on construction unless `check_origin` is cleared (systems whose
/// origin is not an equilibrium in the chosen coordinates).
class DynamicalSystem {
 public:
  struct Spec {
    std::string id;
    std::string name;
    std::size_t state_dim = 0;
    std::size_t disturbance_dim = 0;
    std::size_t output_dim = 0;
    VectorField field;
    OutputMap output;
    ParameterSet params;
    bool check_origin = true;
    std::vector<std::string> warnings;
  };

  explicit DynamicalSystem(Spec spec) : spec_(std::make_shared<const Spec>(std::move(spec))) {
    const Spec& s = *spec_;
    if (s.state_dim == 0) throw DimensionError(s.id + ": state dimension must be positive");
    if (!s.field || !s.output) throw ParameterError(s.id + ": field and output map are required");
    if (s.check_origin) {
      const Vector zero_x(s.state_dim, 0.0);
      const Vector zero_d(s.disturbance_dim, 0.0);
      const Vector f0 = field(zero_x, zero_d);
      const Vector h0 = output(zero_x);
      if (norm_inf(f0) != 0.0) throw ParameterError(s.id + ": f(0, 0) != 0");
      if (norm_inf(h0) != 0.0) throw ParameterError(s.id + ": h(0) != 0");
    }
  }

  const std::string& id() const noexcept { return spec_->id; }
  const std::string& name() const noexcept { return spec_->name; }
  std::size_t state_dim() const noexcept { return spec_->state_dim; }
  std::size_t disturbance_dim() const noexcept { return spec_->disturbance_dim; }
  std::size_t output_dim() const noexcept { return spec_->output_dim; }
  const ParameterSet& params() const noexcept { return spec_->params; }
  const std::vector<std::string>& warnings() const noexcept { return spec_->warnings; }
  bool check_origin() const noexcept { return spec_->check_origin; }

  /// Evaluates f(x, d); throws NonFiniteError when the result is not finite.
  Vector field(const Vector& x, const Vector& d) const {
    require_dim(x, spec_->state_dim, "state");
    require_dim(d, spec_->disturbance_dim, "disturbance");
    Vector f = spec_->field(x, d);
    require_dim(f, spec_->state_dim, "vector field value");
    if (!all_finite(f))
      throw NonFiniteError(spec_->id + ": non-finite vector field at x = " + to_string(x), x);
    return f;
  }

  Vector output(const Vector& x) const {
    require_dim(x, spec_->state_dim, "state");
    Vector y = spec_->output(x);
    require_dim(y, spec_->output_dim, "output value");
    return y;
  }

 private:
  std::shared_ptr<const Spec> spec_;
};

/// Output map picking the listed state coordinates.
inline OutputMap project(std::vector<std::size_t> indices) {
  return [indices = std::move(indices)](const Vector& x) {
    Vector y(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) y[i] = x[indices[i]];
    return y;
  };
}

}  // namespace stabkit

#endif  // STABKIT_SYSTEM_HPP
