#ifndef STABKIT_SIGNAL_HPP
#define STABKIT_SIGNAL_HPP

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <numbers>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "stabkit/core.hpp"

namespace stabkit {

/// One scalar disturbance channel d(t), t >= 0.
///
/// Piecewise-constant signals use the left-closed convention: level i holds on
/// [b_{i-1}, b_i) with b_{-1} = 0. Table signals interpolate linearly and hold
/// their end values outside the sampled range.
class Signal {
 public:
  struct Zero {};
  struct Constant {
    double level;
  };
  struct Sinusoid {
    double amplitude;
    double omega;
    double phase;
  };
  struct PiecewiseConstant {
    std::vector<double> breakpoints;
    std::vector<double> levels;
  };
  struct Table {
    std::vector<double> times;
    std::vector<double> values;
  };
  using Kind = std::variant<Zero, Constant, Sinusoid, PiecewiseConstant, Table>;

  Signal() : kind_(Zero{}) {}

  static Signal zero() { return Signal(Zero{}); }
  static Signal constant(double level) {
    if (!std::isfinite(level)) throw ParameterError("constant signal: level must be finite");
    return Signal(Constant{level});
  }
  static Signal sinusoid(double amplitude, double omega, double phase = 0.0) {
    if (!std::isfinite(amplitude) || !std::isfinite(omega) || !std::isfinite(phase))
      throw ParameterError("sinusoid signal: parameters must be finite");
    return Signal(Sinusoid{amplitude, omega, phase});
  }
  static Signal piecewise_constant(std::vector<double> breakpoints, std::vector<double> levels) {
    if (levels.size() != breakpoints.size() + 1)
      throw ParameterError("piecewise-constant signal: need one more level than breakpoints");
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
      if (!std::isfinite(breakpoints[i]) || breakpoints[i] < 0.0)
        throw ParameterError("piecewise-constant signal: breakpoints must be finite and >= 0");
      if (i > 0 && !(breakpoints[i] > breakpoints[i - 1]))
        throw ParameterError("piecewise-constant signal: breakpoints must be strictly increasing");
    }
    if (!all_finite(levels)) throw ParameterError("piecewise-constant signal: levels must be finite");
    return Signal(PiecewiseConstant{std::move(breakpoints), std::move(levels)});
  }
  static Signal table(std::vector<double> times, std::vector<double> values) {
    if (times.empty() || times.size() != values.size())
      throw ParameterError("table signal: times and values must be nonempty and of equal length");
    for (std::size_t i = 1; i < times.size(); ++i)
      if (!(times[i] > times[i - 1]))
        throw ParameterError("table signal: times must be strictly increasing");
    if (!all_finite(times) || !all_finite(values))
      throw ParameterError("table signal: entries must be finite");
    return Signal(Table{std::move(times), std::move(values)});
  }

  const Kind& kind() const noexcept { return kind_; }

  double operator()(double t) const {
    if (!(t >= 0.0)) throw ParameterError("signal evaluated at negative time");
    return std::visit([t](const auto& k) { return eval(k, t); }, kind_);
  }

  /// Exact essential supremum of |d(t)| over [0, horizon].
  double sup_norm(double horizon) const {
    if (!(horizon > 0.0)) throw ParameterError("sup_norm: horizon must be positive");
    return std::visit([horizon](const auto& k) { return sup(k, horizon); }, kind_);
  }

  /// Times in (0, horizon) where the signal or its slope may jump.
  std::vector<double> breakpoints(double horizon) const {
    std::vector<double> out;
    if (const auto* p = std::get_if<PiecewiseConstant>(&kind_)) {
      for (double b : p->breakpoints)
        if (b > 0.0 && b < horizon) out.push_back(b);
    } else if (const auto* tb = std::get_if<Table>(&kind_)) {
      for (double b : tb->times)
        if (b > 0.0 && b < horizon) out.push_back(b);
    }
    return out;
  }

  std::string describe() const;

 private:
  explicit Signal(Kind k) : kind_(std::move(k)) {}

  static double eval(const Zero&, double) { return 0.0; }
  static double eval(const Constant& c, double) { return c.level; }
  static double eval(const Sinusoid& s, double t) {
    return s.amplitude * std::sin(s.omega * t + s.phase);
  }
  static double eval(const PiecewiseConstant& p, double t) {
    auto it = std::upper_bound(p.breakpoints.begin(), p.breakpoints.end(), t);
    return p.levels[static_cast<std::size_t>(it - p.breakpoints.begin())];
  }
  static double eval(const Table& tb, double t) {
    if (t <= tb.times.front()) return tb.values.front();
    if (t >= tb.times.back()) return tb.values.back();
    auto it = std::upper_bound(tb.times.begin(), tb.times.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - tb.times.begin());
    const double t0 = tb.times[i - 1], t1 = tb.times[i];
    const double w = (t - t0) / (t1 - t0);
    return (1.0 - w) * tb.values[i - 1] + w * tb.values[i];
  }

  static double sup(const Zero&, double) { return 0.0; }
  static double sup(const Constant& c, double) { return std::abs(c.level); }
  static double sup(const Sinusoid& s, double horizon) {
    const double a = std::abs(s.amplitude);
    if (s.omega == 0.0) return a * std::abs(std::sin(s.phase));
    double lo = s.phase, hi = s.phase + s.omega * horizon;
    if (lo > hi) std::swap(lo, hi);
    constexpr double pi = std::numbers::pi;
    // |sin| peaks at pi/2 + k*pi.
    const double k = std::ceil((lo - pi / 2.0) / pi);
    if (pi / 2.0 + k * pi <= hi) return a;
    return a * std::max(std::abs(std::sin(lo)), std::abs(std::sin(hi)));
  }
  static double sup(const PiecewiseConstant& p, double horizon) {
    double m = 0.0;
    for (std::size_t i = 0; i < p.levels.size(); ++i) {
      const double start = i == 0 ? 0.0 : p.breakpoints[i - 1];
      const double end = i < p.breakpoints.size() ? p.breakpoints[i] : INFINITY;
      if (start < horizon && end > 0.0) m = std::max(m, std::abs(p.levels[i]));
    }
    return m;
  }
  static double sup(const Table& tb, double horizon) {
    double m = std::max(std::abs(eval(tb, 0.0)), std::abs(eval(tb, horizon)));
    for (std::size_t i = 0; i < tb.times.size(); ++i)
      if (tb.times[i] >= 0.0 && tb.times[i] <= horizon) m = std::max(m, std::abs(tb.values[i]));
    return m;
  }

  Kind kind_;
};

inline std::string Signal::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(
      [&os](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Zero>) {
          os << "zero";
        } else if constexpr (std::is_same_v<K, Constant>) {
          os << "constant(" << k.level << ")";
        } else if constexpr (std::is_same_v<K, Sinusoid>) {
          os << "sinusoid(" << k.amplitude << ", " << k.omega << ", " << k.phase << ")";
        } else if constexpr (std::is_same_v<K, PiecewiseConstant>) {
          os << "piecewise-constant(" << k.breakpoints.size() << " breakpoints)";
        } else {
          os << "table(" << k.times.size() << " samples)";
        }
      },
      kind_);
  return os.str();
}

/// Vector-valued disturbance d(t) built from independent scalar channels.
class Disturbance {
 public:
  Disturbance() = default;
  explicit Disturbance(std::vector<Signal> channels) : channels_(std::move(channels)) {}
  Disturbance(std::initializer_list<Signal> channels) : channels_(channels) {}

  /// A zero disturbance of the given dimension (possibly 0).
  static Disturbance zero(std::size_t dim) { return Disturbance(std::vector<Signal>(dim)); }

  std::size_t dim() const noexcept { return channels_.size(); }
  const std::vector<Signal>& channels() const noexcept { return channels_; }

  Vector operator()(double t) const {
    Vector d(channels_.size());
    for (std::size_t i = 0; i < channels_.size(); ++i) d[i] = channels_[i](t);
    return d;
  }

  /// Sup over [0, horizon] of |d(t)|. Exact for a single channel; for several
  /// channels this is the Euclidean norm of the per-channel sups (an upper bound).
  double sup_norm(double horizon) const {
    if (!(horizon > 0.0)) throw ParameterError("sup_norm: horizon must be positive");
    if (channels_.size() == 1) return channels_[0].sup_norm(horizon);
    double s = 0.0;
    for (const auto& c : channels_) {
      const double v = c.sup_norm(horizon);
      s += v * v;
    }
    return std::sqrt(s);
  }

  std::vector<double> breakpoints(double horizon) const {
    std::vector<double> out;
    for (const auto& c : channels_) {
      auto b = c.breakpoints(horizon);
      out.insert(out.end(), b.begin(), b.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  std::vector<Signal> channels_;
};

}  // namespace stabkit

#endif  // STABKIT_SIGNAL_HPP
