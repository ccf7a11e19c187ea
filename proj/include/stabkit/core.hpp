#ifndef STABKIT_CORE_HPP
#define STABKIT_CORE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace stabkit {

/// Dense real vector used for states, disturbances and outputs.
using Vector = std::vector<double>;

/// Raised when vector sizes disagree with the owning system.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a constructor or operation receives parameters outside its domain.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a vector field or map returns NaN/Inf. Carries the offending state.
class NonFiniteError : public std::runtime_error {
 public:
  NonFiniteError(const std::string& what, Vector state)
      : std::runtime_error(what), state_(std::move(state)) {}
  const Vector& state() const noexcept { return state_; }

 private:
  Vector state_;
};

/// Raised when the integrator exhausts its step budget or its minimum step.
class StepLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double norm2(const Vector& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double norm_inf(const Vector& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline bool all_finite(const Vector& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

inline double positive_part(double x) { return x > 0.0 ? x : 0.0; }

inline std::string to_string(const Vector& v) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    os << v[i];
  }
  os << ')';
  return os.str();
}

inline void require_dim(const Vector& v, std::size_t n, const char* what) {
  if (v.size() != n) {
    std::ostringstream os;
    os << what << ": expected dimension " << n << ", got " << v.size();
    throw DimensionError(os.str());
  }
}

}  // namespace stabkit

#endif  // STABKIT_CORE_HPP
