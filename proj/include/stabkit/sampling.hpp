#ifndef STABKIT_SAMPLING_HPP
#define STABKIT_SAMPLING_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include "stabkit/core.hpp"

namespace stabkit {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Box over states and disturbances, optionally refined by a membership test.
struct Region {
  std::vector<Interval> x;
  std::vector<Interval> d;
  std::function<bool(const Vector& x, const Vector& d)> contains;

  static Region box(std::vector<Interval> x, std::vector<Interval> d = {}) {
    Region r;
    r.x = std::move(x);
    r.d = std::move(d);
    r.validate();
    return r;
  }

  /// Cube [-half, half]^n for the states and [-dhalf, dhalf]^m for disturbances.
  static Region cube(std::size_t n, double half, std::size_t m = 0, double dhalf = 0.0) {
    return box(std::vector<Interval>(n, {-half, half}), std::vector<Interval>(m, {-dhalf, dhalf}));
  }

  void validate() const {
    if (x.empty()) throw DimensionError("region: state box must be nonempty");
    auto check = [](const std::vector<Interval>& iv) {
      for (const auto& i : iv)
        if (!std::isfinite(i.lo) || !std::isfinite(i.hi) || i.lo > i.hi)
          throw ParameterError("region: intervals must be finite with lo <= hi");
    };
    check(x);
    check(d);
  }
};

/// Deterministic sampling: a tensor grid with `grid` points per state axis and
/// `grid_d` per disturbance axis, followed by `random` Halton points with a
/// seeded Cranley-Patterson shift. A plan whose grid satisfies
/// (grid' - 1) = k (grid - 1) and whose Halton count is larger contains the
/// smaller plan's points, so enlarging a plan never loses a witness.
struct SamplingPlan {
  std::size_t grid = 21;
  std::size_t grid_d = 0;  // 0 = same as grid
  std::size_t random = 0;
  std::uint64_t seed = 1;

  std::size_t disturbance_grid() const noexcept { return grid_d == 0 ? grid : grid_d; }

  void validate() const {
    if (grid == 0 && random == 0) throw ParameterError("sampling plan: need at least one sample");
  }
};

namespace detail {

inline double radical_inverse(std::uint64_t i, std::uint32_t base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

inline std::uint32_t nth_prime(std::size_t k) {
  static constexpr std::array<std::uint32_t, 16> primes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  if (k >= primes.size()) throw DimensionError("Halton sequence: too many dimensions");
  return primes[k];
}

inline double grid_coordinate(const Interval& iv, std::size_t k, std::size_t g) {
  if (g <= 1) return 0.5 * (iv.lo + iv.hi);
  if (k == g - 1) return iv.hi;
  return iv.lo + (iv.hi - iv.lo) * static_cast<double>(k) / static_cast<double>(g - 1);
}

}  // namespace detail

/// Unit-cube Halton point number `index` (starting at 1) in `dim` dimensions,
/// shifted modulo 1 by `shift`.
inline Vector halton_point(std::uint64_t index, std::size_t dim, const Vector& shift) {
  Vector u(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    double v = detail::radical_inverse(index, detail::nth_prime(k)) + (k < shift.size() ? shift[k] : 0.0);
    u[k] = v - std::floor(v);
  }
  return u;
}

inline Vector cranley_patterson_shift(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vector s(dim);
  for (double& v : s) v = unif(rng);
  return s;
}

/// Enumerates the samples of a plan over a list of axes, by index.
class SampleSet {
 public:
  /// `axes` are the boxes to sample; the first `grid_axes_x` use `grid`
  /// points and the remainder use `grid_d` points.
  SampleSet(std::vector<Interval> axes, std::size_t grid_axes_x, const SamplingPlan& plan)
      : axes_(std::move(axes)), plan_(plan) {
    plan_.validate();
    per_axis_.resize(axes_.size());
    grid_count_ = plan_.grid == 0 ? 0 : 1;
    for (std::size_t i = 0; i < axes_.size(); ++i) {
      per_axis_[i] = i < grid_axes_x ? plan_.grid : plan_.disturbance_grid();
      if (plan_.grid != 0) grid_count_ *= per_axis_[i];
    }
    shift_ = cranley_patterson_shift(axes_.size(), plan_.seed);
  }

  std::size_t size() const noexcept { return grid_count_ + plan_.random; }
  std::size_t dim() const noexcept { return axes_.size(); }

  Vector operator[](std::size_t index) const {
    Vector p(axes_.size());
    if (index < grid_count_) {
      std::size_t rem = index;
      for (std::size_t i = axes_.size(); i-- > 0;) {
        const std::size_t k = rem % per_axis_[i];
        rem /= per_axis_[i];
        p[i] = detail::grid_coordinate(axes_[i], k, per_axis_[i]);
      }
      return p;
    }
    const Vector u = halton_point(index - grid_count_ + 1, axes_.size(), shift_);
    for (std::size_t i = 0; i < axes_.size(); ++i) p[i] = axes_[i].lo + (axes_[i].hi - axes_[i].lo) * u[i];
    return p;
  }

 private:
  std::vector<Interval> axes_;
  SamplingPlan plan_;
  std::vector<std::size_t> per_axis_;
  std::size_t grid_count_ = 0;
  Vector shift_;
};

}  // namespace stabkit

#endif  // STABKIT_SAMPLING_HPP
