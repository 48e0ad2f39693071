#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "graphonlab/error.hpp"
#include "graphonlab/matrix.hpp"

namespace graphonlab {

/// Symmetric step kernel over consecutive blocks [b_{i-1}, b_i) of R+, where
/// b_i is the cumulative block mass. When `ambient_infinite` is set the
/// kernel lives on all of R+ with an implicit zero-valued tail past the last
/// block; otherwise the space is exactly the union of the blocks.
class StepGraphon {
 public:
  StepGraphon() = default;

  StepGraphon(std::vector<double> masses, Matrix<double> values, bool ambient_infinite = false)
      : masses_(std::move(masses)), values_(std::move(values)), ambient_infinite_(ambient_infinite) {
    validate();
    rebuild_boundaries();
  }

  StepGraphon(std::vector<double> masses, const std::vector<std::vector<double>>& values,
              bool ambient_infinite = false)
      : StepGraphon(std::move(masses), Matrix<double>::from_rows(values), ambient_infinite) {}

  static StepGraphon constant(double mass, double value, bool ambient_infinite = false) {
    return StepGraphon({mass}, Matrix<double>(1, 1, value), ambient_infinite);
  }

  static StepGraphon zero(std::vector<double> masses, bool ambient_infinite = false) {
    const std::size_t n = masses.size();
    return StepGraphon(std::move(masses), Matrix<double>(n, n, 0.0), ambient_infinite);
  }

  std::size_t size() const noexcept { return masses_.size(); }
  bool empty() const noexcept { return masses_.empty(); }
  const std::vector<double>& masses() const noexcept { return masses_; }
  const Matrix<double>& values() const noexcept { return values_; }
  double value(std::size_t i, std::size_t j) const noexcept { return values_(i, j); }
  double mass(std::size_t i) const noexcept { return masses_[i]; }
  bool ambient_infinite() const noexcept { return ambient_infinite_; }

  double total_mass() const noexcept { return boundaries_.empty() ? 0.0 : boundaries_.back(); }

  /// Cumulative masses; block i occupies [boundaries[i-1], boundaries[i]).
  const std::vector<double>& boundaries() const noexcept { return boundaries_; }

  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  /// Block containing position x, or npos when x lies in the zero tail.
  std::size_t block_of(double x) const noexcept {
    if (x < 0.0 || boundaries_.empty() || x >= boundaries_.back()) return npos;
    auto it = std::upper_bound(boundaries_.begin(), boundaries_.end(), x);
    return static_cast<std::size_t>(it - boundaries_.begin());
  }

  double evaluate(double x, double y) const noexcept {
    const std::size_t i = block_of(x);
    const std::size_t j = block_of(y);
    if (i == npos || j == npos) return 0.0;
    return values_(i, j);
  }

  bool is_zero() const noexcept {
    return std::all_of(values_.data().begin(), values_.data().end(),
                       [](double v) { return v == 0.0; });
  }

  bool unit_interval_valued() const noexcept {
    return std::all_of(values_.data().begin(), values_.data().end(),
                       [](double v) { return v >= 0.0 && v <= 1.0; });
  }

  bool nonnegative() const noexcept {
    return std::all_of(values_.data().begin(), values_.data().end(),
                       [](double v) { return v >= 0.0; });
  }

  StepGraphon with_ambient(bool ambient_infinite) const {
    StepGraphon out = *this;
    out.ambient_infinite_ = ambient_infinite;
    return out;
  }

  bool operator==(const StepGraphon& o) const {
    return masses_ == o.masses_ && values_ == o.values_ && ambient_infinite_ == o.ambient_infinite_;
  }

 private:
  void validate() const {
    const std::size_t n = masses_.size();
    detail::require(values_.rows() == n && values_.cols() == n,
                    "values must be a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
    for (std::size_t i = 0; i < n; ++i) {
      detail::require(std::isfinite(masses_[i]) && masses_[i] > 0.0,
                      "block mass at index " + std::to_string(i) + " must be positive and finite");
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        detail::require(std::isfinite(values_(i, j)),
                        "value at (" + std::to_string(i) + "," + std::to_string(j) + ") is not finite");
        // Bitwise symmetry, not approximate.
        detail::require(values_(i, j) == values_(j, i),
                        "values not symmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }

  void rebuild_boundaries() {
    boundaries_.resize(masses_.size());
    std::partial_sum(masses_.begin(), masses_.end(), boundaries_.begin());
  }

  std::vector<double> masses_;
  Matrix<double> values_;
  bool ambient_infinite_ = false;
  std::vector<double> boundaries_;
};

}  // namespace graphonlab
