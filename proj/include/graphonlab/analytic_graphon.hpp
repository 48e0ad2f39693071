#pragma once

// Closed-form graphon families on R+ (or simplex x R+ for mixed membership),
// each carrying a truncation [0, x_max] and the L1 mass lost outside it.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "graphonlab/error.hpp"
#include "graphonlab/matrix.hpp"
#include "graphonlab/step_graphon.hpp"

namespace graphonlab {

/// A vertex feature. One coordinate for families on R+; for mixed membership
/// the first K coordinates are simplex weights and the last is the position.
using Feature = std::vector<double>;

/// Sociability profile f for Caron-Fox kernels.
struct PowerLaw {
  enum class Kind { shifted_power, truncated_power };

  Kind kind = Kind::shifted_power;
  double c = 1.0;
  double gamma = 2.0;

  void validate() const {
    detail::require(std::isfinite(c) && c >= 0.0, "power law coefficient c must be >= 0");
    detail::require(std::isfinite(gamma) && gamma > 1.0,
                    "power law exponent gamma must exceed 1 for an integrable kernel");
  }

  double operator()(double x) const noexcept {
    if (kind == Kind::shifted_power) return c * std::pow(1.0 + x, -gamma);
    return x <= 1.0 ? c : c * std::pow(x, -gamma);
  }

  /// Integral of f over [0, a].
  double integral(double a) const noexcept {
    if (a <= 0.0) return 0.0;
    if (kind == Kind::shifted_power) return c * (1.0 - std::pow(1.0 + a, 1.0 - gamma)) / (gamma - 1.0);
    if (a <= 1.0) return c * a;
    return c * (1.0 + (1.0 - std::pow(a, 1.0 - gamma)) / (gamma - 1.0));
  }

  double total() const noexcept {
    return kind == Kind::shifted_power ? c / (gamma - 1.0) : c * (1.0 + 1.0 / (gamma - 1.0));
  }

  bool operator==(const PowerLaw&) const = default;
};

/// W(x, y) = 1 - exp(-f(x) f(y)).
struct CaronFox {
  PowerLaw f;

  double operator()(double x, double y) const noexcept { return -std::expm1(-f(x) * f(y)); }

  /// Upper bound on the kernel mass outside [0, a]^2, from 1 - e^{-u} <= u.
  double residual_bound(double a) const noexcept {
    const double total = f.total();
    const double inside = f.integral(a);
    return std::max(0.0, total * total - inside * inside);
  }

  bool operator==(const CaronFox&) const = default;
};

/// Indicator of the region {y <= f(x)} for the self-inverse boundary
/// f(x) = x^{-1/gamma} on (0, 1], x^{-gamma} on [1, inf).
/// Its degree function equals f itself.
struct RegionIndicator {
  double gamma = 2.0;

  void validate() const {
    detail::require(std::isfinite(gamma) && gamma > 1.0, "region boundary exponent must exceed 1");
  }

  double boundary(double x) const noexcept {
    if (x <= 0.0) return std::numeric_limits<double>::infinity();
    return x <= 1.0 ? std::pow(x, -1.0 / gamma) : std::pow(x, -gamma);
  }

  // Both conditions describe the same set; testing both keeps evaluation
  // exactly symmetric under floating point.
  double operator()(double x, double y) const noexcept {
    return (y <= boundary(x) && x <= boundary(y)) ? 1.0 : 0.0;
  }

  double l1_full() const noexcept { return (gamma + 1.0) / (gamma - 1.0); }

  /// Exact kernel mass inside [0, a]^2.
  double l1_within(double a) const noexcept {
    if (a <= 0.0) return 0.0;
    if (a <= 1.0) return a * a;
    const double t = std::pow(a, 1.0 - gamma);
    return t + (gamma + 1.0) * (1.0 - t) / (gamma - 1.0);
  }

  double residual(double a) const noexcept { return std::max(0.0, l1_full() - l1_within(a)); }

  /// Exact degree of x on the truncated space [0, a].
  double degree_within(double x, double a) const noexcept { return std::min(boundary(x), a); }

  bool operator==(const RegionIndicator&) const = default;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const noexcept { return hi - lo; }
  double overlap_with_prefix(double a) const noexcept {
    return std::max(0.0, std::min(hi, a) - lo);
  }
  bool operator==(const Interval&) const = default;
};

/// Block model sum_{k1,k2} p_{k1 k2} 1[I_{k1} x I_{k2}] over disjoint intervals,
/// listed up to the truncation count K.
struct InfiniteBlock {
  std::vector<Interval> intervals;
  Matrix<double> probabilities;

  void validate() const {
    const std::size_t k = intervals.size();
    detail::require(probabilities.rows() == k && probabilities.cols() == k,
                    "infinite_block: probability matrix must be KxK with K = number of intervals");
    std::vector<Interval> sorted = intervals;
    std::sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) { return a.lo < b.lo; });
    for (std::size_t i = 0; i < k; ++i) {
      detail::require(sorted[i].lo >= 0.0 && sorted[i].hi > sorted[i].lo && std::isfinite(sorted[i].hi),
                      "infinite_block: interval " + std::to_string(i) + " must satisfy 0 <= lo < hi");
      if (i > 0)
        detail::require(sorted[i].lo >= sorted[i - 1].hi, "infinite_block: intervals overlap");
    }
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        const double p = probabilities(i, j);
        detail::require(p >= 0.0 && p <= 1.0,
                        "infinite_block: probability at (" + std::to_string(i) + "," +
                            std::to_string(j) + ") outside [0,1]");
        detail::require(p == probabilities(j, i), "infinite_block: probabilities not symmetric at (" +
                                                      std::to_string(i) + "," + std::to_string(j) + ")");
      }
  }

  std::size_t interval_of(double x) const noexcept {
    for (std::size_t k = 0; k < intervals.size(); ++k)
      if (x >= intervals[k].lo && x < intervals[k].hi) return k;
    return StepGraphon::npos;
  }

  double operator()(double x, double y) const noexcept {
    const std::size_t i = interval_of(x);
    const std::size_t j = interval_of(y);
    if (i == StepGraphon::npos || j == StepGraphon::npos) return 0.0;
    return probabilities(i, j);
  }

  double support_end() const noexcept {
    double e = 0.0;
    for (auto& iv : intervals) e = std::max(e, iv.hi);
    return e;
  }

  double l1_within(double a) const noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < intervals.size(); ++i)
      for (std::size_t j = 0; j < intervals.size(); ++j)
        s += probabilities(i, j) * intervals[i].overlap_with_prefix(a) * intervals[j].overlap_with_prefix(a);
    return s;
  }

  double residual(double a) const noexcept { return std::max(0.0, l1_within(support_end()) - l1_within(a)); }

  bool operator==(const InfiniteBlock&) const = default;
};

/// Interaction graphon between two communities.
using MembershipComponent = std::variant<StepGraphon, CaronFox>;

inline double evaluate_component(const MembershipComponent& c, double x, double y) noexcept {
  return std::visit([&](const auto& g) {
    if constexpr (std::is_same_v<std::decay_t<decltype(g)>, StepGraphon>) return g.evaluate(x, y);
    else return g(x, y);
  }, c);
}

/// Step kernel mass inside [0, a]^2.
inline double step_l1_within(const StepGraphon& w, double a) noexcept {
  double s = 0.0;
  const auto& b = w.boundaries();
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double li = std::max(0.0, std::min(b[i], a) - (b[i] - w.mass(i)));
    if (li == 0.0) continue;
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double lj = std::max(0.0, std::min(b[j], a) - (b[j] - w.mass(j)));
      s += std::abs(w.value(i, j)) * li * lj;
    }
  }
  return s;
}

inline double component_residual(const MembershipComponent& c, double a) noexcept {
  if (const auto* s = std::get_if<StepGraphon>(&c))
    return std::max(0.0, step_l1_within(*s, s->total_mass()) - step_l1_within(*s, a));
  return std::get<CaronFox>(c).residual_bound(a);
}

/// Mixed membership: W((p, x), (q, y)) = sum_{k1,k2} p_{k1} q_{k2} W_{k1 k2}(x, y),
/// with the simplex weights uniformly (Dirichlet(1,...,1)) distributed.
struct MixedMembership {
  std::size_t communities = 1;
  std::vector<MembershipComponent> components;  // K*K, row-major

  const MembershipComponent& component(std::size_t k1, std::size_t k2) const {
    return components[k1 * communities + k2];
  }

  void validate() const {
    const std::size_t k = communities;
    detail::require(k >= 1, "mixed_membership: need at least one community");
    detail::require(components.size() == k * k, "mixed_membership: need K*K components");
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) {
        detail::require(component(a, b) == component(b, a),
                        "mixed_membership: component (" + std::to_string(a) + "," + std::to_string(b) +
                            ") differs from its transpose");
        if (const auto* s = std::get_if<StepGraphon>(&component(a, b)))
          detail::require(s->unit_interval_valued(), "mixed_membership: step component (" +
                                                         std::to_string(a) + "," + std::to_string(b) +
                                                         ") has values outside [0,1]");
        else
          std::get<CaronFox>(component(a, b)).f.validate();
      }
  }

  bool all_step() const {
    return std::all_of(components.begin(), components.end(),
                       [](auto& c) { return std::holds_alternative<StepGraphon>(c); });
  }

  double support_end() const {
    double e = 0.0;
    for (auto& c : components)
      if (const auto* s = std::get_if<StepGraphon>(&c)) e = std::max(e, s->total_mass());
    return e;
  }

  // The two simplex coordinates are independent with mean 1/K each, so
  // integrated quantities average the components with weight 1/K^2.
  double residual(double a) const {
    double s = 0.0;
    for (auto& c : components) s += component_residual(c, a);
    return s / static_cast<double>(communities * communities);
  }

  bool operator==(const MixedMembership&) const = default;
};

class AnalyticGraphon {
 public:
  using Family = std::variant<CaronFox, RegionIndicator, InfiniteBlock, MixedMembership>;

  /// Builds a truncated analytic graphon. Supply x_max, a target L1 residual,
  /// or both; the missing value is computed. When both are given, x_max is
  /// enlarged if needed so the residual stays within the target.
  static AnalyticGraphon make(Family family, std::optional<double> x_max,
                              std::optional<double> target_l1_residual) {
    AnalyticGraphon g;
    g.family_ = std::move(family);
    g.validate_family();
    if (x_max) detail::require(std::isfinite(*x_max) && *x_max > 0.0, "x_max must be positive");
    if (target_l1_residual)
      detail::require(std::isfinite(*target_l1_residual) && *target_l1_residual > 0.0,
                      "target_l1_residual must be positive");
    const double end = g.natural_support_end();
    if (!x_max && !target_l1_residual) {
      if (end > 0.0) {
        g.x_max_ = end;
      } else {
        throw InvalidArgument(g.family_name() + ": infinite support needs x_max or target_l1_residual");
      }
    } else {
      double xm = x_max.value_or(0.0);
      if (target_l1_residual && !(x_max && g.residual_at(*x_max) <= *target_l1_residual))
        xm = std::max(xm, g.x_max_for_residual(*target_l1_residual));
      g.x_max_ = xm;
    }
    g.residual_ = g.residual_at(g.x_max_);
    g.target_ = target_l1_residual.value_or(g.residual_);
    return g;
  }

  const Family& family() const noexcept { return family_; }
  double x_max() const noexcept { return x_max_; }
  double target_l1_residual() const noexcept { return target_; }
  /// L1 mass of the kernel outside [0, x_max]^2 (exact or a certified upper bound).
  double truncation_residual() const noexcept { return residual_; }

  std::string family_name() const {
    switch (family_.index()) {
      case 0: return "caron_fox";
      case 1: return "region_indicator";
      case 2: return "infinite_block";
      default: return "mixed_membership";
    }
  }

  std::size_t communities() const noexcept {
    if (const auto* m = std::get_if<MixedMembership>(&family_)) return m->communities;
    return 0;
  }
  std::size_t feature_dim() const noexcept { return communities() + 1; }

  /// Kernel mass lost outside [0, a]^2.
  double residual_at(double a) const {
    return std::visit([&](const auto& f) -> double {
      using T = std::decay_t<decltype(f)>;
      if constexpr (std::is_same_v<T, CaronFox>) return f.residual_bound(a);
      else return f.residual(a);
    }, family_);
  }

  /// Position coordinate of a feature.
  static double position(const Feature& x) noexcept { return x.back(); }

  double evaluate(const Feature& a, const Feature& b) const {
    // Canonical argument order makes evaluation bitwise symmetric.
    if (std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end())) return evaluate_ordered(b, a);
    return evaluate_ordered(a, b);
  }

  /// Evaluation for single-coordinate families.
  double evaluate(double x, double y) const { return evaluate(Feature{x}, Feature{y}); }

  AnalyticGraphon with_x_max(double x_max) const {
    AnalyticGraphon g = *this;
    g.x_max_ = x_max;
    g.residual_ = residual_at(x_max);
    return g;
  }

  bool operator==(const AnalyticGraphon&) const = default;

 private:
  double evaluate_ordered(const Feature& a, const Feature& b) const {
    const std::size_t dim = feature_dim();
    detail::require(a.size() == dim && b.size() == dim,
                    family_name() + ": feature has " + std::to_string(a.size()) + " coordinates, expected " +
                        std::to_string(dim));
    const double x = position(a);
    const double y = position(b);
    if (x < 0.0 || y < 0.0 || x > x_max_ || y > x_max_) return 0.0;
    if (const auto* m = std::get_if<MixedMembership>(&family_)) {
      double s = 0.0;
      const std::size_t k = m->communities;
      for (std::size_t k1 = 0; k1 < k; ++k1) {
        if (a[k1] == 0.0) continue;
        for (std::size_t k2 = 0; k2 < k; ++k2)
          s += a[k1] * b[k2] * evaluate_component(m->component(k1, k2), x, y);
      }
      return std::clamp(s, 0.0, 1.0);
    }
    return std::visit([&](const auto& f) -> double {
      using T = std::decay_t<decltype(f)>;
      if constexpr (std::is_same_v<T, MixedMembership>) return 0.0;
      else return f(x, y);
    }, family_);
  }

  void validate_family() const {
    std::visit([](const auto& f) {
      using T = std::decay_t<decltype(f)>;
      if constexpr (std::is_same_v<T, CaronFox>) f.f.validate();
      else f.validate();
    }, family_);
  }

  /// End of bounded support, or 0 for families with infinite support.
  double natural_support_end() const {
    if (const auto* b = std::get_if<InfiniteBlock>(&family_)) return b->support_end();
    if (const auto* m = std::get_if<MixedMembership>(&family_))
      return m->all_step() ? m->support_end() : 0.0;
    return 0.0;
  }

  double x_max_for_residual(double target) const {
    if (residual_at(0.0) <= target) return 1e-12;
    double hi = 1.0;
    int guard = 0;
    while (residual_at(hi) > target) {
      hi *= 2.0;
      if (++guard > 200) throw InvalidArgument(family_name() + ": residual target unreachable");
    }
    double lo = hi / 2.0;
    if (residual_at(lo) <= target) lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (residual_at(mid) <= target ? hi : lo) = mid;
    }
    return hi;
  }

  Family family_;
  double x_max_ = 0.0;
  double target_ = 0.0;
  double residual_ = 0.0;
};

}  // namespace graphonlab
