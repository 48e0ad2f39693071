#pragma once

// Operations shared by step and analytic graphons: evaluation, L1 norms,
// degree profiles, tail truncation, partition averaging, stretching,
// flattening product families onto R+, and grid discretization.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <variant>
#include <vector>

#include "graphonlab/analytic_graphon.hpp"
#include "graphonlab/error.hpp"
#include "graphonlab/matrix.hpp"
#include "graphonlab/quadrature.hpp"
#include "graphonlab/step_graphon.hpp"

namespace graphonlab {

using Graphon = std::variant<StepGraphon, AnalyticGraphon>;

inline std::size_t feature_dim(const Graphon& w) {
  if (const auto* a = std::get_if<AnalyticGraphon>(&w)) return a->feature_dim();
  return 1;
}

inline double evaluate(const StepGraphon& w, const Feature& x, const Feature& y) {
  return w.evaluate(x.back(), y.back());
}

inline double evaluate(const AnalyticGraphon& w, const Feature& x, const Feature& y) {
  return w.evaluate(x, y);
}

inline double evaluate(const Graphon& w, const Feature& x, const Feature& y) {
  return std::visit([&](const auto& g) { return evaluate(g, x, y); }, w);
}

// ---------------------------------------------------------------------------
// L1 norms

inline double l1_norm(const StepGraphon& w) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < w.size(); ++j) s += std::abs(w.value(i, j)) * w.mass(i) * w.mass(j);
  return s;
}

namespace detail {

// Pieces of [0, a] in log coordinates x = e^u - shift, where the power-law
// tail is smooth and short. The flat part of a truncated power stays linear.
struct CaronPiece {
  double lo, hi, shift;
  bool log_scale;
  double x(double u) const noexcept { return log_scale ? std::exp(u) - shift : u; }
  double jacobian(double u) const noexcept { return log_scale ? std::exp(u) : 1.0; }
};

inline std::vector<CaronPiece> caron_pieces(const CaronFox& k, double a) {
  std::vector<CaronPiece> out;
  if (a <= 0.0) return out;
  if (k.f.kind == PowerLaw::Kind::shifted_power) {
    out.push_back({0.0, std::log1p(a), 1.0, true});
  } else {
    out.push_back({0.0, std::min(a, 1.0), 0.0, false});
    if (a > 1.0) out.push_back({0.0, std::log(a), 0.0, true});
  }
  return out;
}

inline quad::Estimate caron_l1_within(const CaronFox& k, double a, double tol) {
  quad::Estimate total;
  const auto pieces = caron_pieces(k, a);
  const double share = tol / static_cast<double>(std::max<std::size_t>(1, pieces.size() * pieces.size()));
  for (const auto& p : pieces)
    for (const auto& q : pieces) {
      auto e = quad::integrate2d(
          [&](double u, double v) { return k(p.x(u), q.x(v)) * p.jacobian(u) * q.jacobian(v); }, p.lo, p.hi, q.lo,
          q.hi, share);
      total.value += e.value;
      total.error += e.error;
      total.converged = total.converged && e.converged;
      total.evaluations += e.evaluations;
    }
  return total;
}

inline quad::Estimate caron_degree(const CaronFox& k, double x, double a, double tol) {
  quad::Estimate total;
  for (const auto& q : caron_pieces(k, a)) {
    auto e = quad::integrate([&](double v) { return k(x, q.x(v)) * q.jacobian(v); }, q.lo, q.hi, tol);
    total.value += e.value;
    total.error += e.error;
    total.converged = total.converged && e.converged;
    total.evaluations += e.evaluations;
  }
  return total;
}

inline double step_degree_within(const StepGraphon& w, double x, double a) {
  const std::size_t i = w.block_of(x);
  if (i == StepGraphon::npos) return 0.0;
  double s = 0.0;
  const auto& b = w.boundaries();
  for (std::size_t j = 0; j < w.size(); ++j)
    s += w.value(i, j) * std::max(0.0, std::min(b[j], a) - (b[j] - w.mass(j)));
  return s;
}

inline quad::Estimate component_l1_within(const MembershipComponent& c, double a, double tol) {
  if (const auto* s = std::get_if<StepGraphon>(&c)) return {step_l1_within(*s, a), 0.0, true, 0};
  return caron_l1_within(std::get<CaronFox>(c), a, tol);
}

inline quad::Estimate component_degree(const MembershipComponent& c, double x, double a, double tol) {
  if (const auto* s = std::get_if<StepGraphon>(&c)) return {step_degree_within(*s, x, a), 0.0, true, 0};
  return caron_degree(std::get<CaronFox>(c), x, a, tol);
}

inline void accumulate(quad::Estimate& into, const quad::Estimate& e, double weight = 1.0) {
  into.value += weight * e.value;
  into.error += std::abs(weight) * e.error;
  into.converged = into.converged && e.converged;
  into.evaluations += e.evaluations;
}

}  // namespace detail

/// Kernel mass of an analytic graphon inside [0, a]^2 (a clipped to x_max).
inline quad::Estimate l1_within(const AnalyticGraphon& w, double a, double tol = quad::default_tolerance) {
  a = std::clamp(a, 0.0, w.x_max());
  const auto& fam = w.family();
  if (const auto* c = std::get_if<CaronFox>(&fam)) return detail::caron_l1_within(*c, a, tol);
  if (const auto* r = std::get_if<RegionIndicator>(&fam)) return {r->l1_within(a), 0.0, true, 0};
  if (const auto* b = std::get_if<InfiniteBlock>(&fam)) return {b->l1_within(a), 0.0, true, 0};
  const auto& m = std::get<MixedMembership>(fam);
  quad::Estimate total;
  const double k2 = static_cast<double>(m.communities * m.communities);
  for (const auto& comp : m.components)
    detail::accumulate(total, detail::component_l1_within(comp, a, tol / k2), 1.0 / k2);
  return total;
}

/// L1 norm of the truncated kernel W 1_{[0,x_max]^2}. The mass outside the
/// truncation is reported separately by truncation_residual().
inline quad::Estimate l1_norm(const AnalyticGraphon& w, double tol = quad::default_tolerance) {
  return l1_within(w, w.x_max(), tol);
}

inline quad::Estimate l1_norm(const Graphon& w, double tol = quad::default_tolerance) {
  if (const auto* s = std::get_if<StepGraphon>(&w)) return {l1_norm(*s), 0.0, true, 0};
  return l1_norm(std::get<AnalyticGraphon>(w), tol);
}

// ---------------------------------------------------------------------------
// Degrees

/// D_W on each block: sum_j a_ij m_j.
inline std::vector<double> block_degrees(const StepGraphon& w) {
  std::vector<double> d(w.size(), 0.0);
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < w.size(); ++j) d[i] += w.value(i, j) * w.mass(j);
  return d;
}

/// D_W(x) for the truncated analytic graphon.
inline quad::Estimate degree(const AnalyticGraphon& w, const Feature& x, double tol = quad::default_tolerance) {
  const double a = w.x_max();
  const double pos = x.back();
  if (pos < 0.0 || pos > a) return {};
  const auto& fam = w.family();
  if (const auto* c = std::get_if<CaronFox>(&fam)) return detail::caron_degree(*c, pos, a, tol);
  if (const auto* r = std::get_if<RegionIndicator>(&fam)) return {r->degree_within(pos, a), 0.0, true, 0};
  if (const auto* b = std::get_if<InfiniteBlock>(&fam)) {
    const std::size_t i = b->interval_of(pos);
    double s = 0.0;
    if (i != StepGraphon::npos)
      for (std::size_t j = 0; j < b->intervals.size(); ++j)
        s += b->probabilities(i, j) * b->intervals[j].overlap_with_prefix(a);
    return {s, 0.0, true, 0};
  }
  const auto& m = std::get<MixedMembership>(fam);
  const std::size_t k = m.communities;
  detail::require(x.size() == k + 1, "mixed_membership degree: feature needs K+1 coordinates");
  quad::Estimate total;
  for (std::size_t k1 = 0; k1 < k; ++k1) {
    if (x[k1] == 0.0) continue;
    for (std::size_t k2 = 0; k2 < k; ++k2)
      detail::accumulate(total, detail::component_degree(m.component(k1, k2), pos, a, tol),
                         x[k1] / static_cast<double>(k));
  }
  return total;
}

/// lambda -> mu({D_W > lambda}) as a right-continuous step function over
/// atoms (degree, mass), degrees strictly decreasing.
class DegreeProfile {
 public:
  struct Atom {
    double degree;
    double mass;
  };

  DegreeProfile() = default;
  DegreeProfile(std::vector<Atom> atoms, bool exact) : exact_(exact) {
    std::map<double, double, std::greater<>> merged;
    for (const auto& a : atoms)
      if (a.mass > 0.0) merged[a.degree] += a.mass;
    for (const auto& [d, m] : merged) atoms_.push_back({d, m});
  }

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  bool exact() const noexcept { return exact_; }

  double operator()(double lambda) const noexcept {
    double s = 0.0;
    for (const auto& a : atoms_) {
      if (a.degree <= lambda) break;
      s += a.mass;
    }
    return s;
  }

  /// integral_0^inf profile(lambda) d lambda = sum over positive atoms of m D.
  double layer_cake_integral() const noexcept {
    double s = 0.0;
    for (const auto& a : atoms_)
      if (a.degree > 0.0) s += a.mass * a.degree;
    return s;
  }

  /// integral of D_W^k d mu.
  double moment(int k) const noexcept {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.mass * std::pow(a.degree, k);
    return s;
  }

 private:
  std::vector<Atom> atoms_;
  bool exact_ = true;
};

inline DegreeProfile degree_profile(const StepGraphon& w) {
  const auto d = block_degrees(w);
  std::vector<DegreeProfile::Atom> atoms;
  for (std::size_t i = 0; i < w.size(); ++i) atoms.push_back({d[i], w.mass(i)});
  return DegreeProfile(std::move(atoms), true);
}

/// Centroids of the r^{K-1} equal-probability cells of the uniform simplex.
/// Cells are images of the sub-cubes of [0,1]^{K-1} under the sorted-spacings
/// map, which pushes Lebesgue measure forward to Dirichlet(1,...,1).
inline std::vector<std::vector<double>> simplex_cell_centroids(std::size_t k, std::size_t r) {
  detail::require(k >= 1 && r >= 1, "simplex cells need K >= 1 and resolution >= 1");
  if (k == 1) return {{1.0}};
  const std::size_t dims = k - 1;
  std::size_t count = 1;
  for (std::size_t i = 0; i < dims; ++i) count *= r;
  std::vector<std::vector<double>> out;
  out.reserve(count);
  std::vector<std::size_t> idx(dims, 0);
  for (std::size_t c = 0; c < count; ++c) {
    std::vector<std::size_t> sorted = idx;
    std::sort(sorted.begin(), sorted.end());
    // Expected order statistics: j uniforms sharing [lo, hi) have means lo + (hi - lo) i / (j + 1).
    std::vector<double> order;
    for (std::size_t s = 0; s < dims;) {
      std::size_t e = s;
      while (e < dims && sorted[e] == sorted[s]) ++e;
      const double lo = static_cast<double>(sorted[s]) / static_cast<double>(r);
      const double hi = static_cast<double>(sorted[s] + 1) / static_cast<double>(r);
      const std::size_t j = e - s;
      for (std::size_t i = 1; i <= j; ++i)
        order.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(j + 1));
      s = e;
    }
    std::vector<double> p(k);
    double prev = 0.0;
    for (std::size_t i = 0; i < dims; ++i) {
      p[i] = order[i] - prev;
      prev = order[i];
    }
    p[dims] = 1.0 - prev;
    out.push_back(std::move(p));
    for (std::size_t d = 0; d < dims; ++d) {
      if (++idx[d] < r) break;
      idx[d] = 0;
    }
  }
  return out;
}

/// Tabulated profile: D_W evaluated at position-cell midpoints (and simplex
/// cell centroids for mixed membership, where D_W is linear in the weights).
inline DegreeProfile degree_profile(const AnalyticGraphon& w, std::size_t cells = 512,
                                    std::size_t simplex_resolution = 4) {
  detail::require(cells >= 1, "degree_profile: need at least one cell");
  std::vector<DegreeProfile::Atom> atoms;
  const double a = w.x_max();
  if (const auto* b = std::get_if<InfiniteBlock>(&w.family())) {
    for (const auto& iv : b->intervals) {
      const double len = iv.overlap_with_prefix(a);
      if (len > 0.0) atoms.push_back({degree(w, {iv.lo + 0.5 * len}).value, len});
    }
    return DegreeProfile(std::move(atoms), true);
  }
  const double h = a / static_cast<double>(cells);
  std::vector<std::vector<double>> weights{{}};
  if (w.communities() > 0) weights = simplex_cell_centroids(w.communities(), simplex_resolution);
  const double cell_prob = 1.0 / static_cast<double>(weights.size());
  for (const auto& p : weights)
    for (std::size_t c = 0; c < cells; ++c) {
      Feature x = p;
      x.push_back((static_cast<double>(c) + 0.5) * h);
      atoms.push_back({degree(w, x).value, h * cell_prob});
    }
  return DegreeProfile(std::move(atoms), false);
}

// ---------------------------------------------------------------------------
// Tail truncation

struct TailTruncation {
  double mass_bound = 0.0;  // M = mu(U), U = [0, M]
  StepGraphon truncated;
  double residual = 0.0;    // ||W - W 1_{UxU}||_1
};

/// Smallest block prefix whose complement carries L1 mass below eps. When no
/// strict prefix qualifies the full support is kept (residual 0).
inline TailTruncation truncate_tail(const StepGraphon& w, double eps) {
  detail::require(eps > 0.0 && std::isfinite(eps), "truncate_tail: eps must be positive");
  const double total = l1_norm(w);
  const std::size_t n = w.size();
  // Prefix L1 masses, accumulated block by block.
  double inside = 0.0;
  std::size_t keep = 0;
  double residual = total;
  while (!(residual < eps) && keep < n) {
    const std::size_t p = keep;
    double add = std::abs(w.value(p, p)) * w.mass(p) * w.mass(p);
    for (std::size_t j = 0; j < p; ++j) add += 2.0 * std::abs(w.value(p, j)) * w.mass(p) * w.mass(j);
    inside += add;
    ++keep;
    residual = keep == n ? 0.0 : std::max(0.0, total - inside);
  }
  std::vector<double> masses(w.masses().begin(), w.masses().begin() + static_cast<std::ptrdiff_t>(keep));
  Matrix<double> vals(keep, keep);
  for (std::size_t i = 0; i < keep; ++i)
    for (std::size_t j = 0; j < keep; ++j) vals(i, j) = w.value(i, j);
  TailTruncation out;
  out.mass_bound = keep == 0 ? 0.0 : w.boundaries()[keep - 1];
  out.truncated = StepGraphon(std::move(masses), std::move(vals), w.ambient_infinite());
  out.residual = residual;
  return out;
}

struct AnalyticTailTruncation {
  double mass_bound = 0.0;
  AnalyticGraphon truncated;
  double residual = 0.0;  // quadrature estimate of the L1 mass outside [0, M]^2
  double error = 0.0;
};

/// Smallest grid point M = k * grid_step with residual below eps. The result
/// stays analytic (x_max lowered to M); discretize it for a step form.
inline AnalyticTailTruncation truncate_tail(const AnalyticGraphon& w, double eps, double grid_step,
                                            double tol = quad::default_tolerance) {
  detail::require(eps > 0.0 && std::isfinite(eps), "truncate_tail: eps must be positive");
  detail::require(grid_step > 0.0, "truncate_tail: grid_step must be positive");
  const auto full = l1_norm(w, tol);
  const auto steps = static_cast<std::size_t>(std::ceil(w.x_max() / grid_step - 1e-12));
  // The residual is nonincreasing in M, so bisect for the first grid point.
  auto probe = [&](std::size_t k) {
    const double m = std::min(w.x_max(), static_cast<double>(k) * grid_step);
    const auto inside = l1_within(w, m, tol);
    return AnalyticTailTruncation{m, w.with_x_max(std::max(m, std::numeric_limits<double>::min())),
                                  std::max(0.0, full.value - inside.value), full.error + inside.error};
  };
  std::size_t lo = 0, hi = steps;  // hi always qualifies (residual 0 at x_max)
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (probe(mid).residual < eps) hi = mid;
    else lo = mid + 1;
  }
  if (hi == steps) return {w.x_max(), w, 0.0, 0.0};
  return probe(hi);
}

// ---------------------------------------------------------------------------
// Partitions

/// Assignment of the blocks of a step graphon to classes 0..classes-1.
struct BlockPartition {
  std::vector<std::size_t> class_of;
  std::size_t classes = 0;

  static BlockPartition identity(std::size_t n) {
    BlockPartition p;
    p.class_of.resize(n);
    std::iota(p.class_of.begin(), p.class_of.end(), std::size_t{0});
    p.classes = n;
    return p;
  }

  static BlockPartition single(std::size_t n) { return {std::vector<std::size_t>(n, 0), n ? 1u : 0u}; }

  std::vector<double> masses(const StepGraphon& w) const {
    std::vector<double> m(classes, 0.0);
    for (std::size_t i = 0; i < class_of.size(); ++i) m[class_of[i]] += w.mass(i);
    return m;
  }

  bool operator==(const BlockPartition&) const = default;
};

/// Partition of R+ into consecutive cells [b_{k-1}, b_k) with b_0 = 0.
struct IntervalPartition {
  std::vector<double> boundaries;  // strictly increasing, positive
};

/// Splits blocks at the given positions (positions outside the support or on
/// existing boundaries are ignored). Values are copied, so the result is the
/// same kernel on a finer block structure.
inline StepGraphon refine(const StepGraphon& w, std::vector<double> cuts,
                          std::vector<std::size_t>* origin = nullptr) {
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> masses;
  std::vector<std::size_t> from;
  const auto& b = w.boundaries();
  std::size_t c = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    double lo = b[i] - w.mass(i);
    while (c < cuts.size() && cuts[c] <= lo) ++c;
    while (c < cuts.size() && cuts[c] < b[i]) {
      masses.push_back(cuts[c] - lo);
      from.push_back(i);
      lo = cuts[c];
      ++c;
    }
    masses.push_back(b[i] - lo);
    from.push_back(i);
  }
  Matrix<double> vals(masses.size(), masses.size());
  for (std::size_t i = 0; i < masses.size(); ++i)
    for (std::size_t j = 0; j < masses.size(); ++j) vals(i, j) = w.value(from[i], from[j]);
  if (origin) *origin = from;
  return StepGraphon(std::move(masses), std::move(vals), w.ambient_infinite());
}

/// W_P expressed on the classes: class masses, class-pair averages.
inline StepGraphon average_over_partition(const StepGraphon& w, const BlockPartition& p) {
  detail::require(p.class_of.size() == w.size(), "partition does not match the block count");
  const auto cm = p.masses(w);
  for (std::size_t k = 0; k < p.classes; ++k)
    detail::require(cm[k] > 0.0, "partition class " + std::to_string(k) + " has zero mass");
  Matrix<double> integral(p.classes, p.classes, 0.0);
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < w.size(); ++j)
      integral(p.class_of[i], p.class_of[j]) += w.value(i, j) * w.mass(i) * w.mass(j);
  Matrix<double> vals(p.classes, p.classes);
  for (std::size_t k = 0; k < p.classes; ++k)
    for (std::size_t l = k; l < p.classes; ++l)
      vals(k, l) = vals(l, k) = integral(k, l) / (cm[k] * cm[l]);
  return StepGraphon(cm, std::move(vals), w.ambient_infinite());
}

/// Interval form; W is refined onto the cell boundaries first. Cells past the
/// support of W average the zero tail.
inline StepGraphon average_over_partition(const StepGraphon& w, const IntervalPartition& p) {
  double prev = 0.0;
  for (double b : p.boundaries) {
    detail::require(b > prev, "interval partition boundaries must be strictly increasing from 0");
    prev = b;
  }
  std::vector<double> cuts = p.boundaries;
  StepGraphon r = refine(w, cuts);
  // Append zero blocks so that every cell is covered.
  std::vector<double> masses = r.masses();
  double covered = r.total_mass();
  for (double b : p.boundaries)
    if (b > covered) {
      masses.push_back(b - covered);
      covered = b;
    }
  Matrix<double> vals(masses.size(), masses.size(), 0.0);
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = 0; j < r.size(); ++j) vals(i, j) = r.value(i, j);
  StepGraphon ext(masses, std::move(vals), w.ambient_infinite());
  BlockPartition bp;
  bp.classes = p.boundaries.size();
  std::size_t cell = 0;
  for (std::size_t i = 0; i < ext.size(); ++i) {
    const double mid = ext.boundaries()[i] - 0.5 * ext.mass(i);
    while (cell < p.boundaries.size() && mid >= p.boundaries[cell]) ++cell;
    bp.class_of.push_back(cell);
  }
  if (cell >= p.boundaries.size())
    throw InvalidArgument("graphon support extends past the last partition cell");
  return average_over_partition(ext, bp);
}

/// W_P on the original blocks of W (each block takes its class-pair average).
inline StepGraphon project_onto_partition(const StepGraphon& w, const BlockPartition& p) {
  const StepGraphon avg = average_over_partition(w, p);
  Matrix<double> vals(w.size(), w.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < w.size(); ++j) vals(i, j) = avg.value(p.class_of[i], p.class_of[j]);
  return StepGraphon(w.masses(), std::move(vals), w.ambient_infinite());
}

// ---------------------------------------------------------------------------
// Stretching

/// Rescales the measure by ||W||_1^{-1/2} so the result has unit L1 norm.
/// A graphon with zero norm maps to the zero graphon.
inline StepGraphon stretch(const StepGraphon& w) {
  const double l1 = l1_norm(w);
  if (l1 == 0.0) return StepGraphon::zero(w.masses(), w.ambient_infinite());
  const double s = 1.0 / std::sqrt(l1);
  std::vector<double> m = w.masses();
  for (double& x : m) x *= s;
  return StepGraphon(std::move(m), w.values(), w.ambient_infinite());
}

// ---------------------------------------------------------------------------
// Flattening and discretization

inline constexpr std::size_t max_discrete_blocks = 4096;

namespace detail {

// Breakpoints of all step components in [0, a].
inline std::vector<double> component_breaks(const MixedMembership& m, double a) {
  std::vector<double> b{0.0, a};
  for (const auto& c : m.components)
    if (const auto* s = std::get_if<StepGraphon>(&c))
      for (double x : s->boundaries())
        if (x < a) b.push_back(x);
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

// Assembles the product-cell step graphon for a mixed-membership family from
// per-component cell averages on a shared position grid.
inline StepGraphon assemble_mixed(const MixedMembership& m, const std::vector<double>& widths,
                                  const std::vector<Matrix<double>>& comp_avg, std::size_t resolution) {
  const auto centroids = simplex_cell_centroids(m.communities, resolution);
  const std::size_t cells = centroids.size();
  const std::size_t s = widths.size();
  const std::size_t n = cells * s;
  if (n > max_discrete_blocks)
    throw CostExceeded("mixed membership product grid exceeds " + std::to_string(max_discrete_blocks) + " blocks",
                       static_cast<double>(n) * static_cast<double>(n));
  std::vector<double> masses(n);
  for (std::size_t c = 0; c < cells; ++c)
    for (std::size_t i = 0; i < s; ++i) masses[c * s + i] = widths[i] / static_cast<double>(cells);
  Matrix<double> vals(n, n);
  const std::size_t k = m.communities;
  for (std::size_t c1 = 0; c1 < cells; ++c1)
    for (std::size_t c2 = c1; c2 < cells; ++c2)
      for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j) {
          const std::size_t r = c1 * s + i, q = c2 * s + j;
          if (c1 == c2 && j < i) continue;
          double v = 0.0;
          for (std::size_t k1 = 0; k1 < k; ++k1)
            for (std::size_t k2 = 0; k2 < k; ++k2)
              v += centroids[c1][k1] * centroids[c2][k2] * comp_avg[k1 * k + k2](i, j);
          v = std::clamp(v, 0.0, 1.0);
          vals(r, q) = v;
          vals(q, r) = v;
        }
  return StepGraphon(std::move(masses), std::move(vals), true);
}

}  // namespace detail

/// Equivalent step graphon on R+ for block-structured families.
/// infinite_block: intervals laid end to end (exact). mixed_membership with
/// step components: simplex cells x position segments, each cell pair taking
/// sum p_{k1} q_{k2} W_{k1k2} at the cell centroids, which is the exact cell
/// average because the kernel is bilinear in the weights.
inline StepGraphon flatten_to_line(const AnalyticGraphon& w, std::size_t simplex_resolution = 3) {
  const double a = w.x_max();
  if (const auto* b = std::get_if<InfiniteBlock>(&w.family())) {
    std::vector<std::size_t> order(b->intervals.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return b->intervals[x].lo < b->intervals[y].lo; });
    std::vector<std::size_t> kept;
    std::vector<double> masses;
    for (std::size_t i : order) {
      const double len = b->intervals[i].overlap_with_prefix(a);
      if (len > 0.0) {
        kept.push_back(i);
        masses.push_back(len);
      }
    }
    Matrix<double> vals(kept.size(), kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i)
      for (std::size_t j = 0; j < kept.size(); ++j) vals(i, j) = b->probabilities(kept[i], kept[j]);
    return StepGraphon(std::move(masses), std::move(vals), true);
  }
  if (const auto* m = std::get_if<MixedMembership>(&w.family())) {
    if (!m->all_step())
      throw Unsupported("flatten_to_line: mixed membership with caron_fox components needs discretize");
    const auto br = detail::component_breaks(*m, a);
    std::vector<double> widths, mids;
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
      widths.push_back(br[i + 1] - br[i]);
      mids.push_back(0.5 * (br[i] + br[i + 1]));
    }
    std::vector<Matrix<double>> avg;
    for (const auto& comp : m->components) {
      const auto& s = std::get<StepGraphon>(comp);
      Matrix<double> v(mids.size(), mids.size());
      for (std::size_t i = 0; i < mids.size(); ++i)
        for (std::size_t j = 0; j < mids.size(); ++j) v(i, j) = s.evaluate(mids[i], mids[j]);
      avg.push_back(std::move(v));
    }
    return detail::assemble_mixed(*m, widths, avg, simplex_resolution);
  }
  throw Unsupported("flatten_to_line: " + w.family_name() + " has no block structure; use discretize");
}

struct Discretization {
  StepGraphon graphon;
  double l1_error_estimate = 0.0;  // ||W_h - W_{h/2}||_1
  std::size_t cells = 0;
};

namespace detail {

inline constexpr std::array<double, 4> gl_nodes{-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                                0.8611363115940526};
inline constexpr std::array<double, 4> gl_weights{0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                                  0.3478548451374538};

template <typename K>
double gauss_cell_average(const K& kernel, double x0, double x1, double y0, double y1) {
  double s = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const double x = 0.5 * (x0 + x1) + 0.5 * (x1 - x0) * gl_nodes[i];
    for (std::size_t j = 0; j < 4; ++j) {
      const double y = 0.5 * (y0 + y1) + 0.5 * (y1 - y0) * gl_nodes[j];
      s += gl_weights[i] * gl_weights[j] * kernel(x, y);
    }
  }
  return 0.25 * s;
}

inline double interval_overlap(double a0, double a1, double b0, double b1) {
  return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

// Average of a 1-D family over the cell [x0,x1) x [y0,y1).
inline double cell_average_1d(const AnalyticGraphon::Family& fam, double x0, double x1, double y0, double y1) {
  const double area = (x1 - x0) * (y1 - y0);
  if (const auto* b = std::get_if<InfiniteBlock>(&fam)) {
    double s = 0.0;
    for (std::size_t i = 0; i < b->intervals.size(); ++i) {
      const double oi = interval_overlap(x0, x1, b->intervals[i].lo, b->intervals[i].hi);
      if (oi == 0.0) continue;
      for (std::size_t j = 0; j < b->intervals.size(); ++j)
        s += b->probabilities(i, j) * oi * interval_overlap(y0, y1, b->intervals[j].lo, b->intervals[j].hi);
    }
    return s / area;
  }
  if (const auto* r = std::get_if<RegionIndicator>(&fam)) {
    // The region below the boundary: integrate its clipped height over x.
    auto e = quad::integrate(
        [&](double x) { return std::clamp(r->boundary(x) - y0, 0.0, y1 - y0); }, x0, x1, 1e-10 * area);
    return std::clamp(e.value / area, 0.0, 1.0);
  }
  const auto& c = std::get<CaronFox>(fam);
  return gauss_cell_average(c, x0, x1, y0, y1);
}

inline double component_cell_average(const MembershipComponent& comp, double x0, double x1, double y0, double y1) {
  if (const auto* s = std::get_if<StepGraphon>(&comp)) {
    double v = 0.0;
    const auto& b = s->boundaries();
    for (std::size_t i = 0; i < s->size(); ++i) {
      const double oi = interval_overlap(x0, x1, b[i] - s->mass(i), b[i]);
      if (oi == 0.0) continue;
      for (std::size_t j = 0; j < s->size(); ++j)
        v += s->value(i, j) * oi * interval_overlap(y0, y1, b[j] - s->mass(j), b[j]);
    }
    return v / ((x1 - x0) * (y1 - y0));
  }
  return gauss_cell_average(std::get<CaronFox>(comp), x0, x1, y0, y1);
}

// Coarse grid [0,a] with step h; the last cell may be shorter.
inline std::vector<double> grid_edges(double a, double h) {
  const auto n = static_cast<std::size_t>(std::ceil(a / h - 1e-9));
  std::vector<double> e;
  for (std::size_t i = 0; i < n; ++i) e.push_back(static_cast<double>(i) * h);
  e.push_back(a);
  return e;
}

}  // namespace detail

/// Cell-average step approximation on a grid of width grid_step over
/// [0, x_max]. The error estimate is the exact L1 distance between the coarse
/// grid and the twice-finer grid (the coarse values are averages of the
/// fine ones).
inline Discretization discretize(const AnalyticGraphon& w, double grid_step, std::size_t simplex_resolution = 3) {
  detail::require(grid_step > 0.0 && std::isfinite(grid_step), "discretize: grid_step must be positive");
  const double a = w.x_max();
  const double est_cells = std::ceil(a / grid_step - 1e-9);
  const double simplex_cells =
      w.communities() > 1 ? std::pow(static_cast<double>(simplex_resolution), static_cast<double>(w.communities() - 1))
                          : 1.0;
  if (est_cells * simplex_cells > static_cast<double>(max_discrete_blocks))
    throw InvalidArgument("discretize: grid of " + std::to_string(static_cast<long long>(est_cells * simplex_cells)) +
                          " cells exceeds the limit of " + std::to_string(max_discrete_blocks));
  const auto edges = detail::grid_edges(a, grid_step);
  const std::size_t n = edges.size() - 1;

  // Coarse averages; the four half-cell averages are either kept (fine != nullptr)
  // or folded straight into the error estimate.
  auto build = [&](auto&& cell_avg, Matrix<double>& coarse, Matrix<std::array<double, 4>>* fine, double& err) {
    coarse = Matrix<double>(n, n);
    if (fine) *fine = Matrix<std::array<double, 4>>(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        const double xm = 0.5 * (edges[i] + edges[i + 1]);
        const double ym = 0.5 * (edges[j] + edges[j + 1]);
        const std::array<double, 4> f{cell_avg(edges[i], xm, edges[j], ym), cell_avg(edges[i], xm, ym, edges[j + 1]),
                                      cell_avg(xm, edges[i + 1], edges[j], ym),
                                      cell_avg(xm, edges[i + 1], ym, edges[j + 1])};
        const double v = 0.25 * (f[0] + f[1] + f[2] + f[3]);
        coarse(i, j) = coarse(j, i) = v;
        if (fine) {
          (*fine)(i, j) = f;
          (*fine)(j, i) = {f[0], f[2], f[1], f[3]};
        } else {
          const double q = 0.25 * (edges[i + 1] - edges[i]) * (edges[j + 1] - edges[j]) * (i == j ? 1.0 : 2.0);
          for (double x : f) err += std::abs(v - x) * q;
        }
      }
  };

  std::vector<double> widths(n);
  for (std::size_t i = 0; i < n; ++i) widths[i] = edges[i + 1] - edges[i];

  if (const auto* m = std::get_if<MixedMembership>(&w.family())) {
    std::vector<Matrix<double>> coarse(m->components.size());
    std::vector<Matrix<std::array<double, 4>>> fine(m->components.size());
    double unused = 0.0;
    for (std::size_t c = 0; c < m->components.size(); ++c)
      build([&](double x0, double x1, double y0, double y1) {
        return detail::component_cell_average(m->components[c], x0, x1, y0, y1);
      }, coarse[c], &fine[c], unused);
    StepGraphon g = detail::assemble_mixed(*m, widths, coarse, simplex_resolution);
    // Each quarter of a product cell differs from the coarse value by the
    // weight-combined component differences.
    const auto centroids = simplex_cell_centroids(m->communities, simplex_resolution);
    const std::size_t k = m->communities;
    double err = 0.0;
    for (std::size_t c1 = 0; c1 < centroids.size(); ++c1)
      for (std::size_t c2 = 0; c2 < centroids.size(); ++c2)
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            const double q = 0.25 * widths[i] * widths[j] / static_cast<double>(centroids.size() * centroids.size());
            for (std::size_t f = 0; f < 4; ++f) {
              double d = 0.0;
              for (std::size_t k1 = 0; k1 < k; ++k1)
                for (std::size_t k2 = 0; k2 < k; ++k2)
                  d += centroids[c1][k1] * centroids[c2][k2] *
                       (coarse[k1 * k + k2](i, j) - fine[k1 * k + k2](i, j)[f]);
              err += std::abs(d) * q;
            }
          }
    return {std::move(g), err, n};
  }

  Matrix<double> coarse;
  double err = 0.0;
  build([&](double x0, double x1, double y0, double y1) {
    return detail::cell_average_1d(w.family(), x0, x1, y0, y1);
  }, coarse, nullptr, err);
  return {StepGraphon(widths, std::move(coarse), true), err, n};
}

}  // namespace graphonlab
