#pragma once

// Adaptive trapezoid quadrature with a refinement-based error estimate.
//
// An interval is accepted when the composite trapezoid on its two halves
// agrees with the single trapezoid to within the local tolerance; the error
// estimate is the Richardson term |T2 - T1| / 3 summed over accepted leaves.
// Kernels in this library are bounded and piecewise smooth, so the estimate
// is reliable away from jump discontinuities; at jumps the recursion hits the
// depth limit and the result is flagged as not converged.

#include <cmath>
#include <functional>

namespace graphonlab::quad {

struct Estimate {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
  long evaluations = 0;
};

inline constexpr double default_tolerance = 1e-6;

namespace detail {

template <typename F>
void trapezoid_step(const F& f, double a, double b, double fa, double fb, double whole,
                    double tol, int depth, Estimate& out) {
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  ++out.evaluations;
  const double left = 0.25 * (b - a) * (fa + fm);
  const double right = 0.25 * (b - a) * (fm + fb);
  const double refined = left + right;
  const double err = std::abs(refined - whole) / 3.0;
  if ((err <= tol && depth >= 3) || depth >= 40) {
    if (err > tol) out.converged = false;
    out.value += refined + (refined - whole) / 3.0;
    out.error += err;
    return;
  }
  trapezoid_step(f, a, m, fa, fm, left, 0.5 * tol, depth + 1, out);
  trapezoid_step(f, m, b, fm, fb, right, 0.5 * tol, depth + 1, out);
}

}  // namespace detail

template <typename F>
Estimate integrate(const F& f, double a, double b, double tol = default_tolerance) {
  Estimate out;
  if (!(b > a)) return out;
  const double fa = f(a);
  const double fb = f(b);
  out.evaluations = 2;
  detail::trapezoid_step(f, a, b, fa, fb, 0.5 * (b - a) * (fa + fb), tol, 0, out);
  return out;
}

// Iterated integral over [a,b] x [c,d]; inner integrals run at a tighter tolerance.
template <typename F>
Estimate integrate2d(const F& f, double a, double b, double c, double d,
                     double tol = default_tolerance) {
  Estimate total;
  const double inner_tol = tol / (4.0 * std::max(1.0, b - a));
  auto outer = [&](double x) {
    Estimate in = integrate([&](double y) { return f(x, y); }, c, d, inner_tol);
    total.evaluations += in.evaluations;
    if (!in.converged) total.converged = false;
    return in.value;
  };
  Estimate o = integrate(outer, a, b, 0.5 * tol);
  total.value = o.value;
  total.error = o.error + inner_tol * (b - a);
  total.converged = total.converged && o.converged;
  return total;
}

}  // namespace graphonlab::quad
