#pragma once

// Adaptive quadrature used by the distance law.  The integrands are smooth
// except for inverse-square-root factors 1/sqrt(p^2 - x^2) at a rim x = p
// and square-root cusps where an arccos kernel reaches the edge of its
// domain.  Both are removed by the global substitution x = p*sin(u), applied
// to the whole interval whenever a sqrt_scale p is supplied; the transformed
// integrand is then handled by plain adaptive bisection with an embedded
// Gauss-Legendre pair (7 and 15 nodes, computed at startup).
//
// Error estimates are the sum over panels of the difference between the two
// rules plus a rounding floor proportional to the total absolute panel mass.
// Tolerances are absolute.

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace flightdist {

inline constexpr long k1dEvalBudget = 1'000'000;
inline constexpr long k2dEvalBudget = 100'000'000;
inline constexpr double kDefaultTol1d = 1e-10;
inline constexpr double kDefaultTol2d = 1e-8;

struct QuadResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  long evaluations = 0;
};

// Declares the singular structure of an integrand.  sqrt_scale > 0 turns on
// the sine substitution with rim radius p = sqrt_scale; the interval must
// then satisfy [-p, p] up to a 1e-9 relative clamp.  The endpoint flags
// document which end actually touches the rim (they are validated, not used
// to select the transform: the global substitution is correct either way and
// also flattens near-rim integrands whose interval stops short of p).
struct SingularSpec {
  bool singular_left = false;
  bool singular_right = false;
  double sqrt_scale = 0.0;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, QuadResult best)
      : std::runtime_error(what), best_(best) {}
  const QuadResult& best_estimate() const { return best_; }

 private:
  QuadResult best_;
};

// Integrand for integrate_1d.  When the sine substitution is active the
// second argument is sqrt(p^2 - x^2) evaluated stably as p*cos(u); callers
// with a 1/sqrt(p^2 - x^2) factor must use it instead of recomputing the
// radicand, which cancels catastrophically near the rim.  When sqrt_scale
// is 0 the second argument is 0.
using Integrand1d = std::function<double(double x, double rim)>;

// Integrates f over [a, b] to absolute tolerance tol.  split_points lists
// interior abscissae where the integrand has kinks; panels never straddle
// them.  The integrand is never evaluated at a, b, or a split point exactly.
// Throws ConvergenceError (carrying the best estimate) if the error estimate
// still exceeds tol when the evaluation budget is exhausted.
QuadResult integrate_1d(const Integrand1d& f, double a, double b,
                        const SingularSpec& spec, double tol,
                        std::span<const double> split_points = {},
                        long max_evals = k1dEvalBudget);

// Integrand for integrate_2d_region: f(outer, outer_rim, inner, inner_rim).
using Integrand2d =
    std::function<double(double outer, double outer_rim, double inner, double inner_rim)>;
using BoundFn = std::function<double(double)>;
// Optional: appends interior kink abscissae of the inner integrand at the
// given outer point.  Values outside the inner interval are ignored.
using InnerBreaksFn = std::function<void(double outer, std::vector<double>&)>;

// Iterated integral over { (outer, inner) : outer in [outer_a, outer_b],
// inner in [inner_lo(outer), inner_hi(outer)] }.  Inverted inner bounds
// contribute zero (empty slice).  The inner integrals run at a tolerance of
// 0.05 * tol per unit outer length so that their accumulated error, which is
// integrated alongside the value with the same panel weights, stays below
// 0.05 * tol; the outer refinement then targets the remainder.  The reported
// error estimate is the outer rule difference plus the integrated inner
// estimates.  Throws ConvergenceError on budget exhaustion.
QuadResult integrate_2d_region(const Integrand2d& f, double outer_a, double outer_b,
                               const SingularSpec& outer_spec, const BoundFn& inner_lo,
                               const BoundFn& inner_hi, const SingularSpec& inner_spec,
                               double tol, std::span<const double> outer_splits = {},
                               const InnerBreaksFn& inner_breaks = nullptr,
                               long max_evals = k2dEvalBudget);

}  // namespace flightdist
