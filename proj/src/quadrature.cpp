#include "flightdist/quadrature.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>
#include <queue>
#include <utility>

namespace flightdist {

namespace {

constexpr double kEps = DBL_EPSILON;
// Rounding floor on the reported error: refinement cannot push the estimate
// below this multiple of the accumulated absolute panel mass.
constexpr double kFloorFactor = 100.0 * kEps;
constexpr int kLowOrder = 7;
constexpr int kHighOrder = 15;
constexpr int kPanelCost = kLowOrder + kHighOrder;
// Evaluation allowance of a single inner slice of a nested integral.  A slice
// whose value carries a 1/rim factor of the outer variable can dwarf the
// absolute inner tolerance and grind forever near its rounding plateau; its
// folded estimate is weighted by the outer Jacobian anyway, so cutting it off
// early costs almost nothing while an uncapped slice can starve the region.
constexpr long kInnerSliceEvalCap = 200000;

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre nodes as roots of the Legendre polynomial, found by Newton
// iteration from the Chebyshev initial guess; weights 2 / ((1-x^2) P_n'^2).
GaussRule legendre_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 1; i <= n; ++i) {
    double x = std::cos(std::numbers::pi * (i - 0.25) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::fabs(step) < 1e-15) break;
    }
    rule.nodes[i - 1] = x;
    rule.weights[i - 1] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

const GaussRule& low_rule() {
  static const GaussRule rule = legendre_rule(kLowOrder);
  return rule;
}

const GaussRule& high_rule() {
  static const GaussRule rule = legendre_rule(kHighOrder);
  return rule;
}

struct Budget {
  long used = 0;
  long cap = 0;
};

// One point of the transformed integrand: the value and an auxiliary
// non-negative channel integrated alongside it (the 2-d driver feeds the
// inner error estimates through it; plain 1-d integrals leave it zero).
struct PointValue {
  double v = 0.0;
  double aux = 0.0;
};

using PointFn = std::function<PointValue(double)>;

struct Panel {
  double lo = 0.0;
  double hi = 0.0;
  double value = 0.0;  // high-order estimate
  double err = 0.0;    // |high - low|
  double aux = 0.0;
  long seq = 0;
};

struct PanelOrder {
  bool operator()(const Panel& a, const Panel& b) const {
    if (a.err != b.err) return a.err < b.err;
    return a.seq > b.seq;  // FIFO among equal errors keeps runs deterministic
  }
};

Panel eval_panel(const PointFn& pf, double lo, double hi, long seq, Budget& budget) {
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  const GaussRule& hr = high_rule();
  const GaussRule& lr = low_rule();
  double vh = 0.0;
  double aux = 0.0;
  for (int j = 0; j < kHighOrder; ++j) {
    const PointValue pv = pf(mid + half * hr.nodes[j]);
    vh += hr.weights[j] * pv.v;
    aux += hr.weights[j] * pv.aux;
  }
  double vl = 0.0;
  for (int j = 0; j < kLowOrder; ++j) {
    vl += lr.weights[j] * pf(mid + half * lr.nodes[j]).v;
  }
  budget.used += kPanelCost;
  Panel p;
  p.lo = lo;
  p.hi = hi;
  p.value = half * vh;
  p.err = std::fabs(half * (vh - vl));
  p.aux = half * aux;
  p.seq = seq;
  if (!std::isfinite(p.value) || !std::isfinite(p.aux))
    throw std::domain_error("integrand produced a non-finite value in [" +
                            std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return p;
}

struct AdaptOut {
  double value = 0.0;
  double estimate = 0.0;  // rule error + integrated aux + rounding floor
};

double kahan_sum(const std::vector<double>& xs) {
  double sum = 0.0;
  double carry = 0.0;
  for (double x : xs) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return sum;
}

// Adaptive bisection over the panels delimited by `knots`, refining the
// worst panel until rule error + aux + rounding floor fits under tol.
AdaptOut adapt(const PointFn& pf, const std::vector<double>& knots, double tol,
               Budget& budget, const char* what) {
  std::priority_queue<Panel, std::vector<Panel>, PanelOrder> queue;
  std::vector<Panel> retired;
  long seq = 0;
  double sum_err = 0.0;
  double sum_abs = 0.0;
  double sum_aux = 0.0;

  const double span = knots.back() - knots.front();
  const auto min_width = [&](double lo, double hi) {
    return 64.0 * kEps * std::fmax(1.0, std::fmax(std::fabs(lo), std::fabs(hi)));
  };
  const auto admit = [&](Panel&& p) {
    sum_err += p.err;
    sum_abs += std::fabs(p.value);
    sum_aux += p.aux;
    if (p.hi - p.lo <= min_width(p.lo, p.hi))
      retired.push_back(std::move(p));
    else
      queue.push(std::move(p));
  };

  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    if (knots[i + 1] - knots[i] <= span * 1e-15) continue;  // degenerate sliver
    admit(eval_panel(pf, knots[i], knots[i + 1], seq++, budget));
  }

  const auto floor_now = [&] { return kFloorFactor * sum_abs; };
  bool out_of_budget = false;
  while (!queue.empty()) {
    if (sum_err + sum_aux + floor_now() <= tol) break;
    if (sum_err <= 0.25 * floor_now() && sum_aux + floor_now() > tol) break;  // hopeless
    if (budget.used + 2 * kPanelCost > budget.cap) {
      out_of_budget = true;
      break;
    }
    Panel worst = queue.top();
    queue.pop();
    sum_err -= worst.err;
    sum_abs -= std::fabs(worst.value);
    sum_aux -= worst.aux;
    const double mid = 0.5 * (worst.lo + worst.hi);
    admit(eval_panel(pf, worst.lo, mid, seq++, budget));
    admit(eval_panel(pf, mid, worst.hi, seq++, budget));
  }

  while (!queue.empty()) {
    retired.push_back(queue.top());
    queue.pop();
  }
  std::sort(retired.begin(), retired.end(),
            [](const Panel& a, const Panel& b) { return a.lo < b.lo; });
  std::vector<double> vals, errs, auxs, absv;
  vals.reserve(retired.size());
  errs.reserve(retired.size());
  auxs.reserve(retired.size());
  absv.reserve(retired.size());
  for (const Panel& p : retired) {
    vals.push_back(p.value);
    errs.push_back(p.err);
    auxs.push_back(p.aux);
    absv.push_back(std::fabs(p.value));
  }
  AdaptOut out;
  out.value = kahan_sum(vals);
  const double rule_err = kahan_sum(errs);
  const double aux_int = kahan_sum(auxs);
  const double floor = kFloorFactor * kahan_sum(absv);
  out.estimate = rule_err + aux_int + floor;

  if (out.estimate > tol * (1.0 + 1e-9)) {
    QuadResult best{out.value, out.estimate, budget.used};
    if (out_of_budget)
      throw ConvergenceError(std::string(what) + ": evaluation budget exhausted at "
                                 "estimate " + std::to_string(out.estimate),
                             best);
    throw ConvergenceError(std::string(what) + ": tolerance " + std::to_string(tol) +
                               " below the attainable rounding floor " +
                               std::to_string(out.estimate),
                           best);
  }
  return out;
}

// Builds the knot list and transformed point evaluator for one interval,
// applying the sine substitution when a rim scale is present, and runs the
// adaptive loop.
AdaptOut integrate_interval(const Integrand1d& f, double a, double b,
                            const SingularSpec& spec, double tol,
                            std::span<const double> split_points, Budget& budget,
                            const char* what,
                            const std::function<double(double)>* aux_of_x = nullptr) {
  if (!std::isfinite(a) || !std::isfinite(b))
    throw std::domain_error("integration interval must be finite");
  if (b < a) throw std::domain_error("inverted integration interval");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");

  std::vector<double> inner(split_points.begin(), split_points.end());
  std::sort(inner.begin(), inner.end());

  const bool substituted = spec.sqrt_scale > 0.0;
  if (substituted && !std::isfinite(spec.sqrt_scale))
    throw std::invalid_argument("sqrt_scale must be finite");

  double lo = a;
  double hi = b;
  if (substituted) {
    const double p = spec.sqrt_scale;
    if (b > p * (1.0 + 1e-9) || a < -p * (1.0 + 1e-9))
      throw std::domain_error("interval extends beyond the declared rim scale");
    lo = std::fmax(a, -p);
    hi = std::fmin(b, p);
  }
  if (!(hi > lo)) return AdaptOut{};

  // Integrand evaluations stay strictly inside (a, b).
  const double x_min = std::nextafter(lo, hi);
  const double x_max = std::nextafter(hi, lo);

  std::vector<double> knots;
  knots.push_back(lo);
  for (double s : inner)
    if (s > lo && s < hi) knots.push_back(s);
  knots.push_back(hi);

  PointFn pf;
  if (substituted) {
    const double p = spec.sqrt_scale;
    for (double& k : knots) k = std::asin(std::clamp(k / p, -1.0, 1.0));
    pf = [&f, aux_of_x, p, x_min, x_max](double u) {
      const double jac = p * std::cos(u);
      double x = p * std::sin(u);
      x = std::clamp(x, x_min, x_max);
      PointValue pv;
      pv.v = f(x, jac) * jac;
      if (aux_of_x) pv.aux = (*aux_of_x)(x) * jac;
      return pv;
    };
  } else {
    pf = [&f, aux_of_x, x_min, x_max](double u) {
      const double x = std::clamp(u, x_min, x_max);
      PointValue pv;
      pv.v = f(x, 0.0);
      if (aux_of_x) pv.aux = (*aux_of_x)(x);
      return pv;
    };
  }
  return adapt(pf, knots, tol, budget, what);
}

}  // namespace

QuadResult integrate_1d(const Integrand1d& f, double a, double b,
                        const SingularSpec& spec, double tol,
                        std::span<const double> split_points, long max_evals) {
  Budget budget{0, max_evals};
  const AdaptOut out =
      integrate_interval(f, a, b, spec, tol, split_points, budget, "integrate_1d");
  return QuadResult{out.value, out.estimate, budget.used};
}

QuadResult integrate_2d_region(const Integrand2d& f, double outer_a, double outer_b,
                               const SingularSpec& outer_spec, const BoundFn& inner_lo,
                               const BoundFn& inner_hi, const SingularSpec& inner_spec,
                               double tol, std::span<const double> outer_splits,
                               const InnerBreaksFn& inner_breaks, long max_evals) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (!std::isfinite(outer_a) || !std::isfinite(outer_b))
    throw std::domain_error("integration interval must be finite");
  if (outer_b < outer_a) throw std::domain_error("inverted integration interval");
  if (!(outer_b > outer_a)) return QuadResult{};

  // Inner tolerance per unit of outer length: the integrated inner error then
  // stays below 0.05 * tol, leaving the rest of the budget to the outer rule.
  const double inner_tol = std::fmax(0.05 * tol / (outer_b - outer_a), 1e-14);

  Budget budget{0, max_evals};
  std::vector<double> breaks_buf;

  // The outer integrand carries the inner value in the main channel and the
  // inner error estimate in the aux channel; both are integrated by the same
  // outer panels.  The point function evaluates the value first, which
  // stashes the matching error estimate for the aux callback that follows.
  double last_inner_error = 0.0;
  const Integrand1d outer_value = [&](double zeta, double zrim) {
    last_inner_error = 0.0;
    double lo = inner_lo(zeta);
    double hi = inner_hi(zeta);
    if (!(hi > lo)) return 0.0;
    breaks_buf.clear();
    if (inner_breaks) inner_breaks(zeta, breaks_buf);
    const Integrand1d inner_f = [&f, zeta, zrim](double x, double xrim) {
      return f(zeta, zrim, x, xrim);
    };
    // An inner slice that cannot meet its tolerance is not fatal: its best
    // estimate flows through the value channel and its (oversized) error
    // through the aux channel, so the outer loop reports the whole region
    // when it gives up, not a single slice.  Each slice runs against its own
    // capped allowance so a stubborn one folds instead of draining the region.
    Budget slice{0, std::min(kInnerSliceEvalCap, budget.cap - budget.used)};
    try {
      const AdaptOut inner = integrate_interval(inner_f, lo, hi, inner_spec, inner_tol,
                                                breaks_buf, slice, "2d inner");
      budget.used += slice.used;
      last_inner_error = inner.estimate;
      return inner.value;
    } catch (const ConvergenceError& ce) {
      budget.used += slice.used;
      last_inner_error = ce.best_estimate().abs_error_estimate;
      return ce.best_estimate().value;
    }
  };
  // aux callback: error estimate of the inner call just performed.
  const std::function<double(double)> outer_aux = [&](double) {
    return last_inner_error;
  };

  const AdaptOut out = integrate_interval(outer_value, outer_a, outer_b, outer_spec,
                                          tol, outer_splits, budget, "2d outer",
                                          &outer_aux);
  return QuadResult{out.value, out.estimate, budget.used};
}

}  // namespace flightdist
