#include "flightdist/distance_law.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>
#include <utility>

namespace flightdist {

namespace {

constexpr double kPi = std::numbers::pi;
// Error charged for a closed-form term (a few ulp of a probability).
constexpr double kClosedTermErr = 1e-15;

// Precomputed quantities shared by every term.  For pairs classified as
// equal-speed the slower speed is snapped to the faster one (they differ by
// at most 1e-12 relatively), so the equal-speed formulas see one common rim.
struct Ctx {
  double c1, l1, c2, l2, t;
  double a1, a2;       // rim radii c1*t, c2*t
  double k1, k2;       // lambda_i / c_i
  double lt;           // (lambda1 + lambda2) * t
  double sum, diff;    // (c1 + c2) t, (c1 - c2) t
  double e1, e2, e12;  // exp(-lambda1 t), exp(-lambda2 t), exp(-(lambda1+lambda2) t)
  bool equal;
};

Ctx make_ctx(const PairParams& pair, double t) {
  if (!(t > 0.0)) throw std::domain_error("horizon t must be positive");
  Ctx c;
  c.equal = pair.equal_speeds();
  c.c1 = pair.first().speed;
  c.c2 = c.equal ? c.c1 : pair.second().speed;
  c.l1 = pair.first().rate;
  c.l2 = pair.second().rate;
  c.t = t;
  c.a1 = c.c1 * t;
  c.a2 = c.c2 * t;
  c.k1 = c.l1 / c.c1;
  c.k2 = c.l2 / c.c2;
  c.lt = (c.l1 + c.l2) * t;
  c.sum = c.a1 + c.a2;
  c.diff = c.a1 - c.a2;
  c.e1 = std::exp(-c.l1 * t);
  c.e2 = std::exp(-c.l2 * t);
  c.e12 = std::exp(-c.lt);
  return c;
}

double sqrt_prod(double p, double x) {  // sqrt(p^2 - x^2) without cancellation
  return std::sqrt(std::fmax(0.0, (p - x) * (p + x)));
}

// Triangle-side arccos argument (x^2 + b^2 - r^2) / (2 b x) for the single
// integrals, evaluated through its root factorization.  The integration
// bounds sit exactly on roots of w = +/-1, so the small factor is formed as
// a difference against the precomputed root, which keeps |w| <= 1 up to a
// few ulp there (the strict arccos guard then never trips on legit input).
struct ArcArg {
  double b, s, d;  // other rim, b + r, b - r
  double operator()(double x) const {
    if (d >= 0.0) return 1.0 + (x - s) * (x - d) / (2.0 * b * x);
    return -1.0 + (x + s) * (x + d) / (2.0 * b * x);
  }
};

// The same argument for the double-integral kernel with both sides interior.
double tri_arg(double xi, double zeta, double r) {
  const double g = xi - zeta;
  return 1.0 + (g - r) * (g + r) / (2.0 * xi * zeta);
}

// Closed-form argument ((c1 t)^2 + (c2 t)^2 - r^2) / (2 c1 c2 t^2).
double rims_arg(const Ctx& c, double r) {
  if (r * r <= c.a1 * c.a1 + c.a2 * c.a2)
    return 1.0 + (c.diff - r) * (c.diff + r) / (2.0 * c.a1 * c.a2);
  return -1.0 + (c.sum - r) * (c.sum + r) / (2.0 * c.a1 * c.a2);
}

// Accumulates a branch or component value as a sum of closed terms and
// quadrature terms, folding convergence failures into the error estimate
// when the tolerance policy asks for that instead of throwing.
struct Acc {
  double value = 0.0;
  double err = 0.0;
  long evals = 0;
  bool converged = true;

  void closed(double v) {
    value += v;
    err += kClosedTermErr;
  }
  void take(double scale, const QuadResult& qr) {
    value += scale * qr.value;
    err += std::fabs(scale) * qr.abs_error_estimate;
    evals += qr.evaluations;
  }
  template <typename Fn>
  void quad(const LawTols& tols, double scale, Fn&& fn) {
    try {
      take(scale, fn());
    } catch (const ConvergenceError& ce) {
      if (tols.throw_on_convergence) throw;
      take(scale, ce.best_estimate());
      converged = false;
    }
  }
  ProbTerm done() const { return ProbTerm{value, err, evals, converged}; }
};

// Single integral of arccos(w) against the interior radial weight of one
// flight, with the total exponential damping folded into the integrand:
//   (lambda_i/(pi c_i)) Int_lo^hi arccos(w(x)) x/rim exp(-(l1+l2)t + k_i rim) dx
QuadResult arc_term(const Ctx& c, int flight, double lo, double hi, double r,
                    double tol) {
  const bool f1 = flight == 1;
  const double p = f1 ? c.a1 : c.a2;
  const double k = f1 ? c.k1 : c.k2;
  const double pref = (f1 ? c.l1 / c.c1 : c.l2 / c.c2) / kPi;
  const ArcArg w{f1 ? c.a2 : c.a1, (f1 ? c.a2 : c.a1) + r, (f1 ? c.a2 : c.a1) - r};
  const double lt = c.lt;
  const double top = std::fmin(hi, p);
  // Bounds that are equal in exact arithmetic can land a few ulp inverted
  // (e.g. r - a1 vs a2 at r = (c1+c2)t); such intervals are empty.
  if (!(lo < top)) return {};
  SingularSpec spec;
  spec.sqrt_scale = p;
  spec.singular_right = top >= p * (1.0 - 1e-12);
  return integrate_1d(
      [=](double x, double rim) {
        return pref * arccos_strict(w(x)) * x / rim * std::exp(-lt + k * rim);
      },
      lo, top, spec, tol);
}

// Single integral with both exponential factors:
//   (lambda_i/c_i) Int_lo^hi x/rim exp(-(l1+l2)t + k_i rim + k_j sqrt(a_j^2-(r-x)^2)) dx
// The caller applies the sign.
QuadResult prod_term(const Ctx& c, int flight, double lo, double hi, double r,
                     double tol) {
  const bool f1 = flight == 1;
  const double p = f1 ? c.a1 : c.a2;
  const double k = f1 ? c.k1 : c.k2;
  const double bj = f1 ? c.a2 : c.a1;
  const double kj = f1 ? c.k2 : c.k1;
  const double pref = f1 ? c.l1 / c.c1 : c.l2 / c.c2;
  const double lt = c.lt;
  const double top = std::fmin(hi, p);
  if (!(lo < top)) return {};
  SingularSpec spec;
  spec.sqrt_scale = p;
  spec.singular_right = top >= p * (1.0 - 1e-12);
  return integrate_1d(
      [=](double x, double rim) {
        const double cross = std::sqrt(std::fmax(0.0, (bj - r + x) * (bj + r - x)));
        return pref * x / rim * std::exp(-lt + k * rim + kj * cross);
      },
      lo, top, spec, tol);
}

// Double integral of the saturating arccos kernel against both interior
// radial weights.  outer_flight selects which flight runs on the outer
// variable; bounds and optional split hints are in that variable.
QuadResult dbl_term(const Ctx& c, int outer_flight, double r, double olo, double ohi,
                    const BoundFn& ilo, const BoundFn& ihi, double tol,
                    std::span<const double> osplits = {},
                    const InnerBreaksFn& ibreaks = nullptr) {
  const bool o1 = outer_flight == 1;
  const double po = o1 ? c.a1 : c.a2;
  const double pi_ = o1 ? c.a2 : c.a1;
  const double ko = o1 ? c.k1 : c.k2;
  const double ki = o1 ? c.k2 : c.k1;
  const double pref = (c.l1 / c.c1) * (c.l2 / c.c2);
  const double lt = c.lt;
  const double otop = std::fmin(ohi, po);
  if (!(olo < otop)) return {};
  SingularSpec ospec;
  ospec.sqrt_scale = po;
  ospec.singular_right = otop >= po * (1.0 - 1e-12);
  SingularSpec ispec;
  ispec.sqrt_scale = pi_;
  ispec.singular_right = true;
  const Integrand2d f = [=](double o, double orim, double n, double nrim) {
    const double xi = o1 ? o : n;
    const double zeta = o1 ? n : o;
    const double xrim = o1 ? orim : nrim;
    const double zrim = o1 ? nrim : orim;
    return pref * (xi * zeta) / (xrim * zrim) * arccos_saturated(tri_arg(xi, zeta, r)) *
           std::exp(-lt + ko * orim + ki * nrim);
  };
  return integrate_2d_region(f, olo, otop, ospec, ilo, ihi, ispec, tol, osplits,
                             ibreaks);
}

// ---- joint-event components ----------------------------------------------

ProbTerm joint_00_impl(const Ctx& c, double r) {
  Acc acc;
  if (r <= c.diff)
    acc.closed(0.0);
  else
    acc.closed(c.e12 / kPi * arccos_strict(rims_arg(c, r)));
  return acc.done();
}

ProbTerm joint_10_impl(const Ctx& c, double r, const LawTols& tols) {
  Acc acc;
  const double beta = std::fmin(c.a2 + r, c.a1);
  if (r <= c.a2) {
    acc.quad(tols, 1.0,
             [&] { return arc_term(c, 1, c.a2 - r, beta, r, tols.single); });
  } else {
    acc.closed(c.e2 * (1.0 - std::exp(-c.l1 * c.t + c.k1 * sqrt_prod(c.a1, r - c.a2))));
    acc.quad(tols, 1.0, [&] { return arc_term(c, 1, r - c.a2, beta, r, tols.single); });
  }
  return acc.done();
}

ProbTerm joint_01_impl(const Ctx& c, double r, const LawTols& tols) {
  Acc acc;
  if (r <= c.diff) {
    acc.closed(0.0);
  } else if (r <= c.a1) {
    acc.quad(tols, 1.0, [&] { return arc_term(c, 2, c.a1 - r, c.a2, r, tols.single); });
  } else {
    acc.closed(c.e1 * (1.0 - std::exp(-c.l2 * c.t + c.k2 * sqrt_prod(c.a2, r - c.a1))));
    acc.quad(tols, 1.0, [&] { return arc_term(c, 2, r - c.a1, c.a2, r, tols.single); });
  }
  return acc.done();
}

ProbTerm i1_impl(const Ctx& c, double r, const LawTols& tols) {
  Acc acc;
  if (r <= c.a2) {
    acc.closed(1.0 - std::exp(-c.l1 * c.t + c.k1 * sqrt_prod(c.a1, r)));
    acc.quad(tols, -1.0, [&] { return prod_term(c, 1, 0.0, r, r, tols.single); });
  } else if (r <= c.a1) {
    acc.closed(1.0 - c.e2);
    acc.quad(tols, -1.0, [&] { return prod_term(c, 2, 0.0, c.a2, r, tols.single); });
  } else {
    acc.closed((1.0 - c.e1) * (1.0 - c.e2) -
               c.e12 * (1.0 - std::exp(c.k1 * sqrt_prod(c.a1, r - c.a2))));
    acc.quad(tols, -1.0, [&] { return prod_term(c, 1, r - c.a2, c.a1, r, tols.single); });
  }
  return acc.done();
}

// Triangle-closure double integral over the 4-gon: r <= c2 t, c2 t + r <= c1 t.
void add_i2_4gon(const Ctx& c, double r, const LawTols& tols, double scale, Acc& acc) {
  acc.quad(tols, scale, [&] {
    return dbl_term(c, 2, r, 0.0, r, [r](double z) { return r - z; },
                    [r](double z) { return r + z; }, tols.dbl);
  });
  acc.quad(tols, scale, [&] {
    return dbl_term(c, 2, r, r, c.a2, [r](double z) { return z - r; },
                    [r](double z) { return z + r; }, tols.dbl);
  });
}

// 5-gon case: r <= c2 t, c2 t + r > c1 t.  The printed middle range
// (r, c1 t - r) inverts once r > c1 t / 2, which does happen inside this
// case; the slices are repartitioned so each point of the region is counted
// once: the first range caps its inner bound at c1 t, the middle range is
// dropped when inverted, and the last range starts at max(r, c1 t - r).
void add_i2_5gon(const Ctx& c, double r, const LawTols& tols, double scale, Acc& acc) {
  const double a1 = c.a1;
  const double t2_hi = std::fmin(a1 - r, c.a2);
  const double t3_lo = std::fmax(r, a1 - r);
  std::array<double, 1> osplit{a1 - r};
  const std::span<const double> t1_splits =
      (a1 - r > 0.0 && a1 - r < r) ? std::span<const double>(osplit)
                                   : std::span<const double>();
  acc.quad(tols, scale, [&] {
    return dbl_term(c, 2, r, 0.0, r, [r](double z) { return r - z; },
                    [r, a1](double z) { return std::fmin(r + z, a1); }, tols.dbl,
                    t1_splits);
  });
  if (t2_hi > r) {
    acc.quad(tols, scale, [&] {
      return dbl_term(c, 2, r, r, t2_hi, [r](double z) { return z - r; },
                      [r](double z) { return z + r; }, tols.dbl);
    });
  }
  if (c.a2 > t3_lo) {
    acc.quad(tols, scale, [&] {
      return dbl_term(c, 2, r, t3_lo, c.a2, [r](double z) { return z - r; },
                      [a1](double) { return a1; }, tols.dbl);
    });
  }
}

void add_i2_band(const Ctx& c, double r, const LawTols& tols, double scale, Acc& acc) {
  // c2 t < r <= c1 t, c2 t + r <= c1 t: one uncapped band.
  acc.quad(tols, scale, [&] {
    return dbl_term(c, 2, r, 0.0, c.a2, [r](double z) { return r - z; },
                    [r](double z) { return r + z; }, tols.dbl);
  });
}

void add_i2_band_capped(const Ctx& c, double r, const LawTols& tols, double scale,
                        Acc& acc) {
  // c2 t < r <= c1 t, c2 t + r > c1 t: the band hits the far rim.
  const double a1 = c.a1;
  acc.quad(tols, scale, [&] {
    return dbl_term(c, 2, r, 0.0, a1 - r, [r](double z) { return r - z; },
                    [r](double z) { return r + z; }, tols.dbl);
  });
  acc.quad(tols, scale, [&] {
    return dbl_term(c, 2, r, a1 - r, c.a2, [r](double z) { return r - z; },
                    [a1](double) { return a1; }, tols.dbl);
  });
}

void add_i2_outer(const Ctx& c, double r, const LawTols& tols, double scale, Acc& acc) {
  // r > c1 t: outer variable runs on the faster flight.
  acc.quad(tols, scale, [&] {
    return dbl_term(c, 1, r, r - c.a2, c.a1, [r](double x) { return r - x; },
                    [&c](double) { return c.a2; }, tols.dbl);
  });
}

// Equal speeds, r <= c t: full rectangle minus the three corner integrals.
// Outside the triangle-closure region the saturating kernel is pi (below the
// diagonal xi + zeta = r) or 0 (beyond |xi - zeta| = r), which is exactly
// what makes this decomposition equal the region integral.
void add_i2_eq_rect(const Ctx& c, double r, const LawTols& tols, double scale,
                    Acc& acc) {
  const double a = c.a1;
  std::array<double, 2> osplits{r, a - r};
  const InnerBreaksFn breaks = [r](double xi, std::vector<double>& out) {
    out.push_back(std::fabs(xi - r));
    out.push_back(xi + r);
  };
  acc.quad(tols, scale, [&] {
    return dbl_term(c, 1, r, 0.0, a, [](double) { return 0.0; },
                    [a](double) { return a; }, tols.dbl, osplits, breaks);
  });
  if (a > r) {
    acc.quad(tols, -scale, [&] {
      return dbl_term(c, 1, r, r, a, [](double) { return 0.0; },
                      [r](double x) { return x - r; }, tols.dbl);
    });
  }
  acc.quad(tols, -scale, [&] {
    return dbl_term(c, 1, r, 0.0, r, [](double) { return 0.0; },
                    [r](double x) { return r - x; }, tols.dbl);
  });
  if (a > r) {
    acc.quad(tols, -scale, [&] {
      return dbl_term(c, 2, r, r, a, [](double) { return 0.0; },
                      [r](double z) { return z - r; }, tols.dbl);
    });
  }
}

void add_i2(const Ctx& c, double r, const LawTols& tols, double scale, Acc& acc) {
  if (c.equal) {
    if (r <= c.a1)
      add_i2_eq_rect(c, r, tols, scale, acc);
    else
      add_i2_outer(c, r, tols, scale, acc);
    return;
  }
  if (r <= c.a2) {
    if (c.a2 + r <= c.a1)
      add_i2_4gon(c, r, tols, scale, acc);
    else
      add_i2_5gon(c, r, tols, scale, acc);
  } else if (r <= c.a1) {
    if (c.a2 + r <= c.a1)
      add_i2_band(c, r, tols, scale, acc);
    else
      add_i2_band_capped(c, r, tols, scale, acc);
  } else {
    add_i2_outer(c, r, tols, scale, acc);
  }
}

// ---- branch functions ------------------------------------------------------

ProbTerm g_branch(const Ctx& c, double r, const LawTols& tols) {
  Acc acc;
  acc.closed(1.0 - std::exp(-c.l1 * c.t + c.k1 * sqrt_prod(c.a1, r)));
  acc.quad(tols, 1.0,
           [&] { return arc_term(c, 1, c.a2 - r, c.a2 + r, r, tols.single); });
  acc.quad(tols, -1.0, [&] { return prod_term(c, 1, 0.0, r, r, tols.single); });
  add_i2_4gon(c, r, tols, 1.0 / kPi, acc);
  return acc.done();
}

ProbTerm h1_branch(const Ctx& c, double r, const LawTols& tols) {
  Acc acc;
  acc.closed(1.0 - c.e12 * std::exp(c.k1 * sqrt_prod(c.a1, r - c.a2)));
  acc.quad(tols, 1.0,
           [&] { return arc_term(c, 1, r - c.a2, r + c.a2, r, tols.single); });
  acc.quad(tols, -1.0, [&] { return prod_term(c, 2, 0.0, c.a2, r, tols.single); });
  acc.quad(tols, 1.0 / kPi, [&] {
    return dbl_term(c, 2, r, 0.0, c.a2, [r](double z) { return r - z; },
                    [r](double z) { return r + z; }, tols.dbl);
  });
  return acc.done();
}

ProbTerm h2_branch(const Ctx& c, double r, const LawTols& tols) {
  Acc acc;
  acc.closed(1.0 - std::exp(-c.l1 * c.t + c.k1 * sqrt_prod(c.a1, r)) +
             c.e12 / kPi * arccos_strict(rims_arg(c, r)));
  acc.quad(tols, 1.0, [&] { return arc_term(c, 1, c.a2 - r, c.a1, r, tols.single); });
  acc.quad(tols, 1.0, [&] { return arc_term(c, 2, c.a1 - r, c.a2, r, tols.single); });
  acc.quad(tols, -1.0, [&] { return prod_term(c, 1, 0.0, r, r, tols.single); });
  add_i2_5gon(c, r, tols, 1.0 / kPi, acc);
  return acc.done();
}

ProbTerm q_branch(const Ctx& c, double r, const LawTols& tols) {
  Acc acc;
  acc.closed(1.0 - c.e12 * (std::exp(c.k1 * sqrt_prod(c.a1, r - c.a2)) -
                            arccos_strict(rims_arg(c, r)) / kPi));
  acc.quad(tols, 1.0, [&] { return arc_term(c, 1, r - c.a2, c.a1, r, tols.single); });
  acc.quad(tols, 1.0, [&] { return arc_term(c, 2, c.a1 - r, c.a2, r, tols.single); });
  acc.quad(tols, -1.0, [&] { return prod_term(c, 2, 0.0, c.a2, r, tols.single); });
  add_i2_band_capped(c, r, tols, 1.0 / kPi, acc);
  return acc.done();
}

ProbTerm u_branch(const Ctx& c, double r, const LawTols& tols) {
  Acc acc;
  acc.closed(1.0 - c.e12 * (std::exp(c.k2 * sqrt_prod(c.a2, r - c.a1)) -
                            arccos_strict(rims_arg(c, r)) / kPi));
  acc.quad(tols, 1.0, [&] { return arc_term(c, 1, r - c.a2, c.a1, r, tols.single); });
  acc.quad(tols, 1.0, [&] { return arc_term(c, 2, r - c.a1, c.a2, r, tols.single); });
  acc.quad(tols, -1.0, [&] { return prod_term(c, 1, r - c.a2, c.a1, r, tols.single); });
  add_i2_outer(c, r, tols, 1.0 / kPi, acc);
  return acc.done();
}

ProbTerm v_branch(const Ctx& c, double r, const LawTols& tols) {
  Acc acc;
  const double a = c.a1;
  acc.closed(1.0 - std::exp(-c.l1 * c.t + c.k1 * sqrt_prod(a, r)) +
             c.e12 / kPi * arccos_strict(rims_arg(c, r)));
  acc.quad(tols, 1.0, [&] { return arc_term(c, 1, a - r, a, r, tols.single); });
  acc.quad(tols, 1.0, [&] { return arc_term(c, 2, a - r, a, r, tols.single); });
  acc.quad(tols, -1.0, [&] { return prod_term(c, 1, 0.0, r, r, tols.single); });
  add_i2_eq_rect(c, r, tols, 1.0 / kPi, acc);
  return acc.done();
}

ProbTerm w_branch(const Ctx& c, double r, const LawTols& tols) {
  Acc acc;
  const double a = c.a1;
  acc.closed(1.0 - c.e12 * (std::exp(c.k2 * sqrt_prod(a, r - a)) -
                            arccos_strict(rims_arg(c, r)) / kPi));
  acc.quad(tols, 1.0, [&] { return arc_term(c, 1, r - a, a, r, tols.single); });
  acc.quad(tols, 1.0, [&] { return arc_term(c, 2, r - a, a, r, tols.single); });
  acc.quad(tols, -1.0, [&] { return prod_term(c, 1, r - a, a, r, tols.single); });
  add_i2_outer(c, r, tols, 1.0 / kPi, acc);
  return acc.done();
}

void require_component_domain(const Ctx& c, double r) {
  if (!(r > 0.0) || r > c.sum)
    throw std::domain_error("component defined for 0 < r <= (c1+c2)t");
}

}  // namespace

std::string_view to_string(RegimeTag tag) {
  switch (tag) {
    case RegimeTag::Zero: return "Zero";
    case RegimeTag::G: return "G";
    case RegimeTag::H1: return "H1";
    case RegimeTag::H2: return "H2";
    case RegimeTag::Q: return "Q";
    case RegimeTag::U: return "U";
    case RegimeTag::V: return "V";
    case RegimeTag::W: return "W";
    case RegimeTag::One: return "One";
  }
  return "?";
}

Regime regime_partition(const PairParams& pair, double t) {
  const Ctx c = make_ctx(pair, t);
  Regime reg;
  reg.speed_class = pair.speed_class();
  if (c.equal) {
    reg.m = 0.0;
    reg.M = c.a1;
    reg.junctions = {0.0, c.a1, c.sum};
    return reg;
  }
  reg.m = std::fmin(c.diff, c.a2);
  reg.M = std::fmax(c.diff, c.a2);
  if (reg.speed_class == SpeedClass::FastExactlyDouble)
    reg.junctions = {0.0, reg.m, c.a1, c.sum};
  else
    reg.junctions = {0.0, reg.m, reg.M, c.a1, c.sum};
  return reg;
}

RegimeTag classify(const PairParams& pair, double r, double t) {
  const Ctx c = make_ctx(pair, t);
  if (r <= 0.0) return RegimeTag::Zero;
  if (r > c.sum) return RegimeTag::One;
  if (c.equal) return r <= c.a1 ? RegimeTag::V : RegimeTag::W;
  const double m = std::fmin(c.diff, c.a2);
  const double M = std::fmax(c.diff, c.a2);
  if (r <= m) return RegimeTag::G;
  if (r <= M) {
    switch (pair.speed_class()) {
      case SpeedClass::FastAboveDouble: return RegimeTag::H1;
      case SpeedClass::FastBelowDouble: return RegimeTag::H2;
      default: break;  // m == M: unreachable for A3
    }
  }
  if (r <= c.a1) return RegimeTag::Q;
  return RegimeTag::U;
}

ProbTerm joint_00(const PairParams& pair, double r, double t) {
  const Ctx c = make_ctx(pair, t);
  require_component_domain(c, r);
  return joint_00_impl(c, r);
}

ProbTerm joint_10(const PairParams& pair, double r, double t, const LawTols& tols) {
  const Ctx c = make_ctx(pair, t);
  require_component_domain(c, r);
  return joint_10_impl(c, r, tols);
}

ProbTerm joint_01(const PairParams& pair, double r, double t, const LawTols& tols) {
  const Ctx c = make_ctx(pair, t);
  require_component_domain(c, r);
  return joint_01_impl(c, r, tols);
}

ProbTerm i1(const PairParams& pair, double r, double t, const LawTols& tols) {
  const Ctx c = make_ctx(pair, t);
  require_component_domain(c, r);
  return i1_impl(c, r, tols);
}

ProbTerm i2(const PairParams& pair, double r, double t, const LawTols& tols) {
  const Ctx c = make_ctx(pair, t);
  require_component_domain(c, r);
  Acc acc;
  add_i2(c, r, tols, 1.0, acc);
  return acc.done();
}

JointComponents phi_components(const PairParams& pair, double r, double t,
                               const LawTols& tols) {
  const Ctx c = make_ctx(pair, t);
  require_component_domain(c, r);
  JointComponents jc;
  jc.p00 = joint_00_impl(c, r);
  jc.p10 = joint_10_impl(c, r, tols);
  jc.p01 = joint_01_impl(c, r, tols);
  Acc p11;
  const ProbTerm part1 = i1_impl(c, r, tols);
  p11.value += part1.value;
  p11.err += part1.abs_error;
  p11.evals += part1.evaluations;
  p11.converged = part1.converged;
  add_i2(c, r, tols, 1.0 / kPi, p11);
  jc.p11 = p11.done();
  return jc;
}

CdfValue phi(const PairParams& pair, double r, double t, const LawTols& tols) {
  if (classify_speeds(pair.first().speed, pair.second().speed) != pair.speed_class())
    throw std::logic_error("pair speed_class is inconsistent with its speeds");
  const RegimeTag tag = classify(pair, r, t);
  if (tag == RegimeTag::Zero) return CdfValue{0.0, 0.0, tag, true, false};
  if (tag == RegimeTag::One) return CdfValue{1.0, 0.0, tag, true, false};

  const Ctx c = make_ctx(pair, t);
  ProbTerm term;
  switch (tag) {
    case RegimeTag::G: term = g_branch(c, r, tols); break;
    case RegimeTag::H1: term = h1_branch(c, r, tols); break;
    case RegimeTag::H2: term = h2_branch(c, r, tols); break;
    case RegimeTag::Q: term = q_branch(c, r, tols); break;
    case RegimeTag::U: term = u_branch(c, r, tols); break;
    case RegimeTag::V: term = v_branch(c, r, tols); break;
    case RegimeTag::W: term = w_branch(c, r, tols); break;
    default: throw std::logic_error("unexpected regime tag");
  }
  CdfValue out;
  out.regime = tag;
  out.abs_error = term.abs_error;
  out.converged = term.converged;
  out.excursion_flagged = term.value < -(term.abs_error + 1e-12) ||
                          term.value > 1.0 + term.abs_error + 1e-12;
  out.value = std::clamp(term.value, 0.0, 1.0);
  return out;
}

std::vector<CdfValue> phi_grid(const PairParams& pair, std::span<const double> rs,
                               double t, const LawTols& tols, int threads) {
  std::vector<CdfValue> out(rs.size());
  const int workers =
      std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(rs.size(), 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < rs.size(); ++i) out[i] = phi(pair, rs[i], t, tols);
    return out;
  }
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mu;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = static_cast<std::size_t>(w); i < rs.size(); i += workers)
          out[i] = phi(pair, rs[i], t, tols);
      } catch (...) {
        std::scoped_lock lock(error_mu);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

}  // namespace flightdist
