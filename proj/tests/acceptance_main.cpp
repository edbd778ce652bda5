// Acceptance gate for the distance-law library.  Each criterion prints one
// PASS/FAIL line with the measured quantity, the allowed bound, and the
// runtime; the process exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "flightdist/core_model.hpp"
#include "flightdist/distance_law.hpp"
#include "flightdist/mc_oracle.hpp"
#include "flightdist/quadrature.hpp"
#include "flightdist/rng.hpp"

using namespace flightdist;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kSeed = 20260814;

struct Outcome {
  bool pass = false;
  double measured = 0.0;
  double allowed = 0.0;
  std::string note;
};

int g_failures = 0;

void run_criterion(int idx, const char* name, double time_limit_s,
                   const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome oc;
  try {
    oc = body();
  } catch (const std::exception& e) {
    oc.pass = false;
    oc.measured = std::nan("");
    oc.note = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0).count();
  const bool pass = oc.pass && secs < time_limit_s;
  std::printf("%s %d %s measured=%.4g allowed=%.4g runtime=%.2fs%s%s\n",
              pass ? "PASS" : "FAIL", idx, name, oc.measured, oc.allowed, secs,
              oc.note.empty() ? "" : " ", oc.note.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

struct Rand {
  Philox g;
  explicit Rand(std::uint64_t stream) : g(kSeed, stream) {}
  double uni(double lo, double hi) { return lo + (hi - lo) * g.uniform01(); }
};

double sqrt_prod(double p, double x) {
  return std::sqrt(std::fmax(0.0, (p - x) * (p + x)));
}

// interior radial density written against the stable rim channel supplied by
// the quadrature engine
double rim_density(double lam, double c, double t, double x, double rim) {
  return lam / c * x / rim * std::exp(-lam * t + lam / c * rim);
}

// -------------------------------------------------------------------------
// 1. Closed-form layer against direct formula substitution.

Outcome closed_form_layer() {
  Rand rnd(101);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double lam = rnd.uni(0.1, 4.0);
    const double c = rnd.uni(0.2, 4.0);
    const double t = rnd.uni(0.1, 3.0);
    const FlightParams p(c, lam);
    const double ct = c * t;

    worst = std::fmax(worst, std::fabs(singular_mass(p, t) - std::exp(-lam * t)));

    const double r = rnd.uni(1e-3, 1.0) * ct;
    const double direct_cdf =
        1.0 - std::exp(-lam * t + (lam / c) * std::sqrt(ct * ct - r * r));
    worst = std::fmax(worst, std::fabs(radial_cdf(p, r, t) - direct_cdf));
    worst = std::fmax(worst, std::fabs(radial_cdf(p, ct * 1.5, t) - 1.0));
    worst = std::fmax(worst, std::fabs(radial_cdf(p, -r, t)));

    const double z = rnd.uni(0.0, 2.0 * kPi);
    worst = std::fmax(worst, std::fabs(angle_diff_cdf(z) -
                                       (4.0 * kPi * z - z * z) / (4.0 * kPi * kPi)));

    const double w = rnd.uni(-1.0, 1.0);
    worst = std::fmax(worst, std::fabs(cos_angle_tail(w) - std::acos(w) / kPi));

    const double th = rnd.uni(0.0, kPi);
    worst = std::fmax(worst, std::fabs(acute_angle_cdf(th) - th / kPi));
  }
  return Outcome{worst <= 1e-14, worst, 1e-14, ""};
}

// -------------------------------------------------------------------------
// 2. Quadrature honesty on the rim-exponential family, whose antiderivative
//    is -exp(q*sqrt(p^2-x^2))/q.

Outcome quadrature_rim_family() {
  Rand rnd(201);
  double worst_rel = 0.0;
  bool honest = true;
  for (int i = 0; i < 100; ++i) {
    const double p = rnd.uni(0.5, 3.0);
    const double q = (rnd.uni(0.0, 1.0) < 0.5 ? -1.0 : 1.0) * rnd.uni(0.15, 3.0);
    double a, b;
    switch (i % 4) {
      case 0: a = 0.0; b = p; break;
      case 1: a = 0.0; b = p * rnd.uni(0.3, 0.95); break;
      case 2: a = p * rnd.uni(0.05, 0.55); b = p; break;
      default: {
        const double u = rnd.uni(0.05, 0.9);
        a = p * u;
        b = p * rnd.uni(u + 0.05, 0.99);
        break;
      }
    }
    const double rim_a = sqrt_prod(p, a);
    const double rim_b = sqrt_prod(p, b);
    // exp(q*rim_a) - exp(q*rim_b) without cancellation
    const double closed =
        std::exp(q * rim_b) *
        std::expm1(q * (b - a) * (b + a) / (rim_a + rim_b)) / q;

    SingularSpec spec;
    spec.sqrt_scale = p;
    spec.singular_right = b >= p * (1.0 - 1e-12);
    const double tol = std::fmax(1e-14, 1e-11 * std::fabs(closed));
    const QuadResult qr = integrate_1d(
        [q](double x, double rim) { return x / rim * std::exp(q * rim); }, a, b,
        spec, tol);
    const double diff = std::fabs(qr.value - closed);
    worst_rel = std::fmax(worst_rel, diff / std::fabs(closed));
    if (diff > 10.0 * qr.abs_error_estimate) honest = false;
  }
  Outcome oc{worst_rel <= 1e-10 && honest, worst_rel, 1e-10, ""};
  if (!honest) oc.note = "error estimate understated somewhere";
  return oc;
}

// -------------------------------------------------------------------------
// 3. Mass conservation of the radial and projected laws.

Outcome mass_conservation() {
  Rand rnd(301);
  double worst_ratio = 0.0;  // deviations normalized by their own tolerance
  double worst_radial = 0.0;
  double worst_marginal = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double lam = rnd.uni(0.3, 2.5);
    const double c = rnd.uni(0.5, 3.0);
    const double t = rnd.uni(0.4, 2.0);
    const FlightParams p(c, lam);
    const double ct = c * t;
    const double atom = std::exp(-lam * t);

    SingularSpec radial_spec;
    radial_spec.sqrt_scale = ct;
    radial_spec.singular_right = true;
    const auto radial_f = [&](double x, double rim) {
      return rim_density(lam, c, t, x, rim);
    };
    const QuadResult radial = integrate_1d(radial_f, 0.0, ct, radial_spec, 1e-12);
    worst_radial = std::fmax(worst_radial, std::fabs(radial.value + atom - 1.0));

    const double k = lam / c;
    const auto marginal_f = [&](double x, double rim) {
      (void)x;
      return atom / (kPi * rim) +
             lam * atom / (2.0 * c) *
                 (bessel_i0_series(k * rim) + struve_l0_series(k * rim));
    };
    SingularSpec marg_spec;
    marg_spec.sqrt_scale = ct;
    marg_spec.singular_left = true;
    marg_spec.singular_right = true;
    const QuadResult marg = integrate_1d(marginal_f, -ct, ct, marg_spec, 2e-10);
    worst_marginal = std::fmax(worst_marginal, std::fabs(marg.value - 1.0));

    // the rim-channel integrands restate the library densities; pin them
    // together at interior points
    for (int j = 1; j <= 5; ++j) {
      const double x = ct * j / 6.0;
      const double rim = sqrt_prod(ct, x);
      const double d1 = std::fabs(radial_f(x, rim) - radial_density_ac(p, x, t));
      const double d2 = std::fabs(marginal_f(x, rim) - marginal_density(p, x, t));
      worst_ratio = std::fmax(worst_ratio, d1 / (1e-12 * radial_density_ac(p, x, t)));
      worst_ratio = std::fmax(worst_ratio, d2 / (1e-12 * marginal_density(p, x, t)));
    }
  }
  worst_ratio = std::fmax(worst_ratio, worst_radial / 1e-10);
  worst_ratio = std::fmax(worst_ratio, worst_marginal / 1e-8);
  Outcome oc{worst_ratio <= 1.0, worst_ratio, 1.0, ""};
  oc.note = "radial " + std::to_string(worst_radial) + " marginal " +
            std::to_string(worst_marginal);
  return oc;
}

// -------------------------------------------------------------------------
// 4. Branch values against the joint-component assembly, spanning every
//    regime with at least 5 points.

Outcome branch_component_oracle() {
  Rand rnd(401);
  const LawTols tols{1e-9, 1e-8, true};
  double worst = 0.0;

  struct Want {
    RegimeTag tag;
    int count;
  };
  const std::vector<Want> quota = {{RegimeTag::G, 8},  {RegimeTag::H1, 6},
                                   {RegimeTag::H2, 6}, {RegimeTag::Q, 8},
                                   {RegimeTag::U, 8},  {RegimeTag::V, 7},
                                   {RegimeTag::W, 7}};
  for (const Want& want : quota) {
    for (int i = 0; i < want.count; ++i) {
      const double t = rnd.uni(0.5, 1.5);
      double c1, c2;
      switch (want.tag) {
        case RegimeTag::H1:
          c2 = rnd.uni(0.5, 1.5);
          c1 = c2 * rnd.uni(2.2, 3.5);
          break;
        case RegimeTag::H2:
          c2 = rnd.uni(0.5, 1.5);
          c1 = c2 * rnd.uni(1.2, 1.8);
          break;
        case RegimeTag::V:
        case RegimeTag::W:
          c1 = c2 = rnd.uni(0.5, 2.5);
          break;
        default:
          c2 = rnd.uni(0.5, 1.5);
          c1 = c2 * (i % 2 == 0 ? rnd.uni(1.15, 1.85) : rnd.uni(2.15, 3.2));
          break;
      }
      const PairParams pair(FlightParams(c1, rnd.uni(0.5, 2.5)),
                            FlightParams(c2, rnd.uni(0.5, 2.5)));
      const Regime reg = regime_partition(pair, t);
      const double a1 = c1 * t;
      const double sum = (c1 + c2) * t;
      const double u = rnd.uni(0.1, 0.9);
      double r = 0.0;
      switch (want.tag) {
        case RegimeTag::G: r = reg.m * u; break;
        case RegimeTag::H1:
        case RegimeTag::H2: r = reg.m + (reg.M - reg.m) * u; break;
        case RegimeTag::Q: r = reg.M + (a1 - reg.M) * u; break;
        case RegimeTag::U: r = a1 + (sum - a1) * u; break;
        case RegimeTag::V: r = reg.M * u; break;
        case RegimeTag::W: r = reg.M + reg.M * u; break;
        default: break;
      }
      if (classify(pair, r, t) != want.tag)
        return Outcome{false, 0.0, 1e-6, "regime construction missed"};
      const CdfValue direct = phi(pair, r, t, tols);
      const JointComponents parts = phi_components(pair, r, t, tols);
      worst = std::fmax(worst, std::fabs(direct.value - parts.total()));
    }
  }
  return Outcome{worst <= 1e-6, worst, 1e-6, ""};
}

// -------------------------------------------------------------------------
// 5. Triangle-region integrals against indicator-masked direct double
//    integration over the full density rectangle.

struct DirectSetup {
  double c1, l1, c2, l2, t, r, a1, a2;
};

QuadResult direct_masked(const DirectSetup& s, bool with_kernel, double tol) {
  const double a1 = s.a1;
  const double r = s.r;
  SingularSpec outer_spec;
  outer_spec.sqrt_scale = s.a2;
  outer_spec.singular_right = true;
  SingularSpec inner_spec;
  inner_spec.sqrt_scale = a1;
  inner_spec.singular_right = true;

  std::vector<double> osplits;
  for (double v : {r - a1, a1 - r, r, a1 + r})
    if (v > 0.0 && v < s.a2) osplits.push_back(v);
  std::sort(osplits.begin(), osplits.end());

  const InnerBreaksFn breaks = [r](double zeta, std::vector<double>& out) {
    out.push_back(r - zeta);
    out.push_back(zeta - r);
    out.push_back(zeta + r);
  };

  const Integrand2d f = [&s, with_kernel, r](double zeta, double zrim, double xi,
                                             double xrim) {
    double factor;
    if (with_kernel) {
      if (!(std::fabs(xi - zeta) < r && r < xi + zeta)) return 0.0;
      factor = arccos_saturated((xi * xi + zeta * zeta - r * r) / (2.0 * xi * zeta));
    } else {
      if (!(xi + zeta < r)) return 0.0;
      factor = 1.0;
    }
    return factor * rim_density(s.l1, s.c1, s.t, xi, xrim) *
           rim_density(s.l2, s.c2, s.t, zeta, zrim);
  };
  return integrate_2d_region(f, 0.0, s.a2, outer_spec,
                             [](double) { return 0.0; },
                             [a1](double) { return a1; }, inner_spec, tol, osplits,
                             breaks);
}

Outcome region_oracles() {
  const LawTols tols{1e-9, 1e-8, true};
  double worst_ratio = 0.0;
  double worst_i1 = 0.0;
  double worst_i2 = 0.0;
  for (int which = 0; which < 2; ++which) {
    Rand rnd(501 + which);
    for (int i = 0; i < 20; ++i) {
      DirectSetup s;
      s.c2 = rnd.uni(0.6, 1.6);
      s.c1 = s.c2 * rnd.uni(1.1, 3.0);
      s.l1 = rnd.uni(0.4, 2.0);
      s.l2 = rnd.uni(0.4, 2.0);
      s.t = rnd.uni(0.5, 1.5);
      s.a1 = s.c1 * s.t;
      s.a2 = s.c2 * s.t;
      s.r = (s.a1 + s.a2) * rnd.uni(0.1, 0.9);
      const PairParams pair(FlightParams(s.c1, s.l1), FlightParams(s.c2, s.l2));
      if (which == 0) {
        const ProbTerm lib = i1(pair, s.r, s.t, tols);
        const QuadResult direct = direct_masked(s, false, 1e-8);
        worst_i1 = std::fmax(worst_i1, std::fabs(lib.value - direct.value));
      } else {
        const ProbTerm lib = i2(pair, s.r, s.t, tols);
        const QuadResult direct = direct_masked(s, true, 1e-7);
        worst_i2 = std::fmax(worst_i2, std::fabs(lib.value - direct.value));
      }
    }
  }
  worst_ratio = std::fmax(worst_i1 / 1e-6, worst_i2 / 1e-5);
  Outcome oc{worst_ratio <= 1.0, worst_ratio, 1.0, ""};
  oc.note = "i1 " + std::to_string(worst_i1) + " i2 " + std::to_string(worst_i2);
  return oc;
}

// -------------------------------------------------------------------------
// 6. Junction continuity at offset h = 1e-6 * (c1+c2)t across the interior
//    branch boundaries, five parameter sets per speed class.

struct ParamSet {
  double c1, l1, c2, l2, t;
};

Outcome junction_continuity() {
  // rates chosen so the total switching intensity keeps the rim-pair atom
  // small: the law has a genuine inverse-square-root density blowup at
  // r = (c1-c2)t whose scale is proportional to exp(-(l1+l2)t)
  const std::vector<ParamSet> sets = {
      // c1 > 2 c2
      {3.0, 3.0, 1.0, 3.0, 1.0},
      {2.6, 2.5, 1.0, 3.5, 1.0},
      {3.5, 2.0, 1.5, 4.5, 1.0},
      {4.0, 3.5, 1.2, 2.5, 1.0},
      {2.4, 2.0, 1.0, 2.0, 1.5},
      // c2 < c1 < 2 c2
      {1.5, 3.0, 1.0, 3.0, 1.0},
      {1.8, 2.5, 1.0, 4.0, 1.0},
      {1.2, 3.0, 1.0, 3.5, 1.0},
      {1.9, 4.0, 1.0, 2.0, 1.0},
      {1.6, 2.0, 1.2, 2.0, 1.5},
      // c1 == 2 c2 exactly
      {2.0, 3.0, 1.0, 3.0, 1.0},
      {1.4, 3.0, 0.7, 3.5, 1.0},
      {2.6, 2.5, 1.3, 3.0, 1.0},
      {1.0, 4.0, 0.5, 3.0, 1.0},
      {2.2, 2.0, 1.1, 2.0, 1.5},
      // equal speeds
      {1.0, 3.0, 1.0, 3.0, 1.0},
      {1.3, 2.0, 1.3, 4.0, 1.0},
      {0.8, 3.0, 0.8, 3.0, 1.0},
      {2.0, 2.5, 2.0, 3.0, 1.0},
      {1.7, 2.0, 1.7, 2.0, 1.5},
  };
  double worst = 0.0;
  for (const ParamSet& ps : sets) {
    const PairParams pair(FlightParams(ps.c1, ps.l1), FlightParams(ps.c2, ps.l2));
    const Regime reg = regime_partition(pair, ps.t);
    const double sum = reg.junctions.back();
    const double h = 1e-6 * sum;
    for (std::size_t j = 1; j + 1 < reg.junctions.size(); ++j) {
      const double b = reg.junctions[j];
      const double gap =
          std::fabs(phi(pair, b + h, ps.t).value - phi(pair, b - h, ps.t).value);
      worst = std::fmax(worst, gap);
    }
  }
  return Outcome{worst < 1e-5, worst, 1e-5, ""};
}

// -------------------------------------------------------------------------
// 7. Monte Carlo agreement, one parameter set per speed class plus an
//    asymmetric-rate case.

Outcome monte_carlo_agreement() {
  const std::vector<ParamSet> sets = {
      {3.0, 1.0, 1.0, 2.0, 1.0},
      {2.0, 1.0, 1.5, 1.0, 1.0},
      {2.0, 1.0, 1.0, 2.0, 1.0},
      {1.0, 1.0, 1.0, 1.0, 1.0},
      {1.6, 0.5, 1.0, 2.5, 1.2},
  };
  const std::size_t n = 1000000;
  const double band = std::sqrt(std::log(2.0 / 0.01) / (2.0 * static_cast<double>(n)));
  const LawTols tols{1e-8, 1e-6, true};
  double worst_ratio = 0.0;
  for (const ParamSet& ps : sets) {
    const PairParams pair(FlightParams(ps.c1, ps.l1), FlightParams(ps.c2, ps.l2));
    const EmpiricalCdf emp = empirical_distance_cdf(pair, ps.t, n, kSeed);
    const double sum = (ps.c1 + ps.c2) * ps.t;
    std::vector<double> rs;
    for (int i = 1; i <= 200; ++i) rs.push_back(sum * i / 200.0);
    const auto vals = phi_grid(pair, rs, ps.t, tols);
    double budget = 0.0;
    double sup = 0.0;
    for (std::size_t i = 0; i < rs.size(); ++i) {
      budget = std::fmax(budget, vals[i].abs_error);
      sup = std::fmax(sup, std::fabs(vals[i].value - emp(rs[i])));
    }
    const double allowed = band + 10.0 * budget;
    worst_ratio = std::fmax(worst_ratio, sup / allowed);
  }
  return Outcome{worst_ratio <= 1.0, worst_ratio, 1.0,
                 "sup normalized by dkw band + 10x error budget"};
}

// -------------------------------------------------------------------------
// 8. The acute angle between the position vectors is uniform on (0, pi).

Outcome acute_angle_law() {
  const std::size_t n = 100000;
  Philox rng(kSeed, 801);
  const FlightParams f1(2.0, 1.0);
  const FlightParams f2(1.0, 2.0);
  std::vector<double> angles;
  angles.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const FlightState z1 = simulate_flight(f1, 1.0, rng);
    const FlightState z2 = simulate_flight(f2, 1.0, rng);
    const double dot = z1.x * z2.x + z1.y * z2.y;
    const double norms = std::hypot(z1.x, z1.y) * std::hypot(z2.x, z2.y);
    angles.push_back(std::acos(std::clamp(dot / norms, -1.0, 1.0)));
  }
  const EmpiricalCdf emp(std::move(angles), kSeed);
  const double band = EmpiricalCdf::dkw_halfwidth(0.01, n);
  double sup = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double z = kPi * i / 200.0;
    sup = std::fmax(sup, std::fabs(emp(z) - acute_angle_cdf(z)));
  }
  return Outcome{sup <= band, sup, band, ""};
}

// -------------------------------------------------------------------------
// 9. Monotone, bounded, atom-free distribution on a dense grid.

Outcome monotone_bounded() {
  const PairParams pair(FlightParams(2.0, 1.2), FlightParams(1.3, 0.8));
  const double t = 1.0;
  const double span = 3.3 * t;
  const int n = 10000;
  const LawTols tols{1e-8, 3e-7, true};

  std::vector<double> rs(n);
  for (int i = 0; i < n; ++i) rs[i] = span * i / (n - 1);
  const auto vals = phi_grid(pair, rs, t, tols);

  std::vector<double> mids(n - 1);
  for (int i = 0; i + 1 < n; ++i) mids[i] = 0.5 * (rs[i] + rs[i + 1]);
  const auto mid_vals = phi_grid(pair, mids, t, tols);

  double budget = 0.0;
  for (const CdfValue& v : vals) budget = std::fmax(budget, v.abs_error);

  double worst = 0.0;  // all sub-checks normalized to 1
  if (vals.front().value != 0.0) worst = std::fmax(worst, 2.0);
  worst = std::fmax(worst, std::fabs(vals.back().value - 1.0) / (10.0 * budget));
  for (int i = 0; i + 1 < n; ++i) {
    const double drop = vals[i].value - vals[i + 1].value;
    worst = std::fmax(
        worst, drop / (2.0 * (vals[i].abs_error + vals[i + 1].abs_error)));

    // no-atom check: a cell increment must not dwarf both of its refined
    // halves
    const double inc = vals[i + 1].value - vals[i].value;
    const double half_a = mid_vals[i].value - vals[i].value;
    const double half_b = vals[i + 1].value - mid_vals[i].value;
    const double allow = 2.0 * (vals[i].abs_error + 2.0 * mid_vals[i].abs_error +
                                vals[i + 1].abs_error);
    worst = std::fmax(worst,
                      inc / (10.0 * std::fmax(half_a, half_b) + allow));
  }
  return Outcome{worst <= 1.0, worst, 1.0,
                 "max normalized violation across endpoint/monotone/atom checks"};
}

}  // namespace

int main() {
  std::printf("distance-law acceptance gate\n");
  run_criterion(1, "closed_form_layer", 1.0, closed_form_layer);
  run_criterion(2, "quadrature_rim_family", 10.0, quadrature_rim_family);
  run_criterion(3, "mass_conservation", 30.0, mass_conservation);
  run_criterion(4, "branch_component_oracle", 300.0, branch_component_oracle);
  run_criterion(5, "region_oracles", 300.0, region_oracles);
  run_criterion(6, "junction_continuity", 120.0, junction_continuity);
  run_criterion(7, "monte_carlo_agreement", 3000.0, monte_carlo_agreement);
  run_criterion(8, "acute_angle_law", 60.0, acute_angle_law);
  run_criterion(9, "monotone_bounded", 600.0, monotone_bounded);
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
