#pragma once

// Exact distribution function phi(r, t) = Pr{ rho(t) < r } of the Euclidean
// distance rho(t) between two independent planar random flights launched
// from the origin at time 0.
//
// The law decomposes over the four joint events (each flight either still
// carries its initial direction, so it sits on its rim circle, or has
// switched at least once, so it lies in the interior):
//
//   phi = p00 (both on rims) + p10 (fast interior, slow on rim)
//       + p01 (fast on rim, slow interior) + p11 (both interior).
//
// p00 is closed form, p10 and p01 are single integrals against the rim-atom
// geometry, and p11 = i1 + i2/pi where i1 integrates the two interior radial
// densities over the triangle xi + zeta <= r and i2 integrates them against
// an arccos triangle kernel over the region where the three sides (xi, zeta,
// r) can close a triangle.
//
// phi itself is evaluated through its piecewise branch functions, whose
// intervals are bounded by m(t) = min{(c1-c2)t, c2 t}, M(t) = max{...},
// c1 t and (c1+c2)t for strict speeds (with the interior branch taking one
// of two forms depending on the speed class), and by c t, 2 c t for equal
// speeds.  phi_components exposes the four-event decomposition, which is an
// algebraically independent route to the same value and serves as an oracle.

#include <span>
#include <string_view>
#include <vector>

#include "flightdist/core_model.hpp"
#include "flightdist/quadrature.hpp"

namespace flightdist {

enum class RegimeTag { Zero, G, H1, H2, Q, U, V, W, One };

std::string_view to_string(RegimeTag tag);

// Branch layout of the distance law at horizon t.
struct Regime {
  SpeedClass speed_class;
  double m = 0.0;                  // min{(c1-c2)t, c2 t}; 0 for equal speeds
  double M = 0.0;                  // max{(c1-c2)t, c2 t}; c t for equal speeds
  std::vector<double> junctions;   // ordered branch boundaries incl. 0 and (c1+c2)t
};

Regime regime_partition(const PairParams& pair, double t);

// Tag of the branch whose half-open interval (prev, bound] contains r.
// r <= 0 maps to Zero, r > (c1+c2)t to One.  Throws std::domain_error for
// t <= 0.
RegimeTag classify(const PairParams& pair, double r, double t);

// Quadrature tolerances used when assembling a distance-law value: one for
// single integrals, one for double integrals.  When throw_on_convergence is
// false a quadrature budget exhaustion is folded into the reported error
// instead of throwing (used by the CLI to keep emitting rows).
struct LawTols {
  double single = kDefaultTol1d;
  double dbl = kDefaultTol2d;
  bool throw_on_convergence = true;
};

struct ProbTerm {
  double value = 0.0;
  double abs_error = 0.0;
  long evaluations = 0;
  bool converged = true;
};

struct JointComponents {
  ProbTerm p00;
  ProbTerm p10;
  ProbTerm p01;
  ProbTerm p11;

  double total() const { return p00.value + p10.value + p01.value + p11.value; }
  double total_error() const {
    return p00.abs_error + p10.abs_error + p01.abs_error + p11.abs_error;
  }
};

struct CdfValue {
  double value = 0.0;       // clamped to [0, 1]
  double abs_error = 0.0;
  RegimeTag regime = RegimeTag::Zero;
  bool converged = true;
  // Set when the unclamped value strayed outside [0, 1] by more than the
  // error estimate; indicates an internal inconsistency rather than rounding.
  bool excursion_flagged = false;
};

// Joint-event components at 0 < r <= (c1+c2)t (throws std::domain_error
// outside).  All are probabilities of {rho(t) < r, event}.
ProbTerm joint_00(const PairParams& pair, double r, double t);
ProbTerm joint_10(const PairParams& pair, double r, double t, const LawTols& tols = {});
ProbTerm joint_01(const PairParams& pair, double r, double t, const LawTols& tols = {});

// Triangle integrals of the two interior radial densities: i1 over
// {xi + zeta <= r}, i2 of the arccos kernel over the triangle-closure
// region.  p11 = i1 + i2/pi.
ProbTerm i1(const PairParams& pair, double r, double t, const LawTols& tols = {});
ProbTerm i2(const PairParams& pair, double r, double t, const LawTols& tols = {});

JointComponents phi_components(const PairParams& pair, double r, double t,
                               const LawTols& tols = {});

// The distribution function itself, evaluated through the branch functions.
CdfValue phi(const PairParams& pair, double r, double t, const LawTols& tols = {});

// Evaluates phi on a grid, optionally splitting the rows across threads.
// Results are identical for any thread count.
std::vector<CdfValue> phi_grid(const PairParams& pair, std::span<const double> rs,
                               double t, const LawTols& tols = {}, int threads = 1);

}  // namespace flightdist
