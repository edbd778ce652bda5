#pragma once

// Domain types and closed-form single-flight laws for planar random flights:
// a particle starting at the origin, moving at constant speed c and redrawing
// its direction uniformly on the unit circle at the events of a Poisson
// process of rate lambda.  Everything here is an elementary formula; the
// distance law between two such flights is assembled in distance_law.hpp.

#include <stdexcept>
#include <string>

namespace flightdist {

// Relative tolerance for deciding c1 == c2 and c1 == 2*c2.  The branch
// structure of the distance law is discontinuous in the formulas (not in the
// values), so the classification rule must be deterministic.
inline constexpr double kSpeedEqualityTol = 1e-12;

// One particle: speed c > 0 (distance/time), switch rate lambda > 0 (1/time).
struct FlightParams {
  double speed;
  double rate;

  FlightParams(double speed_in, double rate_in);
};

// Ordering of the two speeds relative to the 2:1 ratio, which decides which
// interior branch of the distance law applies.
enum class SpeedClass {
  FastAboveDouble,   // c1 > 2*c2
  FastBelowDouble,   // c2 < c1 < 2*c2
  FastExactlyDouble, // c1 == 2*c2  (interior H-interval vanishes)
  Equal,             // c1 == c2
};

// Ordered pair of flights with c1 >= c2.  The constructor swaps the inputs
// if needed; the distance between the two flights does not depend on the
// labelling.
class PairParams {
 public:
  PairParams(FlightParams a, FlightParams b);

  const FlightParams& first() const { return first_; }   // faster flight
  const FlightParams& second() const { return second_; } // slower flight
  SpeedClass speed_class() const { return class_; }
  bool equal_speeds() const { return class_ == SpeedClass::Equal; }

 private:
  FlightParams first_;
  FlightParams second_;
  SpeedClass class_;
};

SpeedClass classify_speeds(double c1, double c2);

struct Interval {
  double lo;
  double hi;
};

// Radial law of one flight at horizon t: an atom of mass exp(-lambda*t) on
// the rim r = c*t plus an absolutely continuous part on (0, c*t).
struct RadialLaw {
  FlightParams params;
  double horizon;
  double singular_mass;
  Interval ac_support;
};

RadialLaw make_radial_law(const FlightParams& p, double t);

// Probability that no direction switch happened by time t, i.e. the mass of
// the rim atom: exp(-lambda*t).  Throws std::domain_error for t <= 0.
double singular_mass(const FlightParams& p, double t);

// Distribution function of the distance R(t) from the origin:
//   0                                              r <= 0
//   1 - exp(-lambda*t + (lambda/c)*sqrt(c^2t^2 - r^2))   0 < r <= c*t
//   1                                              r > c*t
double radial_cdf(const FlightParams& p, double r, double t);

// Density of the absolutely continuous part of R(t) on (0, c*t):
//   (lambda/c) * r / sqrt(c^2t^2 - r^2) * exp(-lambda*t + (lambda/c)*sqrt(c^2t^2 - r^2))
// The rim atom at r = c*t is not part of this density.  Throws
// std::domain_error for r outside (0, c*t).
double radial_density_ac(const FlightParams& p, double r, double t);

// Distribution function of |alpha1 - alpha2| for two independent polar
// angles uniform on [0, 2*pi): (4*pi*z - z^2) / (4*pi^2) on (0, 2*pi].
double angle_diff_cdf(double z);

// Tail Pr{cos(angle difference) > z}: 1 below -1, arccos(z)/pi on (-1, 1],
// 0 above 1.
double cos_angle_tail(double z);

// Distribution function of the acute angle between the two position
// vectors: uniform on (0, pi), i.e. z/pi clamped to [0, 1].
double acute_angle_cdf(double z);

// Density of the x-projection of one flight on (-c*t, c*t):
//   exp(-lambda*t)/(pi*sqrt(c^2t^2 - x^2))
//   + (lambda*exp(-lambda*t)/(2c)) * [I0(w) + L0(w)],  w = (lambda/c)*sqrt(c^2t^2 - x^2)
// with I0 and L0 evaluated from their power series.  Throws
// std::domain_error for |x| >= c*t.
double marginal_density(const FlightParams& p, double x, double t);

// Power series for the modified Bessel function I0 and modified Struve
// function L0 of order zero.  Terms are summed until the next one drops
// below 1e-16 of the partial sum (hard cap 500 terms).
double bessel_i0_series(double z);
double struve_l0_series(double z);

// arccos with a tolerance guard: arguments within 1e-12 outside [-1, 1] are
// clamped (they arise from rounding at triangle-geometry boundaries); larger
// excursions indicate a bug and throw std::logic_error.
double arccos_strict(double w);

// Saturating arccos: pi for w <= -1, 0 for w >= 1.  Equals
// pi * Pr{cos(angle difference) > w}, which is what the triangle kernels
// integrate over regions where the argument legitimately leaves [-1, 1].
double arccos_saturated(double w);

}  // namespace flightdist
