#include "flightdist/core_model.hpp"

#include <cmath>
#include <numbers>

namespace flightdist {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive_time(double t) {
  if (!(t > 0.0)) throw std::domain_error("horizon t must be positive");
}

}  // namespace

FlightParams::FlightParams(double speed_in, double rate_in)
    : speed(speed_in), rate(rate_in) {
  if (!(speed > 0.0) || !std::isfinite(speed))
    throw std::invalid_argument("flight speed must be positive and finite");
  if (!(rate > 0.0) || !std::isfinite(rate))
    throw std::invalid_argument("switch rate must be positive and finite");
}

SpeedClass classify_speeds(double c1, double c2) {
  if (c2 > c1) std::swap(c1, c2);
  if (c1 - c2 <= kSpeedEqualityTol * c1) return SpeedClass::Equal;
  const double gap = c1 - 2.0 * c2;
  if (std::fabs(gap) <= kSpeedEqualityTol * std::fmax(c1, 2.0 * c2))
    return SpeedClass::FastExactlyDouble;
  return gap > 0.0 ? SpeedClass::FastAboveDouble : SpeedClass::FastBelowDouble;
}

PairParams::PairParams(FlightParams a, FlightParams b)
    : first_(a), second_(b), class_(classify_speeds(a.speed, b.speed)) {
  if (second_.speed > first_.speed) std::swap(first_, second_);
}

RadialLaw make_radial_law(const FlightParams& p, double t) {
  require_positive_time(t);
  return RadialLaw{p, t, std::exp(-p.rate * t), Interval{0.0, p.speed * t}};
}

double singular_mass(const FlightParams& p, double t) {
  require_positive_time(t);
  return std::exp(-p.rate * t);
}

double radial_cdf(const FlightParams& p, double r, double t) {
  require_positive_time(t);
  const double ct = p.speed * t;
  if (r <= 0.0) return 0.0;
  if (r > ct) return 1.0;
  const double rim = std::sqrt(std::fmax(0.0, (ct - r) * (ct + r)));
  return 1.0 - std::exp(-p.rate * t + (p.rate / p.speed) * rim);
}

double radial_density_ac(const FlightParams& p, double r, double t) {
  require_positive_time(t);
  const double ct = p.speed * t;
  if (!(r > 0.0) || !(r < ct))
    throw std::domain_error("radial density is defined on (0, c*t)");
  const double rim = std::sqrt((ct - r) * (ct + r));
  const double k = p.rate / p.speed;
  return k * r / rim * std::exp(-p.rate * t + k * rim);
}

double angle_diff_cdf(double z) {
  if (z <= 0.0) return 0.0;
  if (z >= 2.0 * kPi) return 1.0;
  return z * (4.0 * kPi - z) / (4.0 * kPi * kPi);
}

double cos_angle_tail(double z) { return arccos_saturated(z) / kPi; }

double acute_angle_cdf(double z) {
  if (z <= 0.0) return 0.0;
  if (z >= kPi) return 1.0;
  return z / kPi;
}

double bessel_i0_series(double z) {
  const double q = 0.25 * z * z;  // (z/2)^2
  double term = 1.0;
  double sum = term;
  for (int k = 0; k < 500; ++k) {
    term *= q / ((k + 1.0) * (k + 1.0));
    sum += term;
    if (term <= 1e-16 * sum) break;
  }
  return sum;
}

double struve_l0_series(double z) {
  const double q = 0.25 * z * z;
  double term = 2.0 * z / (kPi);  // (z/2) / Gamma(3/2)^2
  double sum = term;
  for (int k = 0; k < 500; ++k) {
    const double half = k + 1.5;
    term *= q / (half * half);
    sum += term;
    if (term <= 1e-16 * sum) break;
  }
  return sum;
}

double marginal_density(const FlightParams& p, double x, double t) {
  require_positive_time(t);
  const double ct = p.speed * t;
  if (!(std::fabs(x) < ct))
    throw std::domain_error("marginal density is defined on (-c*t, c*t)");
  const double rim = std::sqrt((ct - x) * (ct + x));
  const double w = (p.rate / p.speed) * rim;
  const double damp = std::exp(-p.rate * t);
  return damp / (kPi * rim) +
         p.rate * damp / (2.0 * p.speed) * (bessel_i0_series(w) + struve_l0_series(w));
}

double arccos_strict(double w) {
  if (w > 1.0) {
    if (w > 1.0 + 1e-12)
      throw std::logic_error("arccos argument exceeds 1 beyond rounding: " +
                             std::to_string(w));
    w = 1.0;
  } else if (w < -1.0) {
    if (w < -1.0 - 1e-12)
      throw std::logic_error("arccos argument below -1 beyond rounding: " +
                             std::to_string(w));
    w = -1.0;
  }
  return std::acos(w);
}

double arccos_saturated(double w) {
  if (w <= -1.0) return kPi;
  if (w >= 1.0) return 0.0;
  return std::acos(w);
}

}  // namespace flightdist
