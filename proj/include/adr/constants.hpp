#pragma once

#include <cmath>

namespace adr {

inline constexpr double kMuEarth = 398600.4418;    // km^3/s^2
inline constexpr double kEarthRadiusKm = 6378.137; // km
inline constexpr double kSecondsPerDay = 86400.0;
inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double deg2rad(double d) { return d * kPi / 180.0; }
inline constexpr double rad2deg(double r) { return r * 180.0 / kPi; }

// Normalize an angle to [0, 360).
inline double wrap_deg(double d) {
  double w = std::fmod(d, 360.0);
  if (w < 0.0) w += 360.0;
  return w;
}

// Signed smallest difference a - b, wrapped to [-180, 180).
inline double wrap_deg_signed(double d) {
  double w = wrap_deg(d);
  return w >= 180.0 ? w - 360.0 : w;
}

// Unsigned angular separation in [0, 180].
inline double angular_distance_deg(double a, double b) {
  return std::fabs(wrap_deg_signed(a - b));
}

}  // namespace adr
