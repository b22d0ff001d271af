#pragma once

// Two-body orbital mechanics over classical elements. Interfaces use degrees,
// kilometers and seconds; trig happens in radians internally. Orbits here are
// near-circular, so transfer arithmetic treats radii and semi-major axes
// interchangeably.

#include <cmath>
#include <stdexcept>

#include "adr/constants.hpp"

namespace adr::astro {

struct OrbitalElements {
  double sma_km = 0.0;
  double ecc = 0.0;
  double inc_deg = 0.0;
  double raan_deg = 0.0;
  double argp_deg = 0.0;
  double anomaly_deg = 0.0;  // along-track position valid at epoch_s
  double epoch_s = 0.0;      // seconds since mission start
};

inline void validate_elements(const OrbitalElements& el) {
  if (!(el.sma_km > kEarthRadiusKm))
    throw std::invalid_argument("orbital elements: sma must exceed the Earth radius");
  if (!(el.ecc >= 0.0 && el.ecc < 0.01))
    throw std::invalid_argument("orbital elements: ecc outside [0, 0.01)");
  if (!(el.inc_deg >= 0.0 && el.inc_deg <= 180.0))
    throw std::invalid_argument("orbital elements: inc outside [0, 180]");
  for (double a : {el.raan_deg, el.argp_deg, el.anomaly_deg}) {
    if (!(a >= 0.0 && a < 360.0))
      throw std::invalid_argument("orbital elements: angle outside [0, 360)");
  }
  if (!std::isfinite(el.epoch_s))
    throw std::invalid_argument("orbital elements: non-finite epoch");
}

inline double orbital_period(double sma_km) {
  if (!(sma_km > 0.0)) throw std::invalid_argument("orbital_period: sma must be positive");
  return 2.0 * kPi * std::sqrt(sma_km * sma_km * sma_km / kMuEarth);
}

inline double orbital_period(const OrbitalElements& el) { return orbital_period(el.sma_km); }

// Mean motion in rad/s.
inline double mean_motion(double sma_km) {
  if (!(sma_km > 0.0)) throw std::invalid_argument("mean_motion: sma must be positive");
  return std::sqrt(kMuEarth / (sma_km * sma_km * sma_km));
}

inline double circular_velocity(double r_km) {
  if (!(r_km > 0.0)) throw std::invalid_argument("circular_velocity: radius must be positive");
  return std::sqrt(kMuEarth / r_km);
}

struct HohmannTransfer {
  double dv1_kms = 0.0;
  double dv2_kms = 0.0;
  double duration_s = 0.0;
  double total_dv() const { return dv1_kms + dv2_kms; }
};

// Impulsive two-burn transfer between circular orbits of radius r1 and r2.
// Identical radii degenerate to an all-zero transfer.
inline HohmannTransfer hohmann_transfer(double r1_km, double r2_km) {
  if (!(r1_km > kEarthRadiusKm) || !(r2_km > kEarthRadiusKm))
    throw std::invalid_argument("hohmann_transfer: radius at or below the Earth surface");
  if (r1_km == r2_km) return {};
  const double a_t = 0.5 * (r1_km + r2_km);
  const double v1 = circular_velocity(r1_km);
  const double v2 = circular_velocity(r2_km);
  const double v_dep = std::sqrt(kMuEarth * (2.0 / r1_km - 1.0 / a_t));
  const double v_arr = std::sqrt(kMuEarth * (2.0 / r2_km - 1.0 / a_t));
  HohmannTransfer t;
  t.dv1_kms = std::fabs(v_dep - v1);
  t.dv2_kms = std::fabs(v2 - v_arr);
  t.duration_s = kPi * std::sqrt(a_t * a_t * a_t / kMuEarth);
  return t;
}

// Single impulsive rotation of the velocity vector by delta_deg.
inline double plane_change_dv(double v_kms, double delta_deg) {
  if (v_kms < 0.0) throw std::invalid_argument("plane_change_dv: negative velocity");
  if (!(delta_deg >= 0.0 && delta_deg <= 180.0))
    throw std::invalid_argument("plane_change_dv: angle outside [0, 180]");
  return 2.0 * v_kms * std::sin(0.5 * deg2rad(delta_deg));
}

// Coast time until the along-track gap between two circular orbits closes by
// phase_gap_deg through their mean-motion difference.
inline double phasing_wait(double chaser_sma_km, double offset_sma_km, double phase_gap_deg) {
  if (!(chaser_sma_km > kEarthRadiusKm) || !(offset_sma_km > kEarthRadiusKm))
    throw std::invalid_argument("phasing_wait: sma at or below the Earth surface");
  if (!(phase_gap_deg >= 0.0))
    throw std::invalid_argument("phasing_wait: negative phase gap");
  if (phase_gap_deg == 0.0) return 0.0;
  const double drift = std::fabs(mean_motion(chaser_sma_km) - mean_motion(offset_sma_km));
  if (drift == 0.0)
    throw std::invalid_argument("phasing_wait: no drift between identical orbits");
  return deg2rad(phase_gap_deg) / drift;
}

inline constexpr double kSafetyEllipseSmaKm = 1.0;

struct SafetyEllipseInjection {
  double dv_kms = 0.0;
  double duration_s = 0.0;
};

// Relative-motion injection around the target: dv = 2 n a_se, held one period.
inline SafetyEllipseInjection safety_ellipse_injection(double target_sma_km) {
  if (!(target_sma_km > kEarthRadiusKm))
    throw std::invalid_argument("safety_ellipse_injection: sma at or below the Earth surface");
  SafetyEllipseInjection inj;
  inj.dv_kms = 2.0 * mean_motion(target_sma_km) * kSafetyEllipseSmaKm;
  inj.duration_s = orbital_period(target_sma_km);
  return inj;
}

// Along-track position propagated at the mean rate from the element epoch.
inline double anomaly_at_deg(const OrbitalElements& el, double t_s) {
  return wrap_deg(el.anomaly_deg + rad2deg(mean_motion(el.sma_km) * (t_s - el.epoch_s)));
}

inline double mean_longitude_deg(const OrbitalElements& el, double t_s) {
  return wrap_deg(el.raan_deg + el.argp_deg + anomaly_at_deg(el, t_s));
}

// How far ahead of `from` the body `to` sits along track, in [0, 360).
inline double phase_gap_deg(const OrbitalElements& from, const OrbitalElements& to, double t_s) {
  return wrap_deg(mean_longitude_deg(to, t_s) - mean_longitude_deg(from, t_s));
}

// Angle between the two orbit normals, combining inclination and RAAN.
inline double plane_separation_deg(const OrbitalElements& a, const OrbitalElements& b) {
  const double ia = deg2rad(a.inc_deg), ib = deg2rad(b.inc_deg);
  const double dr = deg2rad(a.raan_deg - b.raan_deg);
  double c = std::cos(ia) * std::cos(ib) + std::sin(ia) * std::sin(ib) * std::cos(dr);
  c = std::fmin(1.0, std::fmax(-1.0, c));
  return rad2deg(std::acos(c));
}

}  // namespace adr::astro
