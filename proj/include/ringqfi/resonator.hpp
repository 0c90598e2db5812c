#pragma once

// Lumped (r, a, phi) model of an all-pass ring resonator with an evanescently
// coupled analyte. Lengths are in cm, absorption coefficients in 1/cm.

#include <cmath>
#include <complex>
#include <numbers>

#include "ringqfi/errors.hpp"

namespace ringqfi {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Excursions of eta outside [0, 1] up to this size are float noise.
inline constexpr double kEtaClampTolerance = 1e-14;
// 1 - 2ra cos(phi) + (ra)^2 below this is treated as the r = a = 1 pole.
inline constexpr double kSingularDenominator = 1e-24;

inline double um_to_cm(double um) { return um * 1e-4; }
inline double nm_to_cm(double nm) { return nm * 1e-7; }
inline double circumference_from_radius(double radius) { return kTwoPi * radius; }

// Intensity convention: 10 log10(P0/P) per cm -> natural 1/cm.
inline double db_per_cm_to_alpha(double db_per_cm) {
  if (!(db_per_cm >= 0.0)) throw DomainError("loss in dB/cm must be >= 0");
  return db_per_cm * std::numbers::ln10 / 10.0;
}

struct RingParams {
  double self_coupling = 0.9;         // r
  double circumference = 0.0;         // L [cm]
  double confinement = 0.0;           // Gamma
  double intrinsic_absorption = 0.0;  // alpha_I [1/cm]
  double intrinsic_index = 1.0;       // n_I
  double wavelength = 1.5e-4;         // lambda [cm]

  void validate() const {
    if (!(self_coupling >= 0.0 && self_coupling <= 1.0)) throw DomainError("self_coupling must lie in [0, 1]");
    if (!(circumference > 0.0)) throw DomainError("circumference must be > 0");
    if (!(confinement >= 0.0 && confinement <= 1.0)) throw DomainError("confinement must lie in [0, 1]");
    if (!(intrinsic_absorption >= 0.0)) throw DomainError("intrinsic_absorption must be >= 0");
    if (!(intrinsic_index > 0.0)) throw DomainError("intrinsic_index must be > 0");
    if (!(wavelength > 0.0)) throw DomainError("wavelength must be > 0");
  }
};

struct Analyte {
  double absorption = 0.0;  // alpha_A [1/cm]
  double index = 0.0;       // n_A

  void validate() const {
    if (!(absorption >= 0.0)) throw DomainError("analyte absorption must be >= 0");
    if (!std::isfinite(index)) throw DomainError("analyte index must be finite");
  }
};

enum class Parameter { absorption, refractive_index };

inline const char* to_string(Parameter p) {
  return p == Parameter::absorption ? "absorption" : "refractive_index";
}

struct Attenuation {
  double a = 1.0;                 // single round-trip field attenuation
  double total_absorption = 0.0;  // alpha_T [1/cm]
};

inline Attenuation attenuation(const RingParams& ring, const Analyte& analyte) {
  ring.validate();
  analyte.validate();
  const double alpha_t = ring.intrinsic_absorption + ring.confinement * analyte.absorption;
  return {std::exp(-alpha_t * ring.circumference / 2.0), alpha_t};
}

inline double round_trip_phase(const RingParams& ring, const Analyte& analyte) {
  return kTwoPi * (ring.intrinsic_index + ring.confinement * analyte.index) * ring.circumference /
         ring.wavelength;
}

namespace detail {

// |r - a e^{i phi}|^2 and |1 - r a e^{i phi}|^2 written without the
// cancellation that the expanded forms suffer near critical coupling.
// sin(phi / 2) after reducing phi to [-pi, pi], so phi = 2 pi m gives exactly 0.
inline double half_sine(double phi) { return std::sin(std::remainder(phi, kTwoPi) / 2.0); }

inline double numerator(double r, double a, double phi) {
  const double h = half_sine(phi);
  return (a - r) * (a - r) + 4.0 * r * a * h * h;
}

inline double denominator(double r, double a, double phi) {
  const double h = half_sine(phi);
  return (1.0 - r * a) * (1.0 - r * a) + 4.0 * r * a * h * h;
}

inline void check_inputs(double r, double a) {
  if (!(r >= 0.0 && r <= 1.0)) throw DomainError("self-coupling r must lie in [0, 1]");
  if (!(a > 0.0 && a <= 1.0)) throw DomainError("attenuation a must lie in (0, 1]");
}

inline double checked_denominator(double r, double a, double phi) {
  check_inputs(r, a);
  const double d = denominator(r, a, phi);
  if (!(d > kSingularDenominator)) throw SingularConfiguration("ring pole at r = a = 1 on resonance");
  return d;
}

inline double clamp_eta(double eta) {
  if (eta < 0.0) {
    if (eta < -kEtaClampTolerance) throw DomainError("transmission below 0 beyond float noise");
    return 0.0;
  }
  if (eta > 1.0) {
    if (eta > 1.0 + kEtaClampTolerance) throw DomainError("transmission above 1 beyond float noise");
    return 1.0;
  }
  return eta;
}

}  // namespace detail

inline double transmission(double r, double a, double phi) {
  const double d = detail::checked_denominator(r, a, phi);
  return detail::clamp_eta(detail::numerator(r, a, phi) / d);
}

// theta_R without modular reduction. Each arctangent uses atan2.
inline double phase_shift(double r, double a, double phi) {
  detail::checked_denominator(r, a, phi);
  if (detail::numerator(r, a, phi) == 0.0)
    throw SingularConfiguration("phase undefined at critical coupling on resonance");
  return kPi + phi + std::atan2(r * std::sin(phi), a - r * std::cos(phi)) +
         std::atan2(r * a * std::sin(phi), 1.0 - r * a * std::cos(phi));
}

inline double buildup(double r, double a, double phi) {
  const double d = detail::checked_denominator(r, a, phi);
  return (1.0 - r * r) * a * a / d;
}

// Derivatives of the channel with respect to one analyte parameter.
// rate_sq is |dt/dx|^2 for the complex amplitude transmission t with |t|^2 = eta;
// it stays finite where the polar split (eta, theta) does not.
struct Sensitivity {
  double d_eta = 0.0;
  double d_theta = 0.0;
  double rate_sq = 0.0;
};

struct ChannelPoint {
  double eta = 1.0;
  double theta = 0.0;
  double buildup = 0.0;
  double attenuation = 1.0;
  double round_trip_phase = 0.0;
  double total_absorption = 0.0;
  double self_coupling = 0.0;

  double d_eta_d_alpha = 0.0;
  double d_theta_d_alpha = 0.0;
  double d_eta_d_n = 0.0;
  double d_theta_d_n = 0.0;
  double rate_sq_alpha = 0.0;
  double rate_sq_n = 0.0;

  // r == a and phi == 2 pi m exactly: eta = 0 and theta is the undercoupled-side limit.
  bool critical = false;

  Sensitivity sensitivity(Parameter p) const {
    if (p == Parameter::absorption) return {d_eta_d_alpha, d_theta_d_alpha, rate_sq_alpha};
    return {d_eta_d_n, d_theta_d_n, rate_sq_n};
  }
};

// d(eta)^2 / eta, using its limit 4 |dt/dx|^2 at eta = 0.
inline double intensity_information(const Sensitivity& s, double eta) {
  if (eta == 0.0) return 4.0 * s.rate_sq;
  return s.d_eta * s.d_eta / eta;
}

// (d sqrt(eta))^2 + eta (d theta)^2 == |dt/dx|^2; this returns the two pieces
// as d sqrt(eta) and sqrt(eta) d theta.
struct PolarRates {
  double sqrt_eta_rate = 0.0;
  double phase_rate = 0.0;
};

inline PolarRates polar_rates(const Sensitivity& s, double eta) {
  if (eta == 0.0) return {std::sqrt(s.rate_sq), 0.0};
  const double root = std::sqrt(eta);
  return {s.d_eta / (2.0 * root), root * s.d_theta};
}

// Channel quantities at explicit (r, a, phi) with the chain factors
// da/d(alpha_A) and dphi/d(n_A).
inline ChannelPoint channel_point(double r, double a, double phi, double da_dalpha, double dphi_dn) {
  const double d = detail::checked_denominator(r, a, phi);
  const double n = detail::numerator(r, a, phi);
  const double h = detail::half_sine(phi);
  const double h2 = h * h;
  const double s = std::sin(phi);

  ChannelPoint cp;
  cp.self_coupling = r;
  cp.attenuation = a;
  cp.round_trip_phase = phi;
  cp.eta = detail::clamp_eta(n / d);
  cp.buildup = (1.0 - r * r) * a * a / d;
  cp.critical = (n == 0.0);

  const double term2 = std::atan2(r * a * s, 1.0 - r * a * std::cos(phi));
  cp.theta = cp.critical ? kPi + phi + term2
                         : kPi + phi + std::atan2(r * s, a - r * std::cos(phi)) + term2;

  // d/da
  const double dn_da = 2.0 * (a - r) + 4.0 * r * h2;
  const double dd_da = -2.0 * r * (1.0 - r * a) + 4.0 * r * h2;
  const double deta_da = (dn_da * d - n * dd_da) / (d * d);
  const double dtheta_da = cp.critical ? 0.0 : r * s * (1.0 / d - 1.0 / n);
  // d/dphi
  const double deta_dphi = 2.0 * r * a * s * (d - n) / (d * d);
  const double dtheta_dphi =
      cp.critical ? 0.0
                  : 1.0 + (r * (a - r) - 2.0 * r * a * h2) / n + (r * a * (1.0 - r * a) - 2.0 * r * a * h2) / d;

  // |dt|^2 = (1 - r^2)^2 / d^2 * (da^2 + a^2 dphi^2)
  const double k = (1.0 - r * r) * (1.0 - r * r) / (d * d);

  cp.d_eta_d_alpha = deta_da * da_dalpha;
  cp.d_theta_d_alpha = dtheta_da * da_dalpha;
  cp.rate_sq_alpha = k * da_dalpha * da_dalpha;
  cp.d_eta_d_n = deta_dphi * dphi_dn;
  cp.d_theta_d_n = dtheta_dphi * dphi_dn;
  cp.rate_sq_n = k * a * a * dphi_dn * dphi_dn;
  return cp;
}

// Round-trip phase pinned to `phi` at this analyte (a resonance-tuned ring);
// dphi/dn_A is unchanged.
inline ChannelPoint channel_point(const RingParams& ring, const Analyte& analyte, double phi) {
  const Attenuation att = attenuation(ring, analyte);
  const double da_dalpha = -ring.confinement * ring.circumference / 2.0 * att.a;
  const double dphi_dn = kTwoPi * ring.confinement * ring.circumference / ring.wavelength;
  ChannelPoint cp = channel_point(ring.self_coupling, att.a, phi, da_dalpha, dphi_dn);
  cp.total_absorption = att.total_absorption;
  return cp;
}

inline ChannelPoint channel_point(const RingParams& ring, const Analyte& analyte) {
  return channel_point(ring, analyte, round_trip_phase(ring, analyte));
}

struct MziCoupler {
  double phi1 = 0.0;
  double phi2 = 0.0;
};

// Effective complex self-coupling of a Mach-Zehnder coupled ring.
inline std::complex<double> mzi_coupling(const MziCoupler& c) {
  using namespace std::complex_literals;
  return 1i * std::exp(1i * ((c.phi1 + c.phi2) / 2.0)) * std::cos((c.phi1 - c.phi2) / 2.0);
}

}  // namespace ringqfi
