#pragma once

// Quantum Fisher information of single-mode Gaussian probes sent through the
// ring channel, plus the closed forms it reduces to.

#include <cmath>
#include <optional>

#include "ringqfi/errors.hpp"
#include "ringqfi/gaussian.hpp"
#include "ringqfi/resonator.hpp"

namespace ringqfi {

struct QfiResult {
  double total = 0.0;
  double term_noise = 0.0;
  double term_purity = 0.0;
  double term_displacement = 0.0;
  double per_photon = 0.0;
};

// Raw ring quantities used by the displacement closed form.
struct RingRaw {
  double r = 0.0;
  double a = 1.0;
  double phi = 0.0;
  double confinement = 0.0;
  double circumference = 0.0;
};

// Below this det(Sigma) - 1 the output is treated as pure and the
// noise/purity terms switch to their closed-form limits.
inline constexpr double kPureStateTolerance = 1e-13;
// |r - a| and |phi mod 2 pi| allowed by the critical-coupling closed forms.
inline constexpr double kCriticalTolerance = 1e-8;

namespace detail {

inline QfiResult finish(QfiResult q, double photons) {
  q.total = q.term_noise + q.term_purity + q.term_displacement;
  q.per_photon = photons > 0.0 ? q.total / photons : 0.0;
  return q;
}

inline double wrapped_phase(double phi) { return std::remainder(phi, kTwoPi); }

// phase == nullopt checks the geometric round-trip phase.
inline void require_critical(const RingParams& ring, const Analyte& analyte, std::optional<double> phase) {
  const double a = attenuation(ring, analyte).a;
  if (std::abs(ring.self_coupling - a) > kCriticalTolerance)
    throw DomainError("closed form requires critical coupling r = a");
  const double phi = phase ? *phase : round_trip_phase(ring, analyte);
  if (std::abs(wrapped_phase(phi)) > kCriticalTolerance)
    throw DomainError("closed form requires resonance phi = 2 pi m");
}

}  // namespace detail

// Tr[(S^-1 S')^2] / (2 (1 + P^2)) written in closed form for the ring channel.
inline double qfi_term_noise(const ProbeSpec& probe, const ChannelPoint& channel,
                             Parameter wrt = Parameter::absorption) {
  probe.validate();
  if (probe.squeeze == 0.0) return 0.0;
  const Sensitivity sens = channel.sensitivity(wrt);
  const double eta = channel.eta;
  const double g = eta * (eta - 1.0);
  const double c2 = std::cosh(2.0 * probe.squeeze);
  const double c4 = std::cosh(4.0 * probe.squeeze);
  const double sh = std::sinh(probe.squeeze);
  const PolarRates pr = polar_rates(sens, eta);
  // eta^2 theta'^2 == eta (sqrt(eta) theta')^2, which is 0 at eta = 0.
  const double eta2_dtheta2 = eta * pr.phase_rate * pr.phase_rate;
  const double pre = 2.0 * sh * sh / ((g * c2 - g - 1.0) * (2.0 * g * c2 - 2.0 * g - 1.0));
  return pre * (((1.0 + 2.0 * g) * c2 - 2.0 * g) * sens.d_eta * sens.d_eta +
                2.0 * eta2_dtheta2 * (1.0 + g + c2 - g * c4));
}

// 2 P'^2 / (1 - P^4) in closed form. Uses d(eta)^2 / eta so that the eta -> 0
// limit at critical coupling is exact.
inline double qfi_term_purity(const ProbeSpec& probe, const ChannelPoint& channel,
                              Parameter wrt = Parameter::absorption) {
  probe.validate();
  if (probe.squeeze == 0.0) return 0.0;
  const Sensitivity sens = channel.sensitivity(wrt);
  const double eta = channel.eta;
  const double info = intensity_information(sens, eta);
  if (info == 0.0) return 0.0;
  if (eta == 1.0) throw SingularConfiguration("purity term diverges at eta = 1 with nonzero d eta");
  const double g = eta * (eta - 1.0);
  const double c2 = std::cosh(2.0 * probe.squeeze);
  const double sh = std::sinh(probe.squeeze);
  const double w = 1.0 - 2.0 * eta;
  return w * w * sh * sh * info / ((eta - 1.0) * (1.0 + g - g * c2) * (2.0 * g * c2 - 2.0 * g - 1.0));
}

// Delta X'^T Sigma^-1 Delta X' for estimating alpha_A, as a rational function of (r, a, phi).
inline double qfi_term_displacement(const ProbeSpec& probe, const RingRaw& ring) {
  probe.validate();
  const double r = ring.r;
  const double a = ring.a;
  const double phi = ring.phi;
  const double s = probe.squeeze;
  const double chi = probe.squeeze_phase;
  const double c = std::cos(phi);
  const double c2s = std::cosh(2.0 * s);
  const double r2 = r * r;
  const double a2 = a * a;

  const double tau = 1.0 + a2 * r2 - 2.0 * a * r * c;
  if (!(tau > kSingularDenominator)) throw SingularConfiguration("tau vanishes: ring pole");

  const double bal = a * ring.circumference * ring.confinement * probe.displacement;
  const double k1 = bal * bal * (r2 - 1.0) * (r2 - 1.0);
  const double k2 = (a2 - 1.0) * (r2 - 1.0) * tau + tau * (a2 + r2 - 2.0 * a * r * c) * c2s;
  const double k3 = std::sinh(2.0 * s) *
                    ((a2 * r2 * (r2 + 4.0) + a2) * std::cos(chi) +
                     a2 * a * r * (a * r * std::cos(2.0 * phi - chi) - 2.0 * (r2 + 1.0) * std::cos(phi - chi)) -
                     2.0 * a * (r2 * r + r) * std::cos(chi + phi) + r2 * std::cos(chi + 2.0 * phi));
  const double k4 = a2 * a2 * (r2 * r2 - 2.0 * r2 + 2.0) + 2.0 * (a2 - 1.0) * (a2 + r2 - 2.0 * a * r * c) * (r2 - 1.0) * c2s;
  const double k5 = 2.0 * a * r * (a * r * std::cos(2.0 * phi) - 2.0 * (a2 + r2) * c);
  const double k6 = -2.0 * a2 * (r2 * r2 - 4.0 * r2 + 1.0) + 2.0 * r2 * r2 - 2.0 * r2 + 1.0;
  if (k1 == 0.0) return 0.0;
  return k1 * (k2 + k3) / (tau * tau * (k4 + k5 + k6));
}

inline RingRaw ring_raw(const RingParams& ring, const ChannelPoint& channel) {
  return {ring.self_coupling, channel.attenuation, channel.round_trip_phase, ring.confinement, ring.circumference};
}

// Three-term Gaussian QFI evaluated from the output state and its derivative.
inline QfiResult qfi_gaussian_general(const ProbeSpec& probe, const ChannelPoint& channel,
                                      Parameter wrt = Parameter::absorption) {
  const GaussianState st = output_state(probe, channel);
  const StateDerivative ds = state_derivative(probe, channel, wrt);
  const Mat2& sigma = st.covariance;
  const Mat2 inv = sigma.inverse();

  QfiResult q;
  q.term_displacement = ds.d_mean.dot(inv * ds.d_mean);

  if (probe.squeeze != 0.0) {
    const double excess = output_excess_determinant(probe, channel.eta);
    if (excess > kPureStateTolerance) {
      const double det = 1.0 + excess;
      const double p2 = 1.0 / det;
      const Mat2 m = inv * ds.d_covariance;
      q.term_noise = (m * m).trace() / (2.0 * (1.0 + p2));
      // 2 P'^2 / (1 - P^4) with P^2 = 1 / det
      q.term_purity = 2.0 * ds.d_purity * ds.d_purity * det * det / (excess * (det + 1.0));
    } else {
      q.term_noise = qfi_term_noise(probe, channel, wrt);
      q.term_purity = qfi_term_purity(probe, channel, wrt);
    }
  }
  return detail::finish(q, mean_photons(probe));
}

// Coherent probe at any (r, phi): (|beta| L Gamma B e^{alpha_T L / 2})^2.
inline QfiResult qfi_coherent(double mean_photons_in, const RingParams& ring, const ChannelPoint& cp) {
  const double amp = std::sqrt(mean_photons_in) * ring.circumference * ring.confinement * cp.buildup *
                     std::exp(cp.total_absorption * ring.circumference / 2.0);
  QfiResult q;
  q.term_displacement = amp * amp;
  return detail::finish(q, mean_photons_in);
}

inline QfiResult qfi_coherent(double mean_photons_in, const RingParams& ring, const Analyte& analyte) {
  return qfi_coherent(mean_photons_in, ring, channel_point(ring, analyte));
}

// L^2 Gamma^2 B / (1 - e^{-alpha_T L}) with B = a^2 / (1 - a^2): the per-photon
// QFI of a critically coupled ring on resonance.
inline double critical_qfi_per_photon(double circumference, double confinement, double total_absorption) {
  const double x = total_absorption * circumference;
  if (!(x > 0.0)) throw DomainError("lossless ring: critical-coupling QFI diverges");
  const double a2 = std::exp(-x);
  const double b = a2 / (-std::expm1(-x));
  return circumference * circumference * confinement * confinement * b / (-std::expm1(-x));
}

inline double critical_qfi_per_photon(const RingParams& ring, const Analyte& analyte) {
  return critical_qfi_per_photon(ring.circumference, ring.confinement, attenuation(ring, analyte).total_absorption);
}

// The closed forms below take the round-trip phase the ring is operated at;
// the default 0 is a resonance-tuned ring.
inline QfiResult qfi_coherent_critical(double mean_photons_in, const RingParams& ring, const Analyte& analyte,
                                       std::optional<double> phase = 0.0) {
  detail::require_critical(ring, analyte, phase);
  QfiResult q;
  q.term_displacement = mean_photons_in * critical_qfi_per_photon(ring, analyte);
  return detail::finish(q, mean_photons_in);
}

// Any pure single-mode Gaussian probe at critical coupling on resonance.
inline QfiResult qfi_squeezed_optimal(const ProbeSpec& probe, const RingParams& ring, const Analyte& analyte,
                                      std::optional<double> phase = 0.0) {
  probe.validate();
  detail::require_critical(ring, analyte, phase);
  const double per = critical_qfi_per_photon(ring, analyte);
  const double sh = std::sinh(probe.squeeze);
  QfiResult q;
  q.term_displacement = probe.displacement * probe.displacement * per;
  q.term_purity = sh * sh * per;
  return detail::finish(q, mean_photons(probe));
}

inline QfiResult qfi_refractive_index_coherent(double mean_photons_in, const RingParams& ring,
                                               const Analyte& analyte, std::optional<double> phase = 0.0) {
  detail::require_critical(ring, analyte, phase);
  const double k = 4.0 * kPi / ring.wavelength;
  QfiResult q;
  q.term_displacement = mean_photons_in * k * k * critical_qfi_per_photon(ring, analyte);
  return detail::finish(q, mean_photons_in);
}

// Correlated phase-and-loss bound n [4 eta^2 theta'^2 + eta'^2] / (eta (1 - eta)).
inline double qfi_upper_bound(double mean_photons_in, double eta, double d_theta, double d_eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw DomainError("bound undefined for eta outside (0, 1)");
  return mean_photons_in * (4.0 * eta * eta * d_theta * d_theta + d_eta * d_eta) / (eta * (1.0 - eta));
}

// Same bound from a channel point; finite at eta = 0 through the amplitude rate.
inline double qfi_upper_bound(double mean_photons_in, const ChannelPoint& channel,
                              Parameter wrt = Parameter::absorption) {
  const Sensitivity sens = channel.sensitivity(wrt);
  const double eta = channel.eta;
  if (!(eta < 1.0)) throw DomainError("bound undefined at eta = 1");
  const PolarRates pr = polar_rates(sens, eta);
  return mean_photons_in * (4.0 * pr.phase_rate * pr.phase_rate + intensity_information(sens, eta)) / (1.0 - eta);
}

// Ring form of the bound: n L^2 Gamma^2 B / (1 - e^{-alpha_T L}) at r = a.
inline double qfi_upper_bound_ring(double mean_photons_in, const RingParams& ring, const Analyte& analyte) {
  return mean_photons_in * critical_qfi_per_photon(ring, analyte);
}

}  // namespace ringqfi
