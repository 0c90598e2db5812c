#pragma once

// Pure single-mode Gaussian probes in phase space. Quadratures are
// x1 = a^dag + a and x2 = i (a^dag - a), so the vacuum has covariance I.

#include <Eigen/Dense>
#include <cmath>

#include "ringqfi/errors.hpp"
#include "ringqfi/resonator.hpp"

namespace ringqfi {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// R(theta) D(beta) S(s e^{i chi}) |0>, beta real and >= 0.
struct ProbeSpec {
  double displacement = 0.0;  // |beta|
  double squeeze = 0.0;       // s
  double squeeze_phase = 0.0; // chi
  double rotation = 0.0;

  void validate() const {
    if (!(displacement >= 0.0)) throw DomainError("displacement magnitude must be >= 0");
    if (!(squeeze >= 0.0)) throw DomainError("squeeze magnitude must be >= 0");
    if (!std::isfinite(squeeze_phase) || !std::isfinite(rotation)) throw DomainError("probe phases must be finite");
  }

  static ProbeSpec coherent(double mean_photons) { return {std::sqrt(mean_photons), 0.0, 0.0, 0.0}; }
};

struct GaussianState {
  Vec2 mean = Vec2::Zero();
  Mat2 covariance = Mat2::Identity();
};

struct StateDerivative {
  Mat2 d_covariance = Mat2::Zero();
  Vec2 d_mean = Vec2::Zero();
  double d_purity = 0.0;
};

// Phase-space action of a -> e^{i theta} a in the orientation used here.
inline Mat2 phase_rotation(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Mat2 m;
  m << c, s, -s, c;
  return m;
}

namespace detail {

// Traceless part of the covariance for squeeze orientation angle Theta.
inline Mat2 squeeze_shape(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat2 m;
  m << -c, s, s, c;
  return m;
}

inline Mat2 squeeze_shape_derivative(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat2 m;
  m << s, c, c, -s;
  return m;
}

inline Vec2 displacement_direction(double angle) { return {std::cos(angle), -std::sin(angle)}; }

}  // namespace detail

inline double mean_photons(const ProbeSpec& probe) {
  const double sh = std::sinh(probe.squeeze);
  return probe.displacement * probe.displacement + sh * sh;
}

inline GaussianState probe_state(const ProbeSpec& probe) {
  probe.validate();
  const double sh = std::sinh(probe.squeeze);
  const double ch = std::cosh(probe.squeeze);
  GaussianState st;
  st.covariance = (1.0 + 2.0 * sh * sh) * Mat2::Identity() +
                  2.0 * sh * ch * detail::squeeze_shape(2.0 * probe.rotation - probe.squeeze_phase);
  st.mean = 2.0 * probe.displacement * detail::displacement_direction(probe.rotation);
  return st;
}

// Pure loss eta followed by a phase shift theta.
inline GaussianState apply_loss_phase(const GaussianState& state, double eta, double theta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw DomainError("channel transmission must lie in [0, 1]");
  const Mat2 rot = phase_rotation(theta);
  GaussianState out;
  out.mean = std::sqrt(eta) * (rot * state.mean);
  out.covariance = eta * (rot * state.covariance * rot.transpose()) + (1.0 - eta) * Mat2::Identity();
  return out;
}

// det(Sigma) - 1 without cancelling the leading 1.
inline double excess_determinant(const Mat2& sigma) {
  const double p = sigma(0, 0) - 1.0;
  const double q = sigma(1, 1) - 1.0;
  return p * q + p + q - sigma(0, 1) * sigma(1, 0);
}

// det(Sigma) - 1 of the output for a pure probe through loss eta.
inline double output_excess_determinant(const ProbeSpec& probe, double eta) {
  const double sh = std::sinh(probe.squeeze);
  return 4.0 * eta * (1.0 - eta) * sh * sh;
}

inline double purity(const GaussianState& state) {
  const double det = state.covariance.determinant();
  if (!(state.covariance(0, 0) > 0.0 && det > 0.0)) throw DomainError("covariance is not positive definite");
  return 1.0 / std::sqrt(det);
}

// Output state of the ring channel for this probe.
inline GaussianState output_state(const ProbeSpec& probe, const ChannelPoint& channel) {
  return apply_loss_phase(probe_state(probe), channel.eta, channel.theta);
}

// Analytic derivative of the output state with respect to one analyte parameter.
inline StateDerivative state_derivative(const ProbeSpec& probe, const ChannelPoint& channel, Parameter wrt) {
  probe.validate();
  const Sensitivity sens = channel.sensitivity(wrt);
  const double eta = channel.eta;
  const double sh = std::sinh(probe.squeeze);
  const double ch = std::cosh(probe.squeeze);
  const double angle = 2.0 * channel.theta + 2.0 * probe.rotation - probe.squeeze_phase;
  const double d_angle = 2.0 * sens.d_theta;

  StateDerivative out;
  out.d_covariance = 2.0 * sens.d_eta * sh * sh * Mat2::Identity() +
                     2.0 * sh * ch *
                         (sens.d_eta * detail::squeeze_shape(angle) +
                          eta * d_angle * detail::squeeze_shape_derivative(angle));

  const double psi = channel.theta + probe.rotation;
  const PolarRates pr = polar_rates(sens, eta);
  const Vec2 dir_rate{-std::sin(psi), -std::cos(psi)};
  out.d_mean = 2.0 * probe.displacement * (pr.sqrt_eta_rate * detail::displacement_direction(psi) + pr.phase_rate * dir_rate);

  // det = 1 + 4 eta (1 - eta) sinh^2 s
  const double det = 1.0 + output_excess_determinant(probe, eta);
  const double d_det = 4.0 * (1.0 - 2.0 * eta) * sens.d_eta * sh * sh;
  out.d_purity = -0.5 * d_det / (det * std::sqrt(det));
  return out;
}

}  // namespace ringqfi
