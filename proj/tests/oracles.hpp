#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the library's numerics.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

inline double central_diff(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Five-point stencil, used where the three-point error is too large.
inline double central_diff5(const std::function<double(double)>& f, double x, double h) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12.0 * h);
}

inline double rel_err(double got, double want) {
  const double scale = std::max(std::abs(want), 1e-300);
  return std::abs(got - want) / scale;
}

// Expanded (textbook) ring formulas. Templated so finite-difference checks
// can run them in extended precision.
template <class T>
T eta(T r, T a, T phi) {
  using std::cos;
  return (a * a - 2 * r * a * cos(phi) + r * r) / (1 - 2 * r * a * cos(phi) + r * r * a * a);
}

template <class T>
T theta(T r, T a, T phi) {
  using std::atan2, std::cos, std::sin;
  return std::numbers::pi_v<T> + phi + atan2(r * sin(phi), a - r * cos(phi)) +
         atan2(r * a * sin(phi), 1 - r * a * cos(phi));
}

inline double buildup(double r, double a, double phi) {
  return (1 - r * r) * a * a / (1 - 2 * r * a * std::cos(phi) + r * r * a * a);
}

inline double attenuation(double alpha_i, double gamma, double alpha_a, double length) {
  return std::exp(-(alpha_i + gamma * alpha_a) * length / 2);
}

// Output covariance written out entrywise for squeeze s and angle Theta.
template <class T>
Eigen::Matrix<T, 2, 2> s1_covariance(T eta, T s, T big_theta) {
  using std::cos, std::cosh, std::sin, std::sinh;
  const T sc = sinh(s) * cosh(s);
  const T sh2 = sinh(s) * sinh(s);
  Eigen::Matrix<T, 2, 2> m;
  m << 1 - 2 * eta * sc * cos(big_theta) + 2 * eta * sh2, 2 * eta * sc * sin(big_theta),
      2 * eta * sc * sin(big_theta), 1 + 2 * eta * sc * cos(big_theta) + 2 * eta * sh2;
  return m;
}

// Output means for |beta| after phase psi = theta_R + rotation and loss eta.
template <class T>
Eigen::Matrix<T, 2, 1> output_mean(T beta, T eta, T psi) {
  using std::cos, std::sin, std::sqrt;
  return 2 * beta * sqrt(eta) * Eigen::Matrix<T, 2, 1>(cos(psi), -sin(psi));
}

// Coherent-probe QFI at general (r, phi).
inline double coherent_qfi(double beta_sq, double r, double a, double phi, double length, double gamma) {
  const double tau = 1 + a * a * r * r - 2 * a * r * std::cos(phi);
  return beta_sq * length * length * gamma * gamma * (1 - r * r) * (1 - r * r) * a * a / (tau * tau);
}

// Gaussian QFI from (Sigma, d) and their derivatives, straight from the three-term formula.
inline double gaussian_qfi(const Eigen::Matrix2d& sigma, const Eigen::Matrix2d& dsigma, const Eigen::Vector2d& dd) {
  const Eigen::Matrix2d inv = sigma.inverse();
  const double det = sigma.determinant();
  const double p = 1 / std::sqrt(det);
  const double dp = -0.5 * p / det * (det * (inv * dsigma).trace());
  const Eigen::Matrix2d m = inv * dsigma;
  return (m * m).trace() / (2 * (1 + p * p)) + 2 * dp * dp / (1 - std::pow(p, 4)) + dd.dot(inv * dd);
}

inline double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-14) {
  double flo = f(lo);
  for (int i = 0; i < 200 && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Index of the largest f over an even grid on [lo, hi].
inline double grid_argmax(const std::function<double(double)>& f, double lo, double hi, int n) {
  double best_x = lo;
  double best = -INFINITY;
  for (int i = 0; i < n; ++i) {
    const double x = lo + (hi - lo) * i / (n - 1);
    const double v = f(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  return best_x;
}

inline double fock_sp(double n, double alpha, double length) { return n * length * length / (std::exp(alpha * length) - 1); }
inline double coherent_sp(double n, double alpha, double length) { return n * length * length * std::exp(-alpha * length); }

inline double critical_per_photon(double length, double gamma, double alpha_t) {
  const double a2 = std::exp(-alpha_t * length);
  return length * length * gamma * gamma * (a2 / (1 - a2)) / (1 - a2);
}

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); }
};

// Reference values computed offline with 40-digit arithmetic.
namespace frozen {
inline constexpr double five_db = 1.1512925464970228;
inline constexpr double two_db = 0.46051701859880914;
inline constexpr double r75_alpha_t = 9.7512925464970228;
inline constexpr double r75_a = 0.79472477621797236;
inline constexpr double case_alpha_t = 4.7605170185988091;
inline constexpr double case_a = 0.92794944368785718;
inline constexpr double phase_example = 3163.9393801878257;
inline constexpr double theta_080_090_05 = 5.4891979174225526;
inline constexpr double buildup_093 = 6.2024576382216787;
inline constexpr double buildup_case_critical = 6.1989145785600779;
inline constexpr double purity_s05_eta05 = 0.88681888397007391;
inline constexpr double photons_beta1_s1 = 2.3810978455418157;
inline constexpr double fock_x_star = 1.5936242600400401;
inline constexpr double fock_qfi_opt_alpha10 = 0.0064761023789191486;
inline constexpr double coherent_sp_alpha10 = 0.0054134113294645077;
inline constexpr double case_critical_qfi = 0.0081436542842609982;
inline constexpr double case_std = 11.081290384332478;
inline constexpr double case_index_qfi = 57155303.939479153;
inline constexpr double case_qc_r093 = 0.008140006253796724;
}  // namespace frozen

// Case-study ring: R = 50 um, Gamma = 0.43, 2 dB/cm.
inline constexpr double case_length = 2 * pi * 50e-4;
inline constexpr double case_gamma = 0.43;
// 75 um ring: R = 75 um, Gamma = 0.43, 5 dB/cm, alpha_A = 20.
inline constexpr double r75_length = 2 * pi * 75e-4;

}  // namespace oracle
