#pragma once

// Single-pass and multi-pass benchmarks and the ring-versus-single-pass comparison.

#include <cmath>
#include <optional>
#include <vector>

#include "ringqfi/errors.hpp"
#include "ringqfi/qfi.hpp"
#include "ringqfi/resonator.hpp"
#include "ringqfi/roots.hpp"

namespace ringqfi {

struct SinglePassSetup {
  double analyte_length = 0.0;  // L [cm]
  double photons = 0.0;         // N0 for Fock, |beta|^2 for coherent

  double transmission(double alpha_a) const { return std::exp(-alpha_a * analyte_length); }
};

enum class SinglePassProbe { fock, coherent };

inline double sp_fock_qfi(double photons, double alpha_a, double length) {
  if (!(alpha_a > 0.0)) throw DomainError("Fock single-pass information diverges for alpha_A <= 0");
  if (!(length > 0.0) || !(photons > 0.0)) throw DomainError("length and photons must be > 0");
  return photons * length * length / std::expm1(alpha_a * length);
}

inline double sp_coherent_qfi(double photons, double alpha_a, double length) {
  if (!(alpha_a >= 0.0)) throw DomainError("alpha_A must be >= 0");
  if (!(length > 0.0) || !(photons > 0.0)) throw DomainError("length and photons must be > 0");
  return photons * length * length * std::exp(-alpha_a * length);
}

inline double sp_qfi(SinglePassProbe probe, const SinglePassSetup& setup, double alpha_a) {
  return probe == SinglePassProbe::fock ? sp_fock_qfi(setup.photons, alpha_a, setup.analyte_length)
                                        : sp_coherent_qfi(setup.photons, alpha_a, setup.analyte_length);
}

// x* solving 2 (e^x - 1) = x e^x, so that L_opt = x* / alpha_A.
inline double fock_optimal_optical_depth() {
  static const double x = bracketed_root([](double v) { return 2.0 * std::expm1(v) - v * std::exp(v); }, 0.5, 10.0);
  return x;
}

inline double sp_fock_optimal_length(double alpha_a) {
  if (!(alpha_a > 0.0)) throw DomainError("alpha_A must be > 0");
  return fock_optimal_optical_depth() / alpha_a;
}

inline double sp_coherent_optimal_length(double alpha_a) {
  if (!(alpha_a > 0.0)) throw DomainError("alpha_A must be > 0");
  return 2.0 / alpha_a;
}

inline double sp_fock_optimal_qfi_per_photon(double alpha_a) {
  return sp_fock_qfi(1.0, alpha_a, sp_fock_optimal_length(alpha_a));
}

inline double sp_coherent_optimal_qfi_per_photon(double alpha_a) {
  return sp_coherent_qfi(1.0, alpha_a, sp_coherent_optimal_length(alpha_a));
}

// k traversals of a fixed-length analyte equal one pass through k * L0.
inline double multipass_qfi(int passes, double base_length, SinglePassProbe probe, double photons, double alpha_a) {
  if (passes < 1) throw DomainError("passes must be >= 1");
  return sp_qfi(probe, {passes * base_length, photons}, alpha_a);
}

// csch^-1(y) = ln(1/y + sqrt(1/y^2 + 1))
inline double acsch(double y) {
  return std::asinh(1.0 / y);
}

// Per-photon QFI of a ring critically coupled at alpha_A (r = a(alpha_A)).
inline double ring_critical_qfi_per_photon(const RingParams& ring, double alpha_a) {
  return critical_qfi_per_photon(ring.circumference, ring.confinement,
                                 ring.intrinsic_absorption + ring.confinement * alpha_a);
}

enum class BreakevenStatus { crossing, ring_always_wins, ring_never_wins };

struct BreakevenResult {
  BreakevenStatus status = BreakevenStatus::ring_never_wins;
  double alpha = 0.0;  // lower edge of the window where the ring wins [1/cm]
};

inline constexpr double kBreakevenTolerance = 1e-6;

namespace detail {

// First -/+ sign change of `margin` on a log grid of optical depths, refined by bisection.
template <typename F>
BreakevenResult lower_crossing(F&& margin, const RingParams& ring) {
  const double scale = 1.0 / (ring.confinement * ring.circumference);  // alpha with Gamma alpha L = 1
  const double lo = 1e-9 * scale;
  const double hi = 50.0 * scale;
  constexpr int kGrid = 4000;
  double prev_x = lo;
  double prev = margin(lo);
  if (prev > 0.0) return {BreakevenStatus::ring_always_wins, 0.0};
  for (int i = 1; i <= kGrid; ++i) {
    const double x = lo * std::pow(hi / lo, static_cast<double>(i) / kGrid);
    const double m = margin(x);
    if (prev <= 0.0 && m > 0.0) {
      double a = prev_x;
      double b = x;
      while (b - a > kBreakevenTolerance * std::max(1.0, b)) {
        const double mid = 0.5 * (a + b);
        (margin(mid) > 0.0 ? b : a) = mid;
      }
      return {BreakevenStatus::crossing, 0.5 * (a + b)};
    }
    prev = m;
    prev_x = x;
  }
  return {BreakevenStatus::ring_never_wins, 0.0};
}

}  // namespace detail

// alpha_I L <~ 2 csch^-1(1.61 / (L Gamma alpha_A)) - Gamma alpha_A L, with the rounded constant 1.61.
inline double breakeven_margin_literal(const RingParams& ring, double alpha_a) {
  const double x = ring.circumference * ring.confinement * alpha_a;
  return 2.0 * acsch(1.61 / x) - x - ring.intrinsic_absorption * ring.circumference;
}

inline double breakeven_margin_exact(const RingParams& ring, double alpha_a) {
  return std::log(ring_critical_qfi_per_photon(ring, alpha_a) / sp_fock_optimal_qfi_per_photon(alpha_a));
}

inline BreakevenResult ring_breakeven_alpha(const RingParams& ring) {
  if (!(ring.confinement > 0.0)) throw DomainError("confinement must be > 0");
  ring.validate();
  return detail::lower_crossing([&](double al) { return breakeven_margin_literal(ring, al); }, ring);
}

inline BreakevenResult ring_breakeven_alpha_exact(const RingParams& ring) {
  if (!(ring.confinement > 0.0)) throw DomainError("confinement must be > 0");
  ring.validate();
  return detail::lower_crossing([&](double al) { return breakeven_margin_exact(ring, al); }, ring);
}

struct ComparisonRow {
  double alpha_a = 0.0;
  double ring_std_per_photon = 0.0;          // fixed r
  std::optional<double> ring_opt_std_per_photon;  // r = a(alpha_A)
  double ring_optimal_r = 0.0;
  double sp_fock_std_per_photon = 0.0;
  double sp_coherent_std_per_photon = 0.0;
};

// Per-photon standard deviations 1/sqrt(QFI). `phi` pins the round-trip phase
// (resonance-tuned ring); nullopt uses the geometric phase.
inline ComparisonRow compare_point(const RingParams& ring, double alpha_a, bool optimize_r,
                                   std::optional<double> phi = 0.0, double index = 0.0) {
  const Analyte an{alpha_a, index};
  const ChannelPoint cp = phi ? channel_point(ring, an, *phi) : channel_point(ring, an);
  ComparisonRow row;
  row.alpha_a = alpha_a;
  row.ring_std_per_photon = 1.0 / std::sqrt(qfi_coherent(1.0, ring, cp).per_photon);
  row.ring_optimal_r = cp.attenuation;
  if (optimize_r) row.ring_opt_std_per_photon = 1.0 / std::sqrt(ring_critical_qfi_per_photon(ring, alpha_a));
  row.sp_fock_std_per_photon = 1.0 / std::sqrt(sp_fock_optimal_qfi_per_photon(alpha_a));
  row.sp_coherent_std_per_photon = 1.0 / std::sqrt(sp_coherent_optimal_qfi_per_photon(alpha_a));
  return row;
}

// track_critical re-couples the ring to r = a at every alpha_A.
inline std::vector<ComparisonRow> compare_ring_vs_sp(const RingParams& ring, const std::vector<double>& alphas,
                                                     bool optimize_r, std::optional<double> phi = 0.0,
                                                     bool track_critical = false) {
  if (alphas.empty()) throw DomainError("alpha range is empty");
  std::vector<ComparisonRow> rows;
  rows.reserve(alphas.size());
  for (double al : alphas) {
    RingParams rg = ring;
    if (track_critical) rg.self_coupling = attenuation(ring, {al, 0.0}).a;
    rows.push_back(compare_point(rg, al, optimize_r, phi));
  }
  return rows;
}

}  // namespace ringqfi
