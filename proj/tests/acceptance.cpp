// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <string>

#include "oracles.hpp"
#include "ringqfi/commands.hpp"
#include "ringqfi/estimator.hpp"
#include "ringqfi/optimizer.hpp"
#include "ringqfi/qfi.hpp"
#include "ringqfi/strategies.hpp"

using namespace ringqfi;

namespace {

// Tolerances
constexpr double kStdRelTol = 0.005;         // 1: 11.1 within 0.5 %
constexpr double kPenaltyTol = 0.01;         // 2: +-1 percentage point
constexpr double kBreakevenTol = 0.2;        // 3: cm^-1
constexpr double kAttenuationTol = 1e-3;     // 4
constexpr double kGridTol = 1e-3;            // 4
constexpr double kBoundTol = 1e-10;          // 4
constexpr double kSweepRuntimeS = 1.0;        // 4
constexpr double kClosedFormTol = 1e-8;      // 5
constexpr int kClosedFormDraws = 1000;       // 5
constexpr double kSplitTol = 1e-10;          // 6
constexpr int kSplits = 10;                  // 6
constexpr int kOptInstances = 20;            // 7
constexpr double kOptLocTol = 1e-3;          // 7
constexpr double kOptBoundTol = 1e-5;        // 7
constexpr double kOptRuntimeS = 30.0;        // 7
constexpr double kSaturationTol = 1e-10;     // 8
constexpr double kMcSigmas = 3.0;            // 8
constexpr double kMcRuntimeS = 60.0;         // 8
constexpr double kXStarTol = 5e-4;           // 9
constexpr double kDerivTol = 1e-6;           // 10
constexpr int kDerivDraws = 500;             // 10

int failures = 0;

void report(int id, bool ok, const std::string& what) {
  std::printf("[%s] criterion %2d: %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RingParams case_ring(double r) {
  RingParams ring;
  ring.self_coupling = r;
  ring.circumference = circumference_from_radius(um_to_cm(50.0));
  ring.confinement = 0.43;
  ring.intrinsic_absorption = db_per_cm_to_alpha(2.0);
  ring.wavelength = nm_to_cm(1500.0);
  return ring;
}

RingParams r75_ring(double r) {
  RingParams ring = case_ring(r);
  ring.circumference = circumference_from_radius(um_to_cm(75.0));
  ring.intrinsic_absorption = db_per_cm_to_alpha(5.0);
  return ring;
}

void criterion_1() {
  const Analyte an{10.0, 0.0};
  RingParams crit = case_ring(1.0);
  crit.self_coupling = critical_coupling_r(crit, an);
  const double s_crit = 1.0 / std::sqrt(qfi_coherent(1.0, crit, channel_point(crit, an, 0.0)).per_photon);
  const RingParams r093 = case_ring(0.93);
  const double s_093 = 1.0 / std::sqrt(qfi_coherent(1.0, r093, channel_point(r093, an, 0.0)).per_photon);
  const bool ok = std::abs(s_crit / 11.1 - 1) <= kStdRelTol && std::abs(s_093 / 11.1 - 1) <= kStdRelTol;
  report(1, ok, fmt("case-study std per photon: r=a %.4f, r=0.93 %.4f cm^-1 (target 11.1 +-%.1f%%)", s_crit, s_093,
                    100 * kStdRelTol));
}

void criterion_2() {
  bool ok = true;
  std::string msg;
  for (double r : {critical_coupling_r(case_ring(1.0), {10.0, 0.0}), 0.93}) {
    const ComparisonRow row = compare_ring_vs_sp(case_ring(r), {10.0}, false)[0];
    const double fock = row.sp_fock_std_per_photon / row.ring_std_per_photon - 1;
    const double coh = row.sp_coherent_std_per_photon / row.ring_std_per_photon - 1;
    ok = ok && std::abs(fock - 0.12) <= kPenaltyTol && std::abs(coh - 0.23) <= kPenaltyTol;
    msg += fmt("r=%.4f: Fock +%.2f%%, coherent +%.2f%%; ", r, 100 * fock, 100 * coh);
  }
  report(2, ok, msg + fmt("targets 12%% / 23%% +-%.0f pp", 100 * kPenaltyTol));
}

void criterion_3() {
  const BreakevenResult b = ring_breakeven_alpha(case_ring(0.93));
  const bool ok = b.status == BreakevenStatus::crossing && std::abs(b.alpha - 4.4) <= kBreakevenTol;
  const BreakevenResult e = ring_breakeven_alpha_exact(case_ring(0.93));
  report(3, ok, fmt("breakeven (literal) %.4f cm^-1, target 4.4 +- %.1f (exact crossing %.4f)", b.alpha,
                    kBreakevenTol, e.alpha));
}

void criterion_4() {
  const auto t0 = std::chrono::steady_clock::now();
  const Analyte an{20.0, 0.0};
  const double a = attenuation(r75_ring(1.0), an).a;
  constexpr int kPoints = 1000;

  double best_r = 0.0, best_q = -1.0;
  for (int i = 0; i < kPoints; ++i) {
    RingParams ring = r75_ring(0.5 + (0.999 - 0.5) * i / (kPoints - 1));
    const double q = qfi_coherent(1.0, ring, channel_point(ring, an, 0.0)).per_photon;
    if (q > best_q) {
      best_q = q;
      best_r = ring.self_coupling;
    }
  }
  const RingParams crit = r75_ring(a);
  double best_phi = 1.0, best_qp = -1.0;
  for (int i = 0; i < kPoints + 1; ++i) {
    const double phi = -kPi + kTwoPi * i / kPoints;
    const double q = qfi_coherent(1.0, crit, channel_point(crit, an, phi)).per_photon;
    if (q > best_qp) {
      best_qp = q;
      best_phi = phi;
    }
  }
  const double dr = (0.999 - 0.5) / (kPoints - 1);
  const double bound = qfi_upper_bound_ring(1.0, crit, an);
  const double peak = qfi_coherent(1.0, crit, channel_point(crit, an, 0.0)).per_photon;
  const double rel = std::abs(peak - bound) / bound;
  const double elapsed = seconds_since(t0);
  const bool ok = std::abs(a - 0.795) <= kAttenuationTol && std::abs(best_r - a) <= std::max(kGridTol, dr) &&
                  std::abs(best_phi) <= kGridTol && rel <= kBoundTol && elapsed < kSweepRuntimeS;
  report(4, ok, fmt("a=%.5f; r-argmax %.4f (|dr|=%.1e); phi-argmax %.1e; peak vs bound rel %.1e; %.3f s", a, best_r,
                    std::abs(best_r - a), best_phi, rel, elapsed));
}

void criterion_5() {
  const auto t0 = std::chrono::steady_clock::now();
  oracle::Rng rng(505);
  double worst = 0.0;
  bool coherent_zero = true;
  int n = 0;
  while (n < kClosedFormDraws) {
    RingParams ring = case_ring(rng.uniform(0.0, 0.99));
    ring.circumference = rng.uniform(0.005, 0.1);
    ring.confinement = rng.uniform(0.05, 1.0);
    ring.intrinsic_absorption = 0.0;
    const double a = rng.uniform(0.05, 0.99);
    const double alpha = -2 * std::log(a) / (ring.confinement * ring.circumference);
    const ChannelPoint cp = channel_point(ring, {alpha, 0.0}, rng.uniform(-kPi, kPi));
    if (cp.eta < 0.05 || cp.eta > 0.95) continue;
    const ProbeSpec probe{rng.uniform(0, 3), rng.uniform(0, 1.5), rng.uniform(-kPi, kPi), 0.0};
    const QfiResult g = qfi_gaussian_general(probe, cp);
    const double closed =
        qfi_term_noise(probe, cp) + qfi_term_purity(probe, cp) + qfi_term_displacement(probe, ring_raw(ring, cp));
    worst = std::max(worst, std::abs(closed - g.total) / g.total);
    const QfiResult c = qfi_gaussian_general(ProbeSpec::coherent(probe.displacement * probe.displacement + 0.1), cp);
    coherent_zero = coherent_zero && c.term_noise == 0.0 && c.term_purity == 0.0;
    ++n;
  }
  report(5, worst <= kClosedFormTol && coherent_zero,
         fmt("%d draws, worst closed-form vs general rel %.2e (tol %.0e); coherent noise/purity terms exactly 0: %s; "
             "%.2f s",
             n, worst, kClosedFormTol, coherent_zero ? "yes" : "no", seconds_since(t0)));
}

void criterion_6() {
  const Analyte an{20.0, 0.0};
  RingParams ring = r75_ring(1.0);
  ring.self_coupling = attenuation(ring, an).a;
  const ChannelPoint cp = channel_point(ring, an, 0.0);
  const double budget = 50.0;
  oracle::Rng rng(606);
  double lo = INFINITY, hi = -INFINITY;
  for (int i = 0; i < kSplits; ++i) {
    const double q = qfi_gaussian_general(probe_from_split(budget, rng.uniform(0, 1), rng.uniform(-kPi, kPi)), cp).per_photon;
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  const double spread = (hi - lo) / hi;
  report(6, spread <= kSplitTol,
         fmt("%d random splits of %.0f photons at r=a, phi=0: per-photon spread %.1e (tol %.0e)", kSplits, budget, spread,
             kSplitTol));
}

void criterion_7() {
  const auto t0 = std::chrono::steady_clock::now();
  oracle::Rng rng(707);
  double worst_r = 0.0, worst_phi = 0.0, worst_q = 0.0;
  bool all_converged = true;
  for (int i = 0; i < kOptInstances; ++i) {
    RingParams ring = case_ring(0.5);
    ring.circumference = rng.uniform(0.01, 0.1);
    ring.confinement = rng.uniform(0.1, 0.9);
    ring.intrinsic_absorption = rng.uniform(0.0, 3.0);
    double alpha = -1.0;
    while (alpha < 0.0) {
      const double a = rng.uniform(0.5, 0.99);
      alpha = (-2 * std::log(a) / ring.circumference - ring.intrinsic_absorption) / ring.confinement;
    }
    const Analyte an{alpha, 0.0};
    SearchSpec spec;
    spec.photon_budget = rng.uniform(1.0, 100.0);
    const OptimumReport rep = maximize_qfi(spec, ring, an);
    const double a = attenuation(ring, an).a;
    const double bound = critical_qfi_per_photon(ring, an);
    worst_r = std::max(worst_r, std::abs(rep.best.r - a));
    worst_phi = std::max(worst_phi, std::abs(reduce_phase(rep.best.phi)));
    worst_q = std::max(worst_q, std::abs(rep.per_photon_qfi - bound) / bound);
    all_converged = all_converged && rep.converged;
  }
  const double elapsed = seconds_since(t0);
  const bool ok = worst_r < kOptLocTol && worst_phi < kOptLocTol && worst_q < kOptBoundTol && elapsed < kOptRuntimeS;
  report(7, ok,
         fmt("%d instances: max |r*-a| %.1e, max |phi*| %.1e, max rel gap to bound %.1e, all converged: %s; %.2f s",
             kOptInstances, worst_r, worst_phi, worst_q, all_converged ? "yes" : "no", elapsed));
}

void criterion_8() {
  const auto t0 = std::chrono::steady_clock::now();
  const Analyte an{10.0, 0.0};
  RingParams crit = case_ring(1.0);
  crit.self_coupling = critical_coupling_r(crit, an);
  const ChannelPoint cp = channel_point(crit, an, 0.0);
  const double product = error_propagation_variance(1.0, crit, cp) * qfi_coherent(1.0, crit, cp).total;

  McSetup mc;
  mc.beta_sq = 1e6;
  mc.ring = crit;
  mc.ring.self_coupling = 0.98 * crit.self_coupling;
  mc.analyte_true = an;
  mc.trials = 100;
  mc.repetitions = 10000;
  mc.seed = 20240808;
  const McReport rep = mc_simulate(mc);
  const double z = (rep.empirical_variance - rep.predicted_variance) / rep.sampling_error;
  const double elapsed = seconds_since(t0);
  const bool ok = std::abs(product - 1) <= kSaturationTol && std::abs(z) <= kMcSigmas && rep.failures == 0 &&
                  elapsed < kMcRuntimeS;
  report(8, ok,
         fmt("critical Var*Q_C - 1 = %.1e; MC r=0.98a: empirical %.4e vs predicted %.4e (QCRB %.4e), z=%.2f, "
             "failures %d; %.2f s",
             product - 1, rep.empirical_variance, rep.predicted_variance, rep.qcrb_variance, z, rep.failures, elapsed));
}

void criterion_9() {
  const double x = fock_optimal_optical_depth();
  report(9, std::abs(x - 1.5936) <= kXStarTol, fmt("x* = %.6f (target 1.5936 +- %.0e)", x, kXStarTol));
}

void criterion_10() {
  oracle::Rng rng(1010);
  double worst = 0.0;
  int n = 0;
  while (n < kDerivDraws) {
    RingParams ring = case_ring(rng.uniform(0.3, 0.98));
    ring.intrinsic_absorption = rng.uniform(0.0, 1.0);
    ring.intrinsic_index = 2.4;
    const double alpha = rng.uniform(0.5, 30.0);
    const double phi = rng.uniform(-2.0, 2.0);
    const ChannelPoint cp = channel_point(ring, {alpha, 0.0}, phi);
    if (cp.eta < 1e-3) continue;
    const ProbeSpec probe{rng.uniform(0.1, 2.0), rng.uniform(0.05, 1.2), rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const double dphi_dn = kTwoPi * ring.confinement * ring.circumference / ring.wavelength;

    // oracle state map in long double so its rounding stays far below the tolerance
    using LD = long double;
    auto state = [&](LD al, LD dn) {
      const LD a = std::exp(-(LD(ring.intrinsic_absorption) + LD(ring.confinement) * al) * LD(ring.circumference) / 2);
      const LD ph = LD(phi) + LD(dphi_dn) * dn;
      const LD eta = oracle::eta<LD>(ring.self_coupling, a, ph);
      const LD th = oracle::theta<LD>(ring.self_coupling, a, ph);
      const auto s = oracle::s1_covariance<LD>(eta, probe.squeeze, 2 * th + 2 * LD(probe.rotation) - probe.squeeze_phase);
      const auto d = oracle::output_mean<LD>(probe.displacement, eta, th + probe.rotation);
      Eigen::Matrix<LD, 8, 1> v;
      v << eta, th, s(0, 0), s(0, 1), s(1, 1), d(0), d(1), 1 / std::sqrt(s.determinant());
      return v;
    };
    for (Parameter wrt : {Parameter::absorption, Parameter::refractive_index}) {
      const bool ab = wrt == Parameter::absorption;
      const LD h = ab ? 1e-6 * std::max(1.0, alpha) : 1e-6 / dphi_dn;
      const Eigen::Matrix<double, 8, 1> fd =
          (ab ? (state(alpha + h, 0) - state(alpha - h, 0)) / (2 * h) : (state(alpha, h) - state(alpha, -h)) / (2 * h))
              .cast<double>();
      const Sensitivity s = cp.sensitivity(wrt);
      const StateDerivative sd = state_derivative(probe, cp, wrt);
      Eigen::Matrix<double, 8, 1> an;
      an << s.d_eta, s.d_theta, sd.d_covariance(0, 0), sd.d_covariance(0, 1), sd.d_covariance(1, 1), sd.d_mean(0),
          sd.d_mean(1), sd.d_purity;
      // relative to the largest component of each block
      const double scale_ch = std::max(std::abs(fd(0)), std::abs(fd(1)));
      const double scale_cov = fd.segment<3>(2).cwiseAbs().maxCoeff();
      const double scale_mean = fd.segment<2>(5).cwiseAbs().maxCoeff();
      worst = std::max(worst, std::abs(an(0) - fd(0)) / std::max(std::abs(fd(0)), 1e-3 * scale_ch));
      worst = std::max(worst, std::abs(an(1) - fd(1)) / std::max(std::abs(fd(1)), 1e-3 * scale_ch));
      worst = std::max(worst, (an.segment<3>(2) - fd.segment<3>(2)).cwiseAbs().maxCoeff() / scale_cov);
      worst = std::max(worst, (an.segment<2>(5) - fd.segment<2>(5)).cwiseAbs().maxCoeff() / scale_mean);
      worst = std::max(worst, std::abs(an(7) - fd(7)) / std::max(std::abs(fd(7)), 1e-3 * scale_cov));
    }
    ++n;
  }
  report(10, worst <= kDerivTol,
         fmt("%d random configs x 2 parameters: worst analytic vs central-difference rel error %.2e (tol %.0e)", n, worst,
             kDerivTol));
}

}  // namespace

int main() {
  const std::function<void()> criteria[] = {criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                                            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10};
  int id = 1;
  for (const auto& c : criteria) {
    try {
      c();
    } catch (const std::exception& e) {
      report(id, false, std::string("threw: ") + e.what());
    }
    ++id;
  }
  std::printf("%d of 10 criteria passed\n", 10 - failures);
  return failures;
}
