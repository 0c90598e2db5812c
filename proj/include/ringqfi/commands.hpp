#pragma once

// The CLI subcommands as functions from a config to a result table.

#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "ringqfi/config.hpp"
#include "ringqfi/errors.hpp"
#include "ringqfi/estimator.hpp"
#include "ringqfi/optimizer.hpp"
#include "ringqfi/parallel.hpp"
#include "ringqfi/qfi.hpp"
#include "ringqfi/strategies.hpp"
#include "ringqfi/table.hpp"

namespace ringqfi {

inline constexpr double kEnergyTolerance = 1e-12;

// eta + (1 - a^2) B / a^2 == 1
inline void check_energy(const ChannelPoint& cp) {
  const double a2 = cp.attenuation * cp.attenuation;
  const double residual = cp.eta + (1.0 - a2) * cp.buildup / a2 - 1.0;
  if (!(std::abs(residual) <= kEnergyTolerance))
    throw InvariantViolation("energy bookkeeping violated: residual " + detail::format_double(residual));
}

namespace detail {

inline ChannelPoint scenario_channel(const RingParams& ring, const Analyte& an, const std::optional<double>& phase) {
  return phase ? channel_point(ring, an, *phase) : channel_point(ring, an);
}

inline double nan() { return std::numeric_limits<double>::quiet_NaN(); }

}  // namespace detail

inline Table run_sweep(const ScenarioConfig& cfg) {
  const Scenario sc = resolve(cfg);
  const SweepSpec sw = resolve_sweep(cfg);
  Table t;
  t.columns = {"value", "qfi_alpha_per_photon", "qfi_n_per_photon", "std_alpha_per_photon", "eta", "theta",
               "buildup", "singular"};
  std::vector<std::vector<Cell>> rows(static_cast<std::size_t>(sw.steps));
  parallel_for(rows.size(), [&](std::size_t i) {
    const double v = sw.value(static_cast<int>(i));
    RingParams ring = sc.ring;
    Analyte an = sc.analyte;
    std::optional<double> phase = sc.phase;
    switch (sw.variable) {
      case SweepVariable::r: ring.self_coupling = v; break;
      case SweepVariable::phi: phase = v; break;
      case SweepVariable::alpha_a: an.absorption = v; break;
    }
    try {
      const ChannelPoint cp = detail::scenario_channel(ring, an, phase);
      check_energy(cp);
      const double qa = qfi_gaussian_general(sc.probe, cp, Parameter::absorption).per_photon;
      const double qn = qfi_gaussian_general(sc.probe, cp, Parameter::refractive_index).per_photon;
      rows[i] = {v, qa, qn, 1.0 / std::sqrt(qa), cp.eta, cp.theta, cp.buildup, false};
    } catch (const SingularConfiguration&) {
      rows[i] = {v, detail::nan(), detail::nan(), detail::nan(), detail::nan(), detail::nan(), detail::nan(), true};
    }
  });
  for (auto& r : rows) t.add(std::move(r));
  return t;
}

inline std::vector<double> alpha_grid(const ScenarioConfig& cfg) {
  const SweepSpec sw = resolve_sweep(cfg);
  if (sw.variable != SweepVariable::alpha_a) throw ConfigError("sweep_variable", "compare needs sweep_variable = alpha_A");
  std::vector<double> out;
  for (int i = 0; i < sw.steps; ++i) out.push_back(sw.value(i));
  return out;
}

inline Table run_compare(const ScenarioConfig& cfg) {
  const Scenario sc = resolve(cfg);
  const std::vector<double> alphas = alpha_grid(cfg);
  Table t;
  t.columns = {"alpha_A", "ring_std", "ring_opt_std", "ring_opt_r", "fock_sp_std", "coherent_sp_std",
               "fock_penalty", "coherent_penalty", "ring_beats_fock"};
  const auto rows = compare_ring_vs_sp(sc.ring, alphas, true, sc.phase, sc.r_critical);
  for (const auto& r : rows) {
    t.add({r.alpha_a, r.ring_std_per_photon, *r.ring_opt_std_per_photon, r.ring_optimal_r, r.sp_fock_std_per_photon,
           r.sp_coherent_std_per_photon, r.sp_fock_std_per_photon / r.ring_std_per_photon - 1.0,
           r.sp_coherent_std_per_photon / r.ring_std_per_photon - 1.0,
           r.ring_std_per_photon < r.sp_fock_std_per_photon});
  }
  return t;
}

inline const char* to_string(BreakevenStatus s) {
  switch (s) {
    case BreakevenStatus::crossing: return "crossing";
    case BreakevenStatus::ring_always_wins: return "ring_always_wins";
    case BreakevenStatus::ring_never_wins: return "ring_never_wins";
  }
  return "unknown";
}

inline Table run_breakeven(const ScenarioConfig& cfg) {
  const Scenario sc = resolve(cfg);
  Table t;
  t.columns = {"variant", "status", "alpha_A"};
  const BreakevenResult lit = ring_breakeven_alpha(sc.ring);
  const BreakevenResult exact = ring_breakeven_alpha_exact(sc.ring);
  t.add({std::string("literal"), std::string(to_string(lit.status)), lit.alpha});
  t.add({std::string("exact"), std::string(to_string(exact.status)), exact.alpha});
  return t;
}

struct OptimizeOutcome {
  Table table;
  bool converged = false;
};

inline SearchSpec search_spec(const ScenarioConfig& cfg, const Scenario& sc) {
  SearchSpec spec;
  spec.photon_budget = cfg.photon_budget.value_or(mean_photons(sc.probe));
  detail::check(spec.photon_budget > 0.0, "photon_budget", "must be > 0");
  spec.a_max = cfg.a_max.value_or(spec.a_max);
  detail::check(spec.a_max > 0.0 && spec.a_max <= 1.0, "a_max", "must lie in (0, 1]");
  spec.tolerance = cfg.tolerance.value_or(spec.tolerance);
  detail::check(spec.tolerance > 0.0, "tolerance", "must be > 0");
  if (cfg.max_restarts) {
    detail::check(*cfg.max_restarts >= 0 && *cfg.max_restarts < 1000, "max_restarts", "must lie in [0, 1000)");
    spec.max_restarts = static_cast<int>(*cfg.max_restarts);
  }
  return spec;
}

inline OptimizeOutcome run_optimize(const ScenarioConfig& cfg) {
  const Scenario sc = resolve(cfg);
  const SearchSpec spec = search_spec(cfg, sc);
  const OptimumReport rep = maximize_qfi(spec, sc.ring, sc.analyte);
  const double bound = critical_qfi_per_photon(sc.ring, sc.analyte);
  OptimizeOutcome out;
  out.converged = rep.converged;
  out.table.columns = {"r", "phi", "squeeze_s", "squeeze_chi", "rotation", "beta", "attenuation",
                       "per_photon_qfi", "bound_per_photon", "bound_residual", "converged", "iterations",
                       "restarts"};
  out.table.add({rep.best.r, rep.best.phi, rep.best.squeeze, rep.best.squeeze_phase, rep.best.rotation,
                 rep.best.displacement, rep.attenuation, rep.per_photon_qfi, bound,
                 std::abs(rep.per_photon_qfi - bound) / bound, rep.converged,
                 static_cast<long long>(rep.iterations), static_cast<long long>(rep.restarts_used)});
  return out;
}

inline McSetup mc_setup(const ScenarioConfig& cfg, const Scenario& sc) {
  McSetup m;
  m.beta_sq = sc.beta_sq;
  detail::check(m.beta_sq > 0.0, "beta_sq", "Monte Carlo needs beta_sq > 0");
  m.ring = sc.ring;
  m.analyte_true = sc.analyte;
  m.phase = sc.phase;
  if (cfg.mc_r_over_a) {
    detail::check(*cfg.mc_r_over_a > 0.0, "mc_r_over_a", "must be > 0");
    m.ring.self_coupling = *cfg.mc_r_over_a * attenuation(sc.ring, sc.analyte).a;
    detail::check(m.ring.self_coupling <= 1.0, "mc_r_over_a", "gives r > 1");
  }
  if (cfg.trials) {
    detail::check(*cfg.trials >= 1 && *cfg.trials <= 1000000000, "trials", "must be >= 1");
    m.trials = static_cast<int>(*cfg.trials);
  }
  if (cfg.repetitions) {
    detail::check(*cfg.repetitions >= 1 && *cfg.repetitions <= 1000000000, "repetitions", "must be >= 1");
    m.repetitions = static_cast<int>(*cfg.repetitions);
  }
  m.seed = cfg.seed.value_or(1);
  return m;
}

inline Table run_mc(const ScenarioConfig& cfg) {
  const Scenario sc = resolve(cfg);
  const McSetup setup = mc_setup(cfg, sc);
  const McReport rep = mc_simulate(setup);
  Table t;
  t.columns = {"r", "empirical_variance", "predicted_variance", "qcrb_variance", "sampling_error",
               "z_score", "bias", "failures", "repetitions", "trials", "seed"};
  const double z = rep.sampling_error > 0.0
                       ? (rep.empirical_variance - rep.predicted_variance) / rep.sampling_error
                       : detail::nan();
  t.add({setup.ring.self_coupling, rep.empirical_variance, rep.predicted_variance, rep.qcrb_variance,
         rep.sampling_error, z, rep.bias, static_cast<long long>(rep.failures),
         static_cast<long long>(setup.repetitions), static_cast<long long>(setup.trials),
         std::to_string(setup.seed)});
  return t;
}

inline Table run_design(const ScenarioConfig& cfg) {
  const Scenario sc = resolve(cfg);
  const double r_star = critical_coupling_r(sc.ring, sc.analyte);
  using namespace std::complex_literals;
  const MziPhases mzi = mzi_phases_for_coupling(1i * r_star);
  const double q = critical_qfi_per_photon(sc.ring, sc.analyte);
  const double std_pp = 1.0 / std::sqrt(q);
  const long long trials = cfg.trials.value_or(1);
  detail::check(trials >= 1, "trials", "must be >= 1");

  double target = detail::nan();
  double total = detail::nan();
  if (cfg.target_std_per_cm) {
    target = *cfg.target_std_per_cm;
    detail::check(target > 0.0, "target_std_per_cm", "must be > 0");
    total = 1.0 / (target * target * q);
  }
  const double fraction = cfg.robustness_fraction.value_or(0.2);
  detail::check(fraction >= 0.0 && fraction < 1.0, "robustness_fraction", "must lie in [0, 1)");
  RingParams fixed = sc.ring;
  fixed.self_coupling = r_star;
  bool robust = true;
  for (const auto& row : robustness_sweep(fixed, sc.analyte.absorption, fraction)) robust = robust && row.ring_wins;

  Table t;
  t.columns = {"r_star", "mzi_phi1", "mzi_phi2", "qfi_per_photon", "std_per_photon", "target_std", "trials",
               "photons_total", "photons_per_trial", "robustness_fraction", "ring_wins_over_band"};
  t.add({r_star, mzi.phi1, mzi.phi2, q, std_pp, target, trials, total, total / static_cast<double>(trials), fraction,
         robust});
  return t;
}

}  // namespace ringqfi
