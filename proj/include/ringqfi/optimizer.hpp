#pragma once

// Multi-start bounded Nelder-Mead search of the Gaussian QFI over ring and
// probe parameters, plus critical-coupling design helpers.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "ringqfi/errors.hpp"
#include "ringqfi/gaussian.hpp"
#include "ringqfi/parallel.hpp"
#include "ringqfi/qfi.hpp"
#include "ringqfi/resonator.hpp"
#include "ringqfi/strategies.hpp"

namespace ringqfi {

template <std::size_t N>
struct Box {
  std::array<double, N> lo{};
  std::array<double, N> hi{};

  void validate() const {
    for (std::size_t i = 0; i < N; ++i)
      if (!(lo[i] <= hi[i]) || !std::isfinite(lo[i]) || !std::isfinite(hi[i]))
        throw DomainError("bounds must be finite and ordered");
  }

  // Reflect an excursion back through the violated face, then clamp.
  double fold(std::size_t i, double x) const {
    if (x > hi[i]) x = hi[i] - (x - hi[i]);
    if (x < lo[i]) x = lo[i] + (lo[i] - x);
    return std::clamp(x, lo[i], hi[i]);
  }

  std::array<double, N> fold(std::array<double, N> x) const {
    for (std::size_t i = 0; i < N; ++i) x[i] = fold(i, x[i]);
    return x;
  }
};

template <std::size_t N>
struct SimplexResult {
  std::array<double, N> x{};
  double value = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

// Minimizes f over the box. Stops when (f_worst - f_best) <= tol * (|f_best| + tiny).
template <std::size_t N, typename F>
SimplexResult<N> nelder_mead(F&& f, const Box<N>& box, std::array<double, N> start, double rel_step, double tol,
                             int max_iterations) {
  using Point = std::array<double, N>;
  constexpr double kTiny = 1e-300;
  std::array<Point, N + 1> pts;
  std::array<double, N + 1> val;
  start = box.fold(start);
  pts[0] = start;
  for (std::size_t i = 0; i < N; ++i) {
    Point p = start;
    const double step = rel_step * (box.hi[i] - box.lo[i]);
    p[i] = (p[i] + step <= box.hi[i]) ? p[i] + step : p[i] - step;
    pts[i + 1] = box.fold(p);
  }
  for (std::size_t i = 0; i <= N; ++i) val[i] = f(pts[i]);

  SimplexResult<N> out;
  std::array<std::size_t, N + 1> order;
  for (out.iterations = 0; out.iterations < max_iterations; ++out.iterations) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return val[a] < val[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[N - 1];
    if (std::isfinite(val[worst]) && val[worst] - val[best] <= tol * (std::abs(val[best]) + kTiny)) {
      out.converged = true;
      break;
    }

    Point centroid{};
    for (std::size_t k = 0; k < N; ++k) {
      const std::size_t j = order[k];
      for (std::size_t i = 0; i < N; ++i) centroid[i] += pts[j][i] / N;
    }
    auto along = [&](double t) {
      Point p;
      for (std::size_t i = 0; i < N; ++i) p[i] = centroid[i] + t * (pts[worst][i] - centroid[i]);
      return box.fold(p);
    };

    const Point xr = along(-1.0);
    const double fr = f(xr);
    if (fr < val[best]) {
      const Point xe = along(-2.0);
      const double fe = f(xe);
      if (fe < fr) {
        pts[worst] = xe;
        val[worst] = fe;
      } else {
        pts[worst] = xr;
        val[worst] = fr;
      }
      continue;
    }
    if (fr < val[second]) {
      pts[worst] = xr;
      val[worst] = fr;
      continue;
    }
    const Point xc = fr < val[worst] ? along(-0.5) : along(0.5);
    const double fc = f(xc);
    if (fc < std::min(fr, val[worst])) {
      pts[worst] = xc;
      val[worst] = fc;
      continue;
    }
    for (std::size_t k = 1; k <= N; ++k) {
      const std::size_t j = order[k];
      for (std::size_t i = 0; i < N; ++i) pts[j][i] = pts[best][i] + 0.5 * (pts[j][i] - pts[best][i]);
      pts[j] = box.fold(pts[j]);
      val[j] = f(pts[j]);
    }
  }
  const std::size_t best =
      static_cast<std::size_t>(std::min_element(val.begin(), val.end()) - val.begin());
  out.x = pts[best];
  out.value = val[best];
  return out;
}

// Search variables: r, phi, squeeze fraction f = sinh^2 s / budget, chi.
struct SearchSpec {
  double photon_budget = 1.0;
  Box<4> bounds{{0.0, -kPi, 0.0, -kPi}, {1.0, kPi, 1.0, kPi}};
  double a_max = 0.99;
  double tolerance = 1e-10;
  int max_restarts = 3;
  int grid_per_axis = 3;
  int max_iterations = 4000;
  unsigned threads = 0;

  void validate() const {
    if (!(photon_budget > 0.0)) throw DomainError("photon_budget must be > 0");
    bounds.validate();
    if (bounds.lo[0] < 0.0 || bounds.hi[0] > 1.0) throw DomainError("r bounds must lie in [0, 1]");
    if (bounds.lo[2] < 0.0 || bounds.hi[2] > 1.0) throw DomainError("squeeze fraction bounds must lie in [0, 1]");
    if (!(a_max > 0.0 && a_max <= 1.0)) throw DomainError("a_max must lie in (0, 1]");
    if (!(tolerance > 0.0)) throw DomainError("tolerance must be > 0");
    if (max_restarts < 0) throw DomainError("max_restarts must be >= 0");
    if (grid_per_axis < 1) throw DomainError("grid_per_axis must be >= 1");
  }
};

struct OptimumParams {
  double r = 0.0;
  double phi = 0.0;
  double squeeze = 0.0;
  double squeeze_phase = 0.0;
  double rotation = 0.0;
  double displacement = 0.0;
};

struct OptimumReport {
  OptimumParams best;
  double best_qfi = 0.0;
  double per_photon_qfi = 0.0;
  double best_seed_per_photon = 0.0;
  double attenuation = 0.0;
  bool converged = false;
  int iterations = 0;
  int restarts_used = 0;
  int seeds = 0;
};

inline double critical_coupling_r(const RingParams& ring, const Analyte& analyte) {
  return attenuation(ring, analyte).a;
}

inline ProbeSpec probe_from_split(double budget, double fraction, double chi) {
  fraction = std::clamp(fraction, 0.0, 1.0);
  ProbeSpec p;
  p.displacement = std::sqrt((1.0 - fraction) * budget);
  p.squeeze = std::asinh(std::sqrt(fraction * budget));
  p.squeeze_phase = chi;
  return p;
}

inline double reduce_phase(double phi) {
  double x = std::remainder(phi, kTwoPi);
  if (x <= -kPi) x += kTwoPi;
  return x;
}

inline OptimumReport maximize_qfi(const SearchSpec& spec, const RingParams& ring_fixed, const Analyte& analyte) {
  spec.validate();
  const double a = attenuation(ring_fixed, analyte).a;
  if (a > spec.a_max) throw DomainError("round-trip attenuation a exceeds a_max");

  auto per_photon = [&](const std::array<double, 4>& x) {
    RingParams ring = ring_fixed;
    ring.self_coupling = x[0];
    const ProbeSpec probe = probe_from_split(spec.photon_budget, x[2], x[3]);
    try {
      return qfi_gaussian_general(probe, channel_point(ring, analyte, x[1])).per_photon;
    } catch (const SingularConfiguration&) {
      return 0.0;
    }
  };
  auto objective = [&](const std::array<double, 4>& x) { return -per_photon(x); };

  // Seeds at cell centres of a uniform grid.
  const int g = spec.grid_per_axis;
  std::vector<std::array<double, 4>> seeds;
  for (int i0 = 0; i0 < g; ++i0)
    for (int i1 = 0; i1 < g; ++i1)
      for (int i2 = 0; i2 < g; ++i2)
        for (int i3 = 0; i3 < g; ++i3) {
          const std::array<int, 4> idx{i0, i1, i2, i3};
          std::array<double, 4> x;
          for (std::size_t k = 0; k < 4; ++k)
            x[k] = spec.bounds.lo[k] + (idx[k] + 0.5) / g * (spec.bounds.hi[k] - spec.bounds.lo[k]);
          seeds.push_back(x);
        }

  struct Run {
    SimplexResult<4> res;
    double seed_value = 0.0;
    int restarts = 0;
    int iterations = 0;
  };
  std::vector<Run> runs(seeds.size());
  parallel_for(
      seeds.size(),
      [&](std::size_t i) {
        Run& run = runs[i];
        run.seed_value = per_photon(seeds[i]);
        run.res = nelder_mead(objective, spec.bounds, seeds[i], 0.1, spec.tolerance, spec.max_iterations);
        run.iterations = run.res.iterations;
        for (int k = 0; k < spec.max_restarts; ++k) {
          const double before = run.res.value;
          SimplexResult<4> again =
              nelder_mead(objective, spec.bounds, run.res.x, 0.01, spec.tolerance, spec.max_iterations);
          run.iterations += again.iterations;
          ++run.restarts;
          const bool improved = again.value < before - spec.tolerance * std::abs(before);
          if (again.value <= before) run.res = again;
          if (!improved && again.converged) break;
        }
      },
      spec.threads == 0 ? default_threads() : spec.threads);

  OptimumReport rep;
  rep.seeds = static_cast<int>(seeds.size());
  rep.attenuation = a;
  std::size_t best = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    rep.best_seed_per_photon = std::max(rep.best_seed_per_photon, runs[i].seed_value);
    rep.iterations += runs[i].iterations;
    if (runs[i].res.value < runs[best].res.value) best = i;
  }
  const Run& win = runs[best];
  const ProbeSpec probe = probe_from_split(spec.photon_budget, win.res.x[2], win.res.x[3]);
  rep.best = {win.res.x[0], reduce_phase(win.res.x[1]), probe.squeeze, probe.squeeze_phase, 0.0, probe.displacement};
  rep.per_photon_qfi = -win.res.value;
  if (rep.per_photon_qfi < rep.best_seed_per_photon) rep.per_photon_qfi = rep.best_seed_per_photon;
  rep.best_qfi = rep.per_photon_qfi * mean_photons(probe);
  rep.converged = win.res.converged;
  rep.restarts_used = win.restarts;
  return rep;
}

struct MziPhases {
  double phi1 = 0.0;
  double phi2 = 0.0;
};

// Canonical inverse of mzi_coupling: phi1 - phi2 in [0, pi], phi1 + phi2 in (-2 pi, 2 pi].
inline MziPhases mzi_phases_for_coupling(std::complex<double> rho) {
  const double mag = std::abs(rho);
  constexpr double kSlack = 1e-15;
  if (!(mag <= 1.0 + kSlack)) throw DomainError("|rho| must be <= 1");
  const double diff = 2.0 * std::acos(std::min(mag, 1.0));
  double sum = 0.0;
  if (mag > 0.0) {
    sum = 2.0 * (std::arg(rho) - kPi / 2.0);
    if (sum <= -kTwoPi) sum += 2.0 * kTwoPi;
  }
  return {(sum + diff) / 2.0, (sum - diff) / 2.0};
}

struct RobustnessRow {
  double alpha_a = 0.0;
  double ring_std_per_photon = 0.0;
  double ring_opt_std_per_photon = 0.0;
  double sp_best_std_per_photon = 0.0;
  bool ring_wins = false;
};

// Fixed-r ring (on resonance) against the optimal-length Fock single pass over
// alpha_target * [1 - fraction, 1 + fraction].
inline std::vector<RobustnessRow> robustness_sweep(const RingParams& ring, double alpha_target, double fraction,
                                                   int points = 41) {
  if (!(fraction >= 0.0 && fraction < 1.0)) throw DomainError("fraction must lie in [0, 1)");
  if (!(alpha_target > 0.0)) throw DomainError("alpha_target must be > 0");
  if (points < 2 || fraction == 0.0) points = 1;
  std::vector<RobustnessRow> rows;
  rows.reserve(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.0 : -1.0 + 2.0 * i / (points - 1);
    const double al = alpha_target * (1.0 + fraction * t);
    const ComparisonRow c = compare_point(ring, al, true);
    RobustnessRow row;
    row.alpha_a = al;
    row.ring_std_per_photon = c.ring_std_per_photon;
    row.ring_opt_std_per_photon = *c.ring_opt_std_per_photon;
    row.sp_best_std_per_photon = c.sp_fock_std_per_photon;
    row.ring_wins = c.ring_std_per_photon < c.sp_fock_std_per_photon;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ringqfi
