#pragma once

// Photon-counting (intensity) estimation of alpha_A: analytic error propagation
// and a Monte Carlo check against it.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "ringqfi/errors.hpp"
#include "ringqfi/parallel.hpp"
#include "ringqfi/qfi.hpp"
#include "ringqfi/resonator.hpp"
#include "ringqfi/roots.hpp"

namespace ringqfi {

inline double intensity_variance(double n_in, double var_in, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw DomainError("eta must lie in [0, 1]");
  return eta * eta * var_in + eta * (1.0 - eta) * n_in;
}

// Relative to (Gamma L)^2, below this d(eta)^2/eta counts as zero.
inline constexpr double kIdentifiabilityFloor = 1e-28;

// Var(n) / |d<n>/d alpha_A|^2 for a coherent probe, i.e. 1 / (|beta|^2 eta'^2 / eta).
// At eta = 0 the 0/0 is replaced by its limit.
inline double error_propagation_variance(double beta_sq, const RingParams& ring, const ChannelPoint& cp) {
  if (!(beta_sq > 0.0)) throw DomainError("beta_sq must be > 0");
  const double info = intensity_information(cp.sensitivity(Parameter::absorption), cp.eta);
  const double scale = ring.confinement * ring.circumference;
  if (!(info > kIdentifiabilityFloor * scale * scale) || info == 0.0)
    throw NonIdentifiable("mean photon count does not depend on alpha_A here");
  return 1.0 / (beta_sq * info);
}

inline double error_propagation_variance(double beta_sq, const RingParams& ring, const Analyte& analyte) {
  return error_propagation_variance(beta_sq, ring, channel_point(ring, analyte));
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 1));
}

// Portable Poisson sampler: multiplication method below mean 10, PTRS
// (transformed rejection with squeeze) above. Same stream on every platform.
class PoissonSampler {
 public:
  explicit PoissonSampler(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  std::uint64_t operator()(double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) throw DomainError("Poisson mean must be finite and >= 0");
    if (mean == 0.0) return 0;
    return mean < 10.0 ? knuth(mean) : ptrs(mean);
  }

 private:
  std::uint64_t knuth(double mean) {
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double prod = uniform();
    while (prod > limit) {
      ++k;
      prod *= uniform();
    }
    return k;
  }

  std::uint64_t ptrs(double mean) {
    const double log_mean = std::log(mean);
    const double smu = std::sqrt(mean);
    const double b = 0.931 + 2.53 * smu;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
      const double u = uniform() - 0.5;
      const double v = uniform();
      const double us = 0.5 - std::abs(u);
      const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
      if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
      if (k < 0.0 || (us < 0.013 && v > us)) continue;
      if (std::log(v * inv_alpha / (a / (us * us) + b)) <= -mean + k * log_mean - std::lgamma(k + 1.0))
        return static_cast<std::uint64_t>(k);
    }
  }

  std::mt19937_64 gen_;
};

struct McSetup {
  double beta_sq = 1e6;
  RingParams ring;
  Analyte analyte_true;
  std::optional<double> phase = 0.0;  // pinned round-trip phase; nullopt = geometric
  int trials = 100;                   // nu
  int repetitions = 10000;
  std::uint64_t seed = 1;
  bool noiseless = false;             // counts replaced by their mean
  unsigned threads = 0;               // 0 = hardware concurrency

  void validate() const {
    if (!(beta_sq > 0.0)) throw DomainError("beta_sq must be > 0");
    if (trials < 1) throw DomainError("trials must be >= 1");
    if (repetitions < 1) throw DomainError("repetitions must be >= 1");
    ring.validate();
    analyte_true.validate();
  }
};

struct McReport {
  double empirical_variance = 0.0;
  double predicted_variance = 0.0;
  double qcrb_variance = 0.0;
  double sampling_error = 0.0;
  double bias = 0.0;
  double mean_estimate = 0.0;
  int failures = 0;
  int successes = 0;
};

namespace detail {

inline ChannelPoint mc_channel(const McSetup& s, double alpha) {
  const Analyte an{alpha, s.analyte_true.index};
  return s.phase ? channel_point(s.ring, an, *s.phase) : channel_point(s.ring, an);
}

// Walks from alpha0 toward `end` and stops at the first turning point of eta,
// so the returned edge bounds the monotone branch that contains alpha0.
inline double monotone_edge(const McSetup& s, double alpha0, double end, double slope0) {
  constexpr int kGrid = 256;
  auto slope = [&](double al) { return mc_channel(s, al).d_eta_d_alpha; };
  double prev = alpha0;
  for (int i = 1; i <= kGrid; ++i) {
    const double x = alpha0 + (end - alpha0) * i / kGrid;
    const double g = slope(x);
    if (g * slope0 <= 0.0) {
      if (g == 0.0) return x;
      return bracketed_root(slope, std::min(prev, x), std::max(prev, x));
    }
    prev = x;
  }
  return end;
}

}  // namespace detail

inline McReport mc_simulate(const McSetup& setup) {
  setup.validate();
  const double alpha0 = setup.analyte_true.absorption;
  const ChannelPoint cp0 = detail::mc_channel(setup, alpha0);
  const double nu = setup.trials;

  McReport rep;
  rep.predicted_variance = error_propagation_variance(setup.beta_sq, setup.ring, cp0) / nu;
  rep.qcrb_variance = 1.0 / (nu * qfi_coherent(setup.beta_sq, setup.ring, cp0).total);

  // Inversion bracket of +-10 predicted standard deviations, kept inside alpha >= 0
  // and inside the monotone branch of the mean count that holds alpha0.
  const double slope0 = cp0.d_eta_d_alpha;
  if (slope0 == 0.0) throw NonIdentifiable("mean count is stationary at the true value");
  const double half = 10.0 * std::sqrt(rep.predicted_variance);
  const double lo = detail::monotone_edge(setup, alpha0, std::max(0.0, alpha0 - half), slope0);
  const double hi = detail::monotone_edge(setup, alpha0, alpha0 + half, slope0);
  auto mean_count = [&](double alpha) { return setup.beta_sq * detail::mc_channel(setup, alpha).eta; };
  const double m_lo = mean_count(lo);
  const double m_hi = mean_count(hi);
  const double mu = setup.beta_sq * cp0.eta;

  std::vector<double> estimates(static_cast<std::size_t>(setup.repetitions),
                                std::numeric_limits<double>::quiet_NaN());
  parallel_for(
      estimates.size(),
      [&](std::size_t i) {
        double avg = mu;
        if (!setup.noiseless) {
          PoissonSampler draw(substream_seed(setup.seed, i));
          double sum = 0.0;
          for (int t = 0; t < setup.trials; ++t) sum += static_cast<double>(draw(mu));
          avg = sum / nu;
        }
        if ((avg - m_lo) * (avg - m_hi) > 0.0) return;
        try {
          estimates[i] = bracketed_root([&](double al) { return mean_count(al) - avg; }, lo, hi);
        } catch (const BracketError&) {
        }
      },
      setup.threads == 0 ? default_threads() : setup.threads);

  double sum = 0.0;
  for (double e : estimates) {
    if (std::isnan(e)) {
      ++rep.failures;
      continue;
    }
    ++rep.successes;
    sum += e;
  }
  if (rep.successes == 0) return rep;
  const double n = rep.successes;
  rep.mean_estimate = sum / n;
  rep.bias = rep.mean_estimate - alpha0;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double e : estimates) {
    if (std::isnan(e)) continue;
    const double d = e - rep.mean_estimate;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  if (rep.successes > 1) {
    rep.empirical_variance = m2 / (n - 1.0);
    // Standard error of the sample variance from the fourth central moment.
    const double s4 = rep.empirical_variance * rep.empirical_variance;
    rep.sampling_error = std::sqrt(std::max(0.0, (m4 / n - (n - 3.0) / (n - 1.0) * s4) / n));
  }
  return rep;
}

}  // namespace ringqfi
