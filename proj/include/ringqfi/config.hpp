#pragma once

// Flat `key = value` scenario files. Keys carry their units; unknown and
// repeated keys are rejected.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ringqfi/errors.hpp"
#include "ringqfi/gaussian.hpp"
#include "ringqfi/resonator.hpp"

namespace ringqfi {

struct ScenarioConfig {
  // ring: exactly one of r / mzi phases, exactly one geometry key
  std::optional<double> r;
  bool r_critical = false;
  std::optional<double> mzi_phi1;
  std::optional<double> mzi_phi2;
  std::optional<double> circumference_cm;
  std::optional<double> radius_cm;
  std::optional<double> radius_um;
  std::optional<double> confinement;
  std::optional<double> alpha_I_per_cm;
  std::optional<double> alpha_I_dB_per_cm;
  std::optional<double> n_I;
  std::optional<double> wavelength_nm;
  std::optional<double> wavelength_um;
  std::optional<double> wavelength_cm;
  std::optional<double> phi_rad;
  bool phi_geometric = false;
  // analyte
  std::optional<double> alpha_A_per_cm;
  std::optional<double> n_A;
  // probe
  std::optional<double> beta_sq;
  std::optional<double> squeeze_s;
  std::optional<double> squeeze_chi;
  std::optional<double> rotation;
  // sweep
  std::optional<std::string> sweep_variable;
  std::optional<double> sweep_start;
  std::optional<double> sweep_stop;
  std::optional<long long> sweep_steps;
  // runs
  std::optional<long long> trials;
  std::optional<long long> repetitions;
  std::optional<std::uint64_t> seed;
  std::optional<double> mc_r_over_a;
  std::optional<double> target_std_per_cm;
  std::optional<double> robustness_fraction;
  std::optional<std::string> output;
  std::optional<double> photon_budget;
  std::optional<double> a_max;
  std::optional<double> tolerance;
  std::optional<long long> max_restarts;

  bool operator==(const ScenarioConfig&) const = default;
};

namespace detail {

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out))
    throw ConfigError(std::string(key), "expected a finite number, got '" + std::string(v) + "'");
  return out;
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view v) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw ConfigError(std::string(key), "expected an integer, got '" + std::string(v) + "'");
  return out;
}

struct ConfigField {
  const char* key;
  std::function<void(ScenarioConfig&, std::string_view)> parse;
  std::function<std::optional<std::string>(const ScenarioConfig&)> emit;
};

template <typename Member>
ConfigField number_field(const char* key, Member m) {
  return {key, [=](ScenarioConfig& c, std::string_view v) { c.*m = parse_double(key, v); },
          [=](const ScenarioConfig& c) -> std::optional<std::string> {
            if (!(c.*m)) return std::nullopt;
            return format_double(*(c.*m));
          }};
}

template <typename Int, typename Member>
ConfigField int_field(const char* key, Member m) {
  return {key, [=](ScenarioConfig& c, std::string_view v) { c.*m = parse_int<Int>(key, v); },
          [=](const ScenarioConfig& c) -> std::optional<std::string> {
            if (!(c.*m)) return std::nullopt;
            return std::to_string(*(c.*m));
          }};
}

template <typename Member>
ConfigField text_field(const char* key, Member m) {
  return {key, [=](ScenarioConfig& c, std::string_view v) { c.*m = std::string(v); },
          [=](const ScenarioConfig& c) { return c.*m; }};
}

// A number or one keyword that replaces it.
template <typename Member>
ConfigField keyword_field(const char* key, const char* word, Member m, bool ScenarioConfig::*flag) {
  return {key,
          [=](ScenarioConfig& c, std::string_view v) {
            if (v == word) {
              c.*flag = true;
              c.*m = std::nullopt;
            } else {
              c.*m = parse_double(key, v);
              c.*flag = false;
            }
          },
          [=](const ScenarioConfig& c) -> std::optional<std::string> {
            if (c.*flag) return std::string(word);
            if (!(c.*m)) return std::nullopt;
            return format_double(*(c.*m));
          }};
}

inline const std::vector<ConfigField>& config_fields() {
  using C = ScenarioConfig;
  static const std::vector<ConfigField> fields = {
      keyword_field("r", "critical", &C::r, &C::r_critical),
      number_field("mzi_phi1", &C::mzi_phi1),
      number_field("mzi_phi2", &C::mzi_phi2),
      number_field("circumference_cm", &C::circumference_cm),
      number_field("radius_cm", &C::radius_cm),
      number_field("radius_um", &C::radius_um),
      number_field("confinement", &C::confinement),
      number_field("alpha_I_per_cm", &C::alpha_I_per_cm),
      number_field("alpha_I_dB_per_cm", &C::alpha_I_dB_per_cm),
      number_field("n_I", &C::n_I),
      number_field("wavelength_nm", &C::wavelength_nm),
      number_field("wavelength_um", &C::wavelength_um),
      number_field("wavelength_cm", &C::wavelength_cm),
      keyword_field("phi_rad", "geometric", &C::phi_rad, &C::phi_geometric),
      number_field("alpha_A_per_cm", &C::alpha_A_per_cm),
      number_field("n_A", &C::n_A),
      number_field("beta_sq", &C::beta_sq),
      number_field("squeeze_s", &C::squeeze_s),
      number_field("squeeze_chi", &C::squeeze_chi),
      number_field("rotation", &C::rotation),
      text_field("sweep_variable", &C::sweep_variable),
      number_field("sweep_start", &C::sweep_start),
      number_field("sweep_stop", &C::sweep_stop),
      int_field<long long>("sweep_steps", &C::sweep_steps),
      int_field<long long>("trials", &C::trials),
      int_field<long long>("repetitions", &C::repetitions),
      int_field<std::uint64_t>("seed", &C::seed),
      number_field("mc_r_over_a", &C::mc_r_over_a),
      number_field("target_std_per_cm", &C::target_std_per_cm),
      number_field("robustness_fraction", &C::robustness_fraction),
      text_field("output", &C::output),
      number_field("photon_budget", &C::photon_budget),
      number_field("a_max", &C::a_max),
      number_field("tolerance", &C::tolerance),
      int_field<long long>("max_restarts", &C::max_restarts),
  };
  return fields;
}

}  // namespace detail

inline ScenarioConfig parse_config(std::string_view text) {
  ScenarioConfig cfg;
  std::vector<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no), "expected 'key = value'");
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    if (value.empty()) throw ConfigError(key, "missing value");
    const auto& fields = detail::config_fields();
    const auto it = std::find_if(fields.begin(), fields.end(), [&](const auto& f) { return key == f.key; });
    if (it == fields.end()) throw ConfigError(key, "unknown key");
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) throw ConfigError(key, "duplicate key");
    seen.push_back(key);
    it->parse(cfg, value);
  }
  return cfg;
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

inline std::string serialize_config(const ScenarioConfig& cfg) {
  std::string out;
  for (const auto& f : detail::config_fields()) {
    if (auto v = f.emit(cfg)) out += std::string(f.key) + " = " + *v + "\n";
  }
  return out;
}

enum class SweepVariable { r, phi, alpha_a };

struct SweepSpec {
  SweepVariable variable = SweepVariable::r;
  double start = 0.0;
  double stop = 0.0;
  int steps = 2;

  double value(int i) const { return start + (stop - start) * i / (steps - 1); }
};

// Validated, unit-converted view of a config.
struct Scenario {
  RingParams ring;
  Analyte analyte;
  ProbeSpec probe;
  double beta_sq = 1.0;
  std::optional<double> phase = 0.0;  // nullopt: geometric round-trip phase
  bool r_critical = false;
};

namespace detail {

inline double require(const std::optional<double>& v, const char* key) {
  if (!v) throw ConfigError(key, "required key missing");
  return *v;
}

inline void check(bool ok, const char* key, const char* what) {
  if (!ok) throw ConfigError(key, what);
}

inline int count_set(std::initializer_list<bool> flags) {
  int n = 0;
  for (bool f : flags) n += f;
  return n;
}

}  // namespace detail

inline Scenario resolve(const ScenarioConfig& c) {
  using detail::check;
  Scenario s;
  RingParams& ring = s.ring;

  const bool mzi = c.mzi_phi1 || c.mzi_phi2;
  if (detail::count_set({c.r.has_value() || c.r_critical, mzi}) != 1)
    throw ConfigError("r", "give exactly one of r or the MZI phases (mzi_phi1, mzi_phi2)");
  if (mzi && !(c.mzi_phi1 && c.mzi_phi2)) throw ConfigError(c.mzi_phi1 ? "mzi_phi2" : "mzi_phi1", "both MZI phases required");

  const int geometry = detail::count_set({c.circumference_cm.has_value(), c.radius_cm.has_value(), c.radius_um.has_value()});
  if (geometry != 1) throw ConfigError("circumference_cm", "give exactly one of circumference_cm, radius_cm, radius_um");
  if (c.circumference_cm) ring.circumference = *c.circumference_cm;
  if (c.radius_cm) ring.circumference = circumference_from_radius(*c.radius_cm);
  if (c.radius_um) ring.circumference = circumference_from_radius(um_to_cm(*c.radius_um));
  check(ring.circumference > 0.0, c.circumference_cm ? "circumference_cm" : (c.radius_cm ? "radius_cm" : "radius_um"),
        "must be > 0");

  ring.confinement = detail::require(c.confinement, "confinement");
  check(ring.confinement >= 0.0 && ring.confinement <= 1.0, "confinement", "must lie in [0, 1]");

  if (detail::count_set({c.alpha_I_per_cm.has_value(), c.alpha_I_dB_per_cm.has_value()}) != 1)
    throw ConfigError("alpha_I_per_cm", "give exactly one of alpha_I_per_cm, alpha_I_dB_per_cm");
  if (c.alpha_I_dB_per_cm) {
    check(*c.alpha_I_dB_per_cm >= 0.0, "alpha_I_dB_per_cm", "must be >= 0");
    ring.intrinsic_absorption = db_per_cm_to_alpha(*c.alpha_I_dB_per_cm);
  } else {
    ring.intrinsic_absorption = *c.alpha_I_per_cm;
    check(ring.intrinsic_absorption >= 0.0, "alpha_I_per_cm", "must be >= 0");
  }

  ring.intrinsic_index = c.n_I.value_or(1.0);
  check(ring.intrinsic_index > 0.0, "n_I", "must be > 0");

  const int wl = detail::count_set({c.wavelength_nm.has_value(), c.wavelength_um.has_value(), c.wavelength_cm.has_value()});
  if (wl > 1) throw ConfigError("wavelength_nm", "give at most one of wavelength_nm, wavelength_um, wavelength_cm");
  ring.wavelength = nm_to_cm(1500.0);
  if (c.wavelength_nm) ring.wavelength = nm_to_cm(*c.wavelength_nm);
  if (c.wavelength_um) ring.wavelength = um_to_cm(*c.wavelength_um);
  if (c.wavelength_cm) ring.wavelength = *c.wavelength_cm;
  check(ring.wavelength > 0.0, c.wavelength_nm ? "wavelength_nm" : (c.wavelength_um ? "wavelength_um" : "wavelength_cm"),
        "must be > 0");

  s.analyte.absorption = detail::require(c.alpha_A_per_cm, "alpha_A_per_cm");
  check(s.analyte.absorption >= 0.0, "alpha_A_per_cm", "must be >= 0");
  s.analyte.index = c.n_A.value_or(0.0);

  if (c.phi_geometric) s.phase = std::nullopt;
  else s.phase = c.phi_rad.value_or(0.0);

  s.r_critical = c.r_critical;
  if (c.r_critical) {
    ring.self_coupling = 1.0;
    ring.self_coupling = attenuation(ring, s.analyte).a;
  } else if (c.r) {
    ring.self_coupling = *c.r;
    check(ring.self_coupling >= 0.0 && ring.self_coupling <= 1.0, "r", "must lie in [0, 1]");
  } else {
    ring.self_coupling = std::abs(mzi_coupling({*c.mzi_phi1, *c.mzi_phi2}));
  }

  s.beta_sq = c.beta_sq.value_or(1.0);
  check(s.beta_sq >= 0.0, "beta_sq", "must be >= 0");
  s.probe.displacement = std::sqrt(s.beta_sq);
  s.probe.squeeze = c.squeeze_s.value_or(0.0);
  check(s.probe.squeeze >= 0.0, "squeeze_s", "must be >= 0");
  s.probe.squeeze_phase = c.squeeze_chi.value_or(0.0);
  s.probe.rotation = c.rotation.value_or(0.0);
  check(mean_photons(s.probe) > 0.0, "beta_sq", "probe carries no photons (beta_sq = squeeze_s = 0)");
  return s;
}

inline SweepSpec resolve_sweep(const ScenarioConfig& c) {
  SweepSpec sw;
  if (!c.sweep_variable) throw ConfigError("sweep_variable", "required key missing");
  if (*c.sweep_variable == "r") sw.variable = SweepVariable::r;
  else if (*c.sweep_variable == "phi") sw.variable = SweepVariable::phi;
  else if (*c.sweep_variable == "alpha_A") sw.variable = SweepVariable::alpha_a;
  else throw ConfigError("sweep_variable", "expected one of r, phi, alpha_A");
  sw.start = detail::require(c.sweep_start, "sweep_start");
  sw.stop = detail::require(c.sweep_stop, "sweep_stop");
  if (!c.sweep_steps) throw ConfigError("sweep_steps", "required key missing");
  detail::check(*c.sweep_steps >= 2 && *c.sweep_steps <= 100000000, "sweep_steps", "must be >= 2");
  sw.steps = static_cast<int>(*c.sweep_steps);
  if (sw.variable == SweepVariable::r)
    detail::check(std::min(sw.start, sw.stop) >= 0.0 && std::max(sw.start, sw.stop) <= 1.0, "sweep_start",
                  "r range must lie in [0, 1]");
  if (sw.variable == SweepVariable::alpha_a)
    detail::check(std::min(sw.start, sw.stop) >= 0.0, "sweep_start", "alpha_A range must be >= 0");
  return sw;
}

}  // namespace ringqfi
