#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "ringqfi/commands.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string format = "csv";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "scenario file (key = value)")->required();
  cmd->add_option("--out", c.out, "output path (default stdout)");
  cmd->add_option("--seed", c.seed, "RNG seed, overrides the config");
  cmd->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

int emit(const ringqfi::Table& t, const Common& c, const ringqfi::ScenarioConfig& cfg) {
  const auto fmt = c.format == "json" ? ringqfi::OutputFormat::json : ringqfi::OutputFormat::csv;
  const std::string path = !c.out.empty() ? c.out : cfg.output.value_or("");
  if (path.empty() || path == "-") {
    ringqfi::write_table(std::cout, t, fmt);
    return 0;
  }
  std::ofstream f(path);
  if (!f) throw ringqfi::ConfigError("output", "cannot write '" + path + "'");
  ringqfi::write_table(f, t, fmt);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fisher-information limits of ring-resonator absorption and index sensing"};
  app.require_subcommand(1);
  Common common;

  auto* sweep = app.add_subcommand("sweep", "QFI, eta, theta and buildup over r, phi or alpha_A");
  auto* compare = app.add_subcommand("compare", "ring vs single-pass standard deviations over alpha_A");
  auto* breakeven = app.add_subcommand("breakeven", "lowest alpha_A at which the ring beats Fock single pass");
  auto* optimize = app.add_subcommand("optimize", "multi-start maximization of the Gaussian QFI");
  auto* mc = app.add_subcommand("mc", "Monte Carlo of the photon-counting estimator");
  auto* design = app.add_subcommand("design", "critical-coupling design and photon budget");
  for (auto* cmd : {sweep, compare, breakeven, optimize, mc, design}) add_common(cmd, common);

  CLI11_PARSE(app, argc, argv);

  try {
    ringqfi::ScenarioConfig cfg = ringqfi::load_config(common.config);
    if (common.seed) cfg.seed = *common.seed;
    if (sweep->parsed()) return emit(ringqfi::run_sweep(cfg), common, cfg);
    if (compare->parsed()) return emit(ringqfi::run_compare(cfg), common, cfg);
    if (breakeven->parsed()) return emit(ringqfi::run_breakeven(cfg), common, cfg);
    if (mc->parsed()) return emit(ringqfi::run_mc(cfg), common, cfg);
    if (design->parsed()) return emit(ringqfi::run_design(cfg), common, cfg);
    if (optimize->parsed()) {
      const auto res = ringqfi::run_optimize(cfg);
      emit(res.table, common, cfg);
      if (!res.converged) {
        std::cerr << "optimize: did not converge; reporting best point found\n";
        return kExitNumerical;
      }
      return 0;
    }
  } catch (const ringqfi::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ringqfi::DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::runtime_error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}
