#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "gamma_qm/cli.hpp"

int main(int argc, char** argv) {
  using gqm::cli::RunConfig;

  CLI::App app{"gamma-qm: quantum mechanics with a gamma-deformed translation operator"};
  app.set_version_flag("--version", gqm::cli::kVersion);
  app.set_config("--config", "", "TOML file of key = value pairs; command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);

  RunConfig cfg;
  std::string command;
  std::vector<std::string> names;
  for (const auto& [k, v] : gqm::cli::command_names()) names.push_back(k);
  app.add_option("command", command, "well1d | well2d | barrier | free | evolve | verify")
      ->required()
      ->check(CLI::IsMember(names));

  // (flag, RunConfig key) for every option whose provenance goes into file metadata.
  std::vector<std::pair<CLI::Option*, std::string>> tracked;
  auto track = [&](CLI::Option* o, std::string key) { tracked.emplace_back(o, std::move(key)); };

  track(app.add_option("--gamma", cfg.gammas, "deformation parameter; repeat for a sweep")
            ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll),
        "gamma");
  track(app.add_option("--L", cfg.L, "well width (default 1)"), "L");
  track(app.add_option("--V0", cfg.V0, "barrier height (default 18)"), "V0");
  track(app.add_option("--a", cfg.a, "barrier width (default 1)"), "a");
  track(app.add_option("--n", cfg.n, "number of well states (default 10)"), "n");
  track(app.add_option("--grid", cfg.grid, "grid points or energy samples (command-specific default)"), "grid");
  track(app.add_option("--mass", cfg.mass, "particle mass (default 1)"), "mass");
  track(app.add_option("--hbar", cfg.hbar, "reduced Planck constant (default 1)"), "hbar");
  track(app.add_option("--k", cfg.k, "free: wave number (default 5)"), "k");
  track(app.add_option("--x-max", cfg.x_max, "evolve: right wall (default 40)"), "x_max");
  track(app.add_option("--x0", cfg.x0, "evolve: packet centre (default 8)"), "x0");
  track(app.add_option("--sigma", cfg.sigma, "evolve: packet width (default 1)"), "sigma");
  track(app.add_option("--k0", cfg.k0, "evolve: packet wave number (default 1)"), "k0");
  track(app.add_option("--dt", cfg.dt, "evolve: time step (default 2e-4)"), "dt");
  track(app.add_option("--steps", cfg.steps, "evolve: number of steps (default 1000)"), "steps");
  app.add_option("--out", cfg.out, "output directory (default out)");
  app.add_flag("--svg", cfg.svg, "also write SVG plots");
  app.add_flag("--quick", cfg.quick, "verify: reduced grids");
  app.add_option("--inject-fault", cfg.inject_fault, "verify: perturb a check on purpose (normalization)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  cfg.command = *gqm::cli::parse_command(command);
  for (const auto& [opt, key] : tracked)
    if (opt->count() > 0) cfg.explicit_keys.insert(key);

  try {
    const auto result = gqm::cli::run(cfg, std::cout);
    for (const auto& f : result.files) std::cout << "wrote " << f.string() << '\n';
    return result.exit_code;
  } catch (const gqm::cli::ConfigError& e) {
    std::cerr << "gamma-qm: invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const gqm::domain_error& e) {
    std::cerr << "gamma-qm: invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const gqm::contract_error& e) {
    std::cerr << "gamma-qm: invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const gqm::size_error& e) {
    std::cerr << "gamma-qm: invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "gamma-qm: error: " << e.what() << '\n';
    return 1;
  }
}
