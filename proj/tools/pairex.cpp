// CLI driver: pairex evolve|oracle|identities|sweep --config <path>
//             [--out <dir>] [--seed <u64>]
// Exit codes: 0 success, 2 config error, 3 numerical failure,
//             4 tolerance failure in identities mode.

#include <CLI11.hpp>

#include <cstdio>
#include <string>

#include "pairex/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"condensate / pair-excitation evolution engine"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  std::uint64_t seed_override = 0;
  bool seed_given = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "configuration file")->required();
    sub->add_option("--out", out_override, "output directory override");
    sub->add_option("--seed", seed_override, "seed override")
        ->each([&](const std::string&) { seed_given = true; });
  };

  CLI::App* evolve = app.add_subcommand("evolve", "integrate the coupled system");
  CLI::App* oracle = app.add_subcommand("oracle", "compare against the exact Fock evolution");
  CLI::App* identities = app.add_subcommand("identities", "run the kernel identity suite");
  CLI::App* sweep = app.add_subcommand("sweep", "N/beta sweep of approximation error");
  for (CLI::App* sub : {evolve, oracle, identities, sweep}) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    pairex::SimulationConfig cfg = pairex::load_config(config_path);
    if (seed_given) cfg.seed = seed_override;
    const std::string outdir = out_override.empty() ? cfg.output_dir : out_override;

    if (evolve->parsed()) pairex::run_evolve(cfg, outdir);
    else if (oracle->parsed()) pairex::run_oracle(cfg, outdir);
    else if (identities->parsed()) pairex::run_identities(cfg, outdir);
    else if (sweep->parsed()) pairex::run_sweep(cfg, outdir);
    return 0;
  } catch (const pairex::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const pairex::ToleranceError& e) {
    std::fprintf(stderr, "tolerance failure: %s\n", e.what());
    return 4;
  } catch (const pairex::NumericalError& e) {
    std::fprintf(stderr, "numerical failure at t=%g: %s\n", e.time, e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
