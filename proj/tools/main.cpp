#include <CLI11.hpp>

#include "gpe2d/commands.hpp"

int main(int argc, char** argv) {
  using gpe2d::cli::Invocation;
  CLI::App app{"Two-component Gross-Pitaevskii ground states in a Hermite basis"};
  app.require_subcommand(1);

  Invocation inv;
  std::string config, out, kappas, modes;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "run configuration file");
    sub->add_option("--out", out, "output directory (overrides [output] dir)");
  };
  auto* solve = app.add_subcommand("solve", "ground state by continuation");
  add_common(solve);
  auto* excited = app.add_subcommand("excited", "excited state from Hermite-mode guesses");
  add_common(excited);
  excited->add_option("--modes", modes, "l1,l2[,l1,l2] guess modes");
  auto* tf = app.add_subcommand("tf", "Thomas-Fermi geometry and profiles");
  add_common(tf);
  auto* sweep = app.add_subcommand("sweep", "inter-species coupling sweep");
  add_common(sweep);
  sweep->add_option("--kappas", kappas, "comma-separated increasing couplings");
  auto* quad = app.add_subcommand("quadcheck", "quadrature exactness diagnostics");
  add_common(quad);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return gpe2d::cli::kConfigError;
  }

  inv.command = app.get_subcommands().front()->get_name();
  if (!config.empty()) inv.config = config;
  if (!out.empty()) inv.out = out;
  if (sweep->count("--kappas")) inv.kappas = kappas;
  if (excited->count("--modes")) inv.modes = modes;
  return gpe2d::cli::run(inv);
}
