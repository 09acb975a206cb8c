#include "partition_lab/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

using namespace partition_lab;

int main(int argc, char** argv) {
  CLI::App app{"Exact partition counts and their closed-form bounds"};
  app.require_subcommand(1);

  cli::RunConfig config;
  std::string family = "plain";
  std::string format = "pretty";
  std::string window;

  const std::map<std::string, cli::Command> commands = {
      {"verify", cli::Command::verify},
      {"table", cli::Command::table},
      {"oracle", cli::Command::oracle},
      {"bromwich-check", cli::Command::bromwich_check},
      {"slope", cli::Command::slope},
  };
  const std::map<std::string, std::string> help = {
      {"verify", "check every bound against the exact counts for N = 1..n-max"},
      {"table", "print exact counts and prefix sums for N = 0..n-max"},
      {"oracle", "monomial/lattice-count equivalence and random simplex sandwiches"},
      {"bromwich-check", "contour quadrature against series closed forms"},
      {"slope", "log-log slopes of the bound ratios over a window"},
  };

  for (const auto& [name, cmd] : commands) {
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--family", family, "plain | qpower | plane | theoremA")->capture_default_str();
    sub->add_option("--q", config.q, "power for the qpower family")->capture_default_str();
    sub->add_option("--h-file", config.h_file, "two-column \"x h(x)\" table for theoremA");
    sub->add_option("--n-max", config.n_max, "largest N")->capture_default_str();
    sub->add_option("--window", window, "N_min,N_max for slope");
    sub->add_option("--tolerance", config.tolerance, "slope tolerance (default 0.06 for q = 1, else 0.08)");
    sub->add_option("--precision", config.precision, "working precision in bits (default $PARTITION_LAB_PRECISION or 128)");
    sub->add_option("--format", format, "csv | json | pretty")->capture_default_str();
    sub->add_option("--seed", config.seed, "seed for random instances")->capture_default_str();
    sub->add_option("--output,-o", config.output, "write the artifact here instead of standard output");
    sub->add_option("--rho-max", config.rho_max, "largest monomial degree for oracle")->capture_default_str();
    sub->add_option("--grid", config.grid, "quadrature grid for bromwich-check")->capture_default_str();
    sub->add_option("--corrupt-bound", config.corrupt_upper)->group("");
    sub->callback([&config, cmd = cmd] { config.command = cmd; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitValidation;
  }

  try {
    config.family = cli::parse_family(family);
    config.format = report::parse_format(format);
    if (!window.empty()) config.window = cli::parse_window(window);
  } catch (const std::invalid_argument& e) {
    return cli::fail(std::cerr, "validation", cli::kExitValidation, e.what());
  }
  return cli::run(config);
}
