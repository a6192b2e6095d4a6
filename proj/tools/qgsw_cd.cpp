// qgsw_cd: batch driver for the contour-dynamics experiments.
//
//   qgsw_cd <bessel-verify|kernel-verify|evolve|converge|trace> --config <path> [--out <dir>] [--quiet]
//
// Worker threads come from QGSW_WORKERS (default: available parallelism).
// Exit status: 0 success, 1 invalid input or I/O failure, 2 numerical abort.

#include <fstream>
#include <iostream>
#include <sstream>
#include <utility>

#include "CLI11.hpp"
#include "qgsw/cli.hpp"

int main(int argc, char** argv) {
  namespace cli = qgsw::cli;

  CLI::App app{"Contour dynamics for QGSW and Euler vortex patches"};
  app.set_version_flag("--version", std::string(QGSW_VERSION));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  bool quiet = false;
  const std::pair<const char*, const char*> subcommands[] = {
      {"bessel-verify", "check Bessel K identities against closed forms"},
      {"kernel-verify", "measure kernel bounds and sphere means across epsilon"},
      {"evolve", "evolve a vortex patch boundary"},
      {"converge", "compare shifted QGSW with Euler as epsilon decreases"},
      {"trace", "advect passive tracers through an evolved patch"},
  };
  for (const auto& [name, help] : subcommands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "experiment config (key=value lines or JSON)")->required();
    sub->add_option("--out", out_dir, "output directory, overrides output_dir");
    sub->add_flag("--quiet", quiet, "suppress progress messages");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "qgsw_cd: error=usage detail=\"" << e.what() << "\"\n";
    return cli::exit_validation;
  }

  cli::ExperimentConfig config;
  try {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "qgsw_cd: error=io detail=\"cannot open config '" << config_path << "'\"\n";
      return cli::exit_validation;
    }
    std::ostringstream text;
    text << in.rdbuf();
    cli::ConfigOverrides overrides;
    overrides.subcommand = cli::parse_subcommand(app.get_subcommands().front()->get_name());
    if (!out_dir.empty()) overrides.output_dir = out_dir;
    config = cli::parse_config(text.str(), overrides);
  } catch (const cli::ConfigError& e) {
    std::cerr << "qgsw_cd: error=invalid-config key=" << (e.key().empty() ? "-" : e.key()) << " line=" << e.line()
              << " detail=\"" << e.what() << "\"\n";
    return cli::exit_validation;
  }

  cli::RunOptions opts;
  opts.quiet = quiet;
  opts.workers = qgsw::default_worker_count();
  return cli::run(config, opts, std::cerr, std::cerr);
}
