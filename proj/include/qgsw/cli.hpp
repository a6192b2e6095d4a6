#pragma once

// Batch front end: experiment configs (flat key=value lines or a JSON object)
// and the subcommand pipelines behind the qgsw_cd tool.
//
// Keys (unknown keys are rejected):
//   subcommand          bessel-verify | kernel-verify | evolve | converge | trace
//   mode                qgsw | qgsw_shifted | euler
//   epsilon             > 0, required unless mode = euler
//   geometry            circle:R | ellipse:a,b | file:path
//   node_count          even integer >= 16
//   dt, t_end           positive reals, dt <= t_end
//   epsilons            comma-separated, strictly decreasing (converge, kernel-verify)
//   seeds               "x1,x2;x1,x2;..." (trace)
//   output_dir          directory for all artifacts
//   amplitude, chord_arc_ceiling, diagnostics_stride, resample_stride,
//   sample_stride, quadrature (log_corrected | trapezoid), direction (forward | backward),
//   substeps

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qgsw/dynamics.hpp"
#include "qgsw/errors.hpp"
#include "qgsw/kernel.hpp"

namespace qgsw::cli {

enum class Subcommand { bessel_verify, kernel_verify, evolve, converge, trace };

std::string to_string(Subcommand s);
/// Throws ConfigError for names other than the five subcommands.
Subcommand parse_subcommand(std::string_view name);

struct Geometry {
  enum class Kind { circle, ellipse, file };
  Kind kind = Kind::circle;
  double a = 1.0;
  double b = 1.0;
  std::string path;
};

struct ExperimentConfig {
  Subcommand subcommand = Subcommand::evolve;
  KernelMode mode = KernelMode::euler();
  std::optional<Geometry> geometry;
  std::size_t node_count = 0;
  double dt = 0.0;
  double t_end = 0.0;
  std::vector<double> epsilons;
  std::vector<Vec2> seeds;
  std::string output_dir;

  double amplitude = 1.0;
  double chord_arc_ceiling = 50.0;
  std::size_t diagnostics_stride = 1;
  std::size_t resample_stride = 0;
  std::size_t sample_stride = 1;
  std::size_t substeps = 1;
  QuadratureRule quadrature = QuadratureRule::log_corrected;
  FlowDirection direction = FlowDirection::forward;
};

/// Invalid configuration. `key` names the offending field; `line` is 0 for JSON input.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, std::size_t line, const std::string& message);
  const std::string& key() const { return key_; }
  std::size_t line() const { return line_; }

 private:
  std::string key_;
  std::size_t line_;
};

/// Command-line values merged into the config text before validation.
struct ConfigOverrides {
  /// Fills in a missing subcommand key; a conflicting one is an error.
  std::optional<Subcommand> subcommand;
  /// Replaces output_dir (the --out flag).
  std::optional<std::string> output_dir;
};

/// Parses key=value text, or a JSON object when the first non-blank character is '{'.
ExperimentConfig parse_config(std::string_view text, const ConfigOverrides& overrides = {});

/// Config echo as key=value lines (the format parse_config reads).
std::string describe(const ExperimentConfig& config);

struct RunOptions {
  bool quiet = false;
  std::size_t workers = default_worker_count();
};

enum ExitStatus : int { exit_ok = 0, exit_validation = 1, exit_numerical = 2 };

/// Runs the configured pipeline and writes its artifacts plus manifest.json.
/// Failures print one line "qgsw_cd: error=<code> <detail>" to `diag`.
int run(const ExperimentConfig& config, const RunOptions& opts, std::ostream& progress, std::ostream& diag);

}  // namespace qgsw::cli
