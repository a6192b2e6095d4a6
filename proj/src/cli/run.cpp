#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "cli/config_json.hpp"
#include "qgsw/analysis.hpp"
#include "qgsw/cli.hpp"
#include "qgsw/contour.hpp"
#include "qgsw/io.hpp"
#include "qgsw/special_fn.hpp"

namespace qgsw::cli {

namespace {

using io::format_double;

constexpr double kIdentityTolerance = 1e-8;
constexpr double kWronskianTolerance = 1e-12;
constexpr double kBoundSpreadTolerance = 0.05;
constexpr double kMeanZeroTolerance = 1e-12;

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Raised when a verification subcommand computes values outside its tolerance.
class VerificationFailed : public Error {
 public:
  using Error::Error;
};

struct Context {
  const ExperimentConfig& config;
  const RunOptions& opts;
  std::ostream& progress;
  io::ArtifactWriter& writer;

  void note(const std::string& msg) const {
    if (!opts.quiet) progress << "qgsw_cd: " << msg << '\n' << std::flush;
  }
  SolverOptions solver() const { return {config.quadrature, opts.workers}; }
};

Contour initial_contour(const ExperimentConfig& c) {
  const Geometry& g = *c.geometry;
  switch (g.kind) {
    case Geometry::Kind::circle:
      return make_circle(g.a, c.node_count);
    case Geometry::Kind::ellipse:
      return make_ellipse(g.a, g.b, c.node_count);
    case Geometry::Kind::file: {
      std::ifstream in(g.path);
      if (!in) throw ArgumentError("cannot open contour file '" + g.path + "'");
      Contour raw = read_contour_csv(in);
      return raw.size() == c.node_count ? raw : resample(raw, c.node_count);
    }
  }
  throw ArgumentError("unknown geometry");
}

EvolutionConfig evolution_config(const Context& ctx) {
  EvolutionConfig e;
  e.dt = ctx.config.dt;
  e.t_end = ctx.config.t_end;
  e.node_count = ctx.config.node_count;
  e.chord_arc_ceiling = ctx.config.chord_arc_ceiling;
  e.diagnostics_stride = ctx.config.diagnostics_stride;
  e.resample_stride = ctx.config.resample_stride;
  e.solver = ctx.solver();
  return e;
}

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string s;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) s += ',';
    s += c;
    first = false;
  }
  return s + '\n';
}

double rel_error(double computed, double reference) {
  return std::abs(computed - reference) / std::abs(reference);
}

void run_bessel_verify(const Context& ctx) {
  std::ostringstream csv;
  csv << "check,n,arg,computed,reference,rel_error\n";
  double worst_identity = 0.0;
  double worst_wronskian = 0.0;

  const std::pair<double, int> pairs[] = {{2.0, 0}, {3.0, 1}, {4.0, 2}, {2.5, 0}, {3.5, 2}};
  for (const auto& [alpha, n] : pairs) {
    const auto check = analysis::bessel_integral_identity_check(alpha, n);
    const double err = check.relative_error();
    worst_identity = std::max(worst_identity, err);
    csv << csv_row({"integral_identity", std::to_string(n), format_double(alpha), format_double(check.quadrature),
                    format_double(check.closed_form), format_double(err)});
  }
  ctx.note("integral identities: worst relative error " + short_number(worst_identity));

  // I_n(z) K_{n+1}(z) + I_{n+1}(z) K_n(z) = 1/z couples the two independent evaluators.
  const double zs[] = {1e-3, 0.1, 1.0, 2.0, 5.0, 10.0, 25.0, 40.0};
  for (int n = 0; n <= 3; ++n) {
    for (double z : zs) {
      const double w = special::modified_bessel_i(n, z) * special::modified_bessel_k(n + 1, z) +
                       special::modified_bessel_i(n + 1, z) * special::modified_bessel_k(n, z);
      const double err = rel_error(w, 1.0 / z);
      worst_wronskian = std::max(worst_wronskian, err);
      csv << csv_row({"wronskian", std::to_string(n), format_double(z), format_double(w), format_double(1.0 / z),
                      format_double(err)});
    }
  }
  ctx.note("wronskian: worst relative error " + short_number(worst_wronskian));
  ctx.writer.write("bessel_identities.csv", csv.str());

  if (worst_identity > kIdentityTolerance) {
    throw VerificationFailed("integral identity error " + format_double(worst_identity));
  }
  if (worst_wronskian > kWronskianTolerance) {
    throw VerificationFailed("wronskian error " + format_double(worst_wronskian));
  }
}

void run_kernel_verify(const Context& ctx) {
  // Wide enough that eps * |x| covers the same range for every eps in the default list.
  const auto radii = analysis::log_grid(1e-4, 1e4, 240);
  const auto scan = analysis::kernel_bound_scan(ctx.config.epsilons, radii);
  const KernelMode euler[] = {KernelMode::euler()};
  const auto euler_scan = analysis::kernel_bound_scan(euler, radii);

  std::ostringstream bounds;
  bounds << "mode,epsilon,sup_kernel,sup_gradient,sup_difference\n";
  const auto row = [&](const std::string& mode, const std::string& eps, const analysis::KernelBoundSample& s) {
    bounds << csv_row({mode, eps, format_double(s.sup_kernel), format_double(s.sup_gradient),
                       format_double(s.sup_difference)});
  };
  for (const auto& s : scan.per_mode) row(to_string(s.mode.variant()), format_double(s.mode.epsilon()), s);
  row("pooled", "", scan.pooled);
  row("euler", "", euler_scan.per_mode.front());
  ctx.writer.write("kernel_bounds.csv", bounds.str());

  const double spread = std::max({scan.spread_kernel(), scan.spread_gradient(), scan.spread_difference()});
  ctx.note("kernel bounds: largest spread across epsilon " + short_number(spread));

  std::ostringstream means;
  means << "part,row,col,radius,epsilon,mean\n";
  double worst_s1 = 0.0;
  for (double eps : {0.7, 3.0}) {
    for (double radius : {0.5, 2.0}) {
      for (auto part : {analysis::DecompositionPart::s1, analysis::DecompositionPart::s2}) {
        for (int r = 1; r <= 2; ++r) {
          for (int c = 1; c <= 2; ++c) {
            const double m = analysis::sphere_mean({part, r, c}, radius, eps, 256);
            if (part == analysis::DecompositionPart::s1) worst_s1 = std::max(worst_s1, std::abs(m));
            means << csv_row({part == analysis::DecompositionPart::s1 ? "s1" : "s2", std::to_string(r),
                              std::to_string(c), format_double(radius), format_double(eps), format_double(m)});
          }
        }
      }
    }
  }
  ctx.writer.write("sphere_means.csv", means.str());
  ctx.note("sphere means: largest |s1 mean| " + short_number(worst_s1));

  if (ctx.config.epsilons.size() >= 2 && spread > kBoundSpreadTolerance) {
    throw VerificationFailed("kernel bound spread " + format_double(spread));
  }
  if (worst_s1 > kMeanZeroTolerance) throw VerificationFailed("s1 sphere mean " + format_double(worst_s1));
}

void run_evolve(const Context& ctx) {
  const PatchState initial{initial_contour(ctx.config), 0.0, ctx.config.amplitude, ctx.config.mode};
  ctx.note("evolve " + ctx.config.mode.name() + " N=" + std::to_string(ctx.config.node_count));
  try {
    io::export_trajectory(ctx.writer, evolve(initial, evolution_config(ctx)));
  } catch (const EvolutionAborted& e) {
    io::export_trajectory(ctx.writer, e.partial());
    throw;
  }
}

void run_trace(const Context& ctx) {
  const PatchState initial{initial_contour(ctx.config), 0.0, ctx.config.amplitude, ctx.config.mode};
  Trajectory trajectory;
  try {
    trajectory = evolve(initial, evolution_config(ctx));
  } catch (const EvolutionAborted& e) {
    std::ostringstream diag;
    io::write_diagnostics_csv(diag, e.partial().diagnostics);
    ctx.writer.write("diagnostics.csv", diag.str());
    throw;
  }
  std::ostringstream diag;
  io::write_diagnostics_csv(diag, trajectory.diagnostics);
  ctx.writer.write("diagnostics.csv", diag.str());

  ctx.note("tracing " + std::to_string(ctx.config.seeds.size()) + " seeds");
  const auto paths =
      trace_flow(trajectory, ctx.config.seeds, ctx.config.direction, TraceOptions{ctx.config.substeps, ctx.opts.workers});
  std::ostringstream csv;
  io::write_tracers_csv(csv, paths);
  ctx.writer.write("tracers.csv", csv.str());
}

void run_converge(const Context& ctx) {
  analysis::ConvergenceOptions opts;
  opts.unshifted = ctx.config.mode.variant() == KernelVariant::qgsw;
  opts.chord_arc_ceiling = ctx.config.chord_arc_ceiling;
  opts.solver = ctx.solver();
  ctx.note("converge over " + std::to_string(ctx.config.epsilons.size()) + " epsilons");
  const auto report = analysis::convergence_study(initial_contour(ctx.config), ctx.config.epsilons,
                                                  ctx.config.t_end, ctx.config.dt, ctx.config.sample_stride, opts);

  std::ostringstream csv;
  io::write_convergence_csv(csv, report);
  ctx.writer.write("convergence.csv", csv.str());

  nlohmann::json summary;
  summary["epsilons"] = report.epsilons;
  summary["sup_distances"] = report.sup_distances;
  summary["fitted_slope"] = report.fitted_slope ? nlohmann::json(*report.fitted_slope) : nlohmann::json(nullptr);
  summary["euler_floor"] = report.euler_floor ? nlohmann::json(*report.euler_floor) : nlohmann::json(nullptr);
  summary["config"] = detail::to_json(ctx.config);
  ctx.writer.write("convergence.json", summary.dump(2) + "\n");
  if (report.fitted_slope) ctx.note("fitted slope " + short_number(*report.fitted_slope));
}

void write_manifest(io::ArtifactWriter& writer, const ExperimentConfig& config, const std::string& status,
                    const std::string& reason, double wall_time) {
  std::vector<std::string> files = writer.files();
  files.push_back("manifest.json");
  nlohmann::json m;
  m["tool"] = "qgsw_cd";
  m["version"] = QGSW_VERSION;
  m["subcommand"] = to_string(config.subcommand);
  m["status"] = status;
  if (!reason.empty()) m["reason"] = reason;
  m["config"] = detail::to_json(config);
  m["files"] = files;
  m["wall_time_seconds"] = wall_time;
  writer.write("manifest.json", m.dump(2) + "\n");
}

struct Outcome {
  int code = exit_ok;
  std::string reason;
};

Outcome dispatch(const Context& ctx) {
  try {
    switch (ctx.config.subcommand) {
      case Subcommand::bessel_verify:
        run_bessel_verify(ctx);
        break;
      case Subcommand::kernel_verify:
        run_kernel_verify(ctx);
        break;
      case Subcommand::evolve:
        run_evolve(ctx);
        break;
      case Subcommand::converge:
        run_converge(ctx);
        break;
      case Subcommand::trace:
        run_trace(ctx);
        break;
    }
    return {};
  } catch (const EvolutionAborted& e) {
    return {exit_numerical, "evolution-aborted t=" + format_double(e.time()) +
                                " chord_arc=" + format_double(e.chord_arc()) +
                                " ceiling=" + format_double(ctx.config.chord_arc_ceiling)};
  } catch (const analysis::StudyAborted& e) {
    const std::string which = e.epsilon() ? "epsilon=" + format_double(*e.epsilon()) : std::string("run=euler");
    return {exit_numerical, "study-aborted " + which + " detail=\"" + e.what() + "\""};
  } catch (const TracerAborted& e) {
    return {exit_numerical, "tracer-aborted seed=" + std::to_string(e.seed()) + " t=" + format_double(e.time())};
  } catch (const VerificationFailed& e) {
    return {exit_numerical, std::string("verification-failed detail=\"") + e.what() + "\""};
  } catch (const StepFailure& e) {
    return {exit_numerical, std::string("step-failure detail=\"") + e.what() + "\""};
  } catch (const SingularityError& e) {
    return {exit_numerical, std::string("singular-configuration detail=\"") + e.what() + "\""};
  } catch (const DegenerateContourError& e) {
    return {exit_numerical, std::string("degenerate-contour detail=\"") + e.what() + "\""};
  } catch (const AccuracyRefusal& e) {
    return {exit_numerical, std::string("accuracy-refusal detail=\"") + e.what() + "\""};
  } catch (const Error& e) {
    return {exit_validation, std::string("invalid-input detail=\"") + e.what() + "\""};
  } catch (const std::ios_base::failure& e) {
    return {exit_validation, std::string("io detail=\"") + e.what() + "\""};
  } catch (const std::filesystem::filesystem_error& e) {
    return {exit_validation, std::string("io detail=\"") + e.what() + "\""};
  }
}

}  // namespace

int run(const ExperimentConfig& config, const RunOptions& opts, std::ostream& progress, std::ostream& diag) {
  const auto start = std::chrono::steady_clock::now();
  std::optional<io::ArtifactWriter> writer;
  try {
    writer.emplace(config.output_dir);
  } catch (const std::exception& e) {
    diag << "qgsw_cd: error=io detail=\"cannot create output_dir: " << e.what() << "\"\n";
    return exit_validation;
  }

  const Context ctx{config, opts, progress, *writer};
  const Outcome outcome = dispatch(ctx);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const char* status = outcome.code == exit_ok ? "ok" : outcome.code == exit_numerical ? "aborted" : "failed";
  try {
    write_manifest(*writer, config, status, outcome.reason, wall);
  } catch (const std::exception& e) {
    diag << "qgsw_cd: error=io detail=\"cannot write manifest: " << e.what() << "\"\n";
    return exit_validation;
  }
  if (outcome.code != exit_ok) diag << "qgsw_cd: error=" << outcome.reason << '\n';
  ctx.note("done in " + short_number(wall) + " s");
  return outcome.code;
}

}  // namespace qgsw::cli
