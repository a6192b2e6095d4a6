// Acceptance suite: one PASS/FAIL line per criterion, with the measured value
// and the runtime against its budget. Exit status is nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "qgsw/analysis.hpp"
#include "qgsw/cli.hpp"
#include "qgsw/contour.hpp"
#include "qgsw/dynamics.hpp"
#include "qgsw/special_fn.hpp"

using namespace qgsw;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double max_rel_speed_error(const std::vector<Vec2>& v, double exact) {
  double worst = 0.0;
  for (const Vec2& u : v) worst = std::max(worst, std::fabs(norm(u) - exact) / exact);
  return worst;
}

double area_drift(const Trajectory& tr) {
  const double a0 = tr.diagnostics.front().area;
  double worst = 0.0;
  for (const auto& d : tr.diagnostics) worst = std::max(worst, std::fabs(d.area - a0) / a0);
  return worst;
}

Outcome bessel_oracle() {
  double worst = 0.0;
  for (int n = 0; n <= 3; ++n) {
    for (double z : fixture::logspace(1e-6, 50.0, 200)) {
      const long double ref = oracle::bessel_k(n, z);
      worst = std::max(worst, static_cast<double>(std::fabs((special::modified_bessel_k(n, z) - ref) / ref)));
    }
  }
  return {worst < 1e-12, fmt("max rel error %.2e (tol 1e-12)", worst)};
}

Outcome integral_identity() {
  const double pairs[5][2] = {{2, 0}, {3, 1}, {4, 2}, {2.5, 0}, {3.5, 2}};
  double worst = 0.0;
  for (const auto& p : pairs) {
    worst = std::max(worst, analysis::bessel_integral_identity_check(p[0], static_cast<int>(p[1])).relative_error());
  }
  const auto a = analysis::bessel_integral_identity_check(2, 0);
  const auto b = analysis::bessel_integral_identity_check(3, 1);
  const bool anchors = a.closed_form == 1.0 && b.closed_form == 2.0;
  return {worst < 1e-8 && anchors, fmt("max rel error %.2e (tol 1e-8), anchors %.15g %.15g", worst, a.quadrature, b.quadrature)};
}

Outcome steady_circle_speed() {
  const Contour c = make_circle(1.0, 512);
  const double exact = static_cast<double>(oracle::qgsw_circle_speed(1, 1));
  const double eq = max_rel_speed_error(cde_velocity({c, 0.0, 1.0, KernelMode::qgsw(1.0)}), exact);
  const double ee = max_rel_speed_error(cde_velocity({c, 0.0, 1.0, KernelMode::euler()}), 0.5);
  return {eq < 1e-6 && ee < 1e-8, fmt("qgsw %.2e (tol 1e-6), euler %.2e (tol 1e-8)", eq, ee)};
}

Outcome area_conservation() {
  EvolutionConfig cfg;
  cfg.node_count = 256;
  cfg.dt = 0.01;
  cfg.t_end = 5.0;
  const double circle = area_drift(evolve({make_circle(1.0, 256), 0.0, 1.0, KernelMode::qgsw(1.0)}, cfg));
  cfg.t_end = 2.0;
  const double ellipse = area_drift(evolve({make_ellipse(1.2, 1.0, 256), 0.0, 1.0, KernelMode::euler()}, cfg));
  return {circle < 1e-8 && ellipse < 1e-7, fmt("circle drift %.2e (tol 1e-8), ellipse drift %.2e (tol 1e-7)", circle, ellipse)};
}

Outcome shift_invariance() {
  double worst = 0.0;
  for (unsigned seed = 1; seed <= 5; ++seed) {
    const Contour c = fixture::random_contour(seed, 256);
    for (double eps : {0.05, 0.5, 1.0, 5.0}) {
      const auto a = cde_velocity({c, 0.0, 1.0, KernelMode::qgsw(eps)});
      const auto b = cde_velocity({c, 0.0, 1.0, KernelMode::qgsw_shifted(eps)});
      for (std::size_t j = 0; j < a.size(); ++j) worst = std::max(worst, norm(a[j] - b[j]));
    }
  }
  return {worst < 1e-13, fmt("max |dv| %.2e (tol 1e-13)", worst)};
}

Outcome sphere_means() {
  double worst = 0.0;
  for (double radius : {0.5, 2.0}) {
    for (double eps : {0.7, 3.0}) {
      for (int r = 1; r <= 2; ++r) {
        for (int c = 1; c <= 2; ++c) {
          const double m = analysis::sphere_mean({analysis::DecompositionPart::s1, r, c}, radius, eps, 256);
          worst = std::max(worst, std::fabs(m));
        }
      }
    }
  }
  return {worst < 1e-12, fmt("max |mean| %.2e (tol 1e-12)", worst)};
}

Outcome uniform_bounds() {
  const std::vector<double> eps = {10.0, 1.0, 0.1, 0.01};
  const auto radii = analysis::log_grid(1e-4, 1e4, 240);
  const auto scan = analysis::kernel_bound_scan(eps, radii);
  const double sk = scan.spread_kernel(), sg = scan.spread_gradient(), sd = scan.spread_difference();
  return {std::max({sk, sg, sd}) < 0.05, fmt("spreads %.2e %.2e %.2e (tol 5e-2)", sk, sg, sd)};
}

Outcome euler_limit() {
  const std::vector<double> eps = {0.4, 0.2, 0.1, 0.05};
  analysis::ConvergenceOptions opts;
  opts.estimate_floor = false;
  const auto report = analysis::convergence_study(make_ellipse(1.2, 1.0, 256), eps, 1.0, 0.005, 1, opts);
  bool decreasing = true;
  for (std::size_t i = 1; i < report.sup_distances.size(); ++i) {
    decreasing = decreasing && report.sup_distances[i] < report.sup_distances[i - 1];
  }
  const double slope = report.fitted_slope.value_or(0.0);
  std::string d;
  for (double x : report.sup_distances) d += fmt("%.3e ", x);
  return {decreasing && slope >= 0.9, "distances " + d + fmt("slope %.4f (min 0.9)", slope)};
}

Outcome flow_inversion() {
  EvolutionConfig cfg;
  cfg.node_count = 128;
  cfg.dt = 0.01;
  cfg.t_end = 2.0;
  const Trajectory tr = evolve({make_circle(1.0, 128), 0.0, 1.0, KernelMode::qgsw(1.0)}, cfg);
  const std::vector<Vec2> seeds = {{2.0, 0.0}, {0.0, -1.6}, {0.3, 0.2}, {-2.5, 1.5}, {0.0, 0.0}};
  const auto fwd = trace_flow(tr, seeds, FlowDirection::forward);
  std::vector<Vec2> ends;
  for (const auto& p : fwd) ends.push_back(p.positions.back());
  const auto bwd = trace_flow(tr, ends, FlowDirection::backward);
  double worst = 0.0;
  for (std::size_t i = 0; i < seeds.size(); ++i) worst = std::max(worst, norm(bwd[i].positions.back() - seeds[i]));
  return {worst < 1e-6, fmt("max seed error %.2e (tol 1e-6)", worst)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  const std::string text =
      "subcommand=evolve\nmode=qgsw\nepsilon=1.0\ngeometry=circle:1.0\nnode_count=256\ndt=0.01\nt_end=5.0\noutput_dir=x\n";
  const fs::path root = fs::temp_directory_path() / "qgsw_acceptance_determinism";
  fs::remove_all(root);
  std::string csv[2];
  int codes[2];
  const std::size_t workers[2] = {1, 8};
  for (int k = 0; k < 2; ++k) {
    const fs::path dir = root / ("workers_" + std::to_string(workers[k]));
    const auto cfg = cli::parse_config(text, {std::nullopt, dir.string()});
    std::ostringstream progress, diag;
    codes[k] = cli::run(cfg, {true, workers[k]}, progress, diag);
    csv[k] = slurp(dir / "diagnostics.csv");
  }
  fs::remove_all(root);
  const bool same = !csv[0].empty() && csv[0] == csv[1];
  return {codes[0] == 0 && codes[1] == 0 && same,
          std::string(same ? "diagnostics.csv identical" : "diagnostics.csv differs") + fmt(" (%.0f bytes)", csv[0].size())};
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> check;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "Bessel K oracle agreement", 5, bessel_oracle},
      {2, "Bessel integral identity", 5, integral_identity},
      {3, "steady circular patch speed", 10, steady_circle_speed},
      {4, "area conservation", 120, area_conservation},
      {5, "shift invariance", 5, shift_invariance},
      {6, "mean zero on spheres", 1, sphere_means},
      {7, "epsilon-uniform kernel bounds", 10, uniform_bounds},
      {8, "epsilon -> 0 convergence to Euler", 600, euler_limit},
      {9, "flow-map inversion", 30, flow_inversion},
      {10, "determinism across worker counts", 240, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_seconds;
    const bool pass = o.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("%s criterion %2d: %s: %s; %.2f s (budget %.0f s)%s\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.budget_seconds, in_time ? "" : " OVER BUDGET");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
