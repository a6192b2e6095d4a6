#pragma once

// Vortex-patch evolution by contour dynamics, induced velocity at arbitrary
// points, and passive-tracer flow maps.
//
// The boundary z(alpha, t) of a patch with vorticity `amplitude` moves by
//
//   dz/dt(alpha) = amplitude * \oint kappa(|z(alpha) - z(alpha')|) z_alpha(alpha') dalpha',
//
// with kappa = contour_kernel_scalar(mode, .). A counterclockwise contour with
// positive amplitude rotates counterclockwise.

#include <cstddef>
#include <span>
#include <vector>

#include "qgsw/contour.hpp"
#include "qgsw/errors.hpp"
#include "qgsw/geometry.hpp"
#include "qgsw/kernel.hpp"
#include "qgsw/parallel.hpp"

namespace qgsw {

enum class QuadratureRule {
  /// Log singularity split off and integrated with exact product weights; smooth rest by trapezoid.
  log_corrected,
  /// Trapezoid rule skipping the singular node. First order; kept for comparison.
  punctured_trapezoid,
};

struct SolverOptions {
  QuadratureRule rule = QuadratureRule::log_corrected;
  std::size_t workers = default_worker_count();
};

struct PatchState {
  Contour contour;
  double time = 0.0;
  double amplitude = 1.0;
  KernelMode mode = KernelMode::euler();
};

/// Weights R(m), m = 0..N-1, of the product rule
///   \int_0^{2pi} ln(4 sin^2((alpha_j - s)/2)) f(s) ds ~= sum_k R((j - k) mod N) f(alpha_k),
/// exact for trigonometric polynomials of degree < N/2.
std::vector<double> log_quadrature_weights(std::size_t n);

/// Boundary velocity at every node. Summation over sources runs in fixed index
/// order per target, so the result does not depend on opts.workers.
std::vector<Vec2> cde_velocity(const PatchState& state, const SolverOptions& opts = {});

/// Velocity induced at points off the boundary, by trapezoid quadrature of
///   v(x) = amplitude * \oint kappa(|x - z(alpha')|) z_alpha(alpha') dalpha'.
/// Points closer to the boundary than twice the largest node spacing are refused.
class VelocityField {
 public:
  explicit VelocityField(const PatchState& state);

  /// Throws AccuracyRefusal inside the refusal band.
  Vec2 operator()(Vec2 x) const;
  bool admissible(Vec2 x) const;
  double refusal_distance() const { return refusal_distance_; }

 private:
  PatchState state_;
  std::vector<Vec2> tangent_;
  double refusal_distance_;
};

Vec2 point_velocity(const PatchState& state, Vec2 x);

/// RK4 step failure; `stage` is 1..4.
class StepFailure : public Error {
 public:
  StepFailure(int stage, const std::string& what)
      : Error("rk4 stage " + std::to_string(stage) + ": " + what), stage_(stage) {}
  int stage() const { return stage_; }

 private:
  int stage_;
};

PatchState rk4_step(const PatchState& state, double dt, const SolverOptions& opts = {});

struct EvolutionConfig {
  double dt = 0.01;
  double t_end = 1.0;
  std::size_t node_count = 256;
  double chord_arc_ceiling = 50.0;
  std::size_t diagnostics_stride = 1;
  /// 0 disables resampling.
  std::size_t resample_stride = 0;
  SolverOptions solver{};
};

struct DiagnosticsRecord {
  double time = 0.0;
  double area = 0.0;
  double perimeter = 0.0;
  double chord_arc = 0.0;
  double max_speed = 0.0;
};

/// Snapshots every diagnostics_stride steps starting at t = 0, plus the final
/// state when t_end does not fall on a stride boundary.
struct Trajectory {
  std::vector<PatchState> snapshots;
  std::vector<DiagnosticsRecord> diagnostics;
};

class EvolutionAborted : public Error {
 public:
  EvolutionAborted(Trajectory partial, double time, double chord_arc, double ceiling);
  const Trajectory& partial() const { return partial_; }
  double time() const { return time_; }
  double chord_arc() const { return chord_arc_; }

 private:
  Trajectory partial_;
  double time_;
  double chord_arc_;
};

DiagnosticsRecord measure(const PatchState& state, std::span<const Vec2> velocity);

Trajectory evolve(const PatchState& initial, const EvolutionConfig& cfg);

enum class FlowDirection { forward, backward };

struct TracerPath {
  std::vector<double> times;
  std::vector<Vec2> positions;
};

class TracerAborted : public Error {
 public:
  TracerAborted(std::size_t seed, Vec2 last_position, double time, const std::string& why);
  std::size_t seed() const { return seed_; }
  Vec2 last_position() const { return last_; }
  double time() const { return time_; }

 private:
  std::size_t seed_;
  Vec2 last_;
  double time_;
};

struct TraceOptions {
  /// RK4 steps per snapshot interval.
  std::size_t substeps = 1;
  std::size_t workers = default_worker_count();
};

/// Integrates dX/dt = v(X, t) through the stored snapshots, interpolating the
/// contour linearly in time. Backward runs from the last snapshot to the first,
/// giving the inverse flow map.
std::vector<TracerPath> trace_flow(const Trajectory& trajectory, std::span<const Vec2> seeds,
                                   FlowDirection direction, const TraceOptions& opts = {});

}  // namespace qgsw
