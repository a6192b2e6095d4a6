#include "qgsw/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "qgsw/special_fn.hpp"

namespace qgsw {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInvTwoPi = 0.5 * std::numbers::inv_pi;

std::shared_ptr<const std::vector<double>> cached_log_weights(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, std::shared_ptr<const std::vector<double>>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_shared<const std::vector<double>>(log_quadrature_weights(n));
  return slot;
}

constexpr double kWindowInner = 2.0;
constexpr double kWindowOuter = 6.0;

// Smooth step from 1 at kWindowInner to 0 at kWindowOuter.
double window(double rho) {
  auto f = [](double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; };
  const double a = f((kWindowOuter - rho) / (kWindowOuter - kWindowInner));
  const double b = f((rho - kWindowInner) / (kWindowOuter - kWindowInner));
  return a / (a + b);
}

// Split of 2 pi kappa(r) = -ln|2 sin(d/2)| w + s, d the parameter separation.
// w and s are smooth in the source parameter; s carries the diagonal limit.
struct LogSplit {
  double w;
  double s;
};

class KernelSplitter {
 public:
  explicit KernelSplitter(const KernelMode& mode) : variant_(mode.variant()) {
    if (!mode.is_euler()) {
      eps_ = mode.epsilon();
      log_half_eps_ = std::log(0.5 * eps_);
    }
  }

  // r > 0 is the chord, log_sin = ln|2 sin(d/2)|.
  LogSplit off_diagonal(double r, double log_sin) const {
    const double log_ratio = std::log(r) - log_sin;
    if (variant_ == KernelVariant::euler) return {1.0, -log_ratio};
    const double rho = eps_ * r;
    const double shift = variant_ == KernelVariant::qgsw_shifted ? log_half_eps_ : 0.0;
    if (rho <= kWindowInner) {
      const auto p = special::detail::k0_series_parts(rho);
      const double i0 = 1.0 + p.h1;
      // K_0 = -ln(r) I_0 - ln(eps/2) I_0 + h2; the shift removes ln(eps/2) from the constant term.
      const double constant_part = shift != 0.0 ? -log_half_eps_ * p.h1 : -log_half_eps_ * i0;
      return {i0, -log_ratio * i0 + constant_part + p.h2};
    }
    const double k0 = special::modified_bessel_k(0, rho);
    if (rho >= kWindowOuter) return {0.0, k0 + shift};
    // The log coefficient I_0 is tapered to zero so it never multiplies large values against K_0.
    const double w = special::modified_bessel_i(0, rho) * window(rho);
    return {w, k0 + log_sin * w + shift};
  }

  double diagonal(double speed) const {
    const double base = -std::log(speed);
    switch (variant_) {
      case KernelVariant::euler:
        return base;
      case KernelVariant::qgsw:
        return base - log_half_eps_ - special::euler_gamma;
      case KernelVariant::qgsw_shifted:
        return base - special::euler_gamma;
    }
    return base;
  }

 private:
  KernelVariant variant_;
  double eps_ = 0.0;
  double log_half_eps_ = 0.0;
};

std::vector<Vec2> velocity_log_corrected(const PatchState& state, std::span<const Vec2> t, std::size_t workers) {
  const Contour& c = state.contour;
  const std::size_t n = c.size();
  const double h = c.parameter_step();
  const auto weights = cached_log_weights(n);
  const std::vector<double>& rw = *weights;

  std::vector<double> log_sin(n, 0.0);
  for (std::size_t m = 1; m < n; ++m) log_sin[m] = std::log(std::abs(2.0 * std::sin(0.5 * h * static_cast<double>(m))));

  const KernelSplitter split(state.mode);
  const double scale = state.amplitude * kInvTwoPi;
  std::vector<Vec2> v(n);
  parallel_for(n, workers, [&](std::size_t j) {
    const Vec2 zj = c[j];
    double log1 = 0.0, log2 = 0.0, sm1 = 0.0, sm2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t m = (j + n - k) % n;
      LogSplit ws;
      if (m == 0) {
        ws = {1.0, split.diagonal(norm(t[j]))};
      } else {
        const double r = distance(zj, c[k]);
        if (!(r > 0.0)) {
          throw SingularityError("cde_velocity: nodes " + std::to_string(j) + " and " + std::to_string(k) + " coincide");
        }
        ws = split.off_diagonal(r, log_sin[m]);
      }
      const double a = rw[m] * ws.w;
      log1 += a * t[k].x1;
      log2 += a * t[k].x2;
      sm1 += ws.s * t[k].x1;
      sm2 += ws.s * t[k].x2;
    }
    v[j] = {scale * (-0.5 * log1 + h * sm1), scale * (-0.5 * log2 + h * sm2)};
  });
  return v;
}

std::vector<Vec2> velocity_punctured(const PatchState& state, std::span<const Vec2> t, std::size_t workers) {
  const Contour& c = state.contour;
  const std::size_t n = c.size();
  const double scale = state.amplitude * c.parameter_step();
  std::vector<Vec2> v(n);
  parallel_for(n, workers, [&](std::size_t j) {
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == j) continue;
      const double r = distance(c[j], c[k]);
      if (!(r > 0.0)) {
        throw SingularityError("cde_velocity: nodes " + std::to_string(j) + " and " + std::to_string(k) + " coincide");
      }
      const double kappa = contour_kernel_scalar(state.mode, r);
      s1 += kappa * t[k].x1;
      s2 += kappa * t[k].x2;
    }
    v[j] = {scale * s1, scale * s2};
  });
  return v;
}

Contour staged(const Contour& base, std::span<const Vec2> k, double factor) {
  std::vector<Vec2> nodes(base.size());
  for (std::size_t j = 0; j < base.size(); ++j) nodes[j] = base[j] + factor * k[j];
  return Contour(std::move(nodes));
}

PatchState rk4_from(const PatchState& state, double dt, std::vector<Vec2> k1, const SolverOptions& opts) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ArgumentError("rk4_step: dt must be positive");
  auto stage = [&](int index, auto&& fn) {
    try {
      return fn();
    } catch (const StepFailure&) {
      throw;
    } catch (const Error& e) {
      throw StepFailure(index, e.what());
    }
  };
  const Contour& z = state.contour;
  PatchState s = state;

  s.contour = stage(2, [&] { return staged(z, k1, 0.5 * dt); });
  const std::vector<Vec2> k2 = stage(2, [&] { return cde_velocity(s, opts); });
  s.contour = stage(3, [&] { return staged(z, k2, 0.5 * dt); });
  const std::vector<Vec2> k3 = stage(3, [&] { return cde_velocity(s, opts); });
  s.contour = stage(4, [&] { return staged(z, k3, dt); });
  const std::vector<Vec2> k4 = stage(4, [&] { return cde_velocity(s, opts); });

  std::vector<Vec2> nodes(z.size());
  const double w = dt / 6.0;
  for (std::size_t j = 0; j < z.size(); ++j) {
    nodes[j] = z[j] + w * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  }
  s.contour = stage(4, [&] { return Contour(std::move(nodes)); });
  s.time = state.time + dt;
  return s;
}

std::vector<Vec2> stage_one(const PatchState& state, const SolverOptions& opts) {
  try {
    return cde_velocity(state, opts);
  } catch (const Error& e) {
    throw StepFailure(1, e.what());
  }
}

}  // namespace

std::vector<double> log_quadrature_weights(std::size_t n) {
  require_node_count(n);
  const std::size_t half = n / 2;
  const double nh = static_cast<double>(half);
  std::vector<double> r(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double d = std::numbers::pi * static_cast<double>(m) / nh;  // alpha_j - alpha_k
    double s = 0.0;
    for (std::size_t p = 1; p < half; ++p) s += std::cos(static_cast<double>(p) * d) / static_cast<double>(p);
    const double nyquist = (m % 2 == 0) ? 1.0 : -1.0;
    r[m] = -(kTwoPi / nh) * s - (std::numbers::pi / (nh * nh)) * nyquist;
  }
  return r;
}

std::vector<Vec2> cde_velocity(const PatchState& state, const SolverOptions& opts) {
  const std::vector<Vec2> t = tangent(state.contour);
  if (opts.rule == QuadratureRule::punctured_trapezoid) return velocity_punctured(state, t, opts.workers);
  return velocity_log_corrected(state, t, opts.workers);
}

VelocityField::VelocityField(const PatchState& state)
    : state_(state), tangent_(tangent(state.contour)), refusal_distance_(2.0 * max_node_spacing(state.contour)) {}

bool VelocityField::admissible(Vec2 x) const {
  return distance_to_polyline(state_.contour.nodes(), x) >= refusal_distance_;
}

Vec2 VelocityField::operator()(Vec2 x) const {
  if (!admissible(x)) {
    throw AccuracyRefusal("point_velocity: point (" + std::to_string(x.x1) + ", " + std::to_string(x.x2) +
                          ") lies within " + std::to_string(refusal_distance_) + " of the boundary");
  }
  const Contour& c = state_.contour;
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const double kappa = contour_kernel_scalar(state_.mode, distance(x, c[k]));
    s1 += kappa * tangent_[k].x1;
    s2 += kappa * tangent_[k].x2;
  }
  const double scale = state_.amplitude * c.parameter_step();
  return {scale * s1, scale * s2};
}

Vec2 point_velocity(const PatchState& state, Vec2 x) { return VelocityField(state)(x); }

PatchState rk4_step(const PatchState& state, double dt, const SolverOptions& opts) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ArgumentError("rk4_step: dt must be positive");
  return rk4_from(state, dt, stage_one(state, opts), opts);
}

EvolutionAborted::EvolutionAborted(Trajectory partial, double time, double chord_arc, double ceiling)
    : Error("evolution-aborted: chord-arc constant " + std::to_string(chord_arc) + " exceeds ceiling " +
            std::to_string(ceiling) + " at t = " + std::to_string(time)),
      partial_(std::move(partial)),
      time_(time),
      chord_arc_(chord_arc) {}

DiagnosticsRecord measure(const PatchState& state, std::span<const Vec2> velocity) {
  DiagnosticsRecord d;
  d.time = state.time;
  d.area = area(state.contour);
  d.perimeter = perimeter(state.contour);
  d.chord_arc = chord_arc_constant(state.contour);
  for (const Vec2& v : velocity) d.max_speed = std::max(d.max_speed, norm(v));
  return d;
}

Trajectory evolve(const PatchState& initial, const EvolutionConfig& cfg) {
  if (!(cfg.dt > 0.0) || !(cfg.t_end > 0.0) || cfg.dt > cfg.t_end) {
    throw ArgumentError("evolve: requires 0 < dt <= t_end");
  }
  if (!(cfg.chord_arc_ceiling > 1.0)) throw ArgumentError("evolve: chord_arc_ceiling must exceed 1");
  if (cfg.diagnostics_stride == 0) throw ArgumentError("evolve: diagnostics_stride must be positive");
  if (!std::isfinite(initial.amplitude)) throw ArgumentError("evolve: amplitude must be finite");
  require_node_count(cfg.node_count);

  PatchState state = initial;
  if (state.contour.size() != cfg.node_count) state.contour = resample(state.contour, cfg.node_count);

  const double t0 = state.time;
  const auto steps = static_cast<std::size_t>(std::ceil(cfg.t_end / cfg.dt - 1e-9));
  Trajectory traj;

  auto check_guard = [&](const PatchState& s) {
    const double m = chord_arc_constant(s.contour);
    if (m > cfg.chord_arc_ceiling) throw EvolutionAborted(traj, s.time, m, cfg.chord_arc_ceiling);
  };

  check_guard(state);
  std::vector<Vec2> k1 = stage_one(state, cfg.solver);
  traj.snapshots.push_back(state);
  traj.diagnostics.push_back(measure(state, k1));

  for (std::size_t step = 1; step <= steps; ++step) {
    const double t_next = step == steps ? t0 + cfg.t_end : t0 + static_cast<double>(step) * cfg.dt;
    state = rk4_from(state, t_next - state.time, std::move(k1), cfg.solver);
    state.time = t_next;
    if (cfg.resample_stride > 0 && step % cfg.resample_stride == 0) {
      state.contour = resample(state.contour, cfg.node_count);
    }
    check_guard(state);
    k1 = stage_one(state, cfg.solver);
    if (step % cfg.diagnostics_stride == 0 || step == steps) {
      traj.snapshots.push_back(state);
      traj.diagnostics.push_back(measure(state, k1));
    }
  }
  return traj;
}

TracerAborted::TracerAborted(std::size_t seed, Vec2 last_position, double time, const std::string& why)
    : Error("tracer-aborted: seed " + std::to_string(seed) + " at t = " + std::to_string(time) + ": " + why),
      seed_(seed),
      last_(last_position),
      time_(time) {}

namespace {

PatchState interpolate(const PatchState& a, const PatchState& b, double t) {
  const double span = b.time - a.time;
  const double theta = span != 0.0 ? (t - a.time) / span : 0.0;
  if (theta == 0.0) return a;
  if (theta == 1.0) return b;
  std::vector<Vec2> nodes(a.contour.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) nodes[j] = (1.0 - theta) * a.contour[j] + theta * b.contour[j];
  PatchState s = a;
  s.contour = Contour(std::move(nodes));
  s.time = t;
  return s;
}

}  // namespace

std::vector<TracerPath> trace_flow(const Trajectory& trajectory, std::span<const Vec2> seeds, FlowDirection direction,
                                   const TraceOptions& opts) {
  const auto& snaps = trajectory.snapshots;
  if (snaps.empty()) throw ArgumentError("trace_flow: empty trajectory");
  if (opts.substeps == 0) throw ArgumentError("trace_flow: substeps must be positive");
  for (std::size_t i = 1; i < snaps.size(); ++i) {
    if (!(snaps[i].time > snaps[i - 1].time)) throw ArgumentError("trace_flow: snapshot times must increase");
    if (snaps[i].contour.size() != snaps[0].contour.size()) {
      throw ArgumentError("trace_flow: snapshots must share a node count");
    }
  }

  const bool forward = direction == FlowDirection::forward;
  const std::size_t ns = seeds.size();
  std::vector<TracerPath> paths(ns);
  std::vector<Vec2> pos(seeds.begin(), seeds.end());
  const double t_start = forward ? snaps.front().time : snaps.back().time;

  {
    const VelocityField field(forward ? snaps.front() : snaps.back());
    for (std::size_t i = 0; i < ns; ++i) {
      if (!field.admissible(pos[i])) {
        throw TracerAborted(i, pos[i], t_start, "seed inside the refusal band");
      }
      paths[i].times.push_back(t_start);
      paths[i].positions.push_back(pos[i]);
    }
  }

  const std::size_t intervals = snaps.size() - 1;
  for (std::size_t q = 0; q < intervals; ++q) {
    const std::size_t lo = forward ? q : intervals - 1 - q;
    const PatchState& a = snaps[lo];
    const PatchState& b = snaps[lo + 1];
    const double span = (b.time - a.time) / static_cast<double>(opts.substeps);
    for (std::size_t sub = 0; sub < opts.substeps; ++sub) {
      double t0, t1;
      if (forward) {
        t0 = a.time + static_cast<double>(sub) * span;
        t1 = sub + 1 == opts.substeps ? b.time : t0 + span;
      } else {
        t0 = b.time - static_cast<double>(sub) * span;
        t1 = sub + 1 == opts.substeps ? a.time : t0 - span;
      }
      const double dt = t1 - t0;  // negative when running backward
      const double tm = 0.5 * (t0 + t1);
      const VelocityField f0(interpolate(a, b, t0));
      const VelocityField fm(interpolate(a, b, tm));
      const VelocityField f1(interpolate(a, b, t1));

      parallel_for(ns, opts.workers, [&](std::size_t i) {
        const Vec2 x = pos[i];
        try {
          const Vec2 k1 = f0(x);
          const Vec2 k2 = fm(x + 0.5 * dt * k1);
          const Vec2 k3 = fm(x + 0.5 * dt * k2);
          const Vec2 k4 = f1(x + dt * k3);
          pos[i] = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        } catch (const AccuracyRefusal& e) {
          throw TracerAborted(i, x, t0, e.what());
        }
        if (!f1.admissible(pos[i])) throw TracerAborted(i, x, t0, "tracer entered the refusal band");
      });
      for (std::size_t i = 0; i < ns; ++i) {
        paths[i].times.push_back(t1);
        paths[i].positions.push_back(pos[i]);
      }
    }
  }
  return paths;
}

}  // namespace qgsw
