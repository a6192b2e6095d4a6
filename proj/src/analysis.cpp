#include "qgsw/analysis.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qgsw/errors.hpp"
#include "qgsw/special_fn.hpp"

namespace qgsw::analysis {

namespace {

void require_pairs(const SampledField& field) {
  const std::size_t n = field.points.size();
  const std::size_t m = std::visit([](const auto& v) { return v.size(); }, field.values);
  if (n != m) throw ArgumentError("sampled field: points and values differ in length");
  if (n < 2) throw ArgumentError("sampled field: at least two points are required");
}

void require_distinct(const Vec2& a, const Vec2& b, std::size_t i, std::size_t j) {
  if (a == b) {
    throw ArgumentError("sampled field: points " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
  }
}

double relative_spread(const std::vector<KernelBoundSample>& s, double KernelBoundSample::*field) {
  if (s.empty()) return 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& x : s) {
    lo = std::min(lo, x.*field);
    hi = std::max(hi, x.*field);
  }
  return lo > 0.0 ? (hi - lo) / lo : std::numeric_limits<double>::infinity();
}

}  // namespace

double holder_seminorm(const SampledField& field, double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ArgumentError("holder_seminorm: gamma must lie in (0, 1]");
  require_pairs(field);
  const auto& p = field.points;
  double best = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      require_distinct(p[i], p[j], i, j);
      const double denom = std::pow(distance(p[i], p[j]), gamma);
      const double diff = std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v[0])>;
            if constexpr (std::is_same_v<T, double>) {
              return std::abs(v[i] - v[j]);
            } else {
              return std::max(std::abs(v[i].x1 - v[j].x1), std::abs(v[i].x2 - v[j].x2));
            }
          },
          field.values);
      best = std::max(best, diff / denom);
    }
  }
  return best;
}

double log_lipschitz_modulus(double r) {
  if (!(r > 0.0)) throw DomainError("log_lipschitz_modulus: requires r > 0");
  return r < 1.0 ? r * (1.0 - std::log(r)) : r;
}

double log_lipschitz_constant(const SampledField& field) {
  require_pairs(field);
  const auto* v = std::get_if<std::vector<Vec2>>(&field.values);
  if (!v) throw ArgumentError("log_lipschitz_constant: requires vector-valued samples");
  const auto& p = field.points;
  double best = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      require_distinct(p[i], p[j], i, j);
      best = std::max(best, distance((*v)[i], (*v)[j]) / log_lipschitz_modulus(distance(p[i], p[j])));
    }
  }
  return best;
}

double IdentityCheck::relative_error() const { return std::abs(quadrature - closed_form) / std::abs(closed_form); }

IdentityCheck bessel_integral_identity_check(double alpha, int n) {
  if (n < 0) throw DomainError("bessel_integral_identity_check: order must be nonnegative");
  if (!(alpha > n)) throw DomainError("bessel_integral_identity_check: requires alpha > n");
  using boost::math::quadrature::gauss_kronrod;
  constexpr double tol = 1e-14;
  constexpr unsigned depth = 20;

  // [0, delta]: leading singular term of the small-argument series.
  constexpr double delta = 1e-8;
  double head = 0.0;
  if (n == 0) {
    // K_0(t) ~ -ln(t/2) - gamma
    const double c = std::numbers::ln2 - special::euler_gamma;
    head = std::pow(delta, alpha) * ((c - std::log(delta)) / alpha + 1.0 / (alpha * alpha));
  } else {
    // K_n(t) ~ 2^(n-1) (n-1)! t^(-n)
    head = std::ldexp(std::tgamma(static_cast<double>(n)), n - 1) * std::pow(delta, alpha - n) / (alpha - n);
  }

  // [delta, 1] with t = e^(-s): the integrand e^(-s alpha) K_n(e^(-s)) is smooth in s.
  const double s_max = -std::log(delta);
  const double middle = gauss_kronrod<double, 61>::integrate(
      [&](double s) {
        const double t = std::exp(-s);
        return std::pow(t, alpha) * special::modified_bessel_k(n, t);
      },
      0.0, s_max, depth, tol);

  // [1, inf) with t = 1 + u / (1 - u).
  const double tail = gauss_kronrod<double, 61>::integrate(
      [&](double u) {
        if (u >= 1.0) return 0.0;
        const double one_minus = 1.0 - u;
        const double t = 1.0 + u / one_minus;
        return std::pow(t, alpha - 1.0) * special::modified_bessel_k(n, t) / (one_minus * one_minus);
      },
      0.0, 1.0, depth, tol);

  IdentityCheck out;
  out.quadrature = head + middle + tail;
  out.closed_form = std::exp2(alpha - 2.0) * std::tgamma(0.5 * (alpha - n)) * std::tgamma(0.5 * (alpha + n));
  return out;
}

double sphere_mean(ComponentSelector component, double radius, double epsilon, int quad_points) {
  if (component.row < 1 || component.row > 2 || component.col < 1 || component.col > 2) {
    throw ArgumentError("sphere_mean: entry indices must be 1 or 2");
  }
  if (!(radius > 0.0)) throw ArgumentError("sphere_mean: radius must be positive");
  if (quad_points < 64) throw ArgumentError("sphere_mean: at least 64 quadrature points are required");
  double sum = 0.0;
  for (int k = 0; k < quad_points; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / quad_points;
    const GradDecomposition d = gradient_decomposition(epsilon, {radius * std::cos(theta), radius * std::sin(theta)});
    const Mat2& m = component.part == DecompositionPart::s1 ? d.s1 : d.s2;
    sum += m(component.row - 1, component.col - 1);
  }
  return sum / quad_points;
}

double KernelBoundScan::spread_kernel() const { return relative_spread(per_mode, &KernelBoundSample::sup_kernel); }
double KernelBoundScan::spread_gradient() const { return relative_spread(per_mode, &KernelBoundSample::sup_gradient); }
double KernelBoundScan::spread_difference() const {
  return relative_spread(per_mode, &KernelBoundSample::sup_difference);
}

KernelBoundScan kernel_bound_scan(std::span<const KernelMode> modes, std::span<const double> radii) {
  if (modes.empty() || radii.empty()) throw ArgumentError("kernel_bound_scan: grids must be nonempty");
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<Vec2> pts(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw ArgumentError("kernel_bound_scan: radii must be positive");
    const double th = golden * static_cast<double>(i);
    pts[i] = {radii[i] * std::cos(th), radii[i] * std::sin(th)};
  }

  KernelBoundScan scan;
  for (const KernelMode& mode : modes) {
    KernelBoundSample s;
    s.mode = mode;
    std::vector<Vec2> k(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double r = norm(pts[i]);
      k[i] = biot_savart_kernel(mode, pts[i]);
      s.sup_kernel = std::max(s.sup_kernel, norm(k[i]) * r);
      s.sup_gradient = std::max(s.sup_gradient, kernel_gradient(mode, pts[i]).frobenius() * r * r);
    }
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        const double d = distance(pts[i], pts[j]);
        if (!(d > 0.0)) continue;
        s.sup_difference = std::max(s.sup_difference, distance(k[i], k[j]) * norm(pts[i]) * norm(pts[j]) / d);
      }
    }
    scan.pooled.sup_kernel = std::max(scan.pooled.sup_kernel, s.sup_kernel);
    scan.pooled.sup_gradient = std::max(scan.pooled.sup_gradient, s.sup_gradient);
    scan.pooled.sup_difference = std::max(scan.pooled.sup_difference, s.sup_difference);
    scan.per_mode.push_back(s);
  }
  return scan;
}

KernelBoundScan kernel_bound_scan(std::span<const double> epsilons, std::span<const double> radii) {
  std::vector<KernelMode> modes;
  modes.reserve(epsilons.size());
  for (double e : epsilons) modes.push_back(KernelMode::qgsw(e));
  return kernel_bound_scan(modes, radii);
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi >= lo) || n == 0) throw ArgumentError("log_grid: requires 0 < lo <= hi and n >= 1");
  if (n == 1) return {lo};
  std::vector<double> out(n);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

StudyAborted::StudyAborted(std::optional<double> epsilon, const std::string& what)
    : Error(epsilon ? "convergence study aborted at eps = " + std::to_string(*epsilon) + ": " + what
                    : "convergence study aborted in the Euler reference run: " + what),
      epsilon_(epsilon) {}

std::optional<double> loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ArgumentError("loglog_slope: length mismatch");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  if (lx.size() < 2) return std::nullopt;
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

namespace {

double sup_distance(const Trajectory& a, const Trajectory& b) {
  if (a.snapshots.size() != b.snapshots.size()) throw ArgumentError("convergence study: sample counts differ");
  double d = 0.0;
  for (std::size_t i = 0; i < a.snapshots.size(); ++i) {
    const Contour& ca = a.snapshots[i].contour;
    const Contour& cb = b.snapshots[i].contour;
    d = std::max(d, ca.size() == cb.size() ? contour_distance(ca, cb) : contour_distance(ca, resample(cb, ca.size())));
  }
  return d;
}

}  // namespace

ConvergenceReport convergence_study(const Contour& initial, std::span<const double> epsilons, double t_end, double dt,
                                    std::size_t sample_stride, const ConvergenceOptions& opts) {
  if (epsilons.empty()) throw ArgumentError("convergence_study: at least one epsilon is required");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0) || !(epsilons[i] < 2.0)) {
      throw ArgumentError("convergence_study: every epsilon must lie in (0, 2)");
    }
    if (i > 0 && !(epsilons[i] < epsilons[i - 1])) {
      throw ArgumentError("convergence_study: epsilons must be strictly decreasing");
    }
  }
  if (sample_stride == 0) throw ArgumentError("convergence_study: sample_stride must be positive");

  EvolutionConfig cfg;
  cfg.dt = dt;
  cfg.t_end = t_end;
  cfg.node_count = initial.size();
  cfg.chord_arc_ceiling = opts.chord_arc_ceiling;
  cfg.diagnostics_stride = sample_stride;
  cfg.solver = opts.solver;

  auto run = [&](const KernelMode& mode, std::optional<double> eps, std::size_t nodes) {
    EvolutionConfig c = cfg;
    c.node_count = nodes;
    try {
      return evolve(PatchState{initial, 0.0, 1.0, mode}, c);
    } catch (const Error& e) {
      throw StudyAborted(eps, e.what());
    }
  };

  const Trajectory euler = run(KernelMode::euler(), std::nullopt, initial.size());

  ConvergenceReport report;
  for (double eps : epsilons) {
    const KernelMode mode = opts.unshifted ? KernelMode::qgsw(eps) : KernelMode::qgsw_shifted(eps);
    const Trajectory q = run(mode, eps, initial.size());
    report.epsilons.push_back(eps);
    report.sup_distances.push_back(sup_distance(euler, q));
  }
  if (report.epsilons.size() >= 2) report.fitted_slope = loglog_slope(report.epsilons, report.sup_distances);

  if (opts.estimate_floor) {
    const Trajectory fine = run(KernelMode::euler(), std::nullopt, 2 * initial.size());
    report.euler_floor = sup_distance(euler, fine);
  }
  return report;
}

}  // namespace qgsw::analysis
