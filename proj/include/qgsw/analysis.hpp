#pragma once

// Numerical diagnostics: Hoelder seminorms, the log-Lipschitz modulus, Bessel
// integral identities, kernel bound scans, and the eps -> 0 convergence study
// comparing shifted-QGSW patches with Euler patches.

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "qgsw/contour.hpp"
#include "qgsw/dynamics.hpp"
#include "qgsw/geometry.hpp"
#include "qgsw/kernel.hpp"

namespace qgsw::analysis {

struct SampledField {
  std::vector<Vec2> points;
  std::variant<std::vector<double>, std::vector<Vec2>> values;
};

/// max over pairs of |f(x) - f(y)| / |x - y|^gamma; for vector values the max over components.
double holder_seminorm(const SampledField& field, double gamma);

/// l(r) = r (1 - ln r) for r < 1, r otherwise.
double log_lipschitz_modulus(double r);

/// max over pairs of |v(x) - v(y)| / l(|x - y|). Requires vector values.
double log_lipschitz_constant(const SampledField& field);

struct IdentityCheck {
  double quadrature = 0.0;
  double closed_form = 0.0;
  double relative_error() const;
};

/// int_0^inf t^(alpha-1) K_n(t) dt by quadrature, against 2^(alpha-2) Gamma((alpha-n)/2) Gamma((alpha+n)/2).
IdentityCheck bessel_integral_identity_check(double alpha, int n);

enum class DecompositionPart { s1, s2 };

/// Entry (row, col) of s1 or s2, indices 1 or 2.
struct ComponentSelector {
  DecompositionPart part = DecompositionPart::s1;
  int row = 1;
  int col = 1;
};

/// Trapezoid average of the selected entry over the circle |x| = radius.
double sphere_mean(ComponentSelector component, double radius, double epsilon, int quad_points);

struct KernelBoundSample {
  KernelMode mode = KernelMode::euler();
  double sup_kernel = 0.0;      // sup |K(x)| |x|
  double sup_gradient = 0.0;    // sup |grad K(x)|_F |x|^2
  double sup_difference = 0.0;  // sup |K(x) - K(y)| |x| |y| / |x - y|
};

struct KernelBoundScan {
  std::vector<KernelBoundSample> per_mode;
  KernelBoundSample pooled;

  /// (max - min) / min of each supremum across modes.
  double spread_kernel() const;
  double spread_gradient() const;
  double spread_difference() const;
};

/// Samples points radii[i] * (cos theta_i, sin theta_i) with golden-angle theta_i;
/// the difference quotient runs over all pairs.
KernelBoundScan kernel_bound_scan(std::span<const KernelMode> modes, std::span<const double> radii);
KernelBoundScan kernel_bound_scan(std::span<const double> epsilons, std::span<const double> radii);

/// n log-spaced values from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t n);

struct ConvergenceOptions {
  /// Compare against unshifted QGSW instead. The shift is a constant in the scalar kernel,
  /// which integrates to zero around a closed contour, so results match the shifted runs.
  bool unshifted = false;
  double chord_arc_ceiling = 50.0;
  /// Also run Euler at 2N to estimate the discretization floor.
  bool estimate_floor = true;
  SolverOptions solver{};
};

struct ConvergenceReport {
  std::vector<double> epsilons;
  std::vector<double> sup_distances;
  std::optional<double> fitted_slope;
  std::optional<double> euler_floor;
};

class StudyAborted : public Error {
 public:
  StudyAborted(std::optional<double> epsilon, const std::string& what);
  /// Empty when the Euler reference run failed.
  std::optional<double> epsilon() const { return epsilon_; }

 private:
  std::optional<double> epsilon_;
};

/// Least-squares slope of ln(y) against ln(x); empty for fewer than two usable points.
std::optional<double> loglog_slope(std::span<const double> x, std::span<const double> y);

ConvergenceReport convergence_study(const Contour& initial, std::span<const double> epsilons, double t_end, double dt,
                                    std::size_t sample_stride, const ConvergenceOptions& opts = {});

}  // namespace qgsw::analysis
