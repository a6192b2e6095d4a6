#pragma once

// Velocity kernels of the screened (QGSW) and unscreened (Euler) Biot-Savart laws.
//
//   QGSW:   K(x) = (eps / 2pi) x^perp / |x| K_1(eps |x|)
//   Euler:  K(x) = (1 / 2pi) x^perp / |x|^2
//
// and the scalar kernels kappa(r) that drive the contour dynamics equation
//   dz/dt(alpha) = amplitude * \oint kappa(|z(alpha) - z(alpha')|) z_alpha(alpha') dalpha'.

#include <optional>
#include <string>
#include <string_view>

#include "qgsw/geometry.hpp"

namespace qgsw {

enum class KernelVariant { qgsw, qgsw_shifted, euler };

/// Kernel selection; epsilon (the inverse Rossby radius) is carried by the QGSW variants only.
class KernelMode {
 public:
  static KernelMode qgsw(double epsilon);
  static KernelMode qgsw_shifted(double epsilon);
  static KernelMode euler();

  KernelVariant variant() const { return variant_; }
  bool is_euler() const { return variant_ == KernelVariant::euler; }
  /// Throws ArgumentError for the Euler variant.
  double epsilon() const;
  std::optional<double> epsilon_if_any() const { return epsilon_; }

  std::string name() const;

  friend bool operator==(const KernelMode&, const KernelMode&) = default;

 private:
  KernelMode(KernelVariant v, std::optional<double> eps) : variant_(v), epsilon_(eps) {}
  KernelVariant variant_;
  std::optional<double> epsilon_;
};

/// Parses "qgsw", "qgsw_shifted" (or "qgsw-shifted", "shifted") and "euler".
KernelVariant parse_kernel_variant(std::string_view text);
std::string to_string(KernelVariant v);

/// Vector kernel K(x). The shifted variant yields the QGSW field.
Vec2 biot_savart_kernel(const KernelMode& mode, Vec2 x);

/// Scalar contour kernel:
///   QGSW          (1/2pi) K_0(eps r)
///   QGSWShifted   (1/2pi) (K_0(eps r) + ln(eps/2))
///   Euler        -(1/2pi) ln r
double contour_kernel_scalar(const KernelMode& mode, double r);

/// Constant separating the shifted and unshifted QGSW scalar kernels: ln(eps/2) / 2pi.
double kernel_shift(double epsilon);

/// Pointwise gradient, entry (i, j) = d_i K_j (row i is the partial along x_i).
Mat2 kernel_gradient(double epsilon, Vec2 x);
Mat2 kernel_gradient(const KernelMode& mode, Vec2 x);

/// Split of the QGSW kernel gradient into a part with zero mean on circles and
/// |s1_ij| <= C / |x|^2 (s1), and an integrable part (s2).
struct GradDecomposition {
  Mat2 s1;
  Mat2 s2;
};

GradDecomposition gradient_decomposition(double epsilon, Vec2 x);

}  // namespace qgsw
