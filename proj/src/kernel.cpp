#include "qgsw/kernel.hpp"

#include <cmath>
#include <numbers>

#include "qgsw/errors.hpp"
#include "qgsw/special_fn.hpp"

namespace qgsw {

namespace {

constexpr double kInvTwoPi = 0.5 * std::numbers::inv_pi;

void require_valid_epsilon(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw ArgumentError("kernel mode: epsilon must be a positive finite number, got " + std::to_string(eps));
  }
}

double require_nonzero(Vec2 x, const char* what) {
  const double r = norm(x);
  if (!(r > 0.0)) throw SingularityError(std::string(what) + ": kernel is singular at x = 0");
  return r;
}

}  // namespace

KernelMode KernelMode::qgsw(double epsilon) {
  require_valid_epsilon(epsilon);
  return {KernelVariant::qgsw, epsilon};
}

KernelMode KernelMode::qgsw_shifted(double epsilon) {
  require_valid_epsilon(epsilon);
  return {KernelVariant::qgsw_shifted, epsilon};
}

KernelMode KernelMode::euler() { return {KernelVariant::euler, std::nullopt}; }

double KernelMode::epsilon() const {
  if (!epsilon_) throw ArgumentError("kernel mode: the Euler kernel has no epsilon");
  return *epsilon_;
}

std::string KernelMode::name() const {
  if (!epsilon_) return to_string(variant_);
  return to_string(variant_) + "(eps=" + std::to_string(*epsilon_) + ")";
}

KernelVariant parse_kernel_variant(std::string_view text) {
  if (text == "qgsw") return KernelVariant::qgsw;
  if (text == "qgsw_shifted" || text == "qgsw-shifted" || text == "shifted") return KernelVariant::qgsw_shifted;
  if (text == "euler") return KernelVariant::euler;
  throw ArgumentError("unknown kernel mode '" + std::string(text) + "'");
}

std::string to_string(KernelVariant v) {
  switch (v) {
    case KernelVariant::qgsw:
      return "qgsw";
    case KernelVariant::qgsw_shifted:
      return "qgsw_shifted";
    case KernelVariant::euler:
      return "euler";
  }
  return "unknown";
}

Vec2 biot_savart_kernel(const KernelMode& mode, Vec2 x) {
  const double r = require_nonzero(x, "biot_savart_kernel");
  if (mode.is_euler()) return (kInvTwoPi / (r * r)) * perp(x);
  const double eps = mode.epsilon();
  return (kInvTwoPi * eps * special::modified_bessel_k(1, eps * r) / r) * perp(x);
}

double kernel_shift(double epsilon) {
  require_valid_epsilon(epsilon);
  return kInvTwoPi * std::log(0.5 * epsilon);
}

double contour_kernel_scalar(const KernelMode& mode, double r) {
  if (!(r > 0.0)) throw DomainError("contour_kernel_scalar: requires r > 0");
  switch (mode.variant()) {
    case KernelVariant::euler:
      return -kInvTwoPi * std::log(r);
    case KernelVariant::qgsw:
      return kInvTwoPi * special::modified_bessel_k(0, mode.epsilon() * r);
    case KernelVariant::qgsw_shifted: {
      const double eps = mode.epsilon();
      const double rho = eps * r;
      // K_0(rho) + ln(eps/2) = -ln(r) I_0(rho) - ln(eps/2) h1(rho) + h2(rho) avoids the cancellation
      // as eps -> 0, but the series terms themselves cancel for larger rho.
      if (rho <= special::detail::series_to_cf_switch) {
        const auto p = special::detail::k0_series_parts(rho);
        return kInvTwoPi * (-std::log(r) * (1.0 + p.h1) - std::log(0.5 * eps) * p.h1 + p.h2);
      }
      return kInvTwoPi * (special::modified_bessel_k(0, rho) + std::log(0.5 * eps));
    }
  }
  return 0.0;
}

GradDecomposition gradient_decomposition(double epsilon, Vec2 x) {
  require_valid_epsilon(epsilon);
  const double r = require_nonzero(x, "gradient_decomposition");
  const double rho = epsilon * r;
  const std::vector<double> k = special::modified_bessel_k_sequence(2, rho);
  const double r2 = r * r;
  const double x1 = x.x1;
  const double x2 = x.x2;

  const double diag = kInvTwoPi * epsilon * epsilon * x1 * x2 / r2 * k[2];
  const double off = kInvTwoPi * epsilon * (x2 * x2 - x1 * x1) / (r2 * r) * k[1];

  GradDecomposition out;
  out.s1(0, 0) = diag;
  out.s1(0, 1) = off;
  out.s1(1, 0) = off;
  out.s1(1, 1) = -diag;
  out.s2(0, 1) = -kInvTwoPi * epsilon * epsilon * x1 * x1 / r2 * k[0];
  out.s2(1, 0) = kInvTwoPi * epsilon * epsilon * x2 * x2 / r2 * k[0];
  return out;
}

Mat2 kernel_gradient(double epsilon, Vec2 x) {
  require_valid_epsilon(epsilon);
  const double r = require_nonzero(x, "kernel_gradient");
  const double rho = epsilon * r;
  const double k1 = special::modified_bessel_k(1, rho);
  const double dk1 = special::bessel_k_derivative(1, rho);
  const double r2 = r * r;
  const double r3 = r2 * r;
  const double x1 = x.x1;
  const double x2 = x.x2;
  const double c = kInvTwoPi * epsilon;

  Mat2 g;
  g(0, 0) = c * (x1 * x2 / r3 * k1 - epsilon * x1 * x2 / r2 * dk1);
  g(0, 1) = c * (k1 / r - x1 * x1 / r3 * k1 + epsilon * x1 * x1 / r2 * dk1);
  g(1, 0) = c * (-k1 / r + x2 * x2 / r3 * k1 - epsilon * x2 * x2 / r2 * dk1);
  g(1, 1) = c * (-x1 * x2 / r3 * k1 + epsilon * x1 * x2 / r2 * dk1);
  return g;
}

Mat2 kernel_gradient(const KernelMode& mode, Vec2 x) {
  if (!mode.is_euler()) return kernel_gradient(mode.epsilon(), x);
  const double r = require_nonzero(x, "kernel_gradient");
  const double r4 = r * r * r * r;
  const double x1 = x.x1;
  const double x2 = x.x2;
  Mat2 g;
  g(0, 0) = kInvTwoPi * 2.0 * x1 * x2 / r4;
  g(0, 1) = kInvTwoPi * (x2 * x2 - x1 * x1) / r4;
  g(1, 0) = kInvTwoPi * (x2 * x2 - x1 * x1) / r4;
  g(1, 1) = -kInvTwoPi * 2.0 * x1 * x2 / r4;
  return g;
}

}  // namespace qgsw
