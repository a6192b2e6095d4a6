#pragma once

// Modified Bessel functions of integer order for real positive argument, and
// the analytic parts of the small-argument expansions of K_0 and K_1:
//
//   K_0(r) = -ln(r/2) (1 + h1(r)) + h2(r)
//   K_1(r) = 1/r + (r/2) ln(r/2) g1(r) - (r/4) g2(r)
//
// All functions are pure and thread-safe.

#include <vector>

namespace qgsw::special {

inline constexpr double euler_gamma = 0.577215664901532860606512090082402431;

/// Upper end of the argument range of the kernel series split.
inline constexpr double series_split_max = 8.0;
/// Upper end of the argument range of modified_bessel_i.
inline constexpr double bessel_i_max = 50.0;
/// Above this e^{-z} underflows; K_n saturates to zero.
inline constexpr double bessel_k_underflow = 700.0;

enum class Status { ok, underflow, overflow };

struct BesselValue {
  double value = 0.0;
  Status status = Status::ok;
};

struct SmoothKernelParts {
  double r = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
  double g1 = 0.0;
  double g2 = 0.0;
};

/// Digamma at positive integers: psi(m + 1) = H_m - gamma.
double digamma_int(int m_plus_one);

/// K_n(z), n >= 0, z > 0. Throws DomainError for z <= 0 or n < 0.
/// Saturates (0 or DBL_MAX) outside the representable range; see the checked variant.
double modified_bessel_k(int n, double z);

/// As modified_bessel_k, but reports saturation through the status field.
BesselValue modified_bessel_k_checked(int n, double z);

/// K_0(z), ..., K_{n_max}(z) by forward recurrence.
std::vector<double> modified_bessel_k_sequence(int n_max, double z);

/// I_n(z) by its power series; 0 <= z <= 50.
double modified_bessel_i(int n, double z);

/// d/dz K_n(z) = -K_{n+1}(z) + (n/z) K_n(z).
double bessel_k_derivative(int n, double z);

/// h1, h2, g1, g2 at r in (0, 8].
SmoothKernelParts kernel_series_parts(double r);

namespace detail {

struct K01 {
  double k0;
  double k1;
};

// Individual evaluation branches, exposed for the branch-agreement checks.
K01 k01_series(double z);
K01 k01_continued_fraction(double z);
K01 k01_asymptotic(double z);
K01 k01(double z);

// h1 and h2 only; the kernel quadrature needs nothing else.
struct H12 {
  double h1;
  double h2;
};
H12 k0_series_parts(double r);

inline constexpr double series_to_cf_switch = 2.0;
inline constexpr double cf_to_asymptotic_switch = 25.0;

}  // namespace detail

}  // namespace qgsw::special
