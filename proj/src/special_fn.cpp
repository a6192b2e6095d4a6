#include "qgsw/special_fn.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qgsw/errors.hpp"

namespace qgsw::special {

namespace {

constexpr double kSeriesTolerance = 1e-18;
constexpr int kMaxSeriesTerms = 500;

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

void require_positive(double z, const char* what) {
  if (!(z > 0.0)) {
    throw DomainError(std::string(what) + ": singular at z = 0 (requires z > 0, got " + std::to_string(z) + ")");
  }
}

void require_order(int n, const char* what) {
  if (n < 0) throw DomainError(std::string(what) + ": order must be nonnegative");
}

}  // namespace

double digamma_int(int m_plus_one) {
  if (m_plus_one < 1) throw DomainError("digamma_int: argument must be a positive integer");
  double harmonic = 0.0;
  for (int k = 1; k < m_plus_one; ++k) harmonic += 1.0 / k;
  return harmonic - euler_gamma;
}

SmoothKernelParts kernel_series_parts(double r) {
  if (!(r > 0.0) || r > series_split_max) {
    throw RangeError("kernel_series_parts: r must lie in (0, 8], got " + std::to_string(r));
  }
  const double q = 0.25 * r * r;

  // h1 = sum_{m>=1} t_m, h2 = sum_{m>=0} t_m psi(m+1), t_m = q^m / (m!)^2
  // g1 = sum_{k>=0} u_k, g2 = sum_{k>=0} (psi(k+1) + psi(k+2)) u_k, u_k = q^k / (k! (k+1)!)
  CompensatedSum h1, h2, g1, g2;
  double t = 1.0;
  double u = 1.0;
  double harmonic = 0.0;  // H_m
  h2.add(-euler_gamma);
  g1.add(1.0);
  g2.add(1.0 - 2.0 * euler_gamma);
  for (int m = 1; m < kMaxSeriesTerms; ++m) {
    t *= q / (static_cast<double>(m) * m);
    u *= q / (static_cast<double>(m) * (m + 1));
    harmonic += 1.0 / m;
    const double psi_m1 = harmonic - euler_gamma;
    const double psi_m2 = harmonic + 1.0 / (m + 1) - euler_gamma;
    h1.add(t);
    h2.add(t * psi_m1);
    g1.add(u);
    g2.add(u * (psi_m1 + psi_m2));
    const double scale = 1.0 + h1.value();
    if (t * std::max(1.0, std::abs(psi_m1)) < kSeriesTolerance * scale &&
        u * std::abs(psi_m1 + psi_m2) < kSeriesTolerance * g1.value()) {
      break;
    }
  }
  return {r, h1.value(), h2.value(), g1.value(), g2.value()};
}

namespace detail {

H12 k0_series_parts(double r) {
  const double q = 0.25 * r * r;
  CompensatedSum h1, h2;
  double t = 1.0;
  double harmonic = 0.0;
  h2.add(-euler_gamma);
  for (int m = 1; m < kMaxSeriesTerms; ++m) {
    t *= q / (static_cast<double>(m) * m);
    harmonic += 1.0 / m;
    const double psi = harmonic - euler_gamma;
    h1.add(t);
    h2.add(t * psi);
    if (t * std::max(1.0, psi) < kSeriesTolerance * (1.0 + h1.value())) break;
  }
  return {h1.value(), h2.value()};
}

K01 k01_series(double z) {
  const SmoothKernelParts p = kernel_series_parts(z);
  const double log_half = std::log(0.5 * z);
  const double k0 = -log_half * (1.0 + p.h1) + p.h2;
  const double k1 = 1.0 / z + 0.5 * z * log_half * p.g1 - 0.25 * z * p.g2;
  return {k0, k1};
}

// Steed's continued fraction (Temme's CF2) for K_0 and K_1; accurate for z >= 2.
K01 k01_continued_fraction(double z) {
  constexpr double eps = 1e-17;
  constexpr int max_iter = 10000;
  const double a1 = 0.25;
  double b = 2.0 * (1.0 + z);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 1; i <= max_iter; ++i) {
    a -= 2 * i;
    c = -a * c / (i + 1.0);
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < eps) break;
  }
  h *= a1;
  const double k0 = std::sqrt(std::numbers::pi / (2.0 * z)) * std::exp(-z) / s;
  const double k1 = k0 * (z + 0.5 - h) / z;
  return {k0, k1};
}

namespace {

// sum_k prod_{j<=k} (4n^2 - (2j-1)^2) / (j 8z), truncated before the smallest term.
double asymptotic_factor(int n, double z) {
  const double mu = 4.0 * n * n;
  CompensatedSum sum;
  double term = 1.0;
  sum.add(term);
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = term * (mu - odd * odd) / (8.0 * k * z);
    if (next == 0.0 || std::abs(next) >= std::abs(term)) break;
    sum.add(next);
    term = next;
    if (std::abs(term) < 1e-18 * std::abs(sum.value())) break;
  }
  return sum.value();
}

}  // namespace

K01 k01_asymptotic(double z) {
  const double prefactor = std::sqrt(std::numbers::pi / (2.0 * z)) * std::exp(-z);
  return {prefactor * asymptotic_factor(0, z), prefactor * asymptotic_factor(1, z)};
}

K01 k01(double z) {
  if (z <= series_to_cf_switch) return k01_series(z);
  if (z <= cf_to_asymptotic_switch) return k01_continued_fraction(z);
  return k01_asymptotic(z);
}

}  // namespace detail

BesselValue modified_bessel_k_checked(int n, double z) {
  require_order(n, "modified_bessel_k");
  require_positive(z, "modified_bessel_k");
  if (z > bessel_k_underflow) return {0.0, Status::underflow};

  const detail::K01 base = detail::k01(z);
  double prev = base.k0;
  double cur = base.k1;
  if (n == 0) {
    prev = cur = base.k0;
  } else {
    for (int k = 1; k < n; ++k) {
      const double next = prev + (2.0 * k / z) * cur;
      prev = cur;
      cur = next;
      if (!std::isfinite(cur)) break;
    }
  }
  if (!std::isfinite(cur)) return {std::numeric_limits<double>::max(), Status::overflow};
  if (cur < std::numeric_limits<double>::min()) return {cur, Status::underflow};
  return {cur, Status::ok};
}

double modified_bessel_k(int n, double z) { return modified_bessel_k_checked(n, z).value; }

std::vector<double> modified_bessel_k_sequence(int n_max, double z) {
  require_order(n_max, "modified_bessel_k_sequence");
  require_positive(z, "modified_bessel_k_sequence");
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
  if (z > bessel_k_underflow) return out;
  const detail::K01 base = detail::k01(z);
  out[0] = base.k0;
  if (n_max >= 1) out[1] = base.k1;
  for (int k = 1; k < n_max; ++k) out[k + 1] = out[k - 1] + (2.0 * k / z) * out[k];
  return out;
}

double modified_bessel_i(int n, double z) {
  require_order(n, "modified_bessel_i");
  if (!(z >= 0.0)) throw DomainError("modified_bessel_i: requires z >= 0");
  if (z > bessel_i_max) throw RangeError("modified_bessel_i: z > 50 is outside the series range");
  if (z == 0.0) return n == 0 ? 1.0 : 0.0;

  const double half = 0.5 * z;
  double term = 1.0;
  for (int k = 1; k <= n; ++k) term *= half / k;
  if (term == 0.0) return 0.0;
  const double q = half * half;
  CompensatedSum sum;
  sum.add(term);
  for (int m = 1; m < kMaxSeriesTerms; ++m) {
    term *= q / (static_cast<double>(m) * (n + m));
    sum.add(term);
    if (term < kSeriesTolerance * sum.value()) break;
  }
  return sum.value();
}

double bessel_k_derivative(int n, double z) {
  require_order(n, "bessel_k_derivative");
  require_positive(z, "bessel_k_derivative");
  const std::vector<double> k = modified_bessel_k_sequence(n + 1, z);
  if (n == 0) return -k[1];
  return -k[n + 1] + (n / z) * k[n];
}

}  // namespace qgsw::special
