#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "oracles.hpp"
#include "qgsw/errors.hpp"
#include "qgsw/kernel.hpp"
#include "qgsw/special_fn.hpp"

using namespace qgsw;
using std::numbers::pi;

namespace {

const double kEpsilons[] = {0.01, 0.1, 1.0, 10.0};

// Points at golden angles on a log-spaced set of radii.
std::vector<Vec2> sample_points(int n, double rmin, double rmax) {
  std::vector<Vec2> pts;
  const double golden = pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double r = std::exp(std::log(rmin) + (std::log(rmax) - std::log(rmin)) * i / (n - 1));
    pts.push_back({r * std::cos(golden * i), r * std::sin(golden * i)});
  }
  return pts;
}

}  // namespace

TEST_CASE("kernel modes") {
  CHECK_THROWS_AS(KernelMode::qgsw(0.0), ArgumentError);
  CHECK_THROWS_AS(KernelMode::qgsw(-1.0), ArgumentError);
  CHECK_THROWS_AS(KernelMode::qgsw_shifted(NAN), ArgumentError);
  CHECK_THROWS_AS(KernelMode::euler().epsilon(), ArgumentError);
  CHECK(KernelMode::qgsw(2.0).epsilon() == 2.0);
  CHECK(parse_kernel_variant("qgsw_shifted") == KernelVariant::qgsw_shifted);
  CHECK(parse_kernel_variant("euler") == KernelVariant::euler);
  CHECK_THROWS(parse_kernel_variant("navier"));
  CHECK(KernelMode::qgsw(1.0) == KernelMode::qgsw(1.0));
  CHECK_FALSE(KernelMode::qgsw(1.0) == KernelMode::qgsw_shifted(1.0));
}

TEST_CASE("Biot-Savart kernel values") {
  const Vec2 e1{1.0, 0.0};
  const Vec2 ve = biot_savart_kernel(KernelMode::euler(), e1);
  CHECK(ve.x1 == 0.0);
  CHECK(ve.x2 == doctest::Approx(1.0 / (2 * pi)).epsilon(1e-15));
  const Vec2 vq = biot_savart_kernel(KernelMode::qgsw(1.0), e1);
  CHECK(std::fabs(vq.x1) < 1e-18);
  CHECK(vq.x2 == doctest::Approx(static_cast<double>(oracle::bessel_k(1, 1.0L) / (2 * pi))).epsilon(1e-14));
  CHECK(vq.x2 == doctest::Approx(0.095796510968641215).epsilon(1e-14));
  const Vec2 vs = biot_savart_kernel(KernelMode::qgsw_shifted(1.0), e1);
  CHECK(vs == vq);
  CHECK_THROWS_AS(biot_savart_kernel(KernelMode::qgsw(1.0), Vec2{0.0, 0.0}), SingularityError);
  CHECK_THROWS_AS(biot_savart_kernel(KernelMode::euler(), Vec2{0.0, 0.0}), SingularityError);
}

TEST_CASE("Biot-Savart kernel is odd") {
  for (const auto& mode : {KernelMode::euler(), KernelMode::qgsw(0.3), KernelMode::qgsw_shifted(4.0)}) {
    for (const Vec2& x : sample_points(50, 1e-3, 30.0)) {
      const Vec2 a = biot_savart_kernel(mode, x);
      const Vec2 b = biot_savart_kernel(mode, -x);
      CHECK(a.x1 == -b.x1);
      CHECK(a.x2 == -b.x2);
    }
  }
}

TEST_CASE("scalar contour kernels") {
  CHECK(contour_kernel_scalar(KernelMode::euler(), 1.0) == 0.0);
  CHECK(contour_kernel_scalar(KernelMode::qgsw(1.0), 1.0) == doctest::Approx(0.067008120508497137).epsilon(1e-14));
  CHECK_THROWS_AS(contour_kernel_scalar(KernelMode::euler(), 0.0), DomainError);
  CHECK_THROWS_AS(contour_kernel_scalar(KernelMode::qgsw(1.0), -1.0), DomainError);

  // shifted kernel tends to -(ln r + gamma)/(2 pi) as eps -> 0
  const double r = 0.5;
  const double limit = -(std::log(r) + special::euler_gamma) / (2 * pi);
  CHECK(limit == doctest::Approx(0.018451073777171806).epsilon(1e-14));
  double prev_gap = INFINITY;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const double v = contour_kernel_scalar(KernelMode::qgsw_shifted(eps), r);
    const long double ref = (oracle::bessel_k(0, eps * r) + std::log(static_cast<long double>(eps) / 2)) / (2 * pi);
    CHECK(static_cast<double>(std::fabs(v - ref)) < 1e-14);
    const double gap = std::fabs(v - limit);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
  CHECK(prev_gap < 1e-7);
}

TEST_CASE("shift is a constant in r") {
  for (double eps : {1e-3, 0.05, 1.0, 7.0}) {
    const double shift = kernel_shift(eps);
    CHECK(shift == doctest::Approx(std::log(eps / 2) / (2 * pi)).epsilon(1e-15));
    for (double r : {1e-3, 0.01, 0.3, 1.0, 2.5, 40.0 / eps}) {
      const double d = contour_kernel_scalar(KernelMode::qgsw_shifted(eps), r) - contour_kernel_scalar(KernelMode::qgsw(eps), r);
      CHECK(std::fabs(d - shift) < 1e-15 * std::max(1.0, std::fabs(contour_kernel_scalar(KernelMode::qgsw(eps), r))));
    }
  }
}

TEST_CASE("kernel gradient against central differences") {
  const double eps = 1.3;
  const Vec2 x{0.7, -0.3};
  const double h = 1e-6;
  const Mat2 g = kernel_gradient(eps, x);
  const KernelMode mode = KernelMode::qgsw(eps);
  for (int i = 0; i < 2; ++i) {
    const Vec2 dx = i == 0 ? Vec2{h, 0.0} : Vec2{0.0, h};
    const Vec2 fd = (1.0 / (2 * h)) * (biot_savart_kernel(mode, x + dx) - biot_savart_kernel(mode, x - dx));
    CHECK(std::fabs(g(i, 0) - fd.x1) < 1e-6);
    CHECK(std::fabs(g(i, 1) - fd.x2) < 1e-6);
  }
  // Euler closed form the same way
  const Mat2 ge = kernel_gradient(KernelMode::euler(), x);
  for (int i = 0; i < 2; ++i) {
    const Vec2 dx = i == 0 ? Vec2{h, 0.0} : Vec2{0.0, h};
    const Vec2 fd = (1.0 / (2 * h)) * (biot_savart_kernel(KernelMode::euler(), x + dx) - biot_savart_kernel(KernelMode::euler(), x - dx));
    CHECK(std::fabs(ge(i, 0) - fd.x1) < 1e-6);
    CHECK(std::fabs(ge(i, 1) - fd.x2) < 1e-6);
  }
  CHECK_THROWS_AS(kernel_gradient(eps, Vec2{0.0, 0.0}), SingularityError);
}

TEST_CASE("kernel gradient is trace free and eps-uniformly bounded") {
  double sup_z2k2 = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const double z = std::exp(std::log(1e-8) + (std::log(50.0) - std::log(1e-8)) * i / 1999.0);
    sup_z2k2 = std::max(sup_z2k2, z * z * special::modified_bessel_k(2, z));
  }
  CHECK(sup_z2k2 == doctest::Approx(2.0).epsilon(1e-9));
  for (double eps : kEpsilons) {
    for (const Vec2& x : sample_points(400, 1e-4, 1e3)) {
      const Mat2 g = kernel_gradient(eps, x);
      const double r2 = dot(x, x);
      CHECK(std::fabs(g.trace()) <= 1e-12 * std::max(1.0, g.max_abs()));
      CHECK(std::fabs(g(0, 0)) * r2 <= sup_z2k2 / (2 * pi) + 1e-12);
    }
  }
}

TEST_CASE("gradient decomposition") {
  const Vec2 x{1.0, 1.0};
  const double eps = 2.0;
  const auto d = gradient_decomposition(eps, x);
  const Mat2 g = kernel_gradient(eps, x);
  const Mat2 sum = d.s1 + d.s2;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(std::fabs(sum(i, j) - g(i, j)) <= 1e-12 * std::max(1.0, std::fabs(g(i, j))));

  for (double e : kEpsilons) {
    for (const Vec2& p : sample_points(200, 1e-3, 50.0)) {
      const auto dd = gradient_decomposition(e, p);
      const Mat2 gg = kernel_gradient(e, p);
      const Mat2 diff = dd.s1 + dd.s2 - gg;
      CHECK(diff.max_abs() <= 1e-12 * gg.max_abs());
    }
  }

  // every entry of s1 averages to zero on circles
  for (double e : {0.7, 3.0}) {
    for (double radius : {0.5, 2.0, 5.0}) {
      Mat2 mean{};
      const int m = 256;
      for (int k = 0; k < m; ++k) {
        const double th = 2 * pi * k / m;
        mean = mean + gradient_decomposition(e, {radius * std::cos(th), radius * std::sin(th)}).s1;
      }
      CHECK(mean.max_abs() / m < 1e-10);
    }
  }

  // |s1| |x|^2 is bounded independently of eps
  double bound = 0.0;
  std::vector<double> per_eps;
  for (double e : kEpsilons) {
    double sup = 0.0;
    for (const Vec2& p : sample_points(400, 1e-4 / e, 1e2 / e)) sup = std::max(sup, gradient_decomposition(e, p).s1.max_abs() * dot(p, p));
    per_eps.push_back(sup);
    bound = std::max(bound, sup);
  }
  for (double s : per_eps) CHECK(s == doctest::Approx(bound).epsilon(1e-6));
  CHECK_THROWS_AS(gradient_decomposition(1.0, Vec2{0.0, 0.0}), SingularityError);
}

TEST_CASE("radial integral of eps^2 r K0(eps r) is 1") {
  boost::math::quadrature::exp_sinh<double> integrator;
  for (double eps : kEpsilons) {
    const double v = integrator.integrate([&](double r) { return eps * eps * r * special::modified_bessel_k(0, eps * r); });
    CHECK(v == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("pairwise kernel bounds are eps-uniform") {
  const auto pts = sample_points(100, 1e-4, 1e4);
  std::vector<double> sup_k, sup_g, sup_d;
  for (double eps : kEpsilons) {
    const KernelMode mode = KernelMode::qgsw(eps);
    double sk = 0.0, sg = 0.0, sd = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Vec2 ki = biot_savart_kernel(mode, pts[i]);
      const double ri = norm(pts[i]);
      sk = std::max(sk, norm(ki) * ri);
      sg = std::max(sg, kernel_gradient(eps, pts[i]).frobenius() * ri * ri);
      for (std::size_t j = 0; j < pts.size(); ++j) {
        if (i == j) continue;
        const Vec2 kj = biot_savart_kernel(mode, pts[j]);
        sd = std::max(sd, norm(ki - kj) * ri * norm(pts[j]) / distance(pts[i], pts[j]));
      }
    }
    CHECK(sk <= 1.0 / (2 * pi) + 1e-12);
    sup_k.push_back(sk);
    sup_g.push_back(sg);
    sup_d.push_back(sd);
  }
  for (const auto* v : {&sup_k, &sup_g, &sup_d}) {
    const auto [lo, hi] = std::minmax_element(v->begin(), v->end());
    CHECK((*hi - *lo) / *lo < 0.05);
  }
  // Euler kernel is homogeneous of degree -1
  for (const Vec2& p : pts) CHECK(norm(biot_savart_kernel(KernelMode::euler(), p)) * norm(p) == doctest::Approx(1.0 / (2 * pi)).epsilon(1e-14));
}
