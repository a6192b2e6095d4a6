#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "qgsw/contour.hpp"

namespace fixture {

// Random smooth star-shaped contour with a few Fourier modes in the radius.
inline qgsw::Contour random_contour(unsigned seed, std::size_t n) {
  using qgsw::Vec2;
  constexpr double pi = std::numbers::pi;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-0.08, 0.08);
  std::uniform_real_distribution<double> offset(-1.0, 1.0);
  double c[6], s[6];
  for (int k = 0; k < 6; ++k) {
    c[k] = coef(rng);
    s[k] = coef(rng);
  }
  const double scale = 0.6 + 0.5 * (offset(rng) + 1.0);
  const Vec2 center{offset(rng), offset(rng)};
  std::vector<Vec2> pts(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double a = 2 * pi * j / n;
    double r = 1.0;
    for (int k = 0; k < 6; ++k) r += c[k] * std::cos((k + 1) * a) + s[k] * std::sin((k + 1) * a);
    pts[j] = center + scale * r * Vec2{std::cos(a), std::sin(a)};
  }
  return qgsw::Contour::validated(pts);
}

// n log-spaced points with exact endpoints.
inline std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1));
  v.front() = lo;
  v.back() = hi;
  return v;
}

}  // namespace fixture
