#include "qgsw/contour.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "qgsw/errors.hpp"

namespace qgsw {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double orientation(const Vec2& a, const Vec2& b, const Vec2& c) { return cross(b - a, c - a); }

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x1, b.x1) <= p.x1 && p.x1 <= std::max(a.x1, b.x1) && std::min(a.x2, b.x2) <= p.x2 &&
         p.x2 <= std::max(a.x2, b.x2);
}

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
  const double d1 = orientation(q1, q2, p1);
  const double d2 = orientation(q1, q2, p2);
  const double d3 = orientation(p1, p2, q1);
  const double d4 = orientation(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

double point_segment_distance(const Vec2& a, const Vec2& b, const Vec2& p) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return distance(a + t * ab, p);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void require_node_count(std::size_t n) {
  if (n < kMinContourNodes || n % 2 != 0) {
    throw ArgumentError("contour: node count must be even and >= 16, got " + std::to_string(n));
  }
}

Contour::Contour(std::vector<Vec2> nodes) : nodes_(std::move(nodes)) {
  require_node_count(nodes_.size());
  for (const Vec2& z : nodes_) {
    if (!is_finite(z)) throw DegenerateContourError("contour: non-finite node");
  }
  if (!(polygon_signed_area(nodes_) > 0.0)) {
    throw DegenerateContourError("contour: nodes must be ordered counterclockwise (signed area > 0)");
  }
}

Contour Contour::validated(std::vector<Vec2> nodes) {
  Contour c(std::move(nodes));
  if (!is_simple(c.nodes())) throw DegenerateContourError("contour: polyline self-intersects");
  return c;
}

double Contour::alpha(std::size_t j) const { return kTwoPi * static_cast<double>(j) / static_cast<double>(size()); }

double Contour::parameter_step() const { return kTwoPi / static_cast<double>(size()); }

Contour make_circle(double radius, std::size_t n, Vec2 center) {
  if (!(radius > 0.0)) throw ArgumentError("make_circle: radius must be positive");
  require_node_count(n);
  std::vector<Vec2> nodes(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double a = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
    nodes[j] = center + Vec2{radius * std::cos(a), radius * std::sin(a)};
  }
  return Contour(std::move(nodes));
}

Contour make_ellipse(double a, double b, std::size_t n) {
  if (!(a > 0.0) || !(b > 0.0)) throw ArgumentError("make_ellipse: semi-axes must be positive");
  require_node_count(n);
  std::vector<Vec2> nodes(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double t = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
    nodes[j] = {a * std::cos(t), b * std::sin(t)};
  }
  return Contour(std::move(nodes));
}

std::vector<Vec2> spectral_derivative(std::span<const Vec2> samples) {
  const std::size_t n = samples.size();
  if (n < 2 || n % 2 != 0) throw ArgumentError("spectral_derivative: sample count must be even");
  const double h = kTwoPi / static_cast<double>(n);
  // Periodic differentiation matrix for even N: D_ij = (1/2) (-1)^(i-j) cot((i-j) h / 2).
  // The weights are odd in i - j, so pairing +-m lets the large near-diagonal weights
  // multiply small differences of neighbouring samples.
  const std::size_t half = n / 2;
  std::vector<double> w(half, 0.0);
  for (std::size_t m = 1; m < half; ++m) {
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    w[m] = 0.5 * sign / std::tan(0.5 * static_cast<double>(m) * h);
  }
  std::vector<Vec2> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s1 = 0.0;
    double s2 = 0.0;
    for (std::size_t m = 1; m < half; ++m) {
      const Vec2 d = samples[(i + n - m) % n] - samples[(i + m) % n];
      s1 += w[m] * d.x1;
      s2 += w[m] * d.x2;
    }
    out[i] = {s1, s2};
  }
  return out;
}

std::vector<Vec2> tangent(const Contour& c) { return spectral_derivative(c.nodes()); }

double area(const Contour& c) {
  const std::vector<Vec2> t = tangent(c);
  double s = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) s += cross(c[j], t[j]);
  return 0.5 * s * c.parameter_step();
}

double perimeter(const Contour& c) {
  const std::vector<Vec2> t = tangent(c);
  double s = 0.0;
  for (const Vec2& v : t) s += norm(v);
  return s * c.parameter_step();
}

Vec2 centroid(const Contour& c) {
  // int x dA = \oint x^2/2 dx2,  int y dA = -\oint y^2/2 dx1
  const std::vector<Vec2> t = tangent(c);
  double a = 0.0;
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) {
    const Vec2& z = c[j];
    a += cross(z, t[j]);
    mx += z.x1 * z.x1 * t[j].x2;
    my -= z.x2 * z.x2 * t[j].x1;
  }
  return {mx / a, my / a};
}

double polygon_signed_area(std::span<const Vec2> nodes) {
  double s = 0.0;
  const std::size_t n = nodes.size();
  for (std::size_t j = 0; j < n; ++j) s += cross(nodes[j], nodes[(j + 1) % n]);
  return 0.5 * s;
}

bool is_simple(std::span<const Vec2> nodes) {
  const std::size_t n = nodes.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p1 = nodes[i];
    const Vec2& p2 = nodes[(i + 1) % n];
    if (p1 == p2) return false;
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent through the wrap-around
      if (segments_intersect(p1, p2, nodes[j], nodes[(j + 1) % n])) return false;
    }
  }
  return true;
}

double chord_arc_constant(const Contour& c) {
  const std::size_t n = c.size();
  const double h = c.parameter_step();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::size_t k = j - i;
      const double d_circ = static_cast<double>(std::min(k, n - k)) * h;
      const double chord = distance(c[i], c[j]);
      if (!(chord > 0.0)) {
        throw DegenerateContourError("chord_arc_constant: nodes " + std::to_string(i) + " and " + std::to_string(j) +
                                     " coincide");
      }
      const double ratio = chord / d_circ;
      worst = std::max({worst, ratio, 1.0 / ratio});
    }
  }
  return worst;
}

Contour resample(const Contour& c, std::size_t n_new) {
  require_node_count(n_new);
  const std::size_t n = c.size();
  if (n_new == n) return c;

  using cplx = std::complex<double>;
  const std::size_t half = n / 2;
  // Coefficients c_k, k = -N/2 .. N/2, stored at index k + N/2.
  std::vector<cplx> coef(n + 1);
  for (std::size_t idx = 0; idx <= n; ++idx) {
    const double k = static_cast<double>(idx) - static_cast<double>(half);
    cplx s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double a = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
      s += cplx(c[j].x1, c[j].x2) * std::polar(1.0, -k * a);
    }
    coef[idx] = s / static_cast<double>(n);
  }

  std::vector<Vec2> nodes(n_new);
  for (std::size_t m = 0; m < n_new; ++m) {
    const double beta = kTwoPi * static_cast<double>(m) / static_cast<double>(n_new);
    cplx p = coef[n] * std::cos(static_cast<double>(half) * beta);  // Nyquist mode split symmetrically
    for (std::size_t idx = 1; idx < n; ++idx) {
      const double k = static_cast<double>(idx) - static_cast<double>(half);
      p += coef[idx] * std::polar(1.0, k * beta);
    }
    nodes[m] = {p.real(), p.imag()};
  }
  return Contour(std::move(nodes));
}

double contour_distance(const Contour& c1, const Contour& c2) {
  if (c1.size() != c2.size()) {
    throw ArgumentError("contour_distance: node counts differ (" + std::to_string(c1.size()) + " vs " +
                        std::to_string(c2.size()) + "); resample first");
  }
  double d = 0.0;
  for (std::size_t j = 0; j < c1.size(); ++j) d = std::max(d, distance(c1[j], c2[j]));
  return d;
}

Contour translated(const Contour& c, Vec2 offset) {
  std::vector<Vec2> nodes(c.nodes().begin(), c.nodes().end());
  for (Vec2& z : nodes) z += offset;
  return Contour(std::move(nodes));
}

Contour rotated(const Contour& c, double theta) {
  std::vector<Vec2> nodes(c.size());
  for (std::size_t j = 0; j < c.size(); ++j) nodes[j] = rotate(c[j], theta);
  return Contour(std::move(nodes));
}

Contour index_shifted(const Contour& c, std::size_t shift) {
  const std::size_t n = c.size();
  std::vector<Vec2> nodes(n);
  for (std::size_t j = 0; j < n; ++j) nodes[j] = c[(j + shift) % n];
  return Contour(std::move(nodes));
}

double distance_to_polyline(std::span<const Vec2> nodes, Vec2 x) {
  double d = std::numeric_limits<double>::infinity();
  const std::size_t n = nodes.size();
  for (std::size_t j = 0; j < n; ++j) d = std::min(d, point_segment_distance(nodes[j], nodes[(j + 1) % n], x));
  return d;
}

double max_node_spacing(const Contour& c) {
  double d = 0.0;
  const std::size_t n = c.size();
  for (std::size_t j = 0; j < n; ++j) d = std::max(d, distance(c[j], c[(j + 1) % n]));
  return d;
}

void write_contour_csv(std::ostream& out, const Contour& c) {
  out << "alpha,x1,x2\n";
  for (std::size_t j = 0; j < c.size(); ++j) {
    out << format_double(c.alpha(j)) << ',' << format_double(c[j].x1) << ',' << format_double(c[j].x2) << '\n';
  }
}

Contour read_contour_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ArgumentError("contour csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "alpha,x1,x2") throw ArgumentError("contour csv: expected header 'alpha,x1,x2', got '" + line + "'");

  std::vector<Vec2> nodes;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double values[3];
    const char* p = line.c_str();
    for (int f = 0; f < 3; ++f) {
      char* end = nullptr;
      values[f] = std::strtod(p, &end);
      const bool sep_ok = (f < 2) ? (*end == ',') : (*end == '\0');
      if (end == p || !sep_ok) {
        throw ArgumentError("contour csv: malformed row at line " + std::to_string(line_no));
      }
      p = end + 1;
    }
    nodes.push_back({values[1], values[2]});
  }
  return Contour::validated(std::move(nodes));
}

}  // namespace qgsw
