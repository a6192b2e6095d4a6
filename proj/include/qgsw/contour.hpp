#pragma once

// Closed patch boundaries sampled at uniform parameters alpha_j = 2 pi j / N,
// oriented counterclockwise. Derivatives in alpha are spectral.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "qgsw/geometry.hpp"

namespace qgsw {

inline constexpr std::size_t kMinContourNodes = 16;

class Contour {
 public:
  /// Checks node count (even, >= 16), finiteness and counterclockwise orientation.
  /// Simplicity is O(N^2) and is checked by validated() instead.
  explicit Contour(std::vector<Vec2> nodes);

  /// Constructor checks plus the simple-curve check.
  static Contour validated(std::vector<Vec2> nodes);

  std::size_t size() const { return nodes_.size(); }
  std::span<const Vec2> nodes() const { return nodes_; }
  const Vec2& operator[](std::size_t j) const { return nodes_[j]; }
  double alpha(std::size_t j) const;
  double parameter_step() const;

 private:
  std::vector<Vec2> nodes_;
};

/// Throws ArgumentError unless n is even and >= 16.
void require_node_count(std::size_t n);

Contour make_circle(double radius, std::size_t n, Vec2 center = {});
Contour make_ellipse(double a, double b, std::size_t n);

/// dz/dalpha at every node.
std::vector<Vec2> tangent(const Contour& c);
/// Spectral derivative of an arbitrary periodic sample (even length).
std::vector<Vec2> spectral_derivative(std::span<const Vec2> samples);

double area(const Contour& c);
double perimeter(const Contour& c);
Vec2 centroid(const Contour& c);

/// Shoelace area of the polyline through the nodes.
double polygon_signed_area(std::span<const Vec2> nodes);
/// True when no two non-adjacent polyline segments intersect.
bool is_simple(std::span<const Vec2> nodes);

/// max over node pairs of max(ratio, 1/ratio), ratio = |z_i - z_j| / d_circ(alpha_i, alpha_j).
double chord_arc_constant(const Contour& c);

/// Trigonometric interpolation onto n uniform parameters.
Contour resample(const Contour& c, std::size_t n);

/// max_j |z1_j - z2_j|.
double contour_distance(const Contour& c1, const Contour& c2);

Contour translated(const Contour& c, Vec2 offset);
Contour rotated(const Contour& c, double theta);
/// Relabels nodes: node j of the result is node (j + shift) mod N of c.
Contour index_shifted(const Contour& c, std::size_t shift);

/// Minimum distance from x to the closed polyline through the nodes.
double distance_to_polyline(std::span<const Vec2> nodes, Vec2 x);
double max_node_spacing(const Contour& c);

/// CSV with header "alpha,x1,x2", 17 significant digits.
void write_contour_csv(std::ostream& out, const Contour& c);
Contour read_contour_csv(std::istream& in);

}  // namespace qgsw
