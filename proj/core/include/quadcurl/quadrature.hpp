#pragma once

#include <array>
#include <vector>

#include "quadcurl/geometry.hpp"
#include "quadcurl/polynomial.hpp"

namespace quadcurl {

/// Weighted point set; interface rules also carry unit normals.
struct QuadRule {
  std::vector<Vec2> points;
  std::vector<double> weights;
  std::vector<Vec2> normals;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  double total_weight() const;
  void append(const QuadRule& other);
};

/// Gauss-Legendre nodes and weights on [0, 1]; exact to degree 2n-1.
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

/// Collapsed-coordinate rule on the reference triangle (0,0),(1,0),(0,1)
/// exact for all x^a y^b with a+b <= degree. Supports degree <= 10.
const QuadRule& reference_rule(int degree);

/// Reference rule pushed forward onto the triangle (a, b, c).
QuadRule map_rule(const QuadRule& reference, const Vec2& a, const Vec2& b, const Vec2& c);

/// Gauss rule on the segment [a, b], exact for univariate polynomials of the
/// given degree along the segment.
QuadRule edge_rule(const Vec2& a, const Vec2& b, int degree);

/// Volume and interface rules of one element split by the interface.
struct CutDecomposition {
  QuadRule minus_rule;
  QuadRule plus_rule;
  QuadRule gamma_rule;
  /// Fan triangles (curved ones listed by their chord).
  std::vector<std::array<Vec2, 3>> sub_triangles;
  double area_minus = 0.0;
  double area_plus = 0.0;
  int segments = 0;

  const QuadRule& side_rule(Side s) const { return s == Side::Minus ? minus_rule : plus_rule; }
  double area(Side s) const { return s == Side::Minus ? area_minus : area_plus; }
};

struct CutOptions {
  /// Chord-to-curve deviation bound relative to h^2.
  double chord_tolerance = 1e-3;
  int volume_degree = 8;
  int max_segments = 256;
};

/// Splits triangle t along the interface. An element whose vertices and
/// edges do not see a sign change is returned whole on its side.
CutDecomposition decompose_cut_element(const Mesh& mesh, int t, const InterfaceGeometry& iface,
                                       double tie_epsilon, const CutOptions& options = {});

}  // namespace quadcurl
