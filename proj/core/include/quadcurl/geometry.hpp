#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "quadcurl/polynomial.hpp"

namespace quadcurl {

/// Conforming triangulation of a square domain with edge connectivity.
///
/// Local edge k of a triangle joins local vertices k and (k+1) mod 3.
/// Edges store their endpoints with the lower vertex index first; that
/// order also fixes the global edge orientation used by edge DOFs.
struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::array<int, 2>> edges;
  std::vector<std::array<int, 3>> edge_of_triangle;
  /// Second entry is -1 for boundary edges.
  std::vector<std::array<int, 2>> triangles_of_edge;
  std::vector<bool> boundary_vertex;
  std::vector<bool> boundary_edge;
  /// Maximum element diameter.
  double h = 0.0;

  /// Structured-grid metadata (0 when the mesh is not structured).
  int cells_per_side = 0;
  double lower = -1.0;
  double upper = 1.0;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }

  std::array<Vec2, 3> corners(int t) const;
  double area(int t) const;
  double diameter(int t) const;
  Vec2 centroid(int t) const;

  /// Triangle containing p (structured meshes only); -1 outside the domain.
  int locate(const Vec2& p) const;
};

/// Uniform grid of n x n squares on [-1,1]^2; each square is split along
/// the diagonal joining its lower-right and upper-left corners.
Mesh build_structured_mesh(int n);

/// Implicitly and parametrically described closed interface.
///
/// The level set is negative inside (Omega_minus) and positive outside.
/// An interface with no level set describes the single-material problem.
struct InterfaceGeometry {
  std::string name;
  std::function<double(const Vec2&)> level_set;
  std::function<Vec2(const Vec2&)> gradient;
  /// theta in [0, 2pi) -> point on the curve; empty for the no-interface case.
  std::function<Vec2(double)> parametric;
  /// Upper bound on curve length, used to size parametric sampling.
  double length_bound = 0.0;

  bool empty() const { return !parametric; }
  double phi(const Vec2& p) const { return level_set(p); }
  /// Unit normal pointing from Omega_minus to Omega_plus.
  Vec2 normal(const Vec2& p) const { return gradient(p).normalized(); }
};

InterfaceGeometry levelset_circle(const Vec2& center, double radius);
/// r = 1/2 + sin(2 theta)/4 in polar coordinates about the origin.
InterfaceGeometry levelset_peanut();
/// Level set that is positive everywhere: every element belongs to Omega_plus.
InterfaceGeometry levelset_none();

enum class Side { Minus = 0, Plus = 1 };
constexpr int index(Side s) { return static_cast<int>(s); }
constexpr Side other(Side s) { return s == Side::Minus ? Side::Plus : Side::Minus; }
inline constexpr std::array<Side, 2> kSides{Side::Minus, Side::Plus};

enum class ElementTag { Minus, Plus, Cut };

struct Classification {
  std::vector<ElementTag> element_tag;
  std::vector<int> t_minus, t_plus, t_gamma;
  /// Edges of cut elements not on the outer boundary.
  std::vector<int> e_gamma;
  std::vector<bool> active_minus, active_plus;
  /// Level-set vertex values after the tie-break.
  std::vector<double> vertex_phi;
  double tie_epsilon = 0.0;

  bool is_cut(int t) const { return element_tag[t] == ElementTag::Cut; }
  bool is_active(Side s, int t) const {
    return s == Side::Minus ? active_minus[t] : active_plus[t];
  }
};

/// Tags every triangle as MINUS, PLUS or CUT. Throws GeometryError when the
/// interface reaches the outer boundary.
Classification classify_elements(const Mesh& mesh, const InterfaceGeometry& iface);

struct AssumptionViolation {
  int element;
  std::string rule;
  std::string message;
};

struct AssumptionReport {
  bool passed = true;
  int checked_elements = 0;
  std::vector<AssumptionViolation> violations;

  std::string summary() const;
};

/// Checks the two mesh/interface assumptions: every cut element boundary is
/// crossed exactly twice (each open edge at most once), and every cut element
/// reaches a non-cut element of each side within max_path edge steps.
AssumptionReport validate_assumptions(const Mesh& mesh, const Classification& cls,
                                      const InterfaceGeometry& iface, int max_path = 3);

/// Bisection for the zero of phi on the segment [a, b]; phi(a) and phi(b)
/// must have opposite signs.
Vec2 find_edge_crossing(const Vec2& a, const Vec2& b, const std::function<double(const Vec2&)>& phi,
                        double tol = 1e-13);

/// Number of sign changes of the tie-broken level set along a segment,
/// sampled at `samples` sub-intervals.
int count_edge_crossings(const Vec2& a, const Vec2& b, const InterfaceGeometry& iface,
                         double tie_epsilon, int samples = 64);

}  // namespace quadcurl
