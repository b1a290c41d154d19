#pragma once

#include <array>
#include <functional>

#include "quadcurl/geometry.hpp"
#include "quadcurl/polynomial.hpp"

namespace quadcurl {

// Lowest-order curl-curl conforming triangle: shape space [P2]^2 + span{p B}
// with B the cubic bubble and p the Poincare operator about local vertex 0.
//
// Local DOF order: curl at vertices 0..2, then for each local edge k
// (vertex k -> vertex k+1) the tangential moments against 1, t, t^2, then the
// interior moment against x - x_0.

inline constexpr int kLocalDofs = 13;
inline constexpr int kShapeDegree = 4;
inline constexpr int kShapeMonomials = monomial_count(kShapeDegree);
/// Derivative order stored in a jet; order-5 entries vanish for this element.
inline constexpr int kMaxJetOrder = 5;
inline constexpr int kJetSize = monomial_count(kMaxJetOrder);

enum class DofKind { VertexCurl, EdgeMoment, InteriorMoment };

struct DofDescriptor {
  DofKind kind;
  int entity;  ///< local vertex or edge; 0 for the interior moment
  int moment;  ///< power of the edge parameter for edge moments
};

const std::array<DofDescriptor, kLocalDofs>& dof_layout();

/// p B = x^perp (B2/4 + B3/5) for B = xy - x^2 y - x y^2 on the reference triangle.
PolyVec2 poincare_bubble();

class ReferenceElement {
 public:
  /// Shared immutable instance.
  static const ReferenceElement& get();

  const std::array<PolyVec2, kLocalDofs>& basis() const { return basis_; }
  const PolyVec2& bubble() const { return bubble_; }
  const std::array<PolyVec2, kLocalDofs>& generators() const { return generators_; }
  double dof_matrix_condition() const { return condition_; }

  /// DOF functional i applied to a field on the reference triangle
  /// (0,0), (1,0), (0,1), edges oriented by local vertex order.
  static double apply_dof(int i, const PolyVec2& v);

 private:
  friend ReferenceElement build_reference_basis();
  ReferenceElement() = default;

  std::array<PolyVec2, kLocalDofs> basis_;
  std::array<PolyVec2, kLocalDofs> generators_;
  PolyVec2 bubble_;
  double condition_ = 0.0;
};

/// Builds the dual basis by inverting the DOF matrix of the generating set.
/// Throws Error when the DOF matrix condition exceeds 1e8.
ReferenceElement build_reference_basis();

/// F(xhat) = origin + B xhat with the reference triangle mapped to element t.
struct AffineMap {
  Vec2 origin;
  Mat2 B;
  Mat2 Binv;
  double det = 0.0;

  static AffineMap of(const std::array<Vec2, 3>& corners);
  Vec2 to_physical(const Vec2& xhat) const { return origin + B * xhat; }
  Vec2 to_reference(const Vec2& x) const { return Binv * (x - origin); }
};

/// Pointwise field data carried through the covariant map.
struct CovariantValues {
  Vec2 value = Vec2::Zero();
  double curl = 0.0;
  /// jacobian(i, j) = d u_i / d x_j
  Mat2 jacobian = Mat2::Zero();
};

/// u(F(xhat)) = B^{-T} uhat(xhat), curl u = curlhat / det B, grad u = B^{-T} gradhat B^{-1}.
CovariantValues map_covariant(const CovariantValues& reference, const AffineMap& F);

/// Covariant pullback of a polynomial field, expressed in local coordinates
/// d = x - F.origin.
PolyVec2 map_covariant(const PolyVec2& reference, const AffineMap& F);

struct FieldSample {
  Vec2 value;
  double curl;
};
using FieldFunction = std::function<FieldSample(const Vec2&)>;

/// Physical DOFs of a field on element t: vertex curls, edge tangential
/// moments in the global edge orientation (lower vertex index first, moment
/// parameter t in [0,1] from that vertex), and the interior moment
/// |det B|^{-1} int_K u . (x - x_0).
std::array<double, kLocalDofs> physical_dofs(const Mesh& mesh, int t, const FieldFunction& field);

/// Physical dual basis of one element, stored as degree-4 monomial tables in
/// local coordinates about `origin`.
struct ElementBasis {
  Vec2 origin = Vec2::Zero();
  std::array<std::array<std::array<double, kShapeMonomials>, 2>, kLocalDofs> coef{};

  PolyVec2 function(int j) const;
};

ElementBasis build_element_basis(const Mesh& mesh, int t);

/// All partial derivatives up to `order` of all 13 basis functions at a point.
struct BasisJet {
  int order = 0;
  std::array<std::array<std::array<double, kJetSize>, 2>, kLocalDofs> d{};

  double derivative(int f, int comp, int i, int j) const { return d[f][comp][monomial_index(i, j)]; }
  Vec2 value(int f) const { return {d[f][0][0], d[f][1][0]}; }
  /// D^{(i,j)} of the scalar curl.
  double curl_derivative(int f, int i, int j) const {
    return derivative(f, 1, i + 1, j) - derivative(f, 0, i, j + 1);
  }
  double curl(int f) const { return curl_derivative(f, 0, 0); }
  /// Vector curl of the scalar curl.
  Vec2 curlcurl(int f) const { return {curl_derivative(f, 0, 1), -curl_derivative(f, 1, 0)}; }
  /// Scalar curl of curlcurl, equal to minus the Laplacian of the curl.
  double curl3(int f) const { return -(curl_derivative(f, 2, 0) + curl_derivative(f, 0, 2)); }
  double div(int f) const { return derivative(f, 0, 1, 0) + derivative(f, 1, 0, 1); }
};

/// Throws Unsupported for order > kMaxJetOrder.
void evaluate(const ElementBasis& basis, const Vec2& x, int order, BasisJet& jet);

/// Plain: sum_{|m|=l} D^m q n^m. Multinomial: the same sum with the
/// factors l!/(m1! m2!), i.e. (n . grad)^l q.
enum class DirectionalWeights { Plain, Multinomial };

/// l-th normal derivative of basis component `comp` (0, 1) or of the curl
/// (comp == 2). Throws Unsupported for l > 4.
double directional_derivative(const BasisJet& jet, int f, int comp, const Vec2& n, int l,
                              DirectionalWeights weights = DirectionalWeights::Plain);

}  // namespace quadcurl
