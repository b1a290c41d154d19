#include "quadcurl/element.hpp"

#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "quadcurl/errors.hpp"
#include "quadcurl/quadrature.hpp"

namespace quadcurl {

const std::array<DofDescriptor, kLocalDofs>& dof_layout() {
  static const std::array<DofDescriptor, kLocalDofs> layout = [] {
    std::array<DofDescriptor, kLocalDofs> l{};
    for (int k = 0; k < 3; ++k) l[k] = {DofKind::VertexCurl, k, 0};
    for (int k = 0; k < 3; ++k) {
      for (int r = 0; r < 3; ++r) l[3 + 3 * k + r] = {DofKind::EdgeMoment, k, r};
    }
    l[12] = {DofKind::InteriorMoment, 0, 0};
    return l;
  }();
  return layout;
}

PolyVec2 poincare_bubble() {
  const Poly2 b2 = Poly2::monomial(1, 1);
  const Poly2 b3 = Poly2::monomial(2, 1, -1.0) + Poly2::monomial(1, 2, -1.0);
  const Poly2 radial = 0.25 * b2 + 0.2 * b3;
  return {-(Poly2::y() * radial), Poly2::x() * radial};
}

namespace {

// Sufficient for degree <= 15 integrands along an edge.
constexpr int kEdgeGauss = 8;

const std::pair<std::vector<double>, std::vector<double>>& edge_gauss() {
  static const auto g = gauss_legendre(kEdgeGauss);
  return g;
}

template <class Field>
double edge_moment(const Vec2& start, const Vec2& end, int power, const Field& u) {
  const auto& [x, w] = edge_gauss();
  const Vec2 d = end - start;
  double acc = 0.0;
  for (int q = 0; q < kEdgeGauss; ++q) {
    acc += w[q] * u(start + x[q] * d).dot(d) * std::pow(x[q], power);
  }
  return acc;
}

const std::array<Vec2, 3>& reference_corners() {
  static const std::array<Vec2, 3> c{Vec2(0.0, 0.0), Vec2(1.0, 0.0), Vec2(0.0, 1.0)};
  return c;
}

}  // namespace

double ReferenceElement::apply_dof(int i, const PolyVec2& v) {
  const auto& dof = dof_layout()[i];
  const auto& c = reference_corners();
  switch (dof.kind) {
    case DofKind::VertexCurl:
      return v.curl()(c[dof.entity]);
    case DofKind::EdgeMoment:
      return edge_moment(c[dof.entity], c[(dof.entity + 1) % 3], dof.moment, v);
    case DofKind::InteriorMoment: {
      const QuadRule& rule = reference_rule(10);
      double acc = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q) acc += rule.weights[q] * v(rule.points[q]).dot(rule.points[q]);
      return acc;
    }
  }
  return 0.0;
}

ReferenceElement build_reference_basis() {
  ReferenceElement ref;
  ref.bubble_ = poincare_bubble();

  int g = 0;
  for (int k = 0; k <= 2; ++k) {
    for (int b = 0; b <= k; ++b) {
      const Poly2 m = Poly2::monomial(k - b, b);
      ref.generators_[g++] = {m, Poly2(0)};
      ref.generators_[g++] = {Poly2(0), m};
    }
  }
  ref.generators_[g] = ref.bubble_;

  Eigen::Matrix<double, kLocalDofs, kLocalDofs> M;
  for (int i = 0; i < kLocalDofs; ++i) {
    for (int j = 0; j < kLocalDofs; ++j) M(i, j) = ReferenceElement::apply_dof(i, ref.generators_[j]);
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto& sv = svd.singularValues();
  ref.condition_ = sv(0) / sv(sv.size() - 1);
  if (!(ref.condition_ < 1e8)) {
    throw Error("reference element construction failed: DOF matrix condition " + std::to_string(ref.condition_));
  }
  const Eigen::Matrix<double, kLocalDofs, kLocalDofs> Minv = M.inverse();
  for (int j = 0; j < kLocalDofs; ++j) {
    PolyVec2 phi{Poly2(kShapeDegree), Poly2(kShapeDegree)};
    for (int k = 0; k < kLocalDofs; ++k) phi += Minv(k, j) * ref.generators_[k];
    ref.basis_[j] = phi;
  }
  return ref;
}

const ReferenceElement& ReferenceElement::get() {
  static const ReferenceElement instance = build_reference_basis();
  return instance;
}

AffineMap AffineMap::of(const std::array<Vec2, 3>& corners) {
  AffineMap F;
  F.origin = corners[0];
  F.B.col(0) = corners[1] - corners[0];
  F.B.col(1) = corners[2] - corners[0];
  F.det = F.B.determinant();
  if (!(std::abs(F.det) > 0.0)) throw std::invalid_argument("AffineMap: singular element");
  F.Binv = F.B.inverse();
  return F;
}

CovariantValues map_covariant(const CovariantValues& reference, const AffineMap& F) {
  CovariantValues out;
  out.value = F.Binv.transpose() * reference.value;
  out.curl = reference.curl / F.det;
  out.jacobian = F.Binv.transpose() * reference.jacobian * F.Binv;
  return out;
}

PolyVec2 map_covariant(const PolyVec2& reference, const AffineMap& F) {
  const Poly2 c1 = reference.u1.compose_linear(F.Binv);
  const Poly2 c2 = reference.u2.compose_linear(F.Binv);
  const Mat2& Bi = F.Binv;
  return {Bi(0, 0) * c1 + Bi(1, 0) * c2, Bi(0, 1) * c1 + Bi(1, 1) * c2};
}

std::array<double, kLocalDofs> physical_dofs(const Mesh& mesh, int t, const FieldFunction& field) {
  std::array<double, kLocalDofs> dofs{};
  const auto& tri = mesh.triangles[t];
  const auto P = mesh.corners(t);
  for (int k = 0; k < 3; ++k) dofs[k] = field(P[k]).curl;
  const auto value = [&](const Vec2& x) { return field(x).value; };
  for (int k = 0; k < 3; ++k) {
    const int k1 = (k + 1) % 3;
    const bool forward = tri[k] < tri[k1];
    const Vec2& start = forward ? P[k] : P[k1];
    const Vec2& end = forward ? P[k1] : P[k];
    for (int r = 0; r < 3; ++r) dofs[3 + 3 * k + r] = edge_moment(start, end, r, value);
  }
  const QuadRule rule = map_rule(reference_rule(10), P[0], P[1], P[2]);
  double acc = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) acc += rule.weights[q] * value(rule.points[q]).dot(rule.points[q] - P[0]);
  const double jac = std::abs(cross(P[1] - P[0], P[2] - P[0]));
  dofs[12] = acc / jac;
  return dofs;
}

PolyVec2 ElementBasis::function(int j) const {
  PolyVec2 v{Poly2(kShapeDegree), Poly2(kShapeDegree)};
  for (int k = 0; k <= kShapeDegree; ++k) {
    for (int b = 0; b <= k; ++b) {
      v.u1.set_coeff(k - b, b, coef[j][0][monomial_index(k - b, b)]);
      v.u2.set_coeff(k - b, b, coef[j][1][monomial_index(k - b, b)]);
    }
  }
  return v;
}

ElementBasis build_element_basis(const Mesh& mesh, int t) {
  const ReferenceElement& ref = ReferenceElement::get();
  const AffineMap F = AffineMap::of(mesh.corners(t));

  std::array<PolyVec2, kLocalDofs> mapped;
  for (int j = 0; j < kLocalDofs; ++j) mapped[j] = map_covariant(ref.basis()[j], F);

  // T(i, j) = physical DOF i of mapped reference basis function j. It is
  // block diagonal: vertex scaling by 1/det B and edge orientation changes.
  Eigen::Matrix<double, kLocalDofs, kLocalDofs> T;
  for (int j = 0; j < kLocalDofs; ++j) {
    const Poly2 curl = mapped[j].curl();
    const PolyVec2& u = mapped[j];
    const auto dofs = physical_dofs(mesh, t, [&](const Vec2& x) {
      const Vec2 d = x - F.origin;
      return FieldSample{u(d), curl(d)};
    });
    for (int i = 0; i < kLocalDofs; ++i) T(i, j) = dofs[i];
  }
  const Eigen::Matrix<double, kLocalDofs, kLocalDofs> Tinv = T.inverse();

  ElementBasis basis;
  basis.origin = F.origin;
  for (int j = 0; j < kLocalDofs; ++j) {
    for (int c = 0; c < 2; ++c) basis.coef[j][c].fill(0.0);
    for (int k = 0; k < kLocalDofs; ++k) {
      const double s = Tinv(k, j);
      if (s == 0.0) continue;
      for (int a = 0; a <= kShapeDegree; ++a) {
        for (int b = 0; a + b <= kShapeDegree; ++b) {
          const int idx = monomial_index(a, b);
          basis.coef[j][0][idx] += s * mapped[k].u1.coeff(a, b);
          basis.coef[j][1][idx] += s * mapped[k].u2.coeff(a, b);
        }
      }
    }
  }
  return basis;
}

void evaluate(const ElementBasis& basis, const Vec2& x, int order, BasisJet& jet) {
  if (order < 0 || order > kMaxJetOrder) {
    throw Unsupported("evaluate: derivative order " + std::to_string(order) + " not supported");
  }
  const Vec2 d = x - basis.origin;
  std::array<double, kShapeDegree + 1> px{}, py{};
  px[0] = py[0] = 1.0;
  for (int k = 1; k <= kShapeDegree; ++k) {
    px[k] = px[k - 1] * d.x();
    py[k] = py[k - 1] * d.y();
  }
  static constexpr std::array<std::array<double, kShapeDegree + 1>, kShapeDegree + 1> falling = [] {
    std::array<std::array<double, kShapeDegree + 1>, kShapeDegree + 1> f{};
    for (int a = 0; a <= kShapeDegree; ++a) {
      for (int i = 0; i <= a; ++i) {
        double v = 1.0;
        for (int k = 0; k < i; ++k) v *= a - k;
        f[a][i] = v;
      }
    }
    return f;
  }();

  // table[deriv][mono] = D^{(i,j)} d^a_x d^b_y evaluated at d
  const int nderiv = monomial_count(order);
  std::array<std::array<double, kShapeMonomials>, kJetSize> table{};
  for (int k = 0; k <= order; ++k) {
    for (int j = 0; j <= k; ++j) {
      const int i = k - j;
      auto& row = table[monomial_index(i, j)];
      row.fill(0.0);
      for (int a = i; a <= kShapeDegree; ++a) {
        for (int b = j; a + b <= kShapeDegree; ++b) {
          row[monomial_index(a, b)] = falling[a][i] * falling[b][j] * px[a - i] * py[b - j];
        }
      }
    }
  }

  jet.order = order;
  for (int f = 0; f < kLocalDofs; ++f) {
    for (int c = 0; c < 2; ++c) {
      const auto& cf = basis.coef[f][c];
      auto& out = jet.d[f][c];
      for (int m = 0; m < nderiv; ++m) {
        const auto& row = table[m];
        double acc = 0.0;
        for (int k = 0; k < kShapeMonomials; ++k) acc += cf[k] * row[k];
        out[m] = acc;
      }
      for (int m = nderiv; m < kJetSize; ++m) out[m] = 0.0;
    }
  }
}

double directional_derivative(const BasisJet& jet, int f, int comp, const Vec2& n, int l,
                              DirectionalWeights weights) {
  if (l < 0 || l > 4) throw Unsupported("directional_derivative: order " + std::to_string(l) + " not supported");
  const int needed = comp == 2 ? l + 1 : l;
  if (needed > jet.order) throw std::logic_error("directional_derivative: jet order too low");
  double acc = 0.0;
  double binomial = 1.0;
  for (int m2 = 0; m2 <= l; ++m2) {
    const int m1 = l - m2;
    const double nm = (weights == DirectionalWeights::Multinomial ? binomial : 1.0) * std::pow(n.x(), m1) *
                      std::pow(n.y(), m2);
    binomial = binomial * m1 / (m2 + 1);
    const double dq = comp == 2 ? jet.curl_derivative(f, m1, m2) : jet.derivative(f, comp, m1, m2);
    acc += dq * nm;
  }
  return acc;
}

}  // namespace quadcurl
