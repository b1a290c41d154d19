#include <cmath>
#include <random>

#include "doctest.h"
#include "quadcurl/errors.hpp"
#include "quadcurl/manufactured.hpp"
#include "quadcurl/quadrature.hpp"

using namespace quadcurl;

namespace {

FieldFunction as_function(const ElementBasis& basis, int j) {
  const PolyVec2 f = basis.function(j);
  const Poly2 c = f.curl();
  const Vec2 origin = basis.origin;
  return [f, c, origin](const Vec2& x) { return FieldSample{f(x - origin), c(x - origin)}; };
}

double max_coeff_diff(const Poly2& a, const Poly2& b) {
  double m = 0.0;
  const int d = std::max(a.degree(), b.degree());
  for (int i = 0; i <= d; ++i) {
    for (int j = 0; i + j <= d; ++j) m = std::max(m, std::abs(a.coeff(i, j) - b.coeff(i, j)));
  }
  return m;
}

}  // namespace

TEST_CASE("reference dual basis") {
  const ReferenceElement& ref = ReferenceElement::get();
  double worst = 0.0;
  for (int i = 0; i < kLocalDofs; ++i) {
    for (int j = 0; j < kLocalDofs; ++j) {
      worst = std::max(worst, std::abs(ReferenceElement::apply_dof(i, ref.basis()[j]) - (i == j ? 1.0 : 0.0)));
    }
  }
  CHECK(worst < 1e-10);
  CHECK(ref.dof_matrix_condition() < 1e8);
  CHECK(dof_layout().size() == 13);

  for (const PolyVec2& phi : ref.basis()) {
    CHECK(phi.u1.effective_degree(1e-12) <= 4);
    CHECK(phi.u2.effective_degree(1e-12) <= 4);
  }
}

TEST_CASE("dual basis reproduces the shape space") {
  const ReferenceElement& ref = ReferenceElement::get();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    PolyVec2 v{Poly2(4), Poly2(4)};
    for (const PolyVec2& g : ref.generators()) v += U(rng) * g;
    PolyVec2 w{Poly2(4), Poly2(4)};
    for (int i = 0; i < kLocalDofs; ++i) w += ReferenceElement::apply_dof(i, v) * ref.basis()[i];
    CHECK(max_coeff_diff(v.u1, w.u1) < 1e-9);
    CHECK(max_coeff_diff(v.u2, w.u2) < 1e-9);
  }
}

TEST_CASE("Poincare bubble") {
  const PolyVec2 pb = poincare_bubble();
  const Poly2 B = Poly2::x() * Poly2::y() - Poly2::monomial(2, 1) - Poly2::monomial(1, 2);
  CHECK(max_coeff_diff(pb.curl(), B) < 1e-15);

  for (double s : {0.0, 0.13, 0.5, 0.71, 1.0}) {
    CHECK(std::abs(pb.u1(s, 0.0)) < 1e-15);
    CHECK(std::abs(pb.u2(0.0, s)) < 1e-15);
    const Vec2 x(1.0 - s, s);
    const double trace = (pb(x).y() - pb(x).x()) / std::sqrt(2.0);
    CHECK(trace == doctest::Approx(x.x() * x.y() / (20.0 * std::sqrt(2.0))).epsilon(1e-13));
  }
}

TEST_CASE("covariant map") {
  CovariantValues ref;
  ref.value = Vec2(0.3, -1.2);
  ref.curl = 2.5;
  ref.jacobian << 1.0, 2.0, -0.5, 0.25;

  const AffineMap identity = AffineMap::of({Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)});
  const CovariantValues same = map_covariant(ref, identity);
  CHECK((same.value - ref.value).norm() < 1e-15);
  CHECK(same.curl == doctest::Approx(ref.curl));
  CHECK((same.jacobian - ref.jacobian).norm() < 1e-15);

  const double s = 0.25;
  const AffineMap scaled = AffineMap::of({Vec2(1, 1), Vec2(1 + s, 1), Vec2(1, 1 + s)});
  const CovariantValues m = map_covariant(ref, scaled);
  CHECK(m.curl == doctest::Approx(ref.curl / (s * s)));
  CHECK((m.value - ref.value / s).norm() < 1e-14);

  CHECK_THROWS_AS(AffineMap::of({Vec2(0, 0), Vec2(1, 1), Vec2(2, 2)}), std::invalid_argument);
}

TEST_CASE("physical dual basis") {
  const Mesh m = build_structured_mesh(3);
  for (int t : {0, 1, 7, 10}) {
    const ElementBasis basis = build_element_basis(m, t);
    for (int j = 0; j < kLocalDofs; ++j) {
      const auto dofs = physical_dofs(m, t, as_function(basis, j));
      for (int i = 0; i < kLocalDofs; ++i) CHECK(std::abs(dofs[i] - (i == j ? 1.0 : 0.0)) < 1e-10);
    }
  }
}

TEST_CASE("jets agree with finite differences") {
  const Mesh m = build_structured_mesh(5);
  const ElementBasis basis = build_element_basis(m, 13);
  const Vec2 x = m.centroid(13);
  const double step = 1e-5;
  BasisJet jet, jx0, jx1, jy0, jy1;
  evaluate(basis, x, 4, jet);
  evaluate(basis, x - Vec2(step, 0), 3, jx0);
  evaluate(basis, x + Vec2(step, 0), 3, jx1);
  evaluate(basis, x - Vec2(0, step), 3, jy0);
  evaluate(basis, x + Vec2(0, step), 3, jy1);

  for (int f = 0; f < kLocalDofs; ++f) {
    const double scale = 1.0 + std::abs(jet.div(f));
    const double fd_div = (jx1.value(f).x() - jx0.value(f).x() + jy1.value(f).y() - jy0.value(f).y()) / (2 * step);
    CHECK(std::abs(fd_div - jet.div(f)) < 1e-6 * scale);

    const double dcx = (jx1.curl(f) - jx0.curl(f)) / (2 * step);
    const double dcy = (jy1.curl(f) - jy0.curl(f)) / (2 * step);
    const Vec2 cc = jet.curlcurl(f);
    CHECK(std::abs(cc.x() - dcy) < 1e-6 * (1.0 + cc.norm()));
    CHECK(std::abs(cc.y() + dcx) < 1e-6 * (1.0 + cc.norm()));

    for (int comp = 0; comp < 2; ++comp) {
      for (int i = 0; i <= 3; ++i) {
        for (int j = 0; i + j <= 3; ++j) {
          const double ex = jet.derivative(f, comp, i + 1, j);
          const double fd = (jx1.derivative(f, comp, i, j) - jx0.derivative(f, comp, i, j)) / (2 * step);
          CHECK(std::abs(fd - ex) < 1e-6 * (1.0 + std::abs(ex)));
        }
      }
    }
  }
}

TEST_CASE("quadratic fields have vanishing fourth derivatives") {
  ElementBasis basis;
  basis.coef[0][0][monomial_index(2, 0)] = 1.0;
  basis.coef[0][1][monomial_index(1, 1)] = -3.0;
  BasisJet jet;
  evaluate(basis, Vec2(0.4, -0.2), 4, jet);
  CHECK(jet.derivative(0, 0, 2, 0) == doctest::Approx(2.0));
  CHECK(jet.derivative(0, 1, 1, 1) == doctest::Approx(-3.0));
  for (int comp = 0; comp < 2; ++comp) {
    for (int i = 0; i <= 4; ++i) CHECK(jet.derivative(0, comp, i, 4 - i) == 0.0);
  }
  CHECK_THROWS_AS(evaluate(basis, Vec2::Zero(), 6, jet), Unsupported);
}

TEST_CASE("directional derivatives") {
  ElementBasis basis;
  basis.coef[0][0][monomial_index(2, 1)] = 1.0;  // x^2 y
  BasisJet jet;
  const Vec2 x(0.3, 0.5), n(0.6, 0.8);
  evaluate(basis, x, 4, jet);
  const double qxx = 2 * x.y(), qxy = 2 * x.x();
  CHECK(directional_derivative(jet, 0, 0, n, 2, DirectionalWeights::Plain) ==
        doctest::Approx(n.x() * n.x() * qxx + n.x() * n.y() * qxy));
  CHECK(directional_derivative(jet, 0, 0, n, 2, DirectionalWeights::Multinomial) ==
        doctest::Approx(n.x() * n.x() * qxx + 2 * n.x() * n.y() * qxy));
  CHECK(directional_derivative(jet, 0, 0, n, 3, DirectionalWeights::Multinomial) ==
        doctest::Approx(3 * 2 * n.x() * n.x() * n.y()));
  CHECK(directional_derivative(jet, 0, 0, n, 0) == doctest::Approx(x.x() * x.x() * x.y()));
  CHECK_THROWS_AS(directional_derivative(jet, 0, 0, n, 5), Unsupported);
}

TEST_CASE("global fields are tangentially and curl continuous") {
  const Discretization disc = build_discretization(4, levelset_none());
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Eigen::VectorXd w(disc.space.total_dofs());
  for (int i = 0; i < w.size(); ++i) w[i] = U(rng);

  const Mesh& m = disc.mesh;
  double tangential = 0.0, curl = 0.0, normal = 0.0;
  for (int e = 0; e < m.num_edges(); ++e) {
    if (m.boundary_edge[e]) continue;
    const Vec2 a = m.vertices[m.edges[e][0]], b = m.vertices[m.edges[e][1]];
    const Vec2 tau = (b - a).normalized();
    const QuadRule rule = edge_rule(a, b, 9);
    const auto [t0, t1] = m.triangles_of_edge[e];
    for (const Vec2& x : rule.points) {
      const FieldJet j0 = discrete_jet(disc, w, Side::Plus, t0, x);
      const FieldJet j1 = discrete_jet(disc, w, Side::Plus, t1, x);
      tangential = std::max(tangential, std::abs((j0.u - j1.u).dot(tau)));
      curl = std::max(curl, std::abs(j0.curl - j1.curl));
      normal = std::max(normal, std::abs(cross(tau, j0.u - j1.u)));
    }
  }
  CHECK(tangential < 1e-9);
  CHECK(curl < 1e-9);
  CHECK(normal > 1e-3);
}
