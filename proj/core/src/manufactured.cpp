#include "quadcurl/manufactured.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>

#include "quadcurl/errors.hpp"

namespace quadcurl {

namespace {

constexpr double kPi = std::numbers::pi;

/// k-th derivative of sin^3(pi t) = (3 sin(pi t) - sin(3 pi t)) / 4.
double sin3_derivative(int k, double t) {
  const double shift = k * kPi / 2.0;
  return (3.0 * std::pow(kPi, k) * std::sin(kPi * t + shift) - std::pow(3.0 * kPi, k) * std::sin(3.0 * kPi * t + shift)) /
         4.0;
}

double n_cross(const Vec2& n, const Vec2& v) { return n.x() * v.y() - n.y() * v.x(); }

NormSet finish(const NormSet& sq) { return {std::sqrt(sq.l2), std::sqrt(sq.curl), std::sqrt(sq.curlcurl), std::sqrt(sq.div)}; }

void accumulate(NormSet& sq, double w, const FieldJet& a, const FieldJet& b) {
  sq.l2 += w * (a.u - b.u).squaredNorm();
  sq.curl += w * (a.curl - b.curl) * (a.curl - b.curl);
  sq.curlcurl += w * (a.curlcurl - b.curlcurl).squaredNorm();
  sq.div += w * (a.div - b.div) * (a.div - b.div);
}

ErrorReport report_from(const std::array<NormSet, 2>& sq, const Discretization& disc) {
  ErrorReport rep;
  NormSet total;
  for (int c = 0; c < 2; ++c) {
    rep.side[c] = finish(sq[c]);
    total.l2 += sq[c].l2;
    total.curl += sq[c].curl;
    total.curlcurl += sq[c].curlcurl;
    total.div += sq[c].div;
  }
  rep.total = finish(total);
  rep.dofs = disc.space.total_dofs();
  rep.h = disc.h();
  return rep;
}

}  // namespace

ExactSolution example1_solution() {
  ExactSolution ex;
  ex.name = "example1";
  ex.divergence_free = true;
  ex.jet = [](Side, const Vec2& p) {
    std::array<double, 6> sx{}, sy{};
    for (int k = 0; k <= 5; ++k) {
      sx[k] = sin3_derivative(k, p.x());
      sy[k] = sin3_derivative(k, p.y());
    }
    const auto D = [&](int a, int b) { return sx[a] * sy[b]; };
    FieldJet j;
    j.u = {D(0, 1), -D(1, 0)};
    j.curl = -(D(2, 0) + D(0, 2));
    j.curlcurl = {-(D(2, 1) + D(0, 3)), D(3, 0) + D(1, 2)};
    j.curl3 = D(4, 0) + 2.0 * D(2, 2) + D(0, 4);
    j.quadcurl = {D(4, 1) + 2.0 * D(2, 3) + D(0, 5), -(D(5, 0) + 2.0 * D(3, 2) + D(1, 4))};
    j.div = 0.0;
    return j;
  };
  return ex;
}

ExactSolution polynomial_solution(std::string name, const PolyVec2& u) {
  struct Tables {
    PolyVec2 u, curlcurl, quadcurl;
    Poly2 curl, curl3, div;
  };
  auto t = std::make_shared<Tables>();
  t->u = u;
  t->curl = u.curl();
  t->curlcurl = vector_curl(t->curl);
  t->curl3 = t->curlcurl.curl();
  t->quadcurl = vector_curl(t->curl3);
  t->div = u.div();

  ExactSolution ex;
  ex.name = std::move(name);
  ex.divergence_free = t->div.effective_degree(1e-14) < 0;
  ex.jet = [t](Side, const Vec2& p) {
    FieldJet j;
    j.u = t->u(p);
    j.curl = t->curl(p);
    j.curlcurl = t->curlcurl(p);
    j.curl3 = t->curl3(p);
    j.quadcurl = t->quadcurl(p);
    j.div = t->div(p);
    return j;
  };
  return ex;
}

ExactSolution example4_solution() {
  const Poly2 x = Poly2::x(), y = Poly2::y();
  const Poly2 ax = x * x - Poly2::constant(1.0);
  const Poly2 ay = y * y - Poly2::constant(1.0);
  const PolyVec2 u{ax.pow(3) * ay.pow(2) * y, -(ax.pow(2) * ay.pow(2) * x)};
  return polynomial_solution("example4", u);
}

ProblemData manufactured_data(const ExactSolution& exact, const ProblemParams& params, bool div_consistency) {
  ProblemData d;
  const auto jet = exact.jet;
  for (Side s : kSides) {
    const double alpha = params.alpha(s);
    const double gamma = params.gamma;
    d.f[index(s)] = [jet, s, alpha, gamma](const Vec2& x) {
      const FieldJet j = jet(s, x);
      return Vec2(alpha * j.quadcurl + gamma * j.u);
    };
    if (div_consistency) d.div_source[index(s)] = [jet, s](const Vec2& x) { return jet(s, x).div; };
  }
  const double am = params.alpha_minus, ap = params.alpha_plus;
  d.phi3 = [jet, am, ap](const Vec2& x, const Vec2& n) {
    return am * n_cross(n, jet(Side::Minus, x).curlcurl) - ap * n_cross(n, jet(Side::Plus, x).curlcurl);
  };
  d.phi4 = [jet, am, ap](const Vec2& x, const Vec2&) {
    return am * jet(Side::Minus, x).curl3 - ap * jet(Side::Plus, x).curl3;
  };
  return d;
}

ProblemData example3_data() {
  ProblemData d;
  d.f[index(Side::Minus)] = [](const Vec2&) { return Vec2(1.0, 0.0); };
  d.f[index(Side::Plus)] = [](const Vec2&) { return Vec2(10.0, 0.0); };
  d.phi3 = [](const Vec2& x, const Vec2&) { return 2.0 * x.x() + 3.0 * x.y(); };
  d.phi4 = [](const Vec2& x, const Vec2&) { return -9.0 * x.y(); };
  return d;
}

Experiment make_experiment(int example, const ProblemParams& params) {
  Experiment e;
  e.example = example;
  const InterfaceGeometry circle = levelset_circle(Vec2(0.0, 0.0), kPi / 6.0);
  switch (example) {
    case 1:
      e.iface = circle;
      e.exact = example1_solution();
      break;
    case 2:
      e.iface = levelset_peanut();
      e.exact = example1_solution();
      break;
    case 3:
      e.iface = circle;
      e.data = example3_data();
      e.self_convergence = true;
      return e;
    case 4:
      e.iface = circle;
      e.exact = example4_solution();
      e.div_consistency = true;
      break;
    default:
      throw std::invalid_argument("unknown example " + std::to_string(example));
  }
  e.data = manufactured_data(*e.exact, params, e.div_consistency);
  return e;
}

SidedField as_field(const ExactSolution& exact) {
  const auto jet = exact.jet;
  return [jet](Side s, const Vec2& x) {
    const FieldJet j = jet(s, x);
    return FieldSample{j.u, j.curl};
  };
}

Eigen::VectorXd interpolate_global(const Discretization& disc, const SidedField& field) {
  const DofSpace& space = disc.space;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(space.total_dofs());
  for (Side s : kSides) {
    const FieldFunction f = [&](const Vec2& x) { return field(s, x); };
    for (int t = 0; t < disc.mesh.num_triangles(); ++t) {
      if (!space.live(s, t)) continue;
      const DofTable& dofs = space.gather(s, t);
      const auto values = physical_dofs(disc.mesh, t, f);
      for (int i = 0; i < kLocalDofs; ++i) {
        if (dofs[i] >= 0) w(dofs[i]) = values[i];
      }
    }
  }
  return w;
}

FieldJet discrete_jet(const Discretization& disc, const Eigen::VectorXd& coeffs, Side s, int t, const Vec2& x) {
  const DofTable& dofs = disc.space.gather(s, t);
  BasisJet jet;
  evaluate(disc.bases[t], x, 3, jet);
  FieldJet out;
  for (int j = 0; j < kLocalDofs; ++j) {
    if (dofs[j] < 0) continue;
    const double c = coeffs(dofs[j]);
    if (c == 0.0) continue;
    out.u += c * jet.value(j);
    out.curl += c * jet.curl(j);
    out.curlcurl += c * jet.curlcurl(j);
    out.curl3 += c * jet.curl3(j);
    out.div += c * jet.div(j);
  }
  return out;
}

ErrorReport compute_errors(const Discretization& disc, const Eigen::VectorXd& coeffs, const ExactSolution& exact) {
  std::array<NormSet, 2> sq{};
  for (int t = 0; t < disc.mesh.num_triangles(); ++t) {
    for (Side s : kSides) {
      if (!disc.space.live(s, t)) continue;
      const QuadRule rule = disc.volume_rule(t, s);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const Vec2& x = rule.points[q];
        accumulate(sq[index(s)], rule.weights[q], exact.jet(s, x), discrete_jet(disc, coeffs, s, t, x));
      }
    }
  }
  return report_from(sq, disc);
}

ErrorReport self_convergence(const Discretization& coarse, const Eigen::VectorXd& coarse_coeffs,
                             const Discretization& fine, const Eigen::VectorXd& fine_coeffs) {
  const int nc = coarse.mesh.cells_per_side, nf = fine.mesh.cells_per_side;
  if (nc <= 0 || nf <= 0 || nf % nc != 0 || coarse.mesh.lower != fine.mesh.lower ||
      coarse.mesh.upper != fine.mesh.upper) {
    throw std::invalid_argument("self_convergence: meshes are not nested (n = " + std::to_string(nc) + ", " +
                                std::to_string(nf) + ")");
  }
  std::array<NormSet, 2> sq{};
  for (int t = 0; t < fine.mesh.num_triangles(); ++t) {
    const int tc = coarse.mesh.locate(fine.mesh.centroid(t));
    for (Side s : kSides) {
      if (!fine.space.live(s, t)) continue;
      const QuadRule rule = fine.volume_rule(t, s);
      if (rule.empty()) continue;
      if (!coarse.space.live(s, tc)) {
        throw GeometryError("self_convergence: coarse element does not cover the fine side", tc);
      }
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const Vec2& x = rule.points[q];
        accumulate(sq[index(s)], rule.weights[q], discrete_jet(coarse, coarse_coeffs, s, tc, x),
                   discrete_jet(fine, fine_coeffs, s, t, x));
      }
    }
  }
  return report_from(sq, fine);
}

double energy_error(const Discretization& disc, const Eigen::VectorXd& coeffs, const ExactSolution& exact,
                    const ProblemParams& params) {
  const Mesh& mesh = disc.mesh;
  const double h = disc.h();
  const double lambda = params.lambda;
  double total = 0.0;

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    for (Side s : kSides) {
      if (!disc.space.live(s, t)) continue;
      const QuadRule rule = disc.volume_rule(t, s);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const Vec2& x = rule.points[q];
        const FieldJet e = exact.jet(s, x);
        const FieldJet d = discrete_jet(disc, coeffs, s, t, x);
        const double div = e.div - d.div;
        total += rule.weights[q] *
                 ((e.curlcurl - d.curlcurl).squaredNorm() + (e.u - d.u).squaredNorm() + div * div / (h * h));
      }
    }
  }

  for (int t : disc.cls.t_gamma) {
    const CutDecomposition& cut = disc.cuts[t];
    const QuadRule& g = cut.gamma_rule;
    const InterfaceWeights w = average_weights(cut.area_minus, cut.area_plus, params);
    for (std::size_t q = 0; q < g.size(); ++q) {
      const Vec2& x = g.points[q];
      const Vec2& n = g.normals[q];
      std::array<FieldJet, 2> xi;
      for (Side s : kSides) {
        const FieldJet e = exact.jet(s, x);
        const FieldJet d = discrete_jet(disc, coeffs, s, t, x);
        FieldJet& r = xi[index(s)];
        r.u = e.u - d.u;
        r.curl = e.curl - d.curl;
        r.curlcurl = e.curlcurl - d.curlcurl;
        r.curl3 = e.curl3 - d.curl3;
      }
      const FieldJet& m = xi[0];
      const FieldJet& p = xi[1];
      const double jn = n.dot(m.u - p.u);
      const double jt = n_cross(n, m.u - p.u);
      const double jc = m.curl - p.curl;
      const double avg3 = w.kappa1 * params.alpha_minus * m.curl3 + w.kappa2 * params.alpha_plus * p.curl3;
      const double avgf =
          w.kappa1 * params.alpha_minus * n_cross(n, m.curlcurl) + w.kappa2 * params.alpha_plus * n_cross(n, p.curlcurl);
      total += g.weights[q] * (jn * jn / (h * h * h) + lambda * jt * jt / (h * h * h) + lambda * jc * jc / h +
                               h * h * h / lambda * avg3 * avg3 + h / lambda * avgf * avgf);
    }
  }

  // Interior edge normal jumps of the discrete field; the exact field does
  // not jump inside an active mesh.
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (mesh.boundary_edge[e]) continue;
    const auto [ta, tb] = mesh.triangles_of_edge[e];
    const int t1 = std::min(ta, tb), t2 = std::max(ta, tb);
    const Vec2& a = mesh.vertices[mesh.edges[e][0]];
    const Vec2& b = mesh.vertices[mesh.edges[e][1]];
    std::optional<CoupledBlock> block;
    for (Side s : kSides) {
      if (!disc.space.live(s, t1) || !disc.space.live(s, t2)) continue;
      if (!block) block = edge_jump_terms(disc.bases[t1], disc.bases[t2], a, b, h, kG0);
      Eigen::Matrix<double, 2 * kLocalDofs, 1> local;
      const DofTable& d1 = disc.space.gather(s, t1);
      const DofTable& d2 = disc.space.gather(s, t2);
      for (int i = 0; i < kLocalDofs; ++i) {
        local(i) = d1[i] >= 0 ? coeffs(d1[i]) : 0.0;
        local(kLocalDofs + i) = d2[i] >= 0 ? coeffs(d2[i]) : 0.0;
      }
      total += local.dot(*block * local);
    }
  }
  return std::sqrt(total);
}

}  // namespace quadcurl
