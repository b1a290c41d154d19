#include "quadcurl/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "quadcurl/errors.hpp"

namespace quadcurl {

void ProblemParams::validate() const {
  if (!(alpha_minus > 0.0) || !(alpha_plus > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be non-negative");
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
}

InterfaceWeights average_weights(double area_minus, double area_plus, const ProblemParams& params) {
  const double a = params.alpha_plus * area_minus;
  const double b = params.alpha_minus * area_plus;
  if (!(a + b > 0.0)) throw std::invalid_argument("average_weights: cut element with empty parts");
  InterfaceWeights w;
  w.kappa1 = a / (a + b);
  w.kappa2 = b / (a + b);
  return w;
}

ProblemData ProblemData::zero() {
  ProblemData d;
  for (auto& f : d.f) f = [](const Vec2&) { return Vec2(0.0, 0.0); };
  d.phi3 = [](const Vec2&, const Vec2&) { return 0.0; };
  d.phi4 = [](const Vec2&, const Vec2&) { return 0.0; };
  return d;
}

namespace {

using Row = Eigen::Matrix<double, kLocalDofs, 1>;
using Row2 = Eigen::Matrix<double, 2 * kLocalDofs, 1>;

double n_cross(const Vec2& n, const Vec2& v) { return n.x() * v.y() - n.y() * v.x(); }

template <class T>
T checked(T value, const char* what, const Vec2& x) {
  bool finite;
  if constexpr (std::is_same_v<T, double>) {
    finite = std::isfinite(value);
  } else {
    finite = value.allFinite();
  }
  if (!finite) {
    std::ostringstream os;
    os << "non-finite " << what << " at (" << x.x() << ", " << x.y() << ")";
    throw DataError(os.str());
  }
  return value;
}

/// Stacks a per-function row r into the doubled layout with weights (cm, cp).
Row2 stack(const Row& r, double cm, double cp) {
  Row2 out;
  out.head<kLocalDofs>() = cm * r;
  out.tail<kLocalDofs>() = cp * r;
  return out;
}

Row2 stack(const Row& first, const Row& second) {
  Row2 out;
  out.head<kLocalDofs>() = first;
  out.tail<kLocalDofs>() = -second;
  return out;
}

class TripletSink {
 public:
  explicit TripletSink(int size) : A_(size, size) {}

  void add(const DofTable& rows, const DofTable& cols, const LocalBlock& block) {
    for (int i = 0; i < kLocalDofs; ++i) {
      if (rows[i] < 0) continue;
      for (int j = 0; j < kLocalDofs; ++j) {
        if (cols[j] < 0 || block(i, j) == 0.0) continue;
        buffer_.emplace_back(rows[i], cols[j], block(i, j));
      }
    }
    if (buffer_.size() > kFlush) flush();
  }

  void add(const DofTable& first, const DofTable& second, const CoupledBlock& block) {
    const auto idx = [&](int k) { return k < kLocalDofs ? first[k] : second[k - kLocalDofs]; };
    for (int i = 0; i < 2 * kLocalDofs; ++i) {
      const int r = idx(i);
      if (r < 0) continue;
      for (int j = 0; j < 2 * kLocalDofs; ++j) {
        const int c = idx(j);
        if (c < 0 || block(i, j) == 0.0) continue;
        buffer_.emplace_back(r, c, block(i, j));
      }
    }
    if (buffer_.size() > kFlush) flush();
  }

  Eigen::SparseMatrix<double> finish() {
    flush();
    A_.makeCompressed();
    return std::move(A_);
  }

 private:
  static constexpr std::size_t kFlush = std::size_t{1} << 22;

  void flush() {
    if (buffer_.empty()) return;
    Eigen::SparseMatrix<double> part(A_.rows(), A_.cols());
    part.setFromTriplets(buffer_.begin(), buffer_.end());
    A_ += part;
    buffer_.clear();
  }

  Eigen::SparseMatrix<double> A_;
  std::vector<Eigen::Triplet<double>> buffer_;
};

}  // namespace

LocalBlock volume_terms(const ElementBasis& basis, const QuadRule& rule, double alpha, double gamma, double h,
                        unsigned terms) {
  LocalBlock K = LocalBlock::Zero();
  BasisJet jet;
  const double hm2 = 1.0 / (h * h);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    evaluate(basis, rule.points[q], 2, jet);
    const double w = rule.weights[q];
    Row c1, c2, u1, u2, dv;
    for (int j = 0; j < kLocalDofs; ++j) {
      const Vec2 cc = jet.curlcurl(j);
      c1(j) = cc.x();
      c2(j) = cc.y();
      u1(j) = jet.d[j][0][0];
      u2(j) = jet.d[j][1][0];
      dv(j) = jet.div(j);
    }
    if (terms & kCurlCurl) K.noalias() += (w * alpha) * (c1 * c1.transpose() + c2 * c2.transpose());
    if ((terms & kMass) && gamma != 0.0) K.noalias() += (w * gamma) * (u1 * u1.transpose() + u2 * u2.transpose());
    if (terms & kDivPenalty) K.noalias() += (w * hm2) * (dv * dv.transpose());
  }
  return K;
}

CoupledBlock nitsche_flux_terms(const ElementBasis& basis, const InterfaceWeights& w, const QuadRule& gamma_rule,
                                const ProblemParams& params) {
  CoupledBlock K = CoupledBlock::Zero();
  BasisJet jet;
  const double am = params.alpha_minus, ap = params.alpha_plus;
  for (std::size_t q = 0; q < gamma_rule.size(); ++q) {
    evaluate(basis, gamma_rule.points[q], 3, jet);
    const Vec2& n = gamma_rule.normals[q];
    Row flux, curl, curl3, ncross;
    for (int j = 0; j < kLocalDofs; ++j) {
      flux(j) = n_cross(n, jet.curlcurl(j));
      curl(j) = jet.curl(j);
      curl3(j) = jet.curl3(j);
      ncross(j) = n_cross(n, jet.value(j));
    }
    const Row2 avg_flux = stack(flux, w.kappa1 * am, w.kappa2 * ap);
    const Row2 avg_curl3 = stack(curl3, w.kappa1 * am, w.kappa2 * ap);
    const Row2 jump_curl = stack(curl, 1.0, -1.0);
    const Row2 jump_ncross = stack(ncross, 1.0, -1.0);
    const CoupledBlock a = jump_curl * avg_flux.transpose() - jump_ncross * avg_curl3.transpose();
    K.noalias() += gamma_rule.weights[q] * (a + a.transpose());
  }
  return K;
}

CoupledBlock interface_penalty_terms(const ElementBasis& basis, const QuadRule& gamma_rule, double lambda, double h,
                                     unsigned terms) {
  CoupledBlock K = CoupledBlock::Zero();
  BasisJet jet;
  const double h3 = 1.0 / (h * h * h);
  for (std::size_t q = 0; q < gamma_rule.size(); ++q) {
    evaluate(basis, gamma_rule.points[q], 1, jet);
    const Vec2& n = gamma_rule.normals[q];
    Row normal, ncross, curl;
    for (int j = 0; j < kLocalDofs; ++j) {
      const Vec2 u = jet.value(j);
      normal(j) = n.dot(u);
      ncross(j) = n_cross(n, u);
      curl(j) = jet.curl(j);
    }
    const double w = gamma_rule.weights[q];
    if (terms & kG0) {
      const Row2 j0 = stack(normal, 1.0, -1.0);
      K.noalias() += (w * h3) * (j0 * j0.transpose());
    }
    if (terms & kG1) {
      const Row2 j1 = stack(ncross, 1.0, -1.0);
      K.noalias() += (w * lambda * h3) * (j1 * j1.transpose());
    }
    if (terms & kG2) {
      const Row2 j2 = stack(curl, 1.0, -1.0);
      K.noalias() += (w * lambda / h) * (j2 * j2.transpose());
    }
  }
  return K;
}

namespace {

// Calls visit(weight, r1, r2) for every weighted jump row pair on the edge.
template <class Visit>
void for_each_edge_jump(const ElementBasis& first, const ElementBasis& second, const Vec2& a, const Vec2& b,
                        double h, unsigned terms, DirectionalWeights weights, Visit&& visit) {
  const QuadRule rule = edge_rule(a, b, 8);
  const Vec2 n = Vec2(b.y() - a.y(), a.x() - b.x()).normalized();
  std::array<double, 5> scale{};
  for (int l = 0; l <= 4; ++l) scale[l] = std::pow(h, 2 * l - 1);
  const double h3 = 1.0 / (h * h * h);

  BasisJet j1, j2;
  const int order = (terms & kGhost) ? kMaxJetOrder : 0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double w = rule.weights[q];
    evaluate(first, rule.points[q], order, j1);
    evaluate(second, rule.points[q], order, j2);
    if (terms & kG0) {
      Row r1, r2;
      for (int j = 0; j < kLocalDofs; ++j) {
        r1(j) = n.dot(j1.value(j));
        r2(j) = n.dot(j2.value(j));
      }
      visit(w * h3, r1, r2);
    }
    if (terms & kGhost) {
      for (int l = 0; l <= 4; ++l) {
        for (int comp = 0; comp < 3; ++comp) {
          Row r1, r2;
          for (int j = 0; j < kLocalDofs; ++j) {
            r1(j) = directional_derivative(j1, j, comp, n, l, weights);
            r2(j) = directional_derivative(j2, j, comp, n, l, weights);
          }
          visit(w * scale[l], r1, r2);
        }
      }
    }
  }
}

}  // namespace

CoupledBlock edge_jump_terms(const ElementBasis& first, const ElementBasis& second, const Vec2& a, const Vec2& b,
                             double h, unsigned terms, DirectionalWeights weights) {
  CoupledBlock K = CoupledBlock::Zero();
  if (!(terms & (kG0 | kGhost))) return K;
  for_each_edge_jump(first, second, a, b, h, terms, weights, [&](double w, const Row& r1, const Row& r2) {
    const Row2 jump = stack(r1, r2);
    K.noalias() += w * (jump * jump.transpose());
  });
  return K;
}

double edge_jump_energy(const ElementBasis& first, const ElementBasis& second, const LocalVector& c1,
                        const LocalVector& c2, const Vec2& a, const Vec2& b, double h, unsigned terms,
                        DirectionalWeights weights) {
  double energy = 0.0;
  if (!(terms & (kG0 | kGhost))) return energy;
  for_each_edge_jump(first, second, a, b, h, terms, weights, [&](double w, const Row& r1, const Row& r2) {
    const double jump = r1.dot(c1) - r2.dot(c2);
    energy += w * jump * jump;
  });
  return energy;
}

LinearSystem assemble(const Discretization& disc, const ProblemParams& params, const ProblemData& data,
                      unsigned terms) {
  params.validate();
  const Mesh& mesh = disc.mesh;
  const DofSpace& space = disc.space;
  const double h = disc.h();
  const int nt = mesh.num_triangles();

  TripletSink sink(space.total_dofs());
  LinearSystem sys;
  sys.b = Eigen::VectorXd::Zero(space.total_dofs());
  const auto add_rhs = [&](const DofTable& dofs, const Row& r) {
    for (int i = 0; i < kLocalDofs; ++i) {
      if (dofs[i] >= 0) sys.b(dofs[i]) += r(i);
    }
  };

  BasisJet jet;
  for (int t = 0; t < nt; ++t) {
    if (disc.cls.is_cut(t) && disc.cuts[t].gamma_rule.empty() && disc.cuts[t].sub_triangles.empty()) {
      throw std::logic_error("assemble: missing cut decomposition for element " + std::to_string(t));
    }
    for (Side s : kSides) {
      if (!space.live(s, t)) continue;
      const QuadRule rule = disc.volume_rule(t, s);
      if (rule.empty()) continue;
      const DofTable& dofs = space.gather(s, t);
      sink.add(dofs, dofs, volume_terms(disc.bases[t], rule, params.alpha(s), params.gamma, h, terms));

      const auto& f = data.f[index(s)];
      const auto& div_source = data.div_source[index(s)];
      Row r = Row::Zero();
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const Vec2& x = rule.points[q];
        evaluate(disc.bases[t], x, 1, jet);
        const double w = rule.weights[q];
        if (f) {
          const Vec2 fx = checked(f(x), "source term", x);
          for (int j = 0; j < kLocalDofs; ++j) r(j) += w * fx.dot(jet.value(j));
        }
        if (div_source) {
          const double dx = checked(div_source(x), "divergence source", x) / (h * h);
          for (int j = 0; j < kLocalDofs; ++j) r(j) += w * dx * jet.div(j);
        }
      }
      add_rhs(dofs, r);
    }
  }

  for (int t : disc.cls.t_gamma) {
    const CutDecomposition& cut = disc.cuts[t];
    const QuadRule& g = cut.gamma_rule;
    if (g.empty()) continue;
    const ElementBasis& basis = disc.bases[t];
    const DofTable& dm = space.gather(Side::Minus, t);
    const DofTable& dp = space.gather(Side::Plus, t);
    const InterfaceWeights w = average_weights(cut.area_minus, cut.area_plus, params);
    if (terms & kNitsche) sink.add(dm, dp, nitsche_flux_terms(basis, w, g, params));
    if (terms & (kG0 | kG1 | kG2)) sink.add(dm, dp, interface_penalty_terms(basis, g, params.lambda, h, terms));

    Row rm = Row::Zero(), rp = Row::Zero();
    for (std::size_t q = 0; q < g.size(); ++q) {
      const Vec2& x = g.points[q];
      const Vec2& n = g.normals[q];
      evaluate(basis, x, 1, jet);
      const double p3 = data.phi3 ? checked(data.phi3(x, n), "interface datum phi3", x) : 0.0;
      const double p4 = data.phi4 ? checked(data.phi4(x, n), "interface datum phi4", x) : 0.0;
      for (int j = 0; j < kLocalDofs; ++j) {
        const double v = g.weights[q] * (-p3 * jet.curl(j) + p4 * n_cross(n, jet.value(j)));
        rm(j) += w.kappa2 * v;
        rp(j) += w.kappa1 * v;
      }
    }
    add_rhs(dm, rm);
    add_rhs(dp, rp);
  }

  if (terms & (kG0 | kGhost)) {
    std::vector<bool> ghost_edge(mesh.num_edges(), false);
    for (int e : disc.cls.e_gamma) ghost_edge[e] = true;
    for (int e = 0; e < mesh.num_edges(); ++e) {
      if (mesh.boundary_edge[e]) continue;
      const auto [ta, tb] = mesh.triangles_of_edge[e];
      const int t1 = std::min(ta, tb), t2 = std::max(ta, tb);
      const unsigned edge_terms = (terms & kG0) | (ghost_edge[e] ? (terms & kGhost) : 0u);
      if (!edge_terms) continue;
      const Vec2& a = mesh.vertices[mesh.edges[e][0]];
      const Vec2& b = mesh.vertices[mesh.edges[e][1]];
      std::optional<CoupledBlock> block;
      for (Side s : kSides) {
        if (!space.live(s, t1) || !space.live(s, t2)) continue;
        if (!block) block = edge_jump_terms(disc.bases[t1], disc.bases[t2], a, b, h, edge_terms, params.ghost_weights);
        sink.add(space.gather(s, t1), space.gather(s, t2), *block);
      }
    }
  }

  sys.A = sink.finish();
  return sys;
}

}  // namespace quadcurl
