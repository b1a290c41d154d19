#include "quadcurl/quadrature.hpp"

#include <cmath>
#include <functional>
#include <mutex>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "quadcurl/errors.hpp"

namespace quadcurl {

double QuadRule::total_weight() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

void QuadRule::append(const QuadRule& other) {
  points.insert(points.end(), other.points.begin(), other.points.end());
  weights.insert(weights.end(), other.weights.begin(), other.weights.end());
  normals.insert(normals.end(), other.normals.begin(), other.normals.end());
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = z;
        p0 = 1.0;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged node for the weight.
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n == 1 ? 1.0 : n * (z * p1 - p0) / (z * z - 1.0);
    x[i] = 0.5 * (1.0 - z);
    w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

namespace {

QuadRule build_reference_rule(int degree) {
  // The collapse Jacobian (1 - x) raises the degree in x by one.
  const int n = (degree + 3) / 2;
  const auto [x, w] = gauss_legendre(n);
  QuadRule rule;
  rule.points.reserve(n * n);
  rule.weights.reserve(n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      rule.points.emplace_back(x[i], (1.0 - x[i]) * x[j]);
      rule.weights.push_back(w[i] * w[j] * (1.0 - x[i]));
    }
  }
  return rule;
}

}  // namespace

const QuadRule& reference_rule(int degree) {
  if (degree < 0 || degree > 10) {
    throw Unsupported("reference_rule: degree " + std::to_string(degree) + " not supported (max 10)");
  }
  static std::array<QuadRule, 11> rules;
  static std::once_flag once;
  std::call_once(once, [] {
    for (int d = 0; d <= 10; ++d) rules[d] = build_reference_rule(d);
  });
  return rules[degree];
}

QuadRule map_rule(const QuadRule& reference, const Vec2& a, const Vec2& b, const Vec2& c) {
  const Vec2 e1 = b - a, e2 = c - a;
  const double jac = std::abs(cross(e1, e2));
  QuadRule out;
  out.points.reserve(reference.size());
  out.weights.reserve(reference.size());
  for (std::size_t q = 0; q < reference.size(); ++q) {
    const Vec2& p = reference.points[q];
    out.points.push_back(a + p.x() * e1 + p.y() * e2);
    out.weights.push_back(reference.weights[q] * jac);
  }
  return out;
}

QuadRule edge_rule(const Vec2& a, const Vec2& b, int degree) {
  const int n = std::max(1, degree / 2 + 1);
  const auto [x, w] = gauss_legendre(n);
  const double len = (b - a).norm();
  QuadRule rule;
  for (int i = 0; i < n; ++i) {
    rule.points.push_back((1.0 - x[i]) * a + x[i] * b);
    rule.weights.push_back(w[i] * len);
  }
  return rule;
}

namespace {

/// The interface inside one element written as a graph over the chord from
/// `start` to `end`: P(s) = start + s (end - start) + sigma(s) nu.
class ChordGraph {
 public:
  ChordGraph(const Vec2& start, const Vec2& end, const InterfaceGeometry& iface, int element)
      : start_(start), chord_(end - start), iface_(iface), element_(element) {
    const double len = chord_.norm();
    if (!(len > 0.0)) throw GeometryError("degenerate interface chord", element);
    nu_ = perp(chord_) / len;
    scale_ = len;
  }

  Vec2 point(double s) const {
    const Vec2 base = start_ + s * chord_;
    double sigma = 0.0;
    for (int it = 0; it < 60; ++it) {
      const Vec2 p = base + sigma * nu_;
      const double f = iface_.phi(p);
      const double df = iface_.gradient(p).dot(nu_);
      if (std::abs(df) < 1e-8 || std::abs(sigma) > scale_) break;
      const double step = f / df;
      sigma -= step;
      if (std::abs(step) <= 1e-15 * scale_) return base + sigma * nu_;
    }
    return base + bracketed_offset(base) * nu_;
  }

  Vec2 tangent(const Vec2& p) const {
    const Vec2 g = iface_.gradient(p);
    return chord_ - (g.dot(chord_) / g.dot(nu_)) * nu_;
  }

 private:
  /// Root of phi along the chord normal nearest to the chord, by scanning
  /// outwards for a sign change and bisecting.
  double bracketed_offset(const Vec2& base) const {
    const auto f = [&](double sigma) { return iface_.phi(base + sigma * nu_); };
    const double f0 = f(0.0);
    if (f0 == 0.0) return 0.0;
    constexpr int kSteps = 64;
    for (int k = 1; k <= kSteps; ++k) {
      for (double dir : {1.0, -1.0}) {
        const double inner = dir * (k - 1) * scale_ / kSteps;
        const double outer = dir * k * scale_ / kSteps;
        if ((f(inner) < 0.0) == (f(outer) < 0.0)) continue;
        double lo = inner, hi = outer;
        const bool lo_negative = f(lo) < 0.0;
        for (int it = 0; it < 200 && std::abs(hi - lo) > 1e-15 * scale_; ++it) {
          const double mid = 0.5 * (lo + hi);
          ((f(mid) < 0.0) == lo_negative ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
      }
    }
    throw GeometryError("interface projection left element " + std::to_string(element_), element_);
  }

 private:
  Vec2 start_, chord_, nu_;
  double scale_;
  const InterfaceGeometry& iface_;
  int element_;
};

struct Node {
  Vec2 p;
  bool crossing;
};

}  // namespace

CutDecomposition decompose_cut_element(const Mesh& mesh, int t, const InterfaceGeometry& iface,
                                       double tie_epsilon, const CutOptions& options) {
  CutDecomposition cut;
  const auto P = mesh.corners(t);
  const QuadRule& ref = reference_rule(options.volume_degree);
  const auto phi_tb = [&](const Vec2& p) {
    const double v = iface.phi(p);
    return std::abs(v) < tie_epsilon ? tie_epsilon : v;
  };

  std::array<double, 3> vphi{};
  for (int k = 0; k < 3; ++k) vphi[k] = phi_tb(P[k]);

  std::vector<Node> minus_nodes, plus_nodes;
  int crossings = 0;
  for (int k = 0; k < 3; ++k) {
    (vphi[k] < 0.0 ? minus_nodes : plus_nodes).push_back({P[k], false});
    const int k1 = (k + 1) % 3;
    if ((vphi[k] < 0.0) != (vphi[k1] < 0.0)) {
      const Vec2 c = find_edge_crossing(P[k], P[k1], phi_tb);
      minus_nodes.push_back({c, true});
      plus_nodes.push_back({c, true});
      ++crossings;
    }
  }

  if (crossings == 0) {
    QuadRule whole = map_rule(ref, P[0], P[1], P[2]);
    const double area = mesh.area(t);
    cut.sub_triangles.push_back(P);
    if (vphi[0] < 0.0) {
      cut.minus_rule = std::move(whole);
      cut.area_minus = area;
    } else {
      cut.plus_rule = std::move(whole);
      cut.area_plus = area;
    }
    return cut;
  }
  if (crossings != 2) {
    throw GeometryError("element " + std::to_string(t) + " boundary is crossed " + std::to_string(crossings) +
                            " times",
                        t);
  }

  // The minus polygon runs counter-clockwise; its two crossing nodes are
  // cyclically adjacent and the step between them follows the curve.
  const auto arc_start = [](const std::vector<Node>& nodes) {
    const int n = static_cast<int>(nodes.size());
    for (int i = 0; i < n; ++i) {
      if (nodes[i].crossing && nodes[(i + 1) % n].crossing) return i;
    }
    return -1;
  };
  const int im = arc_start(minus_nodes);
  const int ip = arc_start(plus_nodes);
  if (im < 0 || ip < 0) throw GeometryError("could not order cut polygon", t);
  const Vec2 A = minus_nodes[im].p;
  const Vec2 B = minus_nodes[(im + 1) % minus_nodes.size()].p;

  // A chord far below quadrature resolution comes from a tie-broken vertex
  // on the interface: the sliver at that vertex is dropped and the element
  // is integrated whole on the other side.
  if ((B - A).norm() < 1e-8 * mesh.h) {
    const bool minus_sliver = minus_nodes.size() == 3;
    QuadRule whole = map_rule(ref, P[0], P[1], P[2]);
    cut.sub_triangles.push_back(P);
    (minus_sliver ? cut.plus_rule : cut.minus_rule) = std::move(whole);
    (minus_sliver ? cut.area_plus : cut.area_minus) = mesh.area(t);
    return cut;
  }

  const ChordGraph graph(A, B, iface, t);

  // Uniform refinement of the chord parameter until every sub-chord stays
  // within the deviation bound.
  const double tol = options.chord_tolerance * mesh.h * mesh.h;
  int m = 1;
  std::vector<double> s_nodes;
  std::vector<Vec2> p_nodes;
  for (;;) {
    s_nodes.resize(m + 1);
    p_nodes.resize(m + 1);
    for (int k = 0; k <= m; ++k) {
      s_nodes[k] = static_cast<double>(k) / m;
      p_nodes[k] = k == 0 ? A : (k == m ? B : graph.point(s_nodes[k]));
    }
    double deviation = 0.0;
    for (int k = 0; k < m; ++k) {
      const Vec2 mid = graph.point(0.5 * (s_nodes[k] + s_nodes[k + 1]));
      deviation = std::max(deviation, (mid - 0.5 * (p_nodes[k] + p_nodes[k + 1])).norm());
    }
    if (deviation < tol) break;
    if (2 * m > options.max_segments) {
      throw GeometryError("interface resolution exceeded segment limit in element " + std::to_string(t), t);
    }
    m *= 2;
  }
  cut.segments = m;

  const int nr = options.volume_degree / 2 + 1;
  const int ns = nr + 1;
  const auto [gr, wr] = gauss_legendre(nr);
  const auto [gs, ws] = gauss_legendre(ns);
  const auto [g5, w5] = gauss_legendre(5);

  for (int k = 0; k < m; ++k) {
    const double ds = s_nodes[k + 1] - s_nodes[k];
    for (int q = 0; q < 5; ++q) {
      const Vec2 p = graph.point(s_nodes[k] + g5[q] * ds);
      cut.gamma_rule.points.push_back(p);
      cut.gamma_rule.weights.push_back(w5[q] * ds * graph.tangent(p).norm());
      cut.gamma_rule.normals.push_back(iface.normal(p));
    }
  }

  const auto arc_point = [&](double s) { return s == 0.0 ? A : (s == 1.0 ? B : graph.point(s)); };

  // A piece is bounded by the arc over the breakpoints `arc` followed by
  // the straight chain from the arc end back to the arc start.
  struct Piece {
    std::vector<double> arc;
    std::vector<Vec2> chain;
  };
  const auto straight_path = [&](const Piece& piece) {
    std::vector<Vec2> path{arc_point(piece.arc.back())};
    path.insert(path.end(), piece.chain.begin(), piece.chain.end());
    path.push_back(arc_point(piece.arc.front()));
    return path;
  };
  const auto sees_all = [&](const Piece& piece, const Vec2& apex) {
    const std::vector<Vec2> path = straight_path(piece);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      if (path[i] == apex || path[i + 1] == apex) continue;
      if (cross(path[i] - apex, path[i + 1] - apex) <= 0.0) return false;
    }
    for (std::size_t k = 0; k + 1 < piece.arc.size(); ++k) {
      const double s0 = piece.arc[k], ds = piece.arc[k + 1] - s0;
      for (int j = 0; j <= ns + 1; ++j) {
        const Vec2 p = graph.point(s0 + (j == 0 ? 0.0 : j > ns ? 1.0 : gs[j - 1]) * ds);
        if (!(cross(p - apex, graph.tangent(p)) * ds > 0.0)) return false;
      }
    }
    return true;
  };
  const auto emit = [&](const Piece& piece, const Vec2& c, QuadRule& rule) {
    const std::vector<Vec2> path = straight_path(piece);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      if (path[i] == c || path[i + 1] == c) continue;
      rule.append(map_rule(ref, c, path[i], path[i + 1]));
      cut.sub_triangles.push_back({c, path[i], path[i + 1]});
    }
    for (std::size_t k = 0; k + 1 < piece.arc.size(); ++k) {
      const double s0 = piece.arc[k], s1 = piece.arc[k + 1], ds = s1 - s0;
      for (int j = 0; j < ns; ++j) {
        const Vec2 p = graph.point(s0 + gs[j] * ds);
        const double jac = cross(p - c, graph.tangent(p)) * ds;
        for (int i = 0; i < nr; ++i) {
          rule.points.push_back(c + gr[i] * (p - c));
          rule.weights.push_back(wr[i] * ws[j] * gr[i] * jac);
        }
      }
      cut.sub_triangles.push_back({c, graph.point(s0), graph.point(s1)});
    }
  };
  const auto centroid = [&](const Piece& piece, double& a2) {
    std::vector<Vec2> ring;
    for (double sv : piece.arc) ring.push_back(arc_point(sv));
    ring.insert(ring.end(), piece.chain.begin(), piece.chain.end());
    a2 = 0.0;
    Vec2 c = Vec2::Zero();
    for (std::size_t i = 0; i < ring.size(); ++i) {
      const Vec2& p0 = ring[i];
      const Vec2& p1 = ring[(i + 1) % ring.size()];
      const double w = cross(p0, p1);
      a2 += w;
      c += w * (p0 + p1);
    }
    return a2 > 0.0 ? Vec2(c / (3.0 * a2)) : c;
  };

  // Fan from the centroid or a chain vertex when one sees the whole piece,
  // otherwise split along a segment from a chain vertex to the arc.
  const std::function<bool(const Piece&, int, QuadRule&)> decompose = [&](const Piece& piece, int depth,
                                                                          QuadRule& rule) {
    double a2 = 0.0;
    const Vec2 c = centroid(piece, a2);
    if (!(a2 > 0.0)) return false;
    if (sees_all(piece, c)) {
      emit(piece, c, rule);
      return true;
    }
    for (const Vec2& v : piece.chain) {
      if (sees_all(piece, v)) {
        emit(piece, v, rule);
        return true;
      }
    }
    if (depth == 0 || piece.chain.empty()) return false;
    std::vector<double> arc = piece.arc;
    if (arc.size() == 2) arc.insert(arc.begin() + 1, 0.5 * (arc[0] + arc[1]));
    const std::size_t mid = arc.size() / 2;
    const std::size_t subs = cut.sub_triangles.size();
    for (std::size_t j = 0; j < piece.chain.size(); ++j) {
      Piece first{{arc.begin(), arc.begin() + mid + 1}, {piece.chain.begin() + j, piece.chain.end()}};
      Piece second{{arc.begin() + mid, arc.end()}, {piece.chain.begin(), piece.chain.begin() + j + 1}};
      QuadRule trial;
      if (decompose(first, depth - 1, trial) && decompose(second, depth - 1, trial)) {
        rule.append(trial);
        return true;
      }
      cut.sub_triangles.resize(subs);
    }
    return false;
  };

  const auto fill_side = [&](const std::vector<Node>& nodes, int arc_index, bool forward, QuadRule& rule,
                             double& area) {
    const int n = static_cast<int>(nodes.size());
    Piece piece;
    for (int k = 0; k <= m; ++k) piece.arc.push_back(forward ? s_nodes[k] : s_nodes[m - k]);
    for (int i = 2; i < n; ++i) piece.chain.push_back(nodes[(arc_index + i) % n].p);
    double a2 = 0.0;
    centroid(piece, a2);
    if (!(a2 > 0.0)) throw GeometryError("cut polygon has non-positive area in element " + std::to_string(t), t);
    if (!decompose(piece, 6, rule)) {
      throw GeometryError("curved fan triangulation failed in element " + std::to_string(t), t);
    }
    area = rule.total_weight();
  };

  fill_side(minus_nodes, im, true, cut.minus_rule, cut.area_minus);
  fill_side(plus_nodes, ip, false, cut.plus_rule, cut.area_plus);
  return cut;
}

}  // namespace quadcurl
