#include "quadcurl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "quadcurl/errors.hpp"

namespace quadcurl {

std::array<Vec2, 3> Mesh::corners(int t) const {
  const auto& tri = triangles[t];
  return {vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]};
}

double Mesh::area(int t) const {
  const auto c = corners(t);
  return 0.5 * cross(c[1] - c[0], c[2] - c[0]);
}

double Mesh::diameter(int t) const {
  const auto c = corners(t);
  return std::max({(c[1] - c[0]).norm(), (c[2] - c[1]).norm(), (c[0] - c[2]).norm()});
}

Vec2 Mesh::centroid(int t) const {
  const auto c = corners(t);
  return (c[0] + c[1] + c[2]) / 3.0;
}

int Mesh::locate(const Vec2& p) const {
  if (cells_per_side <= 0) throw std::logic_error("Mesh::locate requires a structured mesh");
  const double slack = 1e-12 * (upper - lower);
  if (p.x() < lower - slack || p.x() > upper + slack || p.y() < lower - slack ||
      p.y() > upper + slack) {
    return -1;
  }
  const int n = cells_per_side;
  const double dx = (upper - lower) / n;
  const double s = (p.x() - lower) / dx;
  const double r = (p.y() - lower) / dx;
  const int i = std::clamp(static_cast<int>(std::floor(s)), 0, n - 1);
  const int j = std::clamp(static_cast<int>(std::floor(r)), 0, n - 1);
  const int cell = j * n + i;
  return (s - i) + (r - j) <= 1.0 ? 2 * cell : 2 * cell + 1;
}

Mesh build_structured_mesh(int n) {
  if (n < 1) throw std::invalid_argument("build_structured_mesh: n must be positive");
  Mesh mesh;
  mesh.cells_per_side = n;
  const double dx = (mesh.upper - mesh.lower) / n;
  const auto vid = [n](int i, int j) { return j * (n + 1) + i; };

  mesh.vertices.reserve((n + 1) * (n + 1));
  mesh.boundary_vertex.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      mesh.vertices.emplace_back(mesh.lower + i * dx, mesh.lower + j * dx);
      mesh.boundary_vertex.push_back(i == 0 || j == 0 || i == n || j == n);
    }
  }

  mesh.triangles.reserve(2 * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j), v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      mesh.triangles.push_back({v00, v10, v01});
      mesh.triangles.push_back({v10, v11, v01});
    }
  }

  std::unordered_map<long long, int> lookup;
  const long long nv = mesh.num_vertices();
  mesh.edge_of_triangle.resize(mesh.triangles.size());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    for (int k = 0; k < 3; ++k) {
      int a = mesh.triangles[t][k];
      int b = mesh.triangles[t][(k + 1) % 3];
      if (a > b) std::swap(a, b);
      const long long key = a * nv + b;
      auto [it, inserted] = lookup.try_emplace(key, mesh.num_edges());
      if (inserted) {
        mesh.edges.push_back({a, b});
        mesh.triangles_of_edge.push_back({t, -1});
      } else {
        mesh.triangles_of_edge[it->second][1] = t;
      }
      mesh.edge_of_triangle[t][k] = it->second;
    }
  }
  mesh.boundary_edge.resize(mesh.edges.size());
  for (int e = 0; e < mesh.num_edges(); ++e) mesh.boundary_edge[e] = mesh.triangles_of_edge[e][1] < 0;

  mesh.h = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) mesh.h = std::max(mesh.h, mesh.diameter(t));
  return mesh;
}

InterfaceGeometry levelset_circle(const Vec2& center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("levelset_circle: radius must be positive");
  InterfaceGeometry g;
  g.name = "circle";
  g.level_set = [center, radius](const Vec2& p) { return (p - center).norm() - radius; };
  g.gradient = [center](const Vec2& p) -> Vec2 {
    const Vec2 d = p - center;
    const double r = d.norm();
    return r > 0.0 ? Vec2(d / r) : Vec2(1.0, 0.0);
  };
  g.parametric = [center, radius](double theta) -> Vec2 {
    return center + radius * Vec2(std::cos(theta), std::sin(theta));
  };
  g.length_bound = 2.0 * std::numbers::pi * radius;
  return g;
}

InterfaceGeometry levelset_peanut() {
  InterfaceGeometry g;
  g.name = "peanut";
  g.level_set = [](const Vec2& p) {
    const double theta = std::atan2(p.y(), p.x());
    return p.norm() - (0.5 + 0.25 * std::sin(2.0 * theta));
  };
  g.gradient = [](const Vec2& p) -> Vec2 {
    const double r2 = p.squaredNorm();
    const double r = std::sqrt(r2);
    if (r == 0.0) return {1.0, 0.0};
    const double theta = std::atan2(p.y(), p.x());
    const double dR = 0.5 * std::cos(2.0 * theta);
    return Vec2(p / r) - dR * Vec2(-p.y(), p.x()) / r2;
  };
  g.parametric = [](double theta) -> Vec2 {
    const double radius = 0.5 + 0.25 * std::sin(2.0 * theta);
    return radius * Vec2(std::cos(theta), std::sin(theta));
  };
  // sqrt(R^2 + R'^2) <= sqrt(0.75^2 + 0.5^2) < 0.91 over the full turn
  g.length_bound = 2.0 * std::numbers::pi * 0.91;
  return g;
}

InterfaceGeometry levelset_none() {
  InterfaceGeometry g;
  g.name = "none";
  g.level_set = [](const Vec2&) { return 1.0; };
  g.gradient = [](const Vec2&) { return Vec2(0.0, 0.0); };
  return g;
}

namespace {

double tie_break(double v, double eps) { return std::abs(v) < eps ? eps : v; }

}  // namespace

int count_edge_crossings(const Vec2& a, const Vec2& b, const InterfaceGeometry& iface,
                         double tie_epsilon, int samples) {
  if (iface.empty()) return 0;
  int changes = 0;
  double prev = tie_break(iface.phi(a), tie_epsilon);
  for (int k = 1; k <= samples; ++k) {
    const double s = static_cast<double>(k) / samples;
    const double cur = tie_break(iface.phi((1.0 - s) * a + s * b), tie_epsilon);
    if ((prev < 0.0) != (cur < 0.0)) ++changes;
    prev = cur;
  }
  return changes;
}

Vec2 find_edge_crossing(const Vec2& a, const Vec2& b, const std::function<double(const Vec2&)>& phi,
                        double tol) {
  double s0 = 0.0, s1 = 1.0;
  const bool neg0 = phi(a) < 0.0;
  if (neg0 == (phi(b) < 0.0)) {
    throw std::invalid_argument("find_edge_crossing: no sign change on segment");
  }
  const double len = (b - a).norm();
  for (int it = 0; it < 200 && (s1 - s0) * len > tol; ++it) {
    const double sm = 0.5 * (s0 + s1);
    if ((phi((1.0 - sm) * a + sm * b) < 0.0) == neg0) {
      s0 = sm;
    } else {
      s1 = sm;
    }
  }
  const double s = 0.5 * (s0 + s1);
  return (1.0 - s) * a + s * b;
}

Classification classify_elements(const Mesh& mesh, const InterfaceGeometry& iface) {
  Classification cls;
  const int nt = mesh.num_triangles();
  cls.tie_epsilon = 1e-12 * mesh.h;
  cls.vertex_phi.resize(mesh.num_vertices());
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    cls.vertex_phi[v] = tie_break(iface.phi(mesh.vertices[v]), cls.tie_epsilon);
  }
  cls.element_tag.assign(nt, ElementTag::Plus);

  if (!iface.empty()) {
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      if (mesh.boundary_vertex[v] && cls.vertex_phi[v] < 0.0) {
        throw GeometryError("interface reaches the outer boundary (vertex " + std::to_string(v) + ")");
      }
    }
    for (int e = 0; e < mesh.num_edges(); ++e) {
      if (!mesh.boundary_edge[e]) continue;
      const Vec2& a = mesh.vertices[mesh.edges[e][0]];
      const Vec2& b = mesh.vertices[mesh.edges[e][1]];
      if (count_edge_crossings(a, b, iface, cls.tie_epsilon) > 0) {
        throw GeometryError("interface reaches the outer boundary (edge " + std::to_string(e) + ")");
      }
    }

    std::vector<bool> touched(nt, false);
    if (mesh.cells_per_side > 0) {
      // Any triangle holding a curve point is cut, including ones the curve
      // enters and leaves without changing a vertex sign.
      const int samples = std::max(4096, static_cast<int>(std::ceil(16.0 * iface.length_bound / mesh.h)));
      for (int k = 0; k < samples; ++k) {
        const Vec2 p = iface.parametric(2.0 * std::numbers::pi * k / samples);
        const int t = mesh.locate(p);
        if (t < 0 || std::abs(p.x()) >= mesh.upper || std::abs(p.y()) >= mesh.upper) {
          throw GeometryError("interface reaches the outer boundary");
        }
        touched[t] = true;
      }
    }

    for (int t = 0; t < nt; ++t) {
      const auto& tri = mesh.triangles[t];
      int negative = 0;
      for (int v : tri) negative += cls.vertex_phi[v] < 0.0 ? 1 : 0;
      bool cut = (negative > 0 && negative < 3) || touched[t];
      for (int k = 0; k < 3 && !cut; ++k) {
        if (count_edge_crossings(mesh.vertices[tri[k]], mesh.vertices[tri[(k + 1) % 3]], iface,
                                 cls.tie_epsilon, 16) > 0) {
          cut = true;
        }
      }
      cls.element_tag[t] = cut ? ElementTag::Cut : (negative == 3 ? ElementTag::Minus : ElementTag::Plus);
    }
  }

  cls.active_minus.assign(nt, false);
  cls.active_plus.assign(nt, false);
  std::vector<bool> gamma_edge(mesh.num_edges(), false);
  for (int t = 0; t < nt; ++t) {
    switch (cls.element_tag[t]) {
      case ElementTag::Minus:
        cls.t_minus.push_back(t);
        cls.active_minus[t] = true;
        break;
      case ElementTag::Plus:
        cls.t_plus.push_back(t);
        cls.active_plus[t] = true;
        break;
      case ElementTag::Cut:
        cls.t_gamma.push_back(t);
        cls.active_minus[t] = cls.active_plus[t] = true;
        for (int e : mesh.edge_of_triangle[t]) {
          if (!mesh.boundary_edge[e]) gamma_edge[e] = true;
        }
        break;
    }
  }
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (gamma_edge[e]) cls.e_gamma.push_back(e);
  }
  return cls;
}

std::string AssumptionReport::summary() const {
  std::ostringstream os;
  os << (passed ? "mesh assumptions hold" : "mesh assumptions violated") << " (" << checked_elements
     << " cut elements checked";
  if (!violations.empty()) os << ", " << violations.size() << " violations";
  os << ")";
  const std::size_t shown = std::min<std::size_t>(violations.size(), 10);
  for (std::size_t k = 0; k < shown; ++k) {
    os << "\n  element " << violations[k].element << " [" << violations[k].rule << "]: "
       << violations[k].message;
  }
  if (violations.size() > shown) os << "\n  ...";
  return os.str();
}

AssumptionReport validate_assumptions(const Mesh& mesh, const Classification& cls,
                                      const InterfaceGeometry& iface, int max_path) {
  AssumptionReport report;
  for (int t : cls.t_gamma) {
    ++report.checked_elements;
    const auto& tri = mesh.triangles[t];
    int total = 0;
    for (int k = 0; k < 3; ++k) {
      const int c = count_edge_crossings(mesh.vertices[tri[k]], mesh.vertices[tri[(k + 1) % 3]], iface,
                                         cls.tie_epsilon);
      if (c > 1) {
        report.violations.push_back({t, "edge crossing",
                                     "open edge " + std::to_string(mesh.edge_of_triangle[t][k]) +
                                         " crossed " + std::to_string(c) + " times"});
      }
      total += c;
    }
    if (total != 2) {
      report.violations.push_back(
          {t, "precisely twice",
           "interface crosses the element boundary " + std::to_string(total) + " times, expected precisely twice"});
    }

    // Breadth-first search over edge neighbours for a non-cut element of each side.
    bool found_minus = false, found_plus = false;
    std::vector<std::pair<int, int>> frontier{{t, 0}};
    std::vector<int> seen{t};
    for (std::size_t head = 0; head < frontier.size() && !(found_minus && found_plus); ++head) {
      const auto [cur, depth] = frontier[head];
      if (cls.element_tag[cur] == ElementTag::Minus) found_minus = true;
      if (cls.element_tag[cur] == ElementTag::Plus) found_plus = true;
      if (depth == max_path) continue;
      for (int e : mesh.edge_of_triangle[cur]) {
        for (int nb : mesh.triangles_of_edge[e]) {
          if (nb < 0 || std::find(seen.begin(), seen.end(), nb) != seen.end()) continue;
          seen.push_back(nb);
          frontier.emplace_back(nb, depth + 1);
        }
      }
    }
    if (!found_minus || !found_plus) {
      report.violations.push_back({t, "finite edge path",
                                   std::string("no non-cut ") + (found_minus ? "plus" : "minus") +
                                       " element within " + std::to_string(max_path) + " edge steps"});
    }
  }
  report.passed = report.violations.empty();
  return report;
}

}  // namespace quadcurl
