#include "quadcurl/space.hpp"

#include <stdexcept>
#include <string>

namespace quadcurl {

namespace {
constexpr int kAbsent = -2;
constexpr int kPending = -3;
}  // namespace

const DofTable& DofSpace::gather(Side s, int t) const {
  if (t < 0 || t >= num_triangles() || !live_[index(s)][t]) {
    throw std::logic_error("gather: component " + std::string(s == Side::Minus ? "minus" : "plus") +
                           " is not live on element " + std::to_string(t));
  }
  return tables_[index(s)][t];
}

DofSpace build_space(const Mesh& mesh, const Classification& cls) {
  DofSpace space;
  const int nt = mesh.num_triangles();
  int next = 0;
  for (Side s : kSides) {
    const int c = index(s);
    const bool eliminate = s == Side::Plus;
    auto& live = space.live_[c];
    auto& vdof = space.vertex_[c];
    auto& edof = space.edge_[c];
    auto& cdof = space.cell_[c];
    live.assign(nt, false);
    vdof.assign(mesh.num_vertices(), kAbsent);
    edof.assign(mesh.num_edges(), {kAbsent, kAbsent, kAbsent});
    cdof.assign(nt, kAbsent);

    for (int t = 0; t < nt; ++t) {
      if (!cls.is_active(s, t)) continue;
      live[t] = true;
      for (int v : mesh.triangles[t]) vdof[v] = kPending;
      for (int e : mesh.edge_of_triangle[t]) edof[e] = {kPending, kPending, kPending};
      cdof[t] = kPending;
    }

    space.offset_[c] = next;
    int raw = 0;
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      if (vdof[v] != kPending) continue;
      ++raw;
      vdof[v] = eliminate && mesh.boundary_vertex[v] ? kEliminated : next++;
    }
    for (int e = 0; e < mesh.num_edges(); ++e) {
      if (edof[e][0] != kPending) continue;
      raw += 3;
      for (int r = 0; r < 3; ++r) edof[e][r] = eliminate && mesh.boundary_edge[e] ? kEliminated : next++;
    }
    for (int t = 0; t < nt; ++t) {
      if (cdof[t] != kPending) continue;
      ++raw;
      cdof[t] = next++;
    }
    space.raw_[c] = raw;
    space.count_[c] = next - space.offset_[c];

    auto& tables = space.tables_[c];
    tables.assign(nt, DofTable{});
    for (int t = 0; t < nt; ++t) {
      if (!live[t]) continue;
      DofTable& d = tables[t];
      for (int k = 0; k < 3; ++k) d[k] = vdof[mesh.triangles[t][k]];
      for (int k = 0; k < 3; ++k) {
        for (int r = 0; r < 3; ++r) d[3 + 3 * k + r] = edof[mesh.edge_of_triangle[t][k]][r];
      }
      d[12] = cdof[t];
    }
  }
  space.total_ = next;
  return space;
}

}  // namespace quadcurl
