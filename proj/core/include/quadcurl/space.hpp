#pragma once

#include <array>
#include <vector>

#include "quadcurl/element.hpp"
#include "quadcurl/geometry.hpp"

namespace quadcurl {

/// Marker for a DOF fixed to zero by the outer boundary condition.
inline constexpr int kEliminated = -1;

using DofTable = std::array<int, kLocalDofs>;

/// Global numbering of the doubled space: the minus field lives on the
/// active minus mesh, the plus field on the active plus mesh. Global indices
/// are component-major (all minus DOFs first); inside a component they run
/// over vertices, then edges, then cells.
class DofSpace {
 public:
  int total_dofs() const { return total_; }
  int component_offset(Side s) const { return offset_[index(s)]; }
  int component_dofs(Side s) const { return count_[index(s)]; }
  /// DOFs of the component before boundary elimination.
  int raw_dofs(Side s) const { return raw_[index(s)]; }
  int eliminated(Side s) const { return raw_[index(s)] - count_[index(s)]; }

  bool live(Side s, int t) const { return live_[index(s)][t]; }
  /// Global indices of element t for component s (kEliminated for fixed
  /// DOFs). Throws std::logic_error when the component is not live on t.
  const DofTable& gather(Side s, int t) const;

  /// Vertex, edge-moment and cell index of a component (kEliminated when
  /// fixed, -2 when the entity is not in the component's mesh).
  int vertex_dof(Side s, int v) const { return vertex_[index(s)][v]; }
  int edge_dof(Side s, int e, int moment) const { return edge_[index(s)][e][moment]; }
  int cell_dof(Side s, int t) const { return cell_[index(s)][t]; }

  int num_triangles() const { return static_cast<int>(live_[0].size()); }

 private:
  friend DofSpace build_space(const Mesh& mesh, const Classification& cls);

  int total_ = 0;
  std::array<int, 2> offset_{}, count_{}, raw_{};
  std::array<std::vector<bool>, 2> live_;
  std::array<std::vector<int>, 2> vertex_;
  std::array<std::vector<std::array<int, 3>>, 2> edge_;
  std::array<std::vector<int>, 2> cell_;
  std::array<std::vector<DofTable>, 2> tables_;
};

/// Vertex-curl DOFs on outer boundary vertices and edge moments on outer
/// boundary edges of the plus component are eliminated.
DofSpace build_space(const Mesh& mesh, const Classification& cls);

}  // namespace quadcurl
