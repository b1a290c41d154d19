#pragma once

#include <vector>

#include "quadcurl/element.hpp"
#include "quadcurl/geometry.hpp"
#include "quadcurl/quadrature.hpp"
#include "quadcurl/space.hpp"

namespace quadcurl {

/// Everything about a mesh/interface pair that does not depend on the PDE
/// coefficients: classification, cut rules, element bases, DOF numbering.
struct Discretization {
  Mesh mesh;
  InterfaceGeometry iface;
  Classification cls;
  AssumptionReport assumptions;
  /// Indexed by triangle; only CUT entries are filled.
  std::vector<CutDecomposition> cuts;
  std::vector<ElementBasis> bases;
  DofSpace space;

  double h() const { return mesh.h; }
  /// Volume rule of K ∩ Omega_s (the whole element when K is not cut).
  QuadRule volume_rule(int t, Side s) const;
  /// Degree-8 rule on the whole element.
  QuadRule element_rule(int t) const;
};

/// Builds the discretization on the n x n structured mesh. Throws
/// GeometryError when the interface violates the mesh assumptions.
Discretization build_discretization(int n, const InterfaceGeometry& iface, const CutOptions& options = {});

}  // namespace quadcurl
