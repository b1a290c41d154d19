#include "quadcurl/discretization.hpp"

#include "quadcurl/errors.hpp"

namespace quadcurl {

QuadRule Discretization::element_rule(int t) const {
  const auto P = mesh.corners(t);
  return map_rule(reference_rule(8), P[0], P[1], P[2]);
}

QuadRule Discretization::volume_rule(int t, Side s) const {
  if (cls.is_cut(t)) return cuts[t].side_rule(s);
  const bool on_side = (cls.element_tag[t] == ElementTag::Minus) == (s == Side::Minus);
  return on_side ? element_rule(t) : QuadRule{};
}

Discretization build_discretization(int n, const InterfaceGeometry& iface, const CutOptions& options) {
  Discretization d;
  d.mesh = build_structured_mesh(n);
  d.iface = iface;
  d.cls = classify_elements(d.mesh, iface);
  d.assumptions = validate_assumptions(d.mesh, d.cls, iface);
  if (!d.assumptions.passed) {
    const int element = d.assumptions.violations.empty() ? -1 : d.assumptions.violations.front().element;
    throw GeometryError(d.assumptions.summary(), element);
  }
  d.cuts.resize(d.mesh.num_triangles());
  for (int t : d.cls.t_gamma) d.cuts[t] = decompose_cut_element(d.mesh, t, iface, d.cls.tie_epsilon, options);
  d.bases.reserve(d.mesh.num_triangles());
  for (int t = 0; t < d.mesh.num_triangles(); ++t) d.bases.push_back(build_element_basis(d.mesh, t));
  d.space = build_space(d.mesh, d.cls);
  return d;
}

}  // namespace quadcurl
