#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "quadcurl/assembly.hpp"
#include "quadcurl/discretization.hpp"

namespace quadcurl {

/// Pointwise values of an exact field and the derivatives the scheme uses.
struct FieldJet {
  Vec2 u = Vec2::Zero();
  double curl = 0.0;
  /// Vector curl of curl u.
  Vec2 curlcurl = Vec2::Zero();
  /// Scalar curl of curlcurl.
  double curl3 = 0.0;
  /// Vector curl of curl3, i.e. the quad-curl operator applied to u.
  Vec2 quadcurl = Vec2::Zero();
  double div = 0.0;
};

struct ExactSolution {
  std::string name;
  bool divergence_free = true;
  std::function<FieldJet(Side, const Vec2&)> jet;
};

/// u = curl(sin^3(pi x) sin^3(pi y)) on both sides.
ExactSolution example1_solution();
/// u = ((x^2-1)^3 (y^2-1)^2 y, -(x^2-1)^2 (y^2-1)^2 x) on both sides; not divergence free.
ExactSolution example4_solution();
/// The same polynomial field on both sides.
ExactSolution polynomial_solution(std::string name, const PolyVec2& u);

/// f = quadcurl(alpha u) + gamma u per side, phi3 = [n x (alpha curlcurl u)],
/// phi4 = [curl(alpha curlcurl u)]. With div_consistency the divergence of u
/// also enters the right-hand side through the divergence penalty.
ProblemData manufactured_data(const ExactSolution& exact, const ProblemParams& params, bool div_consistency);

/// f+ = (10, 0), f- = (1, 0), phi3 = 2x + 3y, phi4 = -9y.
ProblemData example3_data();

/// Interface, data and, where available, exact solution of one experiment.
struct Experiment {
  int example = 1;
  InterfaceGeometry iface;
  std::optional<ExactSolution> exact;
  ProblemData data;
  /// Errors are measured against the next finer mesh instead of an exact solution.
  bool self_convergence = false;
  bool div_consistency = false;
};

/// Examples 1-4; throws std::invalid_argument for other numbers.
Experiment make_experiment(int example, const ProblemParams& params);

/// Per-component field used by interpolation.
using SidedField = std::function<FieldSample(Side, const Vec2&)>;
SidedField as_field(const ExactSolution& exact);

/// Coefficients of the interpolant: each component takes the DOFs of the
/// field on its active mesh. Eliminated DOFs are skipped.
Eigen::VectorXd interpolate_global(const Discretization& disc, const SidedField& field);

/// Discrete field of component s on element t at x.
FieldJet discrete_jet(const Discretization& disc, const Eigen::VectorXd& coeffs, Side s, int t, const Vec2& x);

struct NormSet {
  double l2 = 0.0;
  double curl = 0.0;
  double curlcurl = 0.0;
  double div = 0.0;
};

struct ErrorReport {
  NormSet total;
  std::array<NormSet, 2> side;
  int dofs = 0;
  double h = 0.0;
};

/// Norms of u - u_h over Omega_minus and Omega_plus, each side using its
/// own component.
ErrorReport compute_errors(const Discretization& disc, const Eigen::VectorXd& coeffs, const ExactSolution& exact);

/// Norms of u_coarse - u_fine at the fine mesh's volume quadrature points.
/// Throws std::invalid_argument unless the fine mesh refines the coarse one.
ErrorReport self_convergence(const Discretization& coarse, const Eigen::VectorXd& coarse_coeffs,
                             const Discretization& fine, const Eigen::VectorXd& fine_coeffs);

/// Discrete energy norm of u - w_h: curlcurl, L2 and h^-2 weighted div parts over
/// the two subdomains, G0-G2, and the h^3/lambda, h/lambda averaged flux terms
/// on the interface. The exact field must be smooth on each active mesh.
double energy_error(const Discretization& disc, const Eigen::VectorXd& coeffs, const ExactSolution& exact,
                    const ProblemParams& params);

}  // namespace quadcurl
