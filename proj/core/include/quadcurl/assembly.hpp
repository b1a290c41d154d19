#pragma once

#include <array>
#include <functional>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "quadcurl/discretization.hpp"

namespace quadcurl {

struct ProblemParams {
  double alpha_minus = 1.0;
  double alpha_plus = 1.0;
  double gamma = 1.0;
  double lambda = 100.0;
  /// Weighting of the normal derivatives in the ghost penalties.
  DirectionalWeights ghost_weights = DirectionalWeights::Multinomial;

  double alpha(Side s) const { return s == Side::Minus ? alpha_minus : alpha_plus; }
  /// Throws std::invalid_argument on non-positive alpha or lambda, or negative gamma.
  void validate() const;
};

struct InterfaceWeights {
  double kappa1 = 0.5;
  double kappa2 = 0.5;
};

/// kappa1 = a+|K-| / (a+|K-| + a-|K+|), kappa2 = 1 - kappa1.
InterfaceWeights average_weights(double area_minus, double area_plus, const ProblemParams& params);

/// Source and interface data. phi3 and phi4 receive the point on the
/// interface and the unit normal there.
struct ProblemData {
  std::array<std::function<Vec2(const Vec2&)>, 2> f;
  std::function<double(const Vec2&, const Vec2&)> phi3;
  std::function<double(const Vec2&, const Vec2&)> phi4;
  /// Optional divergence of the exact field per side; when set the right-hand
  /// side also carries h^-2 int div(u) div(v).
  std::array<std::function<double(const Vec2&)>, 2> div_source;

  static ProblemData zero();
};

/// Bilinear-form pieces selectable for assembly.
enum Term : unsigned {
  kCurlCurl = 1u << 0,
  kMass = 1u << 1,
  kDivPenalty = 1u << 2,
  kNitsche = 1u << 3,
  kG0 = 1u << 4,
  kG1 = 1u << 5,
  kG2 = 1u << 6,
  kGhost = 1u << 7,
  kVolumeTerms = kCurlCurl | kMass | kDivPenalty,
  kStabilization = kG0 | kG1 | kG2 | kGhost,
  kAllTerms = kVolumeTerms | kNitsche | kStabilization,
};

struct LinearSystem {
  /// Both triangles stored.
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd b;
};

using LocalBlock = Eigen::Matrix<double, kLocalDofs, kLocalDofs>;
/// Rows/columns 0..12 belong to the first field (minus component, or the
/// first element of an edge), 13..25 to the second.
using CoupledBlock = Eigen::Matrix<double, 2 * kLocalDofs, 2 * kLocalDofs>;
using LocalVector = Eigen::Matrix<double, kLocalDofs, 1>;

/// alpha cc.cc + gamma u.v + h^-2 div.div over one volume rule.
LocalBlock volume_terms(const ElementBasis& basis, const QuadRule& rule, double alpha, double gamma, double h,
                        unsigned terms = kVolumeTerms);

/// Symmetric Nitsche coupling on Gamma_K:
/// {{n x (a cc u)}}[curl v] + {{n x (a cc v)}}[curl u] - {{a curl3 u}}[n x v] - {{a curl3 v}}[n x u].
CoupledBlock nitsche_flux_terms(const ElementBasis& basis, const InterfaceWeights& w, const QuadRule& gamma_rule,
                                const ProblemParams& params);

/// G0 (h^-3 [n.u][n.v]), G1 (lambda h^-3 [n x u][n x v]) and
/// G2 (lambda h^-1 [curl u][curl v]) on Gamma_K.
CoupledBlock interface_penalty_terms(const ElementBasis& basis, const QuadRule& gamma_rule, double lambda, double h,
                                     unsigned terms = kG0 | kG1 | kG2);

/// Jumps across an interior edge between the fields of elements `first` and
/// `second`: G0 edge part h^-3 [n.u][n.v] and the ghost penalties
/// sum_{l=0..4} h^{2l-1} ([d_n^l u].[d_n^l v] + [d_n^l curl u][d_n^l curl v]).
CoupledBlock edge_jump_terms(const ElementBasis& first, const ElementBasis& second, const Vec2& a, const Vec2& b,
                             double h, unsigned terms,
                             DirectionalWeights weights = DirectionalWeights::Multinomial);

/// Energy of the `edge_jump_terms` form for local coefficients c1 and c2,
/// accumulated from the jumps themselves.
double edge_jump_energy(const ElementBasis& first, const ElementBasis& second, const LocalVector& c1,
                        const LocalVector& c2, const Vec2& a, const Vec2& b, double h, unsigned terms,
                        DirectionalWeights weights = DirectionalWeights::Multinomial);

/// Assembles the selected terms and the right-hand side. Throws DataError
/// when a data callable returns a non-finite value.
LinearSystem assemble(const Discretization& disc, const ProblemParams& params, const ProblemData& data,
                      unsigned terms = kAllTerms);

}  // namespace quadcurl
