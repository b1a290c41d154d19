#pragma once

#include <functional>
#include <memory>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace quadcurl {

struct FactorizationStats {
  /// Nonzeros in the Cholesky factor.
  double factor_nonzeros = 0.0;
  /// Floating point operation count of the numeric factorization.
  double flops = 0.0;
};

/// Supernodal sparse Cholesky factorization of a symmetric matrix (only the
/// lower triangle is read). Throws SolverError when the matrix is not
/// positive definite; the error carries the failing row in the original
/// ordering.
class SparseCholesky {
 public:
  explicit SparseCholesky(const Eigen::SparseMatrix<double>& A);
  ~SparseCholesky();
  SparseCholesky(const SparseCholesky&) = delete;
  SparseCholesky& operator=(const SparseCholesky&) = delete;
  SparseCholesky(SparseCholesky&&) noexcept;
  SparseCholesky& operator=(SparseCholesky&&) noexcept;

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  const FactorizationStats& stats() const;
  int size() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct SolveReport {
  Eigen::VectorXd coefficients;
  /// |A x - b| / |b| in the Euclidean norm.
  double relative_residual = 0.0;
  /// Normwise backward error |A x - b|_inf / (|A|_inf |x|_inf + |b|_inf).
  double backward_error = 0.0;
  int refinement_steps = 0;
  FactorizationStats stats;
};

/// Factorizes and solves with up to three iterative refinement steps.
SolveReport solve(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b);
SolveReport solve(const SparseCholesky& factor, const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b);

struct ConditionOptions {
  double tolerance = 1e-3;
  int max_iterations = 500;
  unsigned seed = 20240607u;
};

struct ConditionReport {
  double norm_A = 0.0;
  double norm_Ainv = 0.0;
  double cond = 0.0;
  int iterations_A = 0;
  int iterations_Ainv = 0;
  bool converged_A = false;
  bool converged_Ainv = false;
};

/// Power iteration for the largest eigenvalue of a symmetric positive
/// definite operator, from the all-ones vector and again from a seeded random
/// vector; the larger estimate is kept.
struct PowerResult {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};
PowerResult power_iteration(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply, int size,
                            const ConditionOptions& options = {});

/// Spectral norm estimates of A and A^{-1} (Euclidean vector norm).
ConditionReport estimate_condition(const Eigen::SparseMatrix<double>& A, const SparseCholesky& factor,
                                   const ConditionOptions& options = {});
ConditionReport estimate_condition(const Eigen::SparseMatrix<double>& A, const ConditionOptions& options = {});

}  // namespace quadcurl
