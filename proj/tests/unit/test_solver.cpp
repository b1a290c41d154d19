#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "quadcurl/errors.hpp"
#include "quadcurl/solver.hpp"

using namespace quadcurl;

namespace {

Eigen::SparseMatrix<double> sparse(const Eigen::MatrixXd& M) { return M.sparseView(); }

Eigen::MatrixXd random_spd(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N;
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) M(i, j) = N(rng);
  }
  return M.transpose() * M + Eigen::MatrixXd::Identity(n, n);
}

}  // namespace

TEST_CASE("trivial systems") {
  const Eigen::SparseMatrix<double> I = sparse(Eigen::MatrixXd::Identity(6, 6));
  Eigen::VectorXd b(6);
  b << 1, -2, 3, 0.5, 7, -1;
  const SolveReport r = solve(I, b);
  CHECK((r.coefficients - b).norm() < 1e-15);
  CHECK(r.relative_residual < 1e-15);

  const SolveReport z = solve(I, Eigen::VectorXd::Zero(6));
  CHECK(z.coefficients.norm() == 0.0);
  CHECK(z.relative_residual == 0.0);
}

TEST_CASE("random SPD system") {
  const Eigen::MatrixXd A = random_spd(50, 5);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> N;
  Eigen::VectorXd b(50);
  for (int i = 0; i < 50; ++i) b[i] = N(rng);
  const SolveReport r = solve(sparse(A), b);
  CHECK(r.relative_residual <= 1e-10);
  CHECK((A * r.coefficients - b).norm() <= 1e-10 * b.norm());
  CHECK(r.backward_error < 1e-14);
  CHECK(r.stats.factor_nonzeros > 0.0);
}

TEST_CASE("indefinite matrices are rejected") {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(4, 4);
  A(2, 2) = -3.0;
  try {
    SparseCholesky f(sparse(A));
    FAIL("factorization should have failed");
  } catch (const SolverError& e) {
    REQUIRE(e.pivot().has_value());
    CHECK(*e.pivot() == 2);
  }
}

TEST_CASE("condition estimates") {
  const ConditionReport id = estimate_condition(sparse(Eigen::MatrixXd::Identity(5, 5)));
  CHECK(id.norm_A == doctest::Approx(1.0));
  CHECK(id.norm_Ainv == doctest::Approx(1.0));
  CHECK(id.cond == doctest::Approx(1.0));

  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2, 2);
  D(0, 0) = 1.0;
  D(1, 1) = 10.0;
  const ConditionReport d = estimate_condition(sparse(D));
  CHECK(d.cond == doctest::Approx(10.0).epsilon(1e-3));
  CHECK(d.converged_A);
  CHECK(d.converged_Ainv);
}

TEST_CASE("power iteration against a dense eigensolver") {
  const Eigen::MatrixXd A = random_spd(300, 21);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A);
  const double lmax = eig.eigenvalues().maxCoeff(), lmin = eig.eigenvalues().minCoeff();
  const ConditionReport r = estimate_condition(sparse(A));
  CHECK(std::abs(r.norm_A - lmax) <= 5e-3 * lmax);
  CHECK(std::abs(r.norm_Ainv - 1.0 / lmin) <= 5e-3 / lmin);

  const PowerResult p = power_iteration([&](const Eigen::VectorXd& x) { return Eigen::VectorXd(A * x); }, 300);
  CHECK(std::abs(p.value - lmax) <= 5e-3 * lmax);
}
