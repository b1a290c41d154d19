#include "quadcurl/solver.hpp"

#include <cmath>
#include <random>
#include <string>

#include <cholmod.h>

#include "quadcurl/errors.hpp"

namespace quadcurl {

struct SparseCholesky::Impl {
  cholmod_common common{};
  cholmod_factor* L = nullptr;
  FactorizationStats stats;
  int n = 0;

  Impl() {
    cholmod_start(&common);
    common.supernodal = CHOLMOD_SUPERNODAL;
    common.print = 0;
    common.error_handler = nullptr;
  }
  ~Impl() {
    if (L) cholmod_free_factor(&L, &common);
    cholmod_finish(&common);
  }
};

SparseCholesky::SparseCholesky(const Eigen::SparseMatrix<double>& A) : impl_(std::make_unique<Impl>()) {
  if (A.rows() != A.cols()) throw SolverError("matrix is not square");
  Impl& s = *impl_;
  s.n = static_cast<int>(A.rows());
  if (s.n == 0) return;

  Eigen::SparseMatrix<double> lower = A.triangularView<Eigen::Lower>();
  lower.makeCompressed();
  for (int k = 0; k < lower.nonZeros(); ++k) {
    if (!std::isfinite(lower.valuePtr()[k])) throw SolverError("matrix has non-finite entries");
  }

  cholmod_sparse view{};
  view.nrow = view.ncol = static_cast<size_t>(s.n);
  view.nzmax = static_cast<size_t>(lower.nonZeros());
  view.p = lower.outerIndexPtr();
  view.i = lower.innerIndexPtr();
  view.x = lower.valuePtr();
  view.stype = -1;
  view.itype = CHOLMOD_INT;
  view.xtype = CHOLMOD_REAL;
  view.dtype = CHOLMOD_DOUBLE;
  view.sorted = 1;
  view.packed = 1;

  s.L = cholmod_analyze(&view, &s.common);
  if (!s.L) throw SolverError("symbolic analysis failed (status " + std::to_string(s.common.status) + ")");
  cholmod_factorize(&view, s.L, &s.common);
  if (s.common.status == CHOLMOD_NOT_POSDEF || s.L->minor < s.L->n) {
    std::optional<int> pivot;
    const size_t minor = s.L->minor;
    if (minor < s.L->n) {
      const int* perm = static_cast<const int*>(s.L->Perm);
      pivot = perm ? perm[minor] : static_cast<int>(minor);
    }
    throw SolverError("matrix is not positive definite" +
                          (pivot ? " (breakdown at row " + std::to_string(*pivot) + ")" : std::string()),
                      pivot);
  }
  if (s.common.status < CHOLMOD_OK) {
    throw SolverError("numeric factorization failed (status " + std::to_string(s.common.status) + ")");
  }
  s.stats.factor_nonzeros = s.common.lnz;
  s.stats.flops = s.common.fl;
}

SparseCholesky::~SparseCholesky() = default;
SparseCholesky::SparseCholesky(SparseCholesky&&) noexcept = default;
SparseCholesky& SparseCholesky::operator=(SparseCholesky&&) noexcept = default;

const FactorizationStats& SparseCholesky::stats() const { return impl_->stats; }
int SparseCholesky::size() const { return impl_->n; }

Eigen::VectorXd SparseCholesky::solve(const Eigen::VectorXd& b) const {
  Impl& s = *impl_;
  if (b.size() != s.n) throw std::invalid_argument("solve: right-hand side size mismatch");
  if (s.n == 0) return {};
  cholmod_dense rhs{};
  rhs.nrow = rhs.d = static_cast<size_t>(s.n);
  rhs.ncol = 1;
  rhs.nzmax = static_cast<size_t>(s.n);
  rhs.x = const_cast<double*>(b.data());
  rhs.xtype = CHOLMOD_REAL;
  rhs.dtype = CHOLMOD_DOUBLE;
  cholmod_dense* x = cholmod_solve(CHOLMOD_A, s.L, &rhs, &s.common);
  if (!x) throw SolverError("triangular solve failed");
  Eigen::VectorXd out = Eigen::Map<const Eigen::VectorXd>(static_cast<const double*>(x->x), s.n);
  cholmod_free_dense(&x, &s.common);
  return out;
}

SolveReport solve(const SparseCholesky& factor, const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b) {
  SolveReport report;
  report.stats = factor.stats();
  const double nb = b.norm();
  if (nb == 0.0) {
    report.coefficients = Eigen::VectorXd::Zero(b.size());
    return report;
  }
  Eigen::VectorXd x = factor.solve(b);
  Eigen::VectorXd r = b - A.selfadjointView<Eigen::Lower>() * x;
  double rel = r.norm() / nb;
  while (rel > 1e-14 && report.refinement_steps < 3) {
    const Eigen::VectorXd candidate = x + factor.solve(r);
    const Eigen::VectorXd rc = b - A.selfadjointView<Eigen::Lower>() * candidate;
    const double rel_c = rc.norm() / nb;
    ++report.refinement_steps;
    if (!(rel_c < rel)) break;
    x = candidate;
    r = rc;
    rel = rel_c;
  }
  Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(A.rows());
  for (int k = 0; k < A.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it) row_sums(it.row()) += std::abs(it.value());
  }
  const double norm_A = row_sums.size() ? row_sums.maxCoeff() : 0.0;
  report.backward_error = r.lpNorm<Eigen::Infinity>() / (norm_A * x.lpNorm<Eigen::Infinity>() + b.lpNorm<Eigen::Infinity>());
  report.coefficients = std::move(x);
  report.relative_residual = rel;
  return report;
}

SolveReport solve(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b) {
  const SparseCholesky factor(A);
  return solve(factor, A, b);
}

namespace {

PowerResult power_run(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply, Eigen::VectorXd x,
                      const ConditionOptions& options) {
  PowerResult res;
  x.normalize();
  for (int it = 1; it <= options.max_iterations; ++it) {
    const Eigen::VectorXd y = apply(x);
    const double rq = x.dot(y);
    res.value = rq;
    res.iterations = it;
    // Eigen-residual of the Rayleigh pair (rq, x).
    if ((y - rq * x).norm() <= options.tolerance * std::abs(rq)) {
      res.converged = true;
      break;
    }
    const double ny = y.norm();
    if (ny == 0.0) break;
    x = y / ny;
  }
  return res;
}

}  // namespace

PowerResult power_iteration(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply, int size,
                            const ConditionOptions& options) {
  if (size == 0) return {0.0, 0, true};
  PowerResult best = power_run(apply, Eigen::VectorXd::Ones(size), options);
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd start(size);
  for (int i = 0; i < size; ++i) start(i) = dist(rng);
  const PowerResult second = power_run(apply, start, options);
  if (second.value > best.value) {
    best.value = second.value;
    best.converged = second.converged;
  }
  best.iterations += second.iterations;
  return best;
}

ConditionReport estimate_condition(const Eigen::SparseMatrix<double>& A, const SparseCholesky& factor,
                                   const ConditionOptions& options) {
  ConditionReport rep;
  const int n = static_cast<int>(A.rows());
  const auto sym = A.selfadjointView<Eigen::Lower>();
  const PowerResult a = power_iteration([&](const Eigen::VectorXd& x) { return Eigen::VectorXd(sym * x); }, n, options);
  const PowerResult ai = power_iteration([&](const Eigen::VectorXd& x) { return factor.solve(x); }, n, options);
  rep.norm_A = a.value;
  rep.norm_Ainv = ai.value;
  rep.cond = rep.norm_A * rep.norm_Ainv;
  rep.iterations_A = a.iterations;
  rep.iterations_Ainv = ai.iterations;
  rep.converged_A = a.converged;
  rep.converged_Ainv = ai.converged;
  return rep;
}

ConditionReport estimate_condition(const Eigen::SparseMatrix<double>& A, const ConditionOptions& options) {
  const SparseCholesky factor(A);
  return estimate_condition(A, factor, options);
}

}  // namespace quadcurl
