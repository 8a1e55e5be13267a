#include "finjj/eigensolve.hpp"

#include <Eigen/Eigenvalues>

namespace finjj {

Spectrum dense_all(const TridiagonalStorage& t, bool with_vectors, std::int64_t dense_limit) {
  const std::int64_t n = t.dim();
  if (n < 1) throw DomainError("dense_all: empty operator");
  if (n > dense_limit) {
    throw CapacityError("dense_all: dimension " + std::to_string(n) + " exceeds dense limit " +
                        std::to_string(dense_limit));
  }
  const auto en = static_cast<Eigen::Index>(n);
  Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(t.diagonal.data(), en);
  Eigen::VectorXd sub(en > 1 ? en - 1 : 0);
  for (Eigen::Index i = 0; i + 1 < en; ++i) sub(i) = t.off_diagonal[static_cast<std::size_t>(i)];

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub,
                                with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("dense_all: tridiagonal QR iteration failed", 0.0);
  }

  Spectrum out;
  out.dim = n;
  out.pairs.resize(static_cast<std::size_t>(n));
  const Eigen::VectorXd& values = solver.eigenvalues();
  for (Eigen::Index j = 0; j < en; ++j) {
    auto& p = out.pairs[static_cast<std::size_t>(j)];
    p.value = values(j);
    if (with_vectors) {
      std::vector<double> v(static_cast<std::size_t>(n));
      const auto col = solver.eigenvectors().col(j);
      for (Eigen::Index i = 0; i < en; ++i) v[static_cast<std::size_t>(i)] = col(i);
      detail::normalize_sign(v);
      p.residual = detail::residual_norm(t.diagonal, t.off_diagonal, v, p.value);
      p.vector = std::move(v);
    }
  }
  return out;
}

}  // namespace finjj
