#include "dicke/lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dicke/errors.hpp"

namespace dicke {

namespace {

constexpr int kDenseThreshold = 400;

LowestEigenpair dense_lowest(const SparseMatrix& h) {
  const Eigen::MatrixXd dense = Eigen::MatrixXd(h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
  LowestEigenpair out;
  out.value = solver.eigenvalues()(0);
  out.next_value = h.rows() > 1 ? solver.eigenvalues()(1) : out.value;
  out.vector = solver.eigenvectors().col(0);
  out.residual = (h * out.vector - out.value * out.vector).norm();
  return out;
}

Eigen::VectorXd start_vector(Eigen::Index dim) {
  std::mt19937_64 rng(0x5eed1234abcdULL);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Eigen::VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = uni(rng);
  return v.normalized();
}

}  // namespace

LowestEigenpair lowest_eigenpair(const SparseMatrix& h, const LanczosOptions& opts) {
  const Eigen::Index dim = h.rows();
  if (dim == 0 || h.cols() != dim) throw DimensionMismatchError("eigensolver needs a non-empty square matrix");
  if (dim <= kDenseThreshold) return dense_lowest(h);

  const int m = static_cast<int>(std::min<Eigen::Index>(opts.max_krylov, dim));
  Eigen::VectorXd x = start_vector(dim);
  Eigen::MatrixXd basis(dim, m);
  Eigen::VectorXd alpha(m), beta(m);
  Eigen::VectorXd w(dim);
  int matvecs = 0;
  double last_residual = 0.0;

  for (int restart = 0; restart <= opts.max_restarts; ++restart) {
    basis.col(0) = x;
    int used = 0;
    double scale = 0.0;
    for (int k = 0; k < m; ++k) {
      w.noalias() = h * basis.col(k);
      ++matvecs;
      alpha(k) = basis.col(k).dot(w);
      w -= alpha(k) * basis.col(k);
      if (k > 0) w -= beta(k - 1) * basis.col(k - 1);
      for (int pass = 0; pass < 2; ++pass)
        w -= basis.leftCols(k + 1) * (basis.leftCols(k + 1).transpose() * w);
      const double b = w.norm();
      scale = std::max(scale, std::abs(alpha(k)) + b);
      used = k + 1;
      const bool breakdown = b <= 1e-13 * std::max(scale, 1.0);
      if (breakdown || used == m) break;
      if (used % 10 == 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
        tri.computeFromTridiagonal(alpha.head(used), beta.head(used - 1), Eigen::ComputeEigenvectors);
        if (std::abs(b * tri.eigenvectors()(used - 1, 0)) < 0.01 * opts.tol) break;
      }
      beta(k) = b;
      basis.col(k + 1) = w / b;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    if (used == 1) {
      LowestEigenpair out;
      out.value = alpha(0);
      out.next_value = alpha(0);
      out.vector = x;
      out.residual = (h * x - alpha(0) * x).norm();
      out.matvecs = matvecs + 1;
      if (out.residual < opts.tol) return out;
      throw ConvergenceError("Lanczos stalled in a one-dimensional Krylov space", out.residual);
    }
    tri.computeFromTridiagonal(alpha.head(used), beta.head(used - 1), Eigen::ComputeEigenvectors);
    x = (basis.leftCols(used) * tri.eigenvectors().col(0)).normalized();
    const double value = tri.eigenvalues()(0);
    const Eigen::VectorXd hx = h * x;
    ++matvecs;
    last_residual = (hx - value * x).norm();
    if (last_residual < opts.tol) {
      LowestEigenpair out;
      out.value = x.dot(hx);
      out.next_value = tri.eigenvalues()(1);
      out.vector = std::move(x);
      out.residual = last_residual;
      out.matvecs = matvecs;
      return out;
    }
  }
  throw ConvergenceError("Lanczos did not reach the residual tolerance", last_residual);
}

}  // namespace dicke
