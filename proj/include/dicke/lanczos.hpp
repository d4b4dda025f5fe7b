#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace dicke {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct LowestEigenpair {
  double value = 0.0;
  Eigen::VectorXd vector;
  double residual = 0.0;    // ||H x - value x||
  double next_value = 0.0;  // second-lowest Ritz value (estimate)
  int matvecs = 0;
};

struct LanczosOptions {
  double tol = 1e-10;
  int max_krylov = 160;
  int max_restarts = 60;
};

// Lowest eigenpair of a real symmetric matrix. Lanczos with full
// reorthogonalization, restarted from the current Ritz vector. The start
// vector is drawn from a fixed-seed generator so results are reproducible.
// Throws ConvergenceError when the residual tolerance is not reached.
LowestEigenpair lowest_eigenpair(const SparseMatrix& h, const LanczosOptions& opts = {});

}  // namespace dicke
