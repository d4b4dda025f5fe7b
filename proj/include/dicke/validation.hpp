#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dicke/exact.hpp"
#include "dicke/optimizer.hpp"

namespace dicke {

struct CheckResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;      // largest residual seen
  double tolerance = 0.0;
  int samples = 0;
  std::string detail;
};

struct ValidationConfig {
  double omega_a = 1.0;
  int n_atoms = 20;
  double fd_tol = 1e-6;     // relative, against the gradient's max-norm
  double embed_tol = 1e-6;  // absolute, total energy
  double bound_tol = 1e-6;
  int gradient_points = 100;
  int embedding_points = 50;
  std::uint64_t seed = 20120701;
  // Mutation hook: negate every coupling element of the oracle Hamiltonian.
  bool flip_coupling_sign = false;
  GroundStateOptions ground;
  SearchConfig search;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool passed() const;
};

// Cross-module oracle suite: analytic gradients against finite differences,
// SACS and coherent embeddings against the closed-form surfaces, the
// variational bound, and the parity/decoupling structure of the exact matrix.
ValidationReport run_validation(const ValidationConfig& config = {});

// Central difference of f along one coordinate, Richardson-extrapolated from steps h and h/2.
template <typename F>
double richardson_derivative(F&& f, double h) {
  const double d1 = (f(h) - f(-h)) / (2.0 * h);
  const double d2 = (f(0.5 * h) - f(-0.5 * h)) / h;
  return (4.0 * d2 - d1) / 3.0;
}

}  // namespace dicke
