#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "dicke/lanczos.hpp"
#include "dicke/model.hpp"

namespace dicke {

// Product basis |nu> (x) |j, m> with photon number nu in [0, nu_max] and
// k = j + m in [0, N]. A parity sector keeps the states with
// (-1)^{nu + k} = +1 (even) or -1 (odd); no sector means the full space.
class TruncatedBasis {
 public:
  TruncatedBasis(int n_atoms, int nu_max, std::optional<ParitySector> sector);

  int n_atoms() const { return n_atoms_; }
  double j() const { return 0.5 * n_atoms_; }
  int nu_max() const { return nu_max_; }
  const std::optional<ParitySector>& sector() const { return sector_; }
  Eigen::Index dimension() const { return static_cast<Eigen::Index>(states_.size()); }

  struct State {
    int nu;
    int k;  // j + m, number of excited atoms
    double m(double j) const { return k - j; }
  };
  const State& state(Eigen::Index index) const { return states_[static_cast<std::size_t>(index)]; }
  // Flat index of (nu, k), or -1 when the pair is not admitted.
  Eigen::Index index_of(int nu, int k) const;

  static bool admits(std::optional<ParitySector> sector, int nu, int k);

 private:
  int n_atoms_;
  int nu_max_;
  std::optional<ParitySector> sector_;
  std::vector<State> states_;
  std::vector<Eigen::Index> lookup_;  // (nu_max + 1) x (N + 1), row-major in nu
};

struct HamiltonianMatrix {
  Eigen::Index dimension = 0;
  std::vector<Eigen::Triplet<double>> entries;  // every stored element, both triangles
  SparseMatrix matrix;
};

HamiltonianMatrix build_hamiltonian(const ModelParams& params, const TruncatedBasis& basis);

struct Observables {
  double photon_per_atom = 0.0;   // <a^dag a> / N
  double excited_fraction = 0.0;  // <J_z + j> / N
  double var_jx = 0.0;
  double var_q = 0.0;
  double parity_expectation = 0.0;
};

Observables observables(const TruncatedBasis& basis, const Eigen::VectorXcd& amplitudes);
Observables observables(const TruncatedBasis& basis, const Eigen::VectorXd& amplitudes);

struct GroundStateOptions {
  double conv_tol = 1e-8;
  double eig_tol = 1e-10;
  int nu_max_cap = 4096;
  // Skip escalation and diagonalize at this cutoff (gap still measured against nu_max / 2).
  std::optional<int> nu_max_fixed;
};

struct GroundStateRecord {
  double energy = 0.0;  // total
  Eigen::VectorXd amplitudes;
  TruncatedBasis basis{1, 1, std::nullopt};
  int nu_max_used = 0;
  double convergence_gap = 0.0;
  double spectral_gap = 0.0;  // distance to the next level of the solved space
  std::vector<double> ladder_energies;  // ground energy at each cutoff tried
  Observables obs;
};

// Cutoff the escalation ladder starts from: 4 ceil(N gamma^2) + 20.
int initial_nu_max(const ModelParams& params);

GroundStateRecord ground_state(const ModelParams& params, std::optional<ParitySector> sector,
                               const GroundStateOptions& opts = {});

struct Embedding {
  Eigen::VectorXcd amplitudes;  // normalized on the truncated basis
  double leakage = 0.0;         // norm lost to the cutoff before renormalization
};

inline constexpr double kMaxEmbeddingLeakage = 1e-10;

// Parity-projected coherent state expanded on the basis. The basis must be
// the full space or the matching sector.
Embedding embed_sacs(const ModelParams& params, const FieldMatterPoint& point, ParitySector sector,
                     const TruncatedBasis& basis);

// Unprojected product coherent state |alpha> (x) |zeta>; needs the full basis.
Embedding embed_coherent(const ModelParams& params, const FieldMatterPoint& point,
                         const TruncatedBasis& basis);

// Re <v|H|v> for a normalized vector.
double expectation(const HamiltonianMatrix& h, const Eigen::VectorXcd& v);

// |<a|b>|^2 clamped to [0, 1].
double overlap(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);
double overlap(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

struct FidelityResult {
  double chi = 0.0;
  bool level_crossing = false;
  int nu_max = 0;
};

// Fidelity susceptibility 2 (1 - |<psi(g - dg/2)|psi(g + dg/2)>|) / dg^2 with
// both ground states on the cutoff converged at the larger coupling.
FidelityResult fidelity_susceptibility(const ModelParams& params, std::optional<ParitySector> sector,
                                       double delta_gamma = 1e-3, const GroundStateOptions& opts = {});

}  // namespace dicke
