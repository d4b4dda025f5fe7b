#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dicke/exact.hpp"
#include "dicke/optimizer.hpp"

namespace dicke {

// One coupling of an exact-diagonalization sweep, with the variational
// comparison columns filled in on request.
struct ExactSweepRow {
  double gamma = 0.0;
  double energy = 0.0;
  double per_atom_energy = 0.0;
  Observables obs;
  int nu_max = 0;
  double convergence_gap = 0.0;
  std::optional<double> chi_fidelity;
  bool level_crossing = false;
  std::optional<double> sacs_overlap;  // |<SACS global minimum|ground state>|^2
  std::string diagnostic;
};

struct ExactSweepOptions {
  std::optional<ParitySector> sector = ParitySector::even;
  GroundStateOptions ground;
  bool fidelity = true;
  double delta_gamma = 1e-3;
  bool sacs_overlap = false;
  SearchConfig search;
};

std::vector<ExactSweepRow> exact_sweep(const ModelParams& params, const std::vector<double>& gamma_grid,
                                       const ExactSweepOptions& opts = {});

// Overlap of the embedded SACS state at `point` with an exact ground state.
double sacs_ground_overlap(const ModelParams& params, const FieldMatterPoint& point, ParitySector sector,
                           const GroundStateRecord& ground);

}  // namespace dicke
