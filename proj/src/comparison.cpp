#include "dicke/comparison.hpp"

#include <algorithm>

#include "dicke/errors.hpp"

namespace dicke {

double sacs_ground_overlap(const ModelParams& params, const FieldMatterPoint& point, ParitySector sector,
                           const GroundStateRecord& ground) {
  const Embedding e = embed_sacs(params, point, sector, ground.basis);
  return overlap(e.amplitudes, Eigen::VectorXcd(ground.amplitudes.cast<std::complex<double>>()));
}

std::vector<ExactSweepRow> exact_sweep(const ModelParams& params, const std::vector<double>& gamma_grid,
                                       const ExactSweepOptions& opts) {
  if (!std::is_sorted(gamma_grid.begin(), gamma_grid.end())) throw ConfigError("gamma grid must be ascending");
  if (opts.sacs_overlap && !opts.sector) throw ConfigError("SACS overlap needs a parity sector");

  std::vector<ExactSweepRow> rows;
  rows.reserve(gamma_grid.size());
  for (double gamma : gamma_grid) {
    ExactSweepRow row;
    row.gamma = gamma;
    try {
      const ModelParams p = params.with_gamma(gamma);
      const GroundStateRecord gs = ground_state(p, opts.sector, opts.ground);
      row.energy = gs.energy;
      row.per_atom_energy = gs.energy / p.n();
      row.obs = gs.obs;
      row.nu_max = gs.nu_max_used;
      row.convergence_gap = gs.convergence_gap;
      if (opts.fidelity) {
        const FidelityResult f = fidelity_susceptibility(p, opts.sector, opts.delta_gamma, opts.ground);
        row.chi_fidelity = f.chi;
        row.level_crossing = f.level_crossing;
      }
      if (opts.sacs_overlap) {
        const Surface s = *opts.sector == ParitySector::even ? Surface::sacs_even : Surface::sacs_odd;
        const auto minima = find_local_minima(p, s, opts.search);
        if (!minima.empty()) row.sacs_overlap = sacs_ground_overlap(p, minima.front().point, *opts.sector, gs);
      }
    } catch (const Error& e) {
      row.diagnostic = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace dicke
