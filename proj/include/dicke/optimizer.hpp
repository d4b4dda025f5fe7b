#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dicke/model.hpp"

namespace dicke {

enum class Surface { mean_field, sacs_even, sacs_odd };

std::string_view to_string(Surface s);
Surface parse_surface(std::string_view name);

// The minimizer works in the p = 0 plane on coordinates (q, theta) with the
// field phase at phi = pi, where every minimum has q >= 0. Negative theta is
// the analytic continuation E(q, -theta) = E(-q, theta), which makes the
// theta = 0 line an interior line of the search.
struct PlanePoint {
  double q = 0.0;
  double theta = 0.0;
};

// Total energy of the chosen surface at a plane point.
double plane_energy(const ModelParams& params, Surface surface, PlanePoint x);
Eigen::Vector2d plane_gradient(const ModelParams& params, Surface surface, PlanePoint x);
// Central differences of plane_gradient, symmetrized.
Eigen::Matrix2d plane_hessian(const ModelParams& params, Surface surface, PlanePoint x, double step = 1e-5);
// Canonical physical representative: theta >= 0, q >= 0, p = 0, phi in {0, pi}.
FieldMatterPoint to_field_matter(PlanePoint x);

enum class BasinLabel { low_q, high_q };
std::string_view to_string(BasinLabel b);

struct OrderParameters {
  double photon_per_atom = 0.0;   // (q^2 + p^2) / (2N)
  double excited_fraction = 0.0;  // (1 - cos theta) / 2
  double half_q = 0.0;            // raw pair as quoted alongside the surface
  double cos_theta = 1.0;
};

struct LocalMinimum {
  FieldMatterPoint point;
  double total_energy = 0.0;
  std::array<double, 2> hessian_eigs{};
  double gradient_norm = 0.0;
  BasinLabel basin = BasinLabel::low_q;
  OrderParameters order;
};

OrderParameters order_parameters(const ModelParams& params, const FieldMatterPoint& point);
OrderParameters order_parameters(const ModelParams& params, const LocalMinimum& m);

struct SearchConfig {
  int grid_q = 41;
  int grid_theta = 41;
  // q in [-q_max, q_max]; 0 selects 3 sqrt(N) gamma (at least 1).
  double q_max = 0.0;
  double theta_max = 1.5707963267948966 - 1e-6;
  double grad_tol = 1e-8;
  double hessian_step = 1e-5;
  double merge_distance = 1e-6;
  int max_iterations = 200;
};

// Newton refinement from one start. Returns nullopt when the iteration does
// not reach grad_tol or the Hessian at the end is not positive definite.
std::optional<LocalMinimum> refine_minimum(const ModelParams& params, Surface surface, PlanePoint start,
                                           const SearchConfig& search = {});

// Multi-start search over a uniform (q, theta) grid. Minima are merged within
// merge_distance, sorted by energy and labelled by |q| (smallest is low_q).
std::vector<LocalMinimum> find_local_minima(const ModelParams& params, Surface surface,
                                            const SearchConfig& search = {});

struct CriticalResult {
  double gamma_c = 0.0;
  std::pair<LocalMinimum, LocalMinimum> minima_at_crossing;  // (low_q, high_q)
  double energy_gap_at_tol = 0.0;
  std::pair<double, double> bracket{};
  std::pair<double, double> order_param_jump{};  // |d photon_per_atom|, |d excited_fraction|
  double delta_e_slope = 0.0;                     // d(E_low - E_high)/d gamma over the final bracket
};

struct CriticalConfig {
  // Search interval; nullopt selects [gamma_c, gamma_c + 0.3], widened once to + 0.6.
  std::optional<std::pair<double, double>> bracket;
  double tol = 1e-4;
  double scan_step = 2e-3;
  // Distance in (q, theta) above which consecutive global minima count as a jump.
  double jump_distance = 0.2;
  SearchConfig search;
};

// Coupling at which the low-q and high-q minima of the surface have equal
// depth. A coarse scan finds the step where the global minimum jumps between
// basins; bisection then follows each basin by nearest-point continuation.
CriticalResult critical_coupling(const ModelParams& params, ParitySector sector, const CriticalConfig& config = {});
CriticalResult critical_coupling(const ModelParams& params, Surface surface, const CriticalConfig& config = {});

enum class SweepSource { mean_field, sacs_even, sacs_odd, exact };
std::string_view to_string(SweepSource s);
SweepSource source_of(Surface s);

struct SweepRow {
  double gamma = 0.0;
  std::optional<LocalMinimum> global_minimum;
  std::vector<LocalMinimum> all_minima;
  double per_atom_energy = 0.0;
  SweepSource source = SweepSource::sacs_even;
  bool degenerate = false;  // two minima tie within round-off
  std::string diagnostic;   // set when the row failed
};

// One row per gamma (sorted ascending). Labels are carried from row to row
// by nearest-point matching; failures become row diagnostics.
std::vector<SweepRow> sweep(const ModelParams& params, Surface surface, const std::vector<double>& gamma_grid,
                            const SearchConfig& search = {});

struct SurfaceGrid {
  std::vector<double> q_values;
  std::vector<double> theta_values;
  std::vector<double> energies;  // row-major: energies[i_theta * q_values.size() + i_q]
  std::vector<bool> masked;      // cells outside the domain of the surface
  std::vector<LocalMinimum> minima;
  struct SectionPoint {
    double q, theta, energy;
  };
  // Straight line in (q, theta) through the two deepest minima (horizontal
  // through the only minimum when there is one), sampled over q_values.
  std::vector<SectionPoint> section;

  double at(std::size_t i_theta, std::size_t i_q) const { return energies[i_theta * q_values.size() + i_q]; }
};

SurfaceGrid surface_grid(const ModelParams& params, Surface surface, std::pair<double, double> q_range,
                         std::pair<double, double> theta_range, std::pair<int, int> resolution,
                         const SearchConfig& search = {});

}  // namespace dicke
