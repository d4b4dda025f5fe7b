#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "dicke/model.hpp"

namespace dicke {

// Critical coupling of the thermodynamic limit, sqrt(omega * omega_A) / 2
// with the field frequency omega = 1.
double gamma_c_tdl(const ModelParams& params);
double gamma_c_tdl(double omega_a);

// Heisenberg-Weyl amplitude alpha = (q + i p)/sqrt(2) and stereographic spin
// coordinate zeta = tan(theta/2) exp(-i phi). Throws PoleError at theta = pi.
std::pair<std::complex<double>, std::complex<double>> alpha_zeta_of(const FieldMatterPoint& point);

// Coherent-state energy surface divided by N.
double mean_field_energy(const ModelParams& params, const FieldMatterPoint& point);

// Analytic partial derivatives of mean_field_energy, ordered (q, p, theta, phi).
Gradient4 mean_field_gradient(const ModelParams& params, const FieldMatterPoint& point);

enum class Phase { normal, superradiant };

struct MeanFieldCritical {
  FieldMatterPoint point;
  double total_energy = 0.0;
  double per_atom_energy = 0.0;
  Phase phase = Phase::normal;
  // Set when gamma sits on gamma_c to machine precision; both branches are returned.
  bool degenerate = false;
};

// Closed-form minima of the mean-field surface. Below gamma_c the single normal
// point; above it the superradiant pair (phi = 0 with q < 0, and its phi = pi
// partner with q > 0).
std::vector<MeanFieldCritical> mean_field_critical_points(const ModelParams& params);

}  // namespace dicke
