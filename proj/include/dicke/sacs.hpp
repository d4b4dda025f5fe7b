#pragma once

#include <array>

#include "dicke/model.hpp"

namespace dicke {

// Points with |cos(theta)| at or below this are outside the domain of the
// symmetry-adapted surface (it carries (cos theta)^(-N) and 1/cos theta factors).
inline constexpr double kMinAbsCosTheta = 1e-12;

// The odd projection is treated as vanishing when 1 - <a,z|-a,-z> drops below this.
inline constexpr double kMinOddNorm = 1e-12;

// Log-domain form of e^{p^2+q^2} (cos theta)^{-N} = sign_z_pow * exp(t).
// Since |cos theta| <= 1, t >= 0 always, so its reciprocal (the overlap
// <alpha,zeta|-alpha,-zeta>) is evaluated as sign * exp(-t) without overflow.
struct StableExponent {
  double t = 0.0;
  int sign_z_pow = 1;

  static StableExponent at(const ModelParams& params, const FieldMatterPoint& point);

  // <alpha,zeta|-alpha,-zeta> = e^{-(p^2+q^2)} (cos theta)^N.
  double overlap() const;
  // 1 + s * overlap for sector sign s, without cancellation when it is small.
  double one_plus(double s) const;
};

// Inverse squared normalization N_pm^{-2} = 2 (1 pm e^{-2|alpha|^2} cos^N theta).
double sacs_norm_sq_inv(const ModelParams& params, const FieldMatterPoint& point, ParitySector sector);

// Total energy <H> in the parity-projected coherent state.
double sacs_energy(const ModelParams& params, const FieldMatterPoint& point, ParitySector sector);

// Gradient of sacs_energy, ordered (q, p, theta, phi).
Gradient4 sacs_gradient(const ModelParams& params, const FieldMatterPoint& point, ParitySector sector);

// Even-sector stationarity conditions in the p = 0, phi = 0 plane, written
// with z = cos(theta) as the two bracketed expressions whose zeros are the
// stationary points. They relate to the gradient by
//   dE/dq     = residual[0] * e^{-2q^2} / (z   (1 + O)^2)
//   dE/dtheta = residual[1] * e^{-2q^2} / (z^2 (1 + O)^2)
// with O = e^{-q^2} z^N. Requires z in (0, 1]; z = 1 is the theta = 0 line.
std::array<double, 2> sacs_stationarity_residual(const ModelParams& params, double q, double z);

// The same brackets multiplied by e^{-2q^2}; finite for every q.
std::array<double, 2> sacs_stationarity_residual_scaled(const ModelParams& params, double q, double z);

}  // namespace dicke
