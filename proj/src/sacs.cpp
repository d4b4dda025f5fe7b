#include "dicke/sacs.hpp"

#include <cmath>

#include "dicke/errors.hpp"

namespace dicke {

StableExponent StableExponent::at(const ModelParams& params, const FieldMatterPoint& pt) {
  const double c = std::cos(pt.theta());
  StableExponent e;
  e.t = pt.p() * pt.p() + pt.q() * pt.q() - params.n() * std::log(std::abs(c));
  e.sign_z_pow = (c < 0.0 && params.n_atoms() % 2 == 1) ? -1 : 1;
  return e;
}

double StableExponent::overlap() const { return sign_z_pow * std::exp(-t); }

double StableExponent::one_plus(double s) const {
  return s * sign_z_pow > 0.0 ? 1.0 + std::exp(-t) : -std::expm1(-t);
}

double sacs_norm_sq_inv(const ModelParams& params, const FieldMatterPoint& point, ParitySector sector) {
  const double value = 2.0 * StableExponent::at(params, point).one_plus(sign_of(sector));
  if (sector == ParitySector::odd && value < 2.0 * kMinOddNorm)
    throw DegenerateStateError("odd symmetry-adapted state vanishes at the field/spin vacuum");
  return value;
}

namespace {

// Pieces of the projected expectation value. With u = s * O the energy is
// E = (D + u C) / (1 + u), where D is the diagonal coherent-state energy and
// C the cross term <a,z|H|-a,-z> / <a,z|-a,-z>.
struct SurfaceTerms {
  double diag;       // D
  double cross;      // C
  double diff;       // D - C, evaluated without cancellation
  double u;          // s * O
  double one_plus_u;
  Gradient4 d_diag;
  Gradient4 d_cross;
  Gradient4 d_diff;
  Gradient4 d_log_overlap;
};

SurfaceTerms surface_terms(const ModelParams& params, const FieldMatterPoint& pt, ParitySector sector,
                           bool with_derivatives) {
  const double c = std::cos(pt.theta());
  if (std::abs(c) <= kMinAbsCosTheta)
    throw NearSingularError("symmetry-adapted surface is singular at cos(theta) = 0");
  const double s = std::sin(pt.theta());
  const double cp = std::cos(pt.phi()), sp = std::sin(pt.phi());
  const double q = pt.q(), p = pt.p();
  const double n = params.n(), wa = params.omega_a();
  const double g = std::sqrt(2.0 * n) * params.gamma();
  const double r2 = q * q + p * p;
  const double tan_t = s / c;

  const StableExponent ex = StableExponent::at(params, pt);
  const double sign = sign_of(sector);

  SurfaceTerms st{};
  st.diag = 0.5 * r2 - 0.5 * n * wa * c + g * q * s * cp;
  st.cross = -0.5 * r2 - 0.5 * n * wa / c + g * p * tan_t * sp;
  st.diff = r2 + 0.5 * n * wa * s * tan_t + g * (q * s * cp - p * tan_t * sp);
  st.u = sign * ex.overlap();
  st.one_plus_u = ex.one_plus(sign);
  if (sector == ParitySector::odd && st.one_plus_u < kMinOddNorm)
    throw DegenerateStateError("odd symmetry-adapted state vanishes at the field/spin vacuum");

  if (with_derivatives) {
    st.d_diag = {q + g * s * cp, p, 0.5 * n * wa * s + g * q * c * cp, -g * q * s * sp};
    st.d_cross = {-q, -p + g * tan_t * sp, -0.5 * n * wa * s / (c * c) + g * p * sp / (c * c),
                  g * p * tan_t * cp};
    st.d_diff = {2.0 * q + g * s * cp, 2.0 * p - g * tan_t * sp,
                 0.5 * n * wa * s * (1.0 + 1.0 / (c * c)) + g * (q * c * cp - p * sp / (c * c)),
                 -g * (q * s * sp + p * tan_t * cp)};
    st.d_log_overlap = {-2.0 * q, -2.0 * p, -n * tan_t, 0.0};
  }
  return st;
}

}  // namespace

double sacs_energy(const ModelParams& params, const FieldMatterPoint& point, ParitySector sector) {
  const SurfaceTerms st = surface_terms(params, point, sector, false);
  if (st.one_plus_u >= 0.5) return (st.diag + st.u * st.cross) / st.one_plus_u;
  return st.cross + st.diff / st.one_plus_u;
}

Gradient4 sacs_gradient(const ModelParams& params, const FieldMatterPoint& point, ParitySector sector) {
  const SurfaceTerms st = surface_terms(params, point, sector, true);
  const double inv = 1.0 / st.one_plus_u;
  Gradient4 grad{};
  for (int k = 0; k < 4; ++k) {
    const double du = st.u * st.d_log_overlap[k];
    const double head = st.one_plus_u >= 0.5 ? (st.d_diag[k] + st.u * st.d_cross[k]) * inv
                                             : st.d_cross[k] + st.d_diff[k] * inv;
    grad[k] = head - du * st.diff * inv * inv;
  }
  return grad;
}

std::array<double, 2> sacs_stationarity_residual_scaled(const ModelParams& params, double q, double z) {
  if (!(z > 0.0 && z <= 1.0)) throw DomainError("stationarity residual requires z = cos(theta) in (0, 1]");
  const double j = params.j(), wa = params.omega_a(), g = params.gamma();
  const double sj = std::sqrt(j);
  const double w = std::sqrt(1.0 - z * z);  // sin(theta)
  const double o = std::exp(-q * q + 2.0 * j * std::log(z));  // e^{-q^2} z^{2j}
  const double q2 = q * q;

  const double r_q = -q * z * o * o + z * (q + 2.0 * sj * w * g) +
                     2.0 * o * (q2 * q * z + z * sj * w * g + 2.0 * q2 * z * sj * w * g + j * q * w * w * wa);

  const double r_theta = -j * o * o * w * wa + (2.0 * sj * q * z * z * z * g + j * z * z * w * wa) +
                         o * sj *
                             (2.0 * q * z * z * z * g + 4.0 * j * q * z * w * w * g +
                              2.0 * j * sj * w * w * w * wa + sj * w * (2.0 * q2 * z - w * w * wa));
  return {r_q, r_theta};
}

std::array<double, 2> sacs_stationarity_residual(const ModelParams& params, double q, double z) {
  auto r = sacs_stationarity_residual_scaled(params, q, z);
  const double scale = std::exp(2.0 * q * q);
  return {r[0] * scale, r[1] * scale};
}

}  // namespace dicke
