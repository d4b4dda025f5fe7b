#include "dicke/mean_field.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "dicke/errors.hpp"

namespace dicke {

double gamma_c_tdl(double omega_a) {
  if (!(omega_a > 0.0)) throw DomainError("gamma_c requires omega_A > 0");
  return 0.5 * std::sqrt(omega_a);
}

double gamma_c_tdl(const ModelParams& params) { return gamma_c_tdl(params.omega_a()); }

std::pair<std::complex<double>, std::complex<double>> alpha_zeta_of(const FieldMatterPoint& point) {
  if (point.theta() == std::numbers::pi)
    throw PoleError("zeta = tan(theta/2) exp(-i phi) diverges at theta = pi");
  const std::complex<double> alpha(point.q() / std::numbers::sqrt2, point.p() / std::numbers::sqrt2);
  const std::complex<double> zeta = std::tan(0.5 * point.theta()) * std::polar(1.0, -point.phi());
  return {alpha, zeta};
}

double mean_field_energy(const ModelParams& params, const FieldMatterPoint& pt) {
  const double n = params.n();
  const double r2 = pt.p() * pt.p() + pt.q() * pt.q();
  return r2 / (2.0 * n) - 0.5 * params.omega_a() * std::cos(pt.theta()) +
         std::numbers::sqrt2 * params.gamma() / std::sqrt(n) * pt.q() * std::sin(pt.theta()) *
             std::cos(pt.phi());
}

Gradient4 mean_field_gradient(const ModelParams& params, const FieldMatterPoint& pt) {
  const double n = params.n();
  const double g = std::numbers::sqrt2 * params.gamma() / std::sqrt(n);
  const double st = std::sin(pt.theta()), ct = std::cos(pt.theta());
  const double sp = std::sin(pt.phi()), cp = std::cos(pt.phi());
  return {pt.q() / n + g * st * cp,
          pt.p() / n,
          0.5 * params.omega_a() * st + g * pt.q() * ct * cp,
          -g * pt.q() * st * sp};
}

std::vector<MeanFieldCritical> mean_field_critical_points(const ModelParams& params) {
  const double gc = gamma_c_tdl(params);
  const double gamma = params.gamma();
  const double n = params.n();

  MeanFieldCritical normal;
  normal.point = FieldMatterPoint(0.0, 0.0, 0.0, 0.0);
  normal.per_atom_energy = -2.0 * gc * gc;
  normal.total_energy = n * normal.per_atom_energy;
  normal.phase = Phase::normal;

  const bool degenerate = std::abs(gamma - gc) <= 8.0 * std::numeric_limits<double>::epsilon() * gc;
  if (gamma < gc && !degenerate) return {normal};

  // x = gamma / gamma_c; cos(theta_c) = x^-2; q_c = -2 sqrt(j) gamma sqrt(1 - x^-4) cos(phi_c).
  const double ratio = gc / gamma;
  const double cos_t = std::min(1.0, ratio * ratio);
  const double theta = std::acos(cos_t);
  const double q_mag = 2.0 * std::sqrt(params.j()) * gamma * std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
  const double x2 = 1.0 / cos_t;
  const double per_atom = -gc * gc * x2 * (1.0 + 1.0 / (x2 * x2));

  std::vector<MeanFieldCritical> out;
  if (degenerate) {
    normal.degenerate = true;
    out.push_back(normal);
  }
  for (double phi : {0.0, std::numbers::pi}) {
    MeanFieldCritical sr;
    sr.point = FieldMatterPoint(phi == 0.0 ? -q_mag : q_mag, 0.0, theta, phi);
    sr.per_atom_energy = per_atom;
    sr.total_energy = n * per_atom;
    sr.phase = Phase::superradiant;
    sr.degenerate = degenerate;
    out.push_back(sr);
  }
  return out;
}

}  // namespace dicke
