#include "dicke/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dicke/errors.hpp"

namespace dicke {

ModelParams::ModelParams(double omega_a, double gamma, int n_atoms)
    : omega_a_(omega_a), gamma_(gamma), n_atoms_(n_atoms) {
  if (n_atoms < 1) throw DomainError("n_atoms must be >= 1, got " + std::to_string(n_atoms));
  if (!(omega_a > 0.0) || !std::isfinite(omega_a))
    throw DomainError("omega_A must be positive and finite");
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    throw DomainError("gamma must be non-negative and finite");
}

FieldMatterPoint::FieldMatterPoint(double q, double p, double theta, double phi)
    : q_(q), p_(p), theta_(theta), phi_(phi) {
  if (!std::isfinite(q) || !std::isfinite(p) || !std::isfinite(theta) || !std::isfinite(phi))
    throw DomainError("field-matter point has a non-finite coordinate");
  if (theta < 0.0 || theta > std::numbers::pi)
    throw DomainError("theta must lie in [0, pi]");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  phi_ = std::fmod(phi, two_pi);
  if (phi_ < 0.0) phi_ += two_pi;
  if (phi_ >= two_pi) phi_ = 0.0;
}

double norm(const Gradient4& g) {
  return std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2] + g[3] * g[3]);
}

std::string_view to_string(ParitySector s) { return s == ParitySector::even ? "even" : "odd"; }

ParitySector parse_sector(std::string_view name) {
  if (name == "even") return ParitySector::even;
  if (name == "odd") return ParitySector::odd;
  throw ConfigError("unknown parity sector '" + std::string(name) + "' (expected even|odd)");
}

}  // namespace dicke
