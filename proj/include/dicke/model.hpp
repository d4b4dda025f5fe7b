#pragma once

#include <array>
#include <string_view>

namespace dicke {

// Control parameters of the Dicke Hamiltonian. Energies are measured in units
// of the field frequency, so the photon term carries unit weight.
class ModelParams {
 public:
  ModelParams(double omega_a, double gamma, int n_atoms);

  double omega_a() const { return omega_a_; }
  double gamma() const { return gamma_; }
  int n_atoms() const { return n_atoms_; }
  double n() const { return static_cast<double>(n_atoms_); }
  // Total pseudo-spin of the fully symmetric representation.
  double j() const { return 0.5 * static_cast<double>(n_atoms_); }

  ModelParams with_gamma(double gamma) const { return {omega_a_, gamma, n_atoms_}; }
  ModelParams with_n_atoms(int n_atoms) const { return {omega_a_, gamma_, n_atoms}; }

 private:
  double omega_a_;
  double gamma_;
  int n_atoms_;
};

// Variational coordinates: field quadratures (q, p) and Bloch-sphere angles
// (theta, phi). theta is kept in [0, pi]; phi is reduced to [0, 2 pi).
class FieldMatterPoint {
 public:
  FieldMatterPoint() = default;
  FieldMatterPoint(double q, double p, double theta, double phi);

  // Point in the p = 0, phi = 0 plane where every minimum of interest lives.
  static FieldMatterPoint in_plane(double q, double theta) { return {q, 0.0, theta, 0.0}; }

  double q() const { return q_; }
  double p() const { return p_; }
  double theta() const { return theta_; }
  double phi() const { return phi_; }

 private:
  double q_ = 0.0;
  double p_ = 0.0;
  double theta_ = 0.0;
  double phi_ = 0.0;
};

// Partial derivatives ordered as (q, p, theta, phi).
using Gradient4 = std::array<double, 4>;

double norm(const Gradient4& g);

enum class ParitySector { even, odd };

// +1 for even, -1 for odd.
inline double sign_of(ParitySector s) { return s == ParitySector::even ? 1.0 : -1.0; }

std::string_view to_string(ParitySector s);
ParitySector parse_sector(std::string_view name);

}  // namespace dicke
