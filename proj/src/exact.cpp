#include "dicke/exact.hpp"

#include <cmath>
#include <complex>
#include <string>

#include "dicke/errors.hpp"
#include "dicke/sacs.hpp"

namespace dicke {

TruncatedBasis::TruncatedBasis(int n_atoms, int nu_max, std::optional<ParitySector> sector)
    : n_atoms_(n_atoms), nu_max_(nu_max), sector_(sector) {
  if (n_atoms < 1) throw ConfigError("basis needs n_atoms >= 1");
  if (nu_max < 1) throw ConfigError("photon cutoff nu_max must be >= 1, got " + std::to_string(nu_max));
  lookup_.assign(static_cast<std::size_t>(nu_max + 1) * static_cast<std::size_t>(n_atoms + 1), -1);
  for (int nu = 0; nu <= nu_max; ++nu) {
    for (int k = 0; k <= n_atoms; ++k) {
      if (!admits(sector, nu, k)) continue;
      lookup_[static_cast<std::size_t>(nu) * (n_atoms + 1) + k] = static_cast<Eigen::Index>(states_.size());
      states_.push_back({nu, k});
    }
  }
}

bool TruncatedBasis::admits(std::optional<ParitySector> sector, int nu, int k) {
  if (!sector) return true;
  const bool even = (nu + k) % 2 == 0;
  return even == (*sector == ParitySector::even);
}

Eigen::Index TruncatedBasis::index_of(int nu, int k) const {
  if (nu < 0 || nu > nu_max_ || k < 0 || k > n_atoms_) return -1;
  return lookup_[static_cast<std::size_t>(nu) * (n_atoms_ + 1) + k];
}

HamiltonianMatrix build_hamiltonian(const ModelParams& params, const TruncatedBasis& basis) {
  if (params.n_atoms() != basis.n_atoms()) throw ConfigError("basis and model disagree on N");
  const int n = basis.n_atoms();
  const double j = basis.j();
  const double g = params.gamma() / std::sqrt(params.n());

  HamiltonianMatrix h;
  h.dimension = basis.dimension();
  h.entries.reserve(static_cast<std::size_t>(h.dimension) * 5);
  for (Eigen::Index i = 0; i < h.dimension; ++i) {
    const auto& s = basis.state(i);
    h.entries.emplace_back(i, i, s.nu + params.omega_a() * s.m(j));
    if (g == 0.0) continue;
    // (a + a^dag)(J_+ + J_-): store each pair once from its lower-photon end,
    // mirrored so the assembled matrix is symmetric bit for bit.
    for (int dk : {-1, 1}) {
      const int k2 = s.k + dk;
      const Eigen::Index i2 = basis.index_of(s.nu + 1, k2);
      if (i2 < 0) continue;
      const int k_lo = std::min(s.k, k2);
      // <k_lo + 1| J_+ |k_lo> = sqrt((k_lo + 1)(N - k_lo))
      const double spin = std::sqrt(static_cast<double>(k_lo + 1) * static_cast<double>(n - k_lo));
      const double value = g * std::sqrt(static_cast<double>(s.nu + 1)) * spin;
      h.entries.emplace_back(i, i2, value);
      h.entries.emplace_back(i2, i, value);
    }
  }
  h.matrix.resize(h.dimension, h.dimension);
  h.matrix.setFromTriplets(h.entries.begin(), h.entries.end());
  h.matrix.makeCompressed();
  return h;
}

namespace {

template <typename Vec>
Observables observables_impl(const TruncatedBasis& basis, const Vec& c) {
  using std::norm;
  const int n = basis.n_atoms();
  const Eigen::Index dim = basis.dimension();
  if (c.size() != dim) throw DimensionMismatchError("amplitude vector does not match the basis");

  auto amp = [&](int nu, int k) -> std::complex<double> {
    const Eigen::Index idx = basis.index_of(nu, k);
    return idx < 0 ? std::complex<double>(0.0) : std::complex<double>(c(idx));
  };

  double weight = 0.0, photons = 0.0, excited = 0.0, parity = 0.0;
  std::complex<double> q_mean = 0.0, jx_mean = 0.0;
  double q_sq = 0.0, jx_sq = 0.0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    const auto& s = basis.state(i);
    const double w = norm(std::complex<double>(c(i)));
    weight += w;
    photons += w * s.nu;
    excited += w * s.k;
    parity += ((s.nu + s.k) % 2 == 0) ? w : -w;
  }
  // q psi may reach nu_max + 1; J_x psi stays inside k in [0, N].
  for (int nu = 0; nu <= basis.nu_max() + 1; ++nu) {
    for (int k = 0; k <= n; ++k) {
      const std::complex<double> qpsi =
          (std::sqrt(nu + 1.0) * amp(nu + 1, k) + std::sqrt(static_cast<double>(nu)) * amp(nu - 1, k)) /
          std::sqrt(2.0);
      q_sq += norm(qpsi);
      q_mean += std::conj(amp(nu, k)) * qpsi;
      if (nu > basis.nu_max()) continue;
      const std::complex<double> jxpsi =
          0.5 * (std::sqrt(static_cast<double>(k) * (n - k + 1)) * amp(nu, k - 1) +
                 std::sqrt((k + 1.0) * (n - k)) * amp(nu, k + 1));
      jx_sq += norm(jxpsi);
      jx_mean += std::conj(amp(nu, k)) * jxpsi;
    }
  }
  Observables o;
  o.photon_per_atom = photons / weight / n;
  o.excited_fraction = excited / weight / n;
  o.parity_expectation = parity / weight;
  const double qm = q_mean.real() / weight, jm = jx_mean.real() / weight;
  o.var_q = q_sq / weight - qm * qm;
  o.var_jx = jx_sq / weight - jm * jm;
  return o;
}

struct SectorSolve {
  double energy;
  double next;
  Eigen::VectorXd vector;
};

SectorSolve solve_block(const ModelParams& params, const TruncatedBasis& basis, double eig_tol) {
  const HamiltonianMatrix h = build_hamiltonian(params, basis);
  LanczosOptions lo;
  lo.tol = eig_tol;
  LowestEigenpair ep = lowest_eigenpair(h.matrix, lo);
  // Fix the overall sign so the vector is reproducible.
  Eigen::Index arg = 0;
  ep.vector.cwiseAbs().maxCoeff(&arg);
  if (ep.vector(arg) < 0.0) ep.vector = -ep.vector;
  return {ep.value, ep.next_value, std::move(ep.vector)};
}

// Full space: each parity sector is solved separately and the lower ground
// state is embedded. The gap then includes the other sector's ground level.
SectorSolve solve_at(const ModelParams& params, const TruncatedBasis& basis, double eig_tol) {
  if (basis.sector()) return solve_block(params, basis, eig_tol);
  const int n = basis.n_atoms(), nu_max = basis.nu_max();
  const TruncatedBasis even(n, nu_max, ParitySector::even);
  const TruncatedBasis odd(n, nu_max, ParitySector::odd);
  SectorSolve e = solve_block(params, even, eig_tol);
  SectorSolve o = solve_block(params, odd, eig_tol);
  const bool pick_even = e.energy <= o.energy;
  const TruncatedBasis& chosen = pick_even ? even : odd;
  SectorSolve& win = pick_even ? e : o;
  const SectorSolve& other = pick_even ? o : e;
  Eigen::VectorXd full = Eigen::VectorXd::Zero(basis.dimension());
  for (Eigen::Index i = 0; i < chosen.dimension(); ++i) {
    const auto& st = chosen.state(i);
    full(basis.index_of(st.nu, st.k)) = win.vector(i);
  }
  return {win.energy, std::min(win.next, other.energy), std::move(full)};
}

// e^{-|alpha|^2/2} alpha^nu / sqrt(nu!)
std::complex<double> field_amplitude(std::complex<double> alpha, int nu) {
  const double mag = std::abs(alpha);
  if (mag == 0.0) return nu == 0 ? 1.0 : 0.0;
  const double log_mag = -0.5 * mag * mag + nu * std::log(mag) - 0.5 * std::lgamma(nu + 1.0);
  return std::polar(std::exp(log_mag), nu * std::arg(alpha));
}

// (1 + |zeta|^2)^{-j} sqrt(C(N, k)) zeta^k, written with half-angles so theta = pi is regular.
std::complex<double> spin_amplitude(int n, double theta, double phi, int k) {
  const double ch = std::cos(0.5 * theta), sh = std::sin(0.5 * theta);
  if ((ch == 0.0 && k < n) || (sh == 0.0 && k > 0)) return 0.0;
  double log_mag = 0.5 * (std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
  if (n - k > 0) log_mag += (n - k) * std::log(std::abs(ch));
  if (k > 0) log_mag += k * std::log(std::abs(sh));
  double sign = 1.0;
  if (ch < 0.0 && (n - k) % 2 == 1) sign = -sign;
  return std::polar(sign * std::exp(log_mag), -k * phi);
}

Embedding finish_embedding(Eigen::VectorXcd v, double exact_norm_sq) {
  Embedding e;
  const double kept = v.squaredNorm();
  e.leakage = std::max(0.0, 1.0 - kept / exact_norm_sq);
  if (e.leakage > kMaxEmbeddingLeakage)
    throw InsufficientCutoffError("photon cutoff truncates the embedded state (leakage " +
                                      std::to_string(e.leakage) + ")",
                                  e.leakage);
  e.amplitudes = v / std::sqrt(kept);
  return e;
}

}  // namespace

Observables observables(const TruncatedBasis& basis, const Eigen::VectorXcd& amplitudes) {
  return observables_impl(basis, amplitudes);
}

Observables observables(const TruncatedBasis& basis, const Eigen::VectorXd& amplitudes) {
  return observables_impl(basis, amplitudes);
}

int initial_nu_max(const ModelParams& params) {
  const double scale = params.n() * params.gamma() * params.gamma();
  return 4 * static_cast<int>(std::ceil(scale - 1e-12)) + 20;
}

GroundStateRecord ground_state(const ModelParams& params, std::optional<ParitySector> sector,
                               const GroundStateOptions& opts) {
  if (!(opts.conv_tol > 0.0) || !(opts.eig_tol > 0.0)) throw ConfigError("tolerances must be positive");

  GroundStateRecord rec;
  auto record = [&](int nu, SectorSolve&& solve, TruncatedBasis&& basis) {
    rec.energy = solve.energy;
    rec.spectral_gap = solve.next - solve.energy;
    rec.amplitudes = std::move(solve.vector);
    rec.basis = std::move(basis);
    rec.nu_max_used = nu;
  };

  if (opts.nu_max_fixed) {
    const int nu = *opts.nu_max_fixed;
    const int half = std::max(1, nu / 2);
    TruncatedBasis coarse(params.n_atoms(), half, sector);
    const double e_half = solve_at(params, coarse, opts.eig_tol).energy;
    TruncatedBasis fine(params.n_atoms(), nu, sector);
    SectorSolve s = solve_at(params, fine, opts.eig_tol);
    rec.ladder_energies = {e_half, s.energy};
    rec.convergence_gap = std::abs(s.energy - e_half);
    record(nu, std::move(s), std::move(fine));
  } else {
    int nu = std::min(initial_nu_max(params), opts.nu_max_cap);
    TruncatedBasis first(params.n_atoms(), nu, sector);
    SectorSolve prev = solve_at(params, first, opts.eig_tol);
    rec.ladder_energies.push_back(prev.energy);
    double gap = 0.0;
    while (true) {
      const int next = 2 * nu;
      if (next > opts.nu_max_cap)
        throw ConvergenceError("photon cutoff reached the cap " + std::to_string(opts.nu_max_cap) +
                                   " before the ground energy converged",
                               gap);
      TruncatedBasis basis(params.n_atoms(), next, sector);
      SectorSolve cur = solve_at(params, basis, opts.eig_tol);
      rec.ladder_energies.push_back(cur.energy);
      gap = std::abs(cur.energy - prev.energy);
      nu = next;
      if (gap < opts.conv_tol) {
        rec.convergence_gap = gap;
        record(nu, std::move(cur), std::move(basis));
        break;
      }
      prev = std::move(cur);
    }
  }
  rec.obs = observables(rec.basis, rec.amplitudes);
  return rec;
}

Embedding embed_sacs(const ModelParams& params, const FieldMatterPoint& point, ParitySector sector,
                     const TruncatedBasis& basis) {
  if (basis.n_atoms() != params.n_atoms()) throw ConfigError("basis and model disagree on N");
  if (basis.sector() && *basis.sector() != sector)
    throw ConfigError("a parity-projected state only lives in its own sector");
  const double norm_sq_inv = sacs_norm_sq_inv(params, point, sector);
  const std::complex<double> alpha(point.q() / std::sqrt(2.0), point.p() / std::sqrt(2.0));
  const double s = sign_of(sector);

  Eigen::VectorXcd v(basis.dimension());
  for (Eigen::Index i = 0; i < basis.dimension(); ++i) {
    const auto& st = basis.state(i);
    const double proj = 1.0 + s * (((st.nu + st.k) % 2 == 0) ? 1.0 : -1.0);
    v(i) = proj == 0.0 ? std::complex<double>(0.0)
                       : proj * field_amplitude(alpha, st.nu) *
                             spin_amplitude(basis.n_atoms(), point.theta(), point.phi(), st.k);
  }
  return finish_embedding(std::move(v), norm_sq_inv);
}

Embedding embed_coherent(const ModelParams& params, const FieldMatterPoint& point, const TruncatedBasis& basis) {
  if (basis.n_atoms() != params.n_atoms()) throw ConfigError("basis and model disagree on N");
  if (basis.sector()) throw ConfigError("the unprojected coherent state needs the full basis");
  const std::complex<double> alpha(point.q() / std::sqrt(2.0), point.p() / std::sqrt(2.0));
  Eigen::VectorXcd v(basis.dimension());
  for (Eigen::Index i = 0; i < basis.dimension(); ++i) {
    const auto& st = basis.state(i);
    v(i) = field_amplitude(alpha, st.nu) * spin_amplitude(basis.n_atoms(), point.theta(), point.phi(), st.k);
  }
  return finish_embedding(std::move(v), 1.0);
}

double expectation(const HamiltonianMatrix& h, const Eigen::VectorXcd& v) {
  if (v.size() != h.dimension) throw DimensionMismatchError("vector does not match the Hamiltonian");
  const Eigen::VectorXd re = v.real(), im = v.imag();
  return re.dot(h.matrix * re) + im.dot(h.matrix * im);
}

double overlap(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  if (a.size() != b.size()) throw DimensionMismatchError("overlap of vectors on different bases");
  return std::min(1.0, std::norm(a.dot(b)));
}

double overlap(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw DimensionMismatchError("overlap of vectors on different bases");
  const double d = a.dot(b);
  return std::min(1.0, d * d);
}

FidelityResult fidelity_susceptibility(const ModelParams& params, std::optional<ParitySector> sector,
                                       double delta_gamma, const GroundStateOptions& opts) {
  if (!(delta_gamma > 0.0 && delta_gamma <= 1e-2)) throw DomainError("delta_gamma must lie in (0, 1e-2]");
  const double lo = std::max(0.0, params.gamma() - 0.5 * delta_gamma);
  const double hi = lo + delta_gamma;

  const GroundStateRecord upper = ground_state(params.with_gamma(hi), sector, opts);
  const SectorSolve lower = solve_at(params.with_gamma(lo), upper.basis, opts.eig_tol);

  FidelityResult r;
  r.nu_max = upper.nu_max_used;
  const double fid = std::min(1.0, std::abs(upper.amplitudes.dot(lower.vector)));
  r.chi = 2.0 * (1.0 - fid) / (delta_gamma * delta_gamma);
  constexpr double kDegenerate = 1e-8;
  r.level_crossing = upper.spectral_gap < kDegenerate || (lower.next - lower.energy) < kDegenerate;
  return r;
}

}  // namespace dicke
