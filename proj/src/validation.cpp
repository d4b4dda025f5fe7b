#include "dicke/validation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "dicke/errors.hpp"
#include "dicke/mean_field.hpp"
#include "dicke/sacs.hpp"

namespace dicke {

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

namespace {

struct Sample {
  ModelParams params;
  FieldMatterPoint point;
};

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  // Random model and a point with |cos theta| >= 0.05 on either hemisphere.
  Sample next(int max_atoms) {
    const ModelParams params(uniform(0.3, 2.0), uniform(0.0, 1.2), integer(1, max_atoms));
    double theta = uniform(0.05, std::numbers::pi - 0.05);
    while (std::abs(std::cos(theta)) < 0.05) theta = uniform(0.05, std::numbers::pi - 0.05);
    const FieldMatterPoint point(uniform(-2.5, 2.5), uniform(-2.5, 2.5), theta, uniform(0.0, 2.0 * std::numbers::pi));
    return {params, point};
  }

 private:
  std::mt19937_64 rng_;
};

Gradient4 fd_gradient(const std::function<double(const FieldMatterPoint&)>& f, const FieldMatterPoint& x) {
  constexpr double h = 1e-5;
  Gradient4 g{};
  for (int k = 0; k < 4; ++k) {
    g[k] = richardson_derivative(
        [&](double d) {
          double c[4] = {x.q(), x.p(), x.theta(), x.phi()};
          c[k] += d;
          return f(FieldMatterPoint(c[0], c[1], c[2], c[3]));
        },
        h);
  }
  return g;
}

double relative_gradient_error(const Gradient4& analytic, const Gradient4& numeric) {
  double diff = 0.0, scale = 0.0;
  for (int k = 0; k < 4; ++k) {
    diff = std::max(diff, std::abs(analytic[k] - numeric[k]));
    scale = std::max(scale, std::abs(numeric[k]));
  }
  return diff / std::max(scale, 1e-8);
}

CheckResult gradient_check(const std::string& name, const ValidationConfig& cfg, std::uint64_t salt,
                           const std::function<Gradient4(const Sample&)>& analytic,
                           const std::function<double(const Sample&, const FieldMatterPoint&)>& energy) {
  CheckResult r{name, true, 0.0, cfg.fd_tol, 0, {}};
  Sampler sampler(cfg.seed + salt);
  for (int i = 0; i < cfg.gradient_points; ++i) {
    const Sample s = sampler.next(40);
    const Gradient4 a = analytic(s);
    const Gradient4 n = fd_gradient([&](const FieldMatterPoint& x) { return energy(s, x); }, s.point);
    const double err = relative_gradient_error(a, n);
    if (err > r.worst) {
      r.worst = err;
      std::ostringstream d;
      d << "worst at N=" << s.params.n_atoms() << " q=" << s.point.q() << " p=" << s.point.p()
        << " theta=" << s.point.theta() << " phi=" << s.point.phi();
      r.detail = d.str();
    }
    ++r.samples;
  }
  r.passed = r.worst <= cfg.fd_tol;
  return r;
}

HamiltonianMatrix oracle_hamiltonian(const ModelParams& params, const TruncatedBasis& basis, bool flip) {
  HamiltonianMatrix h = build_hamiltonian(params, basis);
  if (flip) {
    for (auto& t : h.entries)
      if (t.row() != t.col()) t = Eigen::Triplet<double>(t.row(), t.col(), -t.value());
    h.matrix.setFromTriplets(h.entries.begin(), h.entries.end());
  }
  return h;
}

CheckResult embedding_check(const ValidationConfig& cfg) {
  CheckResult r{"embedding_vs_sacs_energy", true, 0.0, cfg.embed_tol, 0, {}};
  Sampler sampler(cfg.seed + 3);
  for (int i = 0; i < cfg.embedding_points; ++i) {
    const Sample s = sampler.next(20);
    const ParitySector sector = i % 2 == 0 ? ParitySector::even : ParitySector::odd;
    const TruncatedBasis basis(s.params.n_atoms(), 60, sector);
    const HamiltonianMatrix h = oracle_hamiltonian(s.params, basis, cfg.flip_coupling_sign);
    const Embedding e = embed_sacs(s.params, s.point, sector, basis);
    const double err = std::abs(expectation(h, e.amplitudes) - sacs_energy(s.params, s.point, sector));
    r.worst = std::max(r.worst, err);
    ++r.samples;
  }
  r.passed = r.worst <= cfg.embed_tol;
  return r;
}

CheckResult coherent_embedding_check(const ValidationConfig& cfg) {
  CheckResult r{"coherent_embedding_vs_mean_field", true, 0.0, cfg.embed_tol, 0, {}};
  Sampler sampler(cfg.seed + 4);
  for (int i = 0; i < cfg.embedding_points; ++i) {
    const Sample s = sampler.next(12);
    const TruncatedBasis basis(s.params.n_atoms(), 60, std::nullopt);
    const HamiltonianMatrix h = oracle_hamiltonian(s.params, basis, cfg.flip_coupling_sign);
    const Embedding e = embed_coherent(s.params, s.point, basis);
    const double err = std::abs(expectation(h, e.amplitudes) - s.params.n() * mean_field_energy(s.params, s.point));
    r.worst = std::max(r.worst, err);
    ++r.samples;
  }
  r.passed = r.worst <= cfg.embed_tol;
  return r;
}

CheckResult stationarity_check(const ValidationConfig& cfg) {
  CheckResult r{"stationarity_residual_vs_gradient", true, 0.0, 1e-9, 0, {}};
  Sampler sampler(cfg.seed + 5);
  for (int i = 0; i < cfg.gradient_points; ++i) {
    const ModelParams params(sampler.uniform(0.3, 2.0), sampler.uniform(0.05, 1.2), sampler.integer(1, 40));
    const double q = sampler.uniform(-3.0, 3.0);
    const double z = sampler.uniform(0.05, 0.999);
    const FieldMatterPoint pt(q, 0.0, std::acos(z), 0.0);
    const auto res = sacs_stationarity_residual_scaled(params, q, z);
    const Gradient4 g = sacs_gradient(params, pt, ParitySector::even);
    const double o = std::exp(-q * q + params.n() * std::log(z));
    const double f = (1.0 + o) * (1.0 + o);
    const double eq = std::abs(res[0] / (z * f) - g[0]);
    const double et = std::abs(res[1] / (z * z * f) - g[2]);
    const double scale = std::max({std::abs(g[0]), std::abs(g[2]), 1e-8});
    r.worst = std::max(r.worst, std::max(eq, et) / scale);
    ++r.samples;
  }
  r.passed = r.worst <= r.tolerance;
  return r;
}

CheckResult variational_bound_check(const ValidationConfig& cfg) {
  CheckResult r{"variational_bound_even", true, 0.0, cfg.bound_tol, 0, {}};
  double worst = -std::numeric_limits<double>::infinity();
  for (double gamma : {0.3, 0.45, 0.552, 0.6, 0.7}) {
    const ModelParams p(cfg.omega_a, gamma, cfg.n_atoms);
    const auto minima = find_local_minima(p, Surface::sacs_even, cfg.search);
    if (minima.empty()) continue;
    const GroundStateRecord gs = ground_state(p, ParitySector::even, cfg.ground);
    // Positive excess means the exact energy sits above the variational one.
    worst = std::max(worst, gs.energy - minima.front().total_energy);
    ++r.samples;
  }
  r.worst = std::max(0.0, worst);
  r.passed = r.samples > 0 && worst <= cfg.bound_tol;
  return r;
}

CheckResult parity_block_check(const ValidationConfig& cfg) {
  CheckResult r{"hermiticity_and_parity_blocks", true, 0.0, 0.0, 0, {}};
  const ModelParams p(cfg.omega_a, 0.8, 6);
  const TruncatedBasis basis(6, 12, std::nullopt);
  const HamiltonianMatrix h = oracle_hamiltonian(p, basis, cfg.flip_coupling_sign);
  const SparseMatrix asym = h.matrix - SparseMatrix(h.matrix.transpose());
  double worst = asym.coeffs().size() ? asym.coeffs().cwiseAbs().maxCoeff() : 0.0;
  for (int i = 0; i < h.matrix.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(h.matrix, i); it; ++it) {
      const auto& a = basis.state(it.row());
      const auto& b = basis.state(it.col());
      if ((a.nu + a.k) % 2 != (b.nu + b.k) % 2) worst = std::max(worst, std::abs(it.value()));
      ++r.samples;
    }
  }
  r.worst = worst;
  r.passed = worst == 0.0;
  return r;
}

CheckResult decoupled_spectrum_check(const ValidationConfig& cfg) {
  CheckResult r{"decoupled_spectrum", true, 0.0, 0.0, 0, {}};
  const int n = 4;
  const ModelParams p(cfg.omega_a, 0.0, n);
  const TruncatedBasis basis(n, 6, std::nullopt);
  const HamiltonianMatrix h = build_hamiltonian(p, basis);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver{Eigen::MatrixXd(h.matrix)};
  std::vector<double> expected;
  for (Eigen::Index i = 0; i < basis.dimension(); ++i) {
    const auto& s = basis.state(i);
    expected.push_back(s.nu + cfg.omega_a * s.m(basis.j()));
  }
  std::sort(expected.begin(), expected.end());
  for (std::size_t i = 0; i < expected.size(); ++i)
    r.worst = std::max(r.worst, std::abs(solver.eigenvalues()(static_cast<Eigen::Index>(i)) - expected[i]));
  r.samples = static_cast<int>(expected.size());
  r.passed = r.worst == 0.0;
  return r;
}

// Runs one check, turning library errors into a failed row.
CheckResult guarded(const std::string& name, const std::function<CheckResult()>& check) {
  try {
    return check();
  } catch (const Error& e) {
    CheckResult r;
    r.name = name;
    r.passed = false;
    r.worst = std::numeric_limits<double>::infinity();
    r.detail = e.what();
    return r;
  }
}

}  // namespace

ValidationReport run_validation(const ValidationConfig& cfg) {
  if (!(cfg.fd_tol > 0.0) || !(cfg.embed_tol > 0.0) || !(cfg.bound_tol > 0.0))
    throw ConfigError("validation tolerances must be positive");
  ValidationReport report;
  auto add = [&](const std::string& name, const std::function<CheckResult()>& f) {
    report.checks.push_back(guarded(name, f));
  };

  add("mean_field_gradient_fd", [&] {
    return gradient_check(
        "mean_field_gradient_fd", cfg, 0, [](const Sample& s) { return mean_field_gradient(s.params, s.point); },
        [](const Sample& s, const FieldMatterPoint& x) { return mean_field_energy(s.params, x); });
  });
  for (ParitySector sector : {ParitySector::even, ParitySector::odd}) {
    const std::string name = "sacs_gradient_fd_" + std::string(to_string(sector));
    add(name, [&, sector, name] {
      return gradient_check(
          name, cfg, sector == ParitySector::even ? 1 : 2,
          [sector](const Sample& s) { return sacs_gradient(s.params, s.point, sector); },
          [sector](const Sample& s, const FieldMatterPoint& x) { return sacs_energy(s.params, x, sector); });
    });
  }
  add("stationarity_residual_vs_gradient", [&] { return stationarity_check(cfg); });
  add("embedding_vs_sacs_energy", [&] { return embedding_check(cfg); });
  add("coherent_embedding_vs_mean_field", [&] { return coherent_embedding_check(cfg); });
  add("variational_bound_even", [&] { return variational_bound_check(cfg); });
  add("hermiticity_and_parity_blocks", [&] { return parity_block_check(cfg); });
  add("decoupled_spectrum", [&] { return decoupled_spectrum_check(cfg); });
  return report;
}

}  // namespace dicke
