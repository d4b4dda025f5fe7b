#include "dicke/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "dicke/errors.hpp"
#include "dicke/mean_field.hpp"
#include "dicke/sacs.hpp"

namespace dicke {

std::string_view to_string(Surface s) {
  switch (s) {
    case Surface::mean_field: return "mean_field";
    case Surface::sacs_even: return "sacs_even";
    case Surface::sacs_odd: return "sacs_odd";
  }
  return "?";
}

Surface parse_surface(std::string_view name) {
  if (name == "mean_field") return Surface::mean_field;
  if (name == "sacs_even") return Surface::sacs_even;
  if (name == "sacs_odd") return Surface::sacs_odd;
  throw ConfigError("unknown surface '" + std::string(name) + "' (expected mean_field|sacs_even|sacs_odd)");
}

std::string_view to_string(BasinLabel b) { return b == BasinLabel::low_q ? "low_q" : "high_q"; }

std::string_view to_string(SweepSource s) {
  switch (s) {
    case SweepSource::mean_field: return "mean_field";
    case SweepSource::sacs_even: return "sacs_even";
    case SweepSource::sacs_odd: return "sacs_odd";
    case SweepSource::exact: return "exact";
  }
  return "?";
}

SweepSource source_of(Surface s) {
  switch (s) {
    case Surface::mean_field: return SweepSource::mean_field;
    case Surface::sacs_even: return SweepSource::sacs_even;
    case Surface::sacs_odd: return SweepSource::sacs_odd;
  }
  return SweepSource::sacs_even;
}

namespace {

// Physical point for a plane point, plus the sign that maps physical
// (q, theta) derivatives back onto the plane coordinates.
std::pair<FieldMatterPoint, double> physical(PlanePoint x) {
  if (x.theta >= 0.0) return {FieldMatterPoint(x.q, 0.0, x.theta, std::numbers::pi), 1.0};
  return {FieldMatterPoint(-x.q, 0.0, -x.theta, std::numbers::pi), -1.0};
}

double distance(const FieldMatterPoint& a, const FieldMatterPoint& b) {
  // Canonical points carry phi = pi for q > 0 and phi = 0 at q = 0; compare signed q in the pi plane.
  const double qa = a.phi() == 0.0 ? -a.q() : a.q();
  const double qb = b.phi() == 0.0 ? -b.q() : b.q();
  return std::hypot(qa - qb, a.theta() - b.theta());
}

PlanePoint to_plane(const FieldMatterPoint& p) { return {p.phi() == 0.0 ? -p.q() : p.q(), p.theta()}; }

struct Refinement {
  std::optional<LocalMinimum> minimum;
  bool converged = false;
  double residual = std::numeric_limits<double>::infinity();
};

Refinement refine(const ModelParams& params, Surface surface, PlanePoint start, const SearchConfig& cfg) {
  Refinement out;
  auto energy = [&](const Eigen::Vector2d& v) -> std::optional<double> {
    try {
      return plane_energy(params, surface, {v(0), v(1)});
    } catch (const NumericalError&) {
      return std::nullopt;
    }
  };
  auto gradient = [&](const Eigen::Vector2d& v) -> std::optional<Eigen::Vector2d> {
    try {
      return plane_gradient(params, surface, {v(0), v(1)});
    } catch (const NumericalError&) {
      return std::nullopt;
    }
  };
  auto hessian = [&](const Eigen::Vector2d& v) -> std::optional<Eigen::Matrix2d> {
    try {
      return plane_hessian(params, surface, {v(0), v(1)}, cfg.hessian_step);
    } catch (const NumericalError&) {
      return std::nullopt;
    }
  };
  auto inside = [&](const Eigen::Vector2d& v) { return std::abs(v(1)) <= cfg.theta_max; };

  Eigen::Vector2d x(start.q, std::clamp(start.theta, -cfg.theta_max, cfg.theta_max));
  std::optional<double> fx = energy(x);
  if (!fx) return out;

  int polish = 0;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    const auto g = gradient(x);
    if (!g) return out;
    const double gn = g->norm();
    out.residual = std::min(out.residual, gn);
    const auto h = hessian(x);
    if (!h) return out;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(*h);
    const bool newton = eig.eigenvalues()(0) > 0.0;
    if (gn < cfg.grad_tol) {
      // A couple of extra Newton steps drive the point to round-off.
      if (!newton || polish >= 2) break;
      ++polish;
      const Eigen::Vector2d xn = x - h->ldlt().solve(*g);
      const auto gn2 = gradient(xn);
      if (!inside(xn) || !gn2 || gn2->norm() >= gn) break;
      x = xn;
      fx = energy(x);
      continue;
    }

    Eigen::Vector2d step = newton ? Eigen::Vector2d(-h->ldlt().solve(*g)) : Eigen::Vector2d(-*g);
    const double len = step.norm();
    if (len > 0.5) step *= 0.5 / len;

    const double slope = g->dot(step);
    bool accepted = false;
    for (double a = 1.0; a > 1e-14; a *= 0.5) {
      const Eigen::Vector2d xn = x + a * step;
      if (!inside(xn)) continue;
      const auto fn = energy(xn);
      if (fn && *fn <= *fx + 1e-4 * a * slope) {
        x = xn;
        fx = fn;
        accepted = true;
        break;
      }
    }
    if (!accepted && newton) {
      // Energy differences are below round-off; fall back on the gradient norm.
      const Eigen::Vector2d xn = x + step;
      const auto gn2 = inside(xn) ? gradient(xn) : std::nullopt;
      if (gn2 && gn2->norm() < gn) {
        x = xn;
        fx = energy(x);
        accepted = fx.has_value();
      }
    }
    if (!accepted) break;
  }

  const auto g = gradient(x);
  if (!g) return out;
  const double gn = g->norm();
  out.residual = std::min(out.residual, gn);
  if (!(gn < cfg.grad_tol)) return out;
  out.converged = true;

  const auto h = hessian(x);
  if (!h) return out;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(*h);
  if (!(eig.eigenvalues()(0) > 0.0)) return out;

  LocalMinimum m;
  m.point = to_field_matter({x(0), x(1)});
  m.total_energy = *fx;
  m.hessian_eigs = {eig.eigenvalues()(0), eig.eigenvalues()(1)};
  m.gradient_norm = gn;
  m.order = order_parameters(params, m.point);
  out.minimum = m;
  return out;
}

void label_by_q(std::vector<LocalMinimum>& minima) {
  if (minima.empty()) return;
  auto lowest = std::min_element(minima.begin(), minima.end(),
                                 [](const auto& a, const auto& b) { return a.point.q() < b.point.q(); });
  for (auto& m : minima) m.basin = (&m == &*lowest) ? BasinLabel::low_q : BasinLabel::high_q;
}

bool energy_tie(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

void sort_by_energy(std::vector<LocalMinimum>& minima) {
  std::stable_sort(minima.begin(), minima.end(), [](const LocalMinimum& a, const LocalMinimum& b) {
    if (energy_tie(a.total_energy, b.total_energy)) return a.basin == BasinLabel::low_q && b.basin != BasinLabel::low_q;
    return a.total_energy < b.total_energy;
  });
}

}  // namespace

double plane_energy(const ModelParams& params, Surface surface, PlanePoint x) {
  const auto [pt, sign] = physical(x);
  switch (surface) {
    case Surface::mean_field: return params.n() * mean_field_energy(params, pt);
    case Surface::sacs_even: return sacs_energy(params, pt, ParitySector::even);
    case Surface::sacs_odd: return sacs_energy(params, pt, ParitySector::odd);
  }
  return 0.0;
}

Eigen::Vector2d plane_gradient(const ModelParams& params, Surface surface, PlanePoint x) {
  const auto [pt, sign] = physical(x);
  Gradient4 g{};
  switch (surface) {
    case Surface::mean_field:
      g = mean_field_gradient(params, pt);
      for (double& c : g) c *= params.n();
      break;
    case Surface::sacs_even: g = sacs_gradient(params, pt, ParitySector::even); break;
    case Surface::sacs_odd: g = sacs_gradient(params, pt, ParitySector::odd); break;
  }
  return {sign * g[0], sign * g[2]};
}

Eigen::Matrix2d plane_hessian(const ModelParams& params, Surface surface, PlanePoint x, double step) {
  Eigen::Matrix2d h;
  const Eigen::Vector2d dq = (plane_gradient(params, surface, {x.q + step, x.theta}) -
                              plane_gradient(params, surface, {x.q - step, x.theta})) / (2.0 * step);
  const Eigen::Vector2d dt = (plane_gradient(params, surface, {x.q, x.theta + step}) -
                              plane_gradient(params, surface, {x.q, x.theta - step})) / (2.0 * step);
  h.col(0) = dq;
  h.col(1) = dt;
  return 0.5 * (h + h.transpose());
}

FieldMatterPoint to_field_matter(PlanePoint x) {
  double q = x.q, theta = x.theta;
  if (theta < 0.0) {
    q = -q;
    theta = -theta;
  }
  if (q > 0.0) return {q, 0.0, theta, std::numbers::pi};
  return {-q, 0.0, theta, 0.0};
}

OrderParameters order_parameters(const ModelParams& params, const FieldMatterPoint& point) {
  OrderParameters o;
  o.photon_per_atom = (point.q() * point.q() + point.p() * point.p()) / (2.0 * params.n());
  o.cos_theta = std::cos(point.theta());
  o.excited_fraction = 0.5 * (1.0 - o.cos_theta);
  o.half_q = 0.5 * point.q();
  return o;
}

OrderParameters order_parameters(const ModelParams& params, const LocalMinimum& m) {
  return order_parameters(params, m.point);
}

std::optional<LocalMinimum> refine_minimum(const ModelParams& params, Surface surface, PlanePoint start,
                                           const SearchConfig& search) {
  return refine(params, surface, start, search).minimum;
}

std::vector<LocalMinimum> find_local_minima(const ModelParams& params, Surface surface, const SearchConfig& search) {
  if (search.grid_q < 1 || search.grid_theta < 1) throw ConfigError("search grid must be non-empty");
  const double q_max = search.q_max > 0.0 ? search.q_max : std::max(1.0, 3.0 * std::sqrt(params.n()) * params.gamma());

  std::vector<Refinement> runs;
  runs.reserve(static_cast<std::size_t>(search.grid_q) * search.grid_theta);
  for (int i = 0; i < search.grid_q; ++i) {
    const double q = search.grid_q == 1 ? 0.0 : -q_max + 2.0 * q_max * i / (search.grid_q - 1);
    for (int k = 0; k < search.grid_theta; ++k) {
      const double theta = search.grid_theta == 1 ? 0.0 : search.theta_max * k / (search.grid_theta - 1);
      runs.push_back(refine(params, surface, {q, theta}, search));
    }
  }

  std::vector<LocalMinimum> found;
  bool any_converged = false;
  double best_residual = std::numeric_limits<double>::infinity();
  for (const auto& r : runs) {
    any_converged = any_converged || r.converged;
    best_residual = std::min(best_residual, r.residual);
    if (r.minimum) found.push_back(*r.minimum);
  }
  if (!any_converged)
    throw ConvergenceError("refinement did not converge from any start on " + std::string(to_string(surface)),
                           best_residual);

  std::stable_sort(found.begin(), found.end(),
                   [](const auto& a, const auto& b) { return a.total_energy < b.total_energy; });
  std::vector<LocalMinimum> unique;
  for (const auto& m : found) {
    const bool dup = std::any_of(unique.begin(), unique.end(), [&](const LocalMinimum& u) {
      return distance(u.point, m.point) < search.merge_distance;
    });
    if (!dup) unique.push_back(m);
  }
  label_by_q(unique);
  sort_by_energy(unique);
  return unique;
}

namespace {

struct Bracketed {
  double lo, hi;
  LocalMinimum at_lo, at_hi;
};

LocalMinimum global_at(const ModelParams& params, Surface surface, double gamma, const SearchConfig& search) {
  auto minima = find_local_minima(params.with_gamma(gamma), surface, search);
  if (minima.empty()) {
    std::ostringstream msg;
    msg << "no local minimum of " << to_string(surface) << " at gamma = " << gamma;
    throw NoTransitionError(msg.str());
  }
  return minima.front();
}

// Bisect a step where the global minimum jumps. Returns nullopt when the
// two sides merge (the minimum moved continuously, not a jump).
std::optional<Bracketed> bisect_jump(const ModelParams& params, Surface surface, Bracketed b,
                                     const CriticalConfig& cfg) {
  while (b.hi - b.lo > cfg.tol) {
    const double mid = 0.5 * (b.lo + b.hi);
    const LocalMinimum g = global_at(params, surface, mid, cfg.search);
    const double d_lo = distance(g.point, b.at_lo.point);
    const double d_hi = distance(g.point, b.at_hi.point);
    if (std::min(d_lo, d_hi) > cfg.jump_distance) {
      std::ostringstream msg;
      msg << "global minimum at gamma = " << mid << " (q=" << g.point.q() << ", theta=" << g.point.theta()
          << ") matches neither tracked basin (q=" << b.at_lo.point.q() << ", q=" << b.at_hi.point.q() << ")";
      throw TrackingError(msg.str());
    }
    if (d_lo <= d_hi) {
      b.lo = mid;
      b.at_lo = g;
    } else {
      b.hi = mid;
      b.at_hi = g;
    }
    if (distance(b.at_lo.point, b.at_hi.point) <= cfg.jump_distance) return std::nullopt;
  }
  return b;
}

LocalMinimum follow(const ModelParams& params, Surface surface, double gamma, const LocalMinimum& from,
                    const SearchConfig& search) {
  auto m = refine_minimum(params.with_gamma(gamma), surface, to_plane(from.point), search);
  if (!m || distance(m->point, from.point) > 0.2) {
    std::ostringstream msg;
    msg << "lost the basin at q=" << from.point.q() << ", theta=" << from.point.theta() << " when moving to gamma = "
        << gamma;
    throw TrackingError(msg.str());
  }
  return *m;
}

}  // namespace

CriticalResult critical_coupling(const ModelParams& params, Surface surface, const CriticalConfig& cfg) {
  if (!(cfg.tol > 0.0) || !(cfg.scan_step > 0.0)) throw ConfigError("critical search tolerances must be positive");
  const double gc = gamma_c_tdl(params);
  std::vector<std::pair<double, double>> intervals;
  if (cfg.bracket) {
    if (!(cfg.bracket->first < cfg.bracket->second)) throw ConfigError("bracket must satisfy lo < hi");
    intervals.push_back(*cfg.bracket);
  } else {
    intervals = {{gc, gc + 0.3}, {gc + 0.3, gc + 0.6}};
  }

  std::optional<Bracketed> found;
  for (const auto& [a, b] : intervals) {
    const int steps = std::max(1, static_cast<int>(std::ceil((b - a) / cfg.scan_step - 1e-9)));
    double g_prev = a;
    LocalMinimum m_prev = global_at(params, surface, a, cfg.search);
    for (int i = 1; i <= steps && !found; ++i) {
      const double g = a + (b - a) * i / steps;
      LocalMinimum m = global_at(params, surface, g, cfg.search);
      if (distance(m.point, m_prev.point) > cfg.jump_distance)
        found = bisect_jump(params, surface, {g_prev, g, m_prev, m}, cfg);
      g_prev = g;
      m_prev = std::move(m);
    }
    if (found) break;
  }
  if (!found) {
    std::ostringstream msg;
    msg << "no jump of the global minimum of " << to_string(surface) << " for N = " << params.n_atoms()
        << " in the searched coupling range";
    throw NoTransitionError(msg.str());
  }

  CriticalResult r;
  r.bracket = {found->lo, found->hi};
  r.gamma_c = 0.5 * (found->lo + found->hi);
  LocalMinimum a = follow(params, surface, r.gamma_c, found->at_lo, cfg.search);
  LocalMinimum b = follow(params, surface, r.gamma_c, found->at_hi, cfg.search);
  if (distance(a.point, b.point) <= cfg.search.merge_distance)
    throw TrackingError("both basins collapse onto one minimum at the crossing");
  const bool a_is_low = a.point.q() <= b.point.q();
  LocalMinimum& low = a_is_low ? a : b;
  LocalMinimum& high = a_is_low ? b : a;
  low.basin = BasinLabel::low_q;
  high.basin = BasinLabel::high_q;

  // Energy difference slope from both basins followed to the bracket ends.
  const LocalMinimum low_lo = follow(params, surface, found->lo, low, cfg.search);
  const LocalMinimum high_lo = follow(params, surface, found->lo, high, cfg.search);
  const LocalMinimum low_hi = follow(params, surface, found->hi, low, cfg.search);
  const LocalMinimum high_hi = follow(params, surface, found->hi, high, cfg.search);
  r.delta_e_slope = ((low_hi.total_energy - high_hi.total_energy) - (low_lo.total_energy - high_lo.total_energy)) /
                    (found->hi - found->lo);

  r.energy_gap_at_tol = std::abs(low.total_energy - high.total_energy);
  r.order_param_jump = {std::abs(high.order.photon_per_atom - low.order.photon_per_atom),
                        std::abs(high.order.excited_fraction - low.order.excited_fraction)};
  r.minima_at_crossing = {low, high};
  return r;
}

CriticalResult critical_coupling(const ModelParams& params, ParitySector sector, const CriticalConfig& config) {
  return critical_coupling(params, sector == ParitySector::even ? Surface::sacs_even : Surface::sacs_odd, config);
}

std::vector<SweepRow> sweep(const ModelParams& params, Surface surface, const std::vector<double>& gamma_grid,
                            const SearchConfig& search) {
  if (!std::is_sorted(gamma_grid.begin(), gamma_grid.end())) throw ConfigError("gamma grid must be ascending");
  std::vector<SweepRow> rows(gamma_grid.size());
  for (std::size_t i = 0; i < gamma_grid.size(); ++i) {
    SweepRow& row = rows[i];
    row.gamma = gamma_grid[i];
    row.source = source_of(surface);
    try {
      row.all_minima = find_local_minima(params.with_gamma(row.gamma), surface, search);
      if (row.all_minima.empty()) row.diagnostic = "no local minimum found";
    } catch (const Error& e) {
      row.diagnostic = e.what();
    }
  }

  // Sequential pass: carry basin labels by nearest-point matching.
  const SweepRow* prev = nullptr;
  for (auto& row : rows) {
    if (prev && !prev->all_minima.empty()) {
      // Matched minima move less than 0.2 per 1e-3 in gamma.
      const double bound = 0.2 * std::max(1.0, (row.gamma - prev->gamma) / 1e-3);
      std::optional<double> low_q, high_q;
      std::vector<bool> matched(row.all_minima.size(), false);
      for (std::size_t k = 0; k < row.all_minima.size(); ++k) {
        auto& m = row.all_minima[k];
        const auto nearest = std::min_element(prev->all_minima.begin(), prev->all_minima.end(),
                                              [&](const auto& a, const auto& b) {
                                                return distance(a.point, m.point) < distance(b.point, m.point);
                                              });
        if (distance(nearest->point, m.point) <= bound) {
          m.basin = nearest->basin;
          matched[k] = true;
          (m.basin == BasinLabel::low_q ? low_q : high_q) = m.point.q();
        }
      }
      for (std::size_t k = 0; k < row.all_minima.size(); ++k) {
        if (matched[k]) continue;
        auto& m = row.all_minima[k];
        if (low_q && m.point.q() > *low_q) m.basin = BasinLabel::high_q;
        else if (high_q && m.point.q() < *high_q) m.basin = BasinLabel::low_q;
      }
    }
    sort_by_energy(row.all_minima);
    if (!row.all_minima.empty()) {
      row.global_minimum = row.all_minima.front();
      row.per_atom_energy = row.global_minimum->total_energy / params.n();
      row.degenerate = row.all_minima.size() > 1 &&
                       energy_tie(row.all_minima[0].total_energy, row.all_minima[1].total_energy);
    }
    prev = &row;
  }
  return rows;
}

SurfaceGrid surface_grid(const ModelParams& params, Surface surface, std::pair<double, double> q_range,
                         std::pair<double, double> theta_range, std::pair<int, int> resolution,
                         const SearchConfig& search) {
  const auto [nq, nt] = resolution;
  if (nq < 2 || nt < 2) throw ConfigError("surface grid needs at least 2 x 2 cells");
  if (!(q_range.first < q_range.second) || !(theta_range.first < theta_range.second))
    throw ConfigError("surface grid ranges must satisfy lo < hi");

  SurfaceGrid grid;
  for (int i = 0; i < nq; ++i)
    grid.q_values.push_back(q_range.first + (q_range.second - q_range.first) * i / (nq - 1));
  for (int k = 0; k < nt; ++k)
    grid.theta_values.push_back(theta_range.first + (theta_range.second - theta_range.first) * k / (nt - 1));

  grid.energies.resize(static_cast<std::size_t>(nq) * nt);
  grid.masked.resize(grid.energies.size(), false);
  for (int k = 0; k < nt; ++k) {
    for (int i = 0; i < nq; ++i) {
      const std::size_t idx = static_cast<std::size_t>(k) * nq + i;
      try {
        grid.energies[idx] = plane_energy(params, surface, {grid.q_values[i], grid.theta_values[k]});
      } catch (const Error&) {
        grid.energies[idx] = std::numeric_limits<double>::quiet_NaN();
        grid.masked[idx] = true;
      }
    }
  }

  grid.minima = find_local_minima(params, surface, search);
  if (!grid.minima.empty()) {
    const PlanePoint a = to_plane(grid.minima[0].point);
    double slope = 0.0;
    if (grid.minima.size() > 1) {
      const PlanePoint b = to_plane(grid.minima[1].point);
      if (b.q != a.q) slope = (b.theta - a.theta) / (b.q - a.q);
    }
    for (double q : grid.q_values) {
      const double theta = a.theta + slope * (q - a.q);
      double e = std::numeric_limits<double>::quiet_NaN();
      try {
        e = plane_energy(params, surface, {q, theta});
      } catch (const Error&) {
      }
      grid.section.push_back({q, theta, e});
    }
  }
  return grid;
}

}  // namespace dicke
