#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dicke/errors.hpp"
#include "dicke/mean_field.hpp"
#include "dicke/optimizer.hpp"
#include "dicke/sacs.hpp"
#include "support/oracles.hpp"

using namespace dicke;

namespace {

const ModelParams kResonance20(1.0, 0.552, 20);

double plane_distance(const LocalMinimum& a, const LocalMinimum& b) {
  return std::hypot(a.point.q() - b.point.q(), a.point.theta() - b.point.theta());
}

void expect_valid_minimum(const LocalMinimum& m) {
  EXPECT_LT(m.gradient_norm, 1e-8);
  EXPECT_GT(m.hessian_eigs[0], 0.0);
  EXPECT_GT(m.hessian_eigs[1], 0.0);
  EXPECT_GE(m.order.photon_per_atom, 0.0);
  EXPECT_GE(m.order.excited_fraction, 0.0);
  EXPECT_LE(m.order.excited_fraction, 1.0);
  EXPECT_GE(m.point.q(), 0.0);
  EXPECT_EQ(m.point.p(), 0.0);
}

}  // namespace

TEST(Surface, ParseAndPrint) {
  for (auto s : {Surface::mean_field, Surface::sacs_even, Surface::sacs_odd}) EXPECT_EQ(parse_surface(to_string(s)), s);
  EXPECT_THROW(parse_surface("exact"), ConfigError);
  EXPECT_EQ(source_of(Surface::sacs_odd), SweepSource::sacs_odd);
  EXPECT_EQ(to_string(SweepSource::exact), "exact");
}

TEST(PlaneEnergy, MatchesSurfacesAndContinuation) {
  oracle::Rng rng(41);
  for (int i = 0; i < 100; ++i) {
    const ModelParams p(rng.uniform(0.3, 2), rng.uniform(0, 1.2), rng.integer(1, 40));
    const double q = rng.uniform(-3, 3), t = rng.uniform(0.01, 1.4);
    const FieldMatterPoint at_pi(q, 0, t, std::numbers::pi);
    EXPECT_NEAR(plane_energy(p, Surface::sacs_even, {q, t}), sacs_energy(p, at_pi, ParitySector::even), 1e-11);
    EXPECT_NEAR(plane_energy(p, Surface::sacs_odd, {q, t}), sacs_energy(p, at_pi, ParitySector::odd), 1e-11);
    EXPECT_NEAR(plane_energy(p, Surface::mean_field, {q, t}), p.n() * mean_field_energy(p, at_pi), 1e-11);
    for (auto s : {Surface::mean_field, Surface::sacs_even})
      EXPECT_NEAR(plane_energy(p, s, {q, -t}), plane_energy(p, s, {-q, t}), 1e-11);
    const Eigen::Vector2d g = plane_gradient(p, Surface::sacs_even, {q, t});
    const double h = 1e-5;
    const double dq = (plane_energy(p, Surface::sacs_even, {q + h, t}) - plane_energy(p, Surface::sacs_even, {q - h, t})) / (2 * h);
    EXPECT_NEAR(g(0), dq, 1e-5 * std::max(1.0, std::abs(dq)));
  }
}

TEST(PlaneEnergy, CanonicalRepresentative) {
  const auto a = to_field_matter({1.5, 0.4});
  EXPECT_EQ(a.q(), 1.5);
  EXPECT_NEAR(a.phi(), std::numbers::pi, 1e-15);
  const auto b = to_field_matter({-1.5, 0.4});
  EXPECT_EQ(b.q(), 1.5);
  EXPECT_EQ(b.phi(), 0.0);
  const auto c = to_field_matter({1.5, -0.4});
  EXPECT_EQ(c.theta(), 0.4);
  EXPECT_GE(c.q(), 0.0);
}

TEST(OrderParameters, ClosedFormPoints) {
  const ModelParams p(1.0, 1.0, 20);
  const auto normal = order_parameters(p, FieldMatterPoint(0, 0, 0, 0));
  EXPECT_EQ(normal.photon_per_atom, 0.0);
  EXPECT_EQ(normal.excited_fraction, 0.0);
  const auto sr = mean_field_critical_points(p);
  const auto o = order_parameters(p, sr.front().point);
  EXPECT_NEAR(o.photon_per_atom, 0.9375, 1e-13);
  EXPECT_NEAR(o.excited_fraction, 0.375, 1e-15);
  EXPECT_NEAR(o.cos_theta, 0.25, 1e-15);
  EXPECT_NEAR(o.half_q, 0.5 * sr.front().point.q(), 1e-15);
}

TEST(FindLocalMinima, MeanFieldNormalPhase) {
  const auto m = find_local_minima(ModelParams(1.0, 0.4, 20), Surface::mean_field);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_NEAR(m[0].point.q(), 0.0, 1e-8);
  EXPECT_NEAR(m[0].point.theta(), 0.0, 1e-8);
  EXPECT_NEAR(m[0].total_energy, -10.0, 1e-12);
  expect_valid_minimum(m[0]);
}

TEST(FindLocalMinima, MeanFieldRecoversClosedFormAcrossPhases) {
  for (int i = 0; i < 20; ++i) {
    const double g = 0.1 + 0.05 * i;
    if (std::abs(g - 0.5) < 1e-12) continue;
    const ModelParams p(1.0, g, 20);
    const auto m = find_local_minima(p, Surface::mean_field);
    ASSERT_EQ(m.size(), 1u) << "gamma " << g;
    const auto ref = mean_field_critical_points(p).back();  // the phi = pi partner above threshold
    EXPECT_NEAR(m[0].point.q(), std::abs(ref.point.q()), 1e-8);
    EXPECT_NEAR(m[0].point.theta(), ref.point.theta(), 1e-8);
    EXPECT_NEAR(m[0].total_energy, ref.total_energy, 1e-8);
    expect_valid_minimum(m[0]);
  }
}

// The high-q basin of the even surface is born just above 0.5455 at N = 20.
TEST(FindLocalMinima, EvenSurfaceSingleMinimumJustBelowCoexistence) {
  const auto m = find_local_minima(ModelParams(1.0, 0.545, 20), Surface::sacs_even);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_NEAR(m[0].point.q(), 1.0, 0.5);
  expect_valid_minimum(m[0]);
}

TEST(FindLocalMinima, EvenSurfaceTwoMinimaInCoexistence) {
  const auto m = find_local_minima(ModelParams(1.0, 0.546, 20), Surface::sacs_even);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0].basin, BasinLabel::low_q);
  EXPECT_NEAR(m[0].point.q(), 1.0, 0.5);
  EXPECT_EQ(m[1].basin, BasinLabel::high_q);
  EXPECT_NEAR(m[1].point.q(), 2.0, 0.5);
  EXPECT_LT(m[0].total_energy, m[1].total_energy);
  for (const auto& x : m) expect_valid_minimum(x);
}

TEST(FindLocalMinima, InvariantsOverRandomModels) {
  oracle::Rng rng(42);
  SearchConfig coarse;
  coarse.grid_q = 15;
  coarse.grid_theta = 15;
  for (int i = 0; i < 25; ++i) {
    const ModelParams p(rng.uniform(0.5, 1.5), rng.uniform(0, 1.0), rng.integer(2, 30));
    for (auto s : {Surface::mean_field, Surface::sacs_even, Surface::sacs_odd}) {
      const auto m = find_local_minima(p, s, coarse);
      for (std::size_t k = 0; k < m.size(); ++k) {
        expect_valid_minimum(m[k]);
        if (k > 0) EXPECT_LE(m[k - 1].total_energy, m[k].total_energy);
        for (std::size_t l = 0; l < k; ++l) EXPECT_GT(plane_distance(m[k], m[l]), coarse.merge_distance);
      }
    }
  }
}

TEST(FindLocalMinima, DeterministicAndValidated) {
  const auto a = find_local_minima(kResonance20, Surface::sacs_even);
  const auto b = find_local_minima(kResonance20, Surface::sacs_even);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].total_energy, b[i].total_energy);
  SearchConfig empty;
  empty.grid_q = 0;
  EXPECT_THROW(find_local_minima(kResonance20, Surface::sacs_even, empty), ConfigError);
}

TEST(RefineMinimum, RejectsSaddleAtOrigin) {
  // The origin is stationary but not a minimum of the even surface once gamma > 0.
  const auto from_origin = refine_minimum(ModelParams(1.0, 0.6, 20), Surface::sacs_even, {0.0, 0.0});
  if (from_origin) EXPECT_GT(from_origin->point.q(), 0.1);
  const auto m = refine_minimum(ModelParams(1.0, 0.56, 20), Surface::sacs_even, {1.9, 0.6});
  ASSERT_TRUE(m.has_value());
  expect_valid_minimum(*m);
}

TEST(CriticalCoupling, ResonanceTwentyAtoms) {
  const auto r = critical_coupling(ModelParams(1.0, 0.0, 20), ParitySector::even);
  EXPECT_NEAR(r.gamma_c, 0.552, 1e-3);
  EXPECT_LT(r.bracket.first, r.gamma_c);
  EXPECT_LT(r.gamma_c, r.bracket.second);
  EXPECT_LE(r.bracket.second - r.bracket.first, 1e-4);
  EXPECT_LE(r.energy_gap_at_tol, 10 * 1e-4 * std::abs(r.delta_e_slope));
  EXPECT_GE(r.order_param_jump.first, 0.0);
  EXPECT_GE(r.order_param_jump.second, 0.0);
  EXPECT_EQ(r.minima_at_crossing.first.basin, BasinLabel::low_q);
  EXPECT_EQ(r.minima_at_crossing.second.basin, BasinLabel::high_q);
  EXPECT_LT(r.minima_at_crossing.first.point.q(), r.minima_at_crossing.second.point.q());
  expect_valid_minimum(r.minima_at_crossing.first);
  expect_valid_minimum(r.minima_at_crossing.second);
}

TEST(CriticalCoupling, ExplicitBracketAndErrors) {
  CriticalConfig cfg;
  cfg.bracket = {{0.50, 0.60}};
  EXPECT_NEAR(critical_coupling(ModelParams(1.0, 0.0, 20), Surface::sacs_even, cfg).gamma_c, 0.552, 1e-3);
  cfg.bracket = {{0.30, 0.45}};
  EXPECT_THROW(critical_coupling(ModelParams(1.0, 0.0, 20), Surface::sacs_even, cfg), NoTransitionError);
  cfg.bracket = {{0.6, 0.5}};
  EXPECT_THROW(critical_coupling(ModelParams(1.0, 0.0, 20), Surface::sacs_even, cfg), ConfigError);
  CriticalConfig bad;
  bad.tol = 0.0;
  EXPECT_THROW(critical_coupling(ModelParams(1.0, 0.0, 20), Surface::sacs_even, bad), ConfigError);
}

TEST(CriticalCoupling, MeanFieldHasNoJump) {
  EXPECT_THROW(critical_coupling(ModelParams(1.0, 0.0, 20), Surface::mean_field), NoTransitionError);
}

TEST(CriticalCoupling, BasinOrderAroundCrossing) {
  const auto at550 = find_local_minima(ModelParams(1.0, 0.550, 20), Surface::sacs_even);
  ASSERT_EQ(at550.size(), 2u);
  EXPECT_EQ(at550.front().basin, BasinLabel::low_q);
  const auto at555 = find_local_minima(ModelParams(1.0, 0.555, 20), Surface::sacs_even);
  ASSERT_EQ(at555.size(), 2u);
  EXPECT_EQ(at555.front().basin, BasinLabel::high_q);
}

TEST(CriticalCoupling, DecreasesTowardThermodynamicLimit) {
  double previous = std::numeric_limits<double>::infinity();
  for (int n : {10, 20, 40, 80}) {
    const double gc = critical_coupling(ModelParams(1.0, 0.0, n), ParitySector::even).gamma_c;
    EXPECT_GT(gc, 0.5);
    EXPECT_LT(gc, previous);
    previous = gc;
  }
}

TEST(Sweep, SingleRowMatchesSearch) {
  const auto rows = sweep(kResonance20, Surface::sacs_even, {0.552});
  ASSERT_EQ(rows.size(), 1u);
  const auto direct = find_local_minima(kResonance20, Surface::sacs_even);
  ASSERT_EQ(rows[0].all_minima.size(), direct.size());
  for (std::size_t i = 0; i < direct.size(); ++i) EXPECT_EQ(rows[0].all_minima[i].total_energy, direct[i].total_energy);
  ASSERT_TRUE(rows[0].global_minimum.has_value());
  EXPECT_EQ(rows[0].global_minimum->total_energy, direct.front().total_energy);
  EXPECT_EQ(rows[0].per_atom_energy, direct.front().total_energy / 20);
  EXPECT_EQ(rows[0].source, SweepSource::sacs_even);
}

TEST(Sweep, MeanFieldEnergyMatchesClosedForm) {
  std::vector<double> grid;
  for (int i = 0; i <= 30; ++i) grid.push_back(0.3 + 0.02 * i);
  const ModelParams p(1.0, 0.0, 20);
  for (const auto& row : sweep(p, Surface::mean_field, grid)) {
    ASSERT_TRUE(row.global_minimum.has_value());
    const double ref = mean_field_critical_points(p.with_gamma(row.gamma)).front().per_atom_energy;
    EXPECT_NEAR(row.per_atom_energy, ref, 1e-10) << row.gamma;
  }
}

TEST(Sweep, EvenSurfaceJumpsAtCriticalCoupling) {
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(0.542 + 0.001 * i);
  const auto rows = sweep(ModelParams(1.0, 0.0, 20), Surface::sacs_even, grid);
  const double gc = critical_coupling(ModelParams(1.0, 0.0, 20), ParitySector::even).gamma_c;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    ASSERT_TRUE(rows[i].global_minimum && rows[i - 1].global_minimum);
    const double dq = rows[i].global_minimum->point.q() - rows[i - 1].global_minimum->point.q();
    const bool straddles = rows[i - 1].gamma < gc && gc <= rows[i].gamma;
    if (straddles) EXPECT_GT(dq, 0.5);
    else EXPECT_LT(std::abs(dq), 0.1);
    // Labels follow the basins, so the global label flips exactly once.
    EXPECT_EQ(rows[i].global_minimum->basin, rows[i].gamma < gc ? BasinLabel::low_q : BasinLabel::high_q);
  }
}

TEST(Sweep, RejectsUnsortedGridAndReportsRowErrors) {
  EXPECT_THROW(sweep(kResonance20, Surface::sacs_even, {0.56, 0.55}), ConfigError);
  SearchConfig narrow;
  narrow.max_iterations = 0;
  const auto rows = sweep(kResonance20, Surface::sacs_even, {0.55, 0.56}, narrow);
  for (const auto& r : rows) {
    EXPECT_FALSE(r.global_minimum.has_value());
    EXPECT_FALSE(r.diagnostic.empty());
  }
}

TEST(SurfaceGrid, TwoEqualDepthMinimaAtCrossing) {
  const auto g = surface_grid(kResonance20, Surface::sacs_even, {0.0, 3.0}, {0.0, 1.2}, {61, 49});
  ASSERT_EQ(g.minima.size(), 2u);
  EXPECT_LT(std::abs(g.minima[0].total_energy - g.minima[1].total_energy), 1e-3 * 20);
  ASSERT_EQ(g.energies.size(), 61u * 49u);
  double grid_min = std::numeric_limits<double>::infinity();
  for (double e : g.energies) grid_min = std::min(grid_min, e);
  EXPECT_GE(grid_min, g.minima.front().total_energy - 1e-12);
  // The section passes through both minima.
  ASSERT_EQ(g.section.size(), 61u);
  for (const auto& m : g.minima) {
    const double t0 = g.section.front().theta, t1 = g.section.back().theta;
    const double slope = (t1 - t0) / (g.section.back().q - g.section.front().q);
    EXPECT_NEAR(t0 + slope * (m.point.q() - g.section.front().q), m.point.theta(), 1e-9);
  }
}

TEST(SurfaceGrid, MeanFieldNormalPhaseMinimumCellAtOrigin) {
  const auto g = surface_grid(ModelParams(1.0, 0.4, 20), Surface::mean_field, {-1.0, 1.0}, {0.0, 1.0}, {21, 11});
  std::size_t best = 0;
  for (std::size_t i = 1; i < g.energies.size(); ++i)
    if (g.energies[i] < g.energies[best]) best = i;
  EXPECT_EQ(best % 21, 10u);
  EXPECT_EQ(best / 21, 0u);
  ASSERT_EQ(g.minima.size(), 1u);
  ASSERT_EQ(g.section.size(), 21u);
  EXPECT_EQ(g.section.front().theta, g.section.back().theta);
}

TEST(SurfaceGrid, MasksSingularRingAndValidatesRanges) {
  const auto g = surface_grid(kResonance20, Surface::sacs_even, {0.0, 2.0}, {0.0, std::numbers::pi / 2}, {5, 3});
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_TRUE(g.masked[2 * 5 + i]);
    EXPECT_TRUE(std::isnan(g.at(2, i)));
    EXPECT_FALSE(g.masked[i]);
  }
  EXPECT_THROW(surface_grid(kResonance20, Surface::sacs_even, {2.0, 0.0}, {0.0, 1.0}, {5, 5}), ConfigError);
  EXPECT_THROW(surface_grid(kResonance20, Surface::sacs_even, {0.0, 2.0}, {0.0, 1.0}, {1, 5}), ConfigError);
}
