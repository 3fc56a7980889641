#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "corona/error.hpp"
#include "corona/sim.hpp"
#include "oracles.hpp"

using namespace corona;
using std::numbers::pi;

namespace {

const NetworkSpec kSpec = NetworkSpec::reference();
const CostParams kCost = CostParams::reference();

DeploymentPlan plan_for(std::size_t k, Variant v = Variant::Baseline) {
  return build_plan(kSpec, kCost, optimize_widths(kSpec, kCost, k, v, SolverConfig{}));
}

const DeploymentPlan& plan6() {
  static const DeploymentPlan plan = plan_for(6);
  return plan;
}

SimulationReport simulate(const DeploymentPlan& plan, std::size_t rounds, std::uint64_t seed = 1,
                          double scale = 1.0, DistanceMode mode = DistanceMode::FixedPower) {
  return run(place_nodes(plan, seed), plan, SimConfig{rounds, seed, scale, mode});
}

}  // namespace

TEST(PlaceNodes, CountsRadiiAndSectors) {
  const World world = place_nodes(plan6(), 3);
  ASSERT_EQ(world.sectors.size(), 6u);
  std::vector<std::int64_t> per_corona(6, 0);
  for (std::size_t id = 0; id < world.nodes.size(); ++id) {
    const SimNode& n = world.nodes[id];
    const CoronaProvision& c = plan6().coronas[n.corona - 1];
    EXPECT_GE(n.radius_m, c.inner_radius_m);
    EXPECT_LE(n.radius_m, c.outer_radius_m);
    const double width = 2.0 * pi / static_cast<double>(c.cluster_count);
    EXPECT_EQ(n.sector, std::min(static_cast<std::size_t>(n.angle_rad / width),
                                 static_cast<std::size_t>(c.cluster_count) - 1));
    ++per_corona[n.corona - 1];
  }
  for (const CoronaProvision& c : plan6().coronas) {
    EXPECT_EQ(per_corona[c.index - 1], c.node_count);
    EXPECT_EQ(world.sectors[c.index - 1].size(), static_cast<std::size_t>(c.cluster_count));
  }
}

TEST(PlaceNodes, AreaUniformWithinEachCorona) {
  std::vector<double> radial;
  std::vector<double> angular;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const World world = place_nodes(plan6(), seed);
    for (const SimNode& n : world.nodes) {
      const CoronaProvision& c = plan6().coronas[n.corona - 1];
      const double q2 = c.inner_radius_m * c.inner_radius_m;
      const double r2 = c.outer_radius_m * c.outer_radius_m;
      radial.push_back((n.radius_m * n.radius_m - q2) / (r2 - q2));
      angular.push_back(n.angle_rad / (2.0 * pi));
    }
  }
  ASSERT_GE(radial.size(), 10000u);
  EXPECT_LT(oracle::ks_uniform(radial), 0.02);
  EXPECT_LT(oracle::ks_uniform(angular), 0.02);
}

TEST(PlaceNodes, SeedControlsPlacement) {
  const World a = place_nodes(plan6(), 8);
  const World b = place_nodes(plan6(), 8);
  const World c = place_nodes(plan6(), 9);
  ASSERT_EQ(a.nodes.size(), b.nodes.size());
  for (std::size_t i = 0; i < a.nodes.size(); ++i) EXPECT_EQ(a.nodes[i].radius_m, b.nodes[i].radius_m);
  EXPECT_NE(a.nodes[0].radius_m, c.nodes[0].radius_m);
}

TEST(Simulate, ZeroRounds) {
  const SimulationReport r = simulate(plan6(), 0);
  EXPECT_EQ(r.rounds_run, 0u);
  EXPECT_FALSE(r.first_death_round.has_value());
  std::ostringstream csv;
  write_trace_csv(r, csv);
  EXPECT_EQ(csv.str(), "round,corona,energy_J,alive_count\n");
  const DeviationSummary d = compare_to_model(r, kSpec, plan6());
  EXPECT_TRUE(d.pass);
}

TEST(Simulate, DeterministicForFixedSeed) {
  const SimulationReport a = simulate(plan6(), 30, 5);
  const SimulationReport b = simulate(plan6(), 30, 5);
  EXPECT_EQ(a.corona_energy_J, b.corona_energy_J);
  EXPECT_EQ(a.node_energy_drawn_J, b.node_energy_drawn_J);
  std::ostringstream ca;
  std::ostringstream cb;
  write_trace_csv(a, ca);
  write_trace_csv(b, cb);
  EXPECT_EQ(ca.str(), cb.str());
}

TEST(Simulate, MeanRoundEnergyMatchesModel) {
  for (Variant v : {Variant::Baseline, Variant::Improved}) {
    const DeploymentPlan plan = plan_for(6, v);
    const SimulationReport r = simulate(plan, 200);
    const DeviationSummary d = compare_to_model(r, kSpec, plan, 0.03);
    EXPECT_TRUE(d.pass) << "worst corona " << d.worst_corona << " deviation " << d.worst;
    EXPECT_FALSE(r.first_death_round.has_value());
  }
}

TEST(Simulate, EnergyIsConserved) {
  for (DistanceMode mode : {DistanceMode::FixedPower, DistanceMode::Geometric}) {
    const SimulationReport r = simulate(plan6(), 60, 2, 0.0005, mode);
    const double drawn = std::accumulate(r.node_energy_drawn_J.begin(), r.node_energy_drawn_J.end(), 0.0);
    double ledger = 0.0;
    for (const auto& row : r.corona_energy_J) ledger = std::accumulate(row.begin(), row.end(), ledger);
    EXPECT_LE(oracle::rel_err(drawn, ledger), 1e-9);
    // No node ever spends more than it was given.
    const World world = place_nodes(plan6(), 2);
    for (std::size_t id = 0; id < world.nodes.size(); ++id) {
      ASSERT_LE(r.node_energy_drawn_J[id], 0.0005 * world.nodes[id].residual_J * (1.0 + 1e-12));
    }
  }
}

TEST(Simulate, DeadNodesDrawNothing) {
  // Same seed, so the longer run replays the shorter one first.
  const SimulationReport shorter = simulate(plan6(), 40, 4, 0.0003);
  const SimulationReport longer = simulate(plan6(), 80, 4, 0.0003);
  ASSERT_TRUE(shorter.first_death_round.has_value());
  std::size_t dead = 0;
  for (std::size_t id = 0; id < shorter.node_lifetime.size(); ++id) {
    if (!shorter.node_lifetime[id]) continue;
    ++dead;
    EXPECT_EQ(longer.node_lifetime[id], shorter.node_lifetime[id]);
    EXPECT_EQ(longer.node_energy_drawn_J[id], shorter.node_energy_drawn_J[id]);
  }
  EXPECT_GT(dead, 0u);
  for (std::size_t t = 1; t < longer.rounds_run; ++t) {
    for (std::size_t i = 0; i < 6; ++i) EXPECT_LE(longer.alive_count[t][i], longer.alive_count[t - 1][i]);
  }
}

TEST(Simulate, RelayCarriesEveryOuterBit) {
  const SimulationReport r = simulate(plan6(), 5);
  const double ml = kSpec.compression * kSpec.data_rate_bits;
  for (std::size_t t = 0; t < r.rounds_run; ++t) {
    double outside = 0.0;
    for (std::size_t i = 6; i-- > 0;) {
      EXPECT_NEAR(r.relay_bits_in[t][i], ml * outside, 1e-9 * (1.0 + ml * outside));
      outside += static_cast<double>(plan6().coronas[i].node_count);
    }
  }
  EXPECT_EQ(r.dropped_bits, 0.0);
}

TEST(Simulate, NoCompressedOutputMeansNoRelay) {
  DeploymentPlan plan = plan6();
  plan.spec.compression = 0.0;
  const SimulationReport r = simulate(plan, 5);
  for (const auto& row : r.relay_bits_in) {
    for (double bits : row) EXPECT_EQ(bits, 0.0);
  }
}

TEST(Simulate, SingleCoronaMatchesPerSectorOracle) {
  NetworkSpec disk = kSpec;
  disk.radius_m = 20.0;
  const DeploymentPlan plan = build_plan(disk, kCost, optimize_widths(disk, kCost, 1, Variant::Baseline, {}));
  ASSERT_EQ(plan.coronas.size(), 1u);
  ASSERT_EQ(plan.coronas[0].cluster_count, 7);
  const World world = place_nodes(plan, 6);

  // Whoever is elected, a sector of n nodes costs n - 1 members plus one head.
  double expected = 0.0;
  const double l = disk.data_rate_bits;
  for (const auto& sector : world.sectors[0]) {
    const double n = static_cast<double>(sector.size());
    if (n == 0.0) continue;
    expected += (n - 1.0) * (oracle::node_energy(disk, l, 0.0, l, 20.0, 0.0) + disk.mgmt_energy_J);
    expected += oracle::node_energy(disk, l, (n - 1.0) * l, disk.compression * n * l, 20.0, n * l) +
                disk.mgmt_energy_J;
  }
  const SimulationReport r = run(world, plan, SimConfig{20, 6, 1.0, DistanceMode::FixedPower});
  for (const auto& row : r.corona_energy_J) EXPECT_LE(oracle::rel_err(row[0], expected), 1e-12);
}

TEST(Simulate, LifetimeMatchesProvisioning) {
  // Batteries sized for the full horizon, scaled to 1000 rounds.
  const SimulationReport r = simulate(plan6(), 3000, 1, 0.01);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_NEAR(r.mean_lifetime[i], 1000.0, 30.0) << "corona " << i + 1;
  }
}

TEST(Simulate, EmptySectorsReportedOnce) {
  const SimulationReport r = simulate(plan6(), 400, 3, 0.001);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const EmptySectorEvent& e : r.empty_sectors) {
    EXPECT_TRUE(seen.insert({e.corona, e.sector}).second);
    EXPECT_GE(e.corona, 1u);
    EXPECT_LE(e.corona, 6u);
  }
}

TEST(Simulate, RejectsBadInputs) {
  EXPECT_THROW((SimConfig{10, 1, 0.0, DistanceMode::FixedPower}.validate()), Error);
  EXPECT_THROW((SimConfig{10, 1, 1.5, DistanceMode::FixedPower}.validate()), Error);
  World world = place_nodes(plan6(), 1);
  world.sectors.pop_back();
  try {
    run(world, plan6(), SimConfig{1, 1, 1.0, DistanceMode::FixedPower});
    ADD_FAILURE() << "expected InvalidArgument";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
  }
}

TEST(Simulate, SummaryNamesWorstCorona) {
  const SimulationReport r = simulate(plan6(), 20);
  const DeviationSummary d = compare_to_model(r, kSpec, plan6(), 1e-12);
  EXPECT_FALSE(d.pass);
  const std::string text = summary_text(r, d);
  EXPECT_NE(text.find("(corona " + std::to_string(d.worst_corona) + ","), std::string::npos) << text;
  EXPECT_NE(text.find("FAIL"), std::string::npos) << text;
}
