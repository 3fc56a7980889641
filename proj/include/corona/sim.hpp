#pragma once

// Round-based Monte-Carlo harness: nodes are thrown uniformly on each corona,
// every corona is split into equal angular sectors (one cluster each), heads
// rotate at random, and aggregated data is relayed inward head to head.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "corona/plan.hpp"

namespace corona {

enum class DistanceMode {
  FixedPower,  // members transmit over c_i, heads over the plan's head distance
  Geometric,   // actual Euclidean distances to the head / next hop
};

struct SimConfig {
  std::size_t rounds = 0;        // one round = one minute
  std::uint64_t seed = 1;
  double lifetime_scale = 1.0;   // scales initial energy, hence the target lifetime
  DistanceMode distance_mode = DistanceMode::FixedPower;

  void validate() const;
};

struct SimNode {
  std::size_t corona = 0;  // 1-based
  std::size_t sector = 0;  // 0-based within the corona
  double radius_m = 0.0;
  double angle_rad = 0.0;
  double residual_J = 0.0;
  bool alive = true;
};

struct World {
  std::vector<SimNode> nodes;
  // sectors[i][s] lists node ids of sector s in corona i + 1.
  std::vector<std::vector<std::vector<std::size_t>>> sectors;
};

World place_nodes(const DeploymentPlan& plan, std::uint64_t seed);

struct EmptySectorEvent {
  std::size_t round = 0;
  std::size_t corona = 0;
  std::size_t sector = 0;
};

struct SimulationReport {
  std::size_t coronas = 0;
  std::size_t rounds_run = 0;
  // Indexed [round][corona - 1].
  std::vector<std::vector<double>> corona_energy_J;
  std::vector<std::vector<std::size_t>> alive_count;   // after the round
  std::vector<std::vector<double>> relay_bits_in;      // bits entering the corona from outside
  std::vector<double> node_energy_drawn_J;
  // Rounds a node paid in full before failing; empty when still alive.
  std::vector<std::optional<std::size_t>> node_lifetime;
  std::optional<std::size_t> first_death_round;
  // Censored nodes count as rounds_run.
  std::vector<double> mean_lifetime;
  std::vector<double> min_lifetime;
  std::vector<double> mean_round_energy_J;
  std::vector<double> model_round_energy_J;  // E_i + N_i * E*
  std::vector<double> analytic_deviation;    // relative
  std::vector<EmptySectorEvent> empty_sectors;  // first round each sector empties
  double dropped_bits = 0.0;
};

// Consumes the world. Initial energies are multiplied by cfg.lifetime_scale.
SimulationReport run(World world, const DeploymentPlan& plan, const SimConfig& cfg);

struct DeviationSummary {
  std::vector<double> per_corona;
  std::size_t worst_corona = 0;  // 1-based, 0 when no coronas
  double worst = 0.0;
  double bound = 0.0;
  bool pass = true;
};

DeviationSummary compare_to_model(const SimulationReport& report, const NetworkSpec& spec,
                                  const DeploymentPlan& plan, double bound = 0.03);

// round,corona,energy_J,alive_count
void write_trace_csv(const SimulationReport& report, std::ostream& out);
std::string summary_text(const SimulationReport& report, const DeviationSummary& deviation);

}  // namespace corona
