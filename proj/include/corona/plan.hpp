#pragma once

// Deployment plans: integer node and cluster counts per corona plus the
// battery energy each node is assembled with, and their JSON file format.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "corona/model.hpp"
#include "corona/optimizer.hpp"

namespace corona {

struct CoronaProvision {
  std::size_t index = 0;
  double inner_radius_m = 0.0;
  double outer_radius_m = 0.0;
  double width_m = 0.0;
  std::int64_t node_count = 0;
  std::int64_t cluster_count = 0;
  double member_tx_distance_m = 0.0;
  double head_tx_distance_m = 0.0;
  double initial_energy_J = 0.0;
  double head_fraction = 0.0;

  friend bool operator==(const CoronaProvision&, const CoronaProvision&) = default;
};

struct DeploymentPlan {
  static constexpr int kSchemaVersion = 1;

  int schema_version = kSchemaVersion;
  NetworkSpec spec;
  CostParams cost;
  Variant variant = Variant::Baseline;
  std::vector<CoronaProvision> coronas;
  double total_cost = 0.0;  // hardware + batteries on the integer counts + sink
  double cpua_value = 0.0;  // continuous-model CPUA of the solved layout

  CoronaLayout layout() const;

  friend bool operator==(const DeploymentPlan&, const DeploymentPlan&) = default;
};

// Throws Error(InfeasibleProvision) when a corona would hold fewer nodes than
// clusters.
DeploymentPlan build_plan(const NetworkSpec& spec, const CostParams& cost, const Solution& solution);

// a * sum(n_i) + b * sum(n_i * f_i) + c* over the plan's integer counts.
double provisioned_cost(const DeploymentPlan& plan);

std::string to_json(const DeploymentPlan& plan);

// Throws Error(SchemaMismatch) on a foreign schema_version and
// Error(ParseError) naming the offending location otherwise.
DeploymentPlan plan_from_json(std::string_view text);

DeploymentPlan roundtrip(const DeploymentPlan& plan);

void write_plan(const DeploymentPlan& plan, const std::filesystem::path& path);
DeploymentPlan read_plan(const std::filesystem::path& path);

}  // namespace corona
