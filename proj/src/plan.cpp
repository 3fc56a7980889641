#include "corona/plan.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "corona/error.hpp"
#include "json_reader.hpp"

namespace corona {

using detail::Json;
using detail::ObjectReader;

CoronaLayout DeploymentPlan::layout() const {
  std::vector<double> widths;
  widths.reserve(coronas.size());
  for (const CoronaProvision& c : coronas) widths.push_back(c.width_m);
  return CoronaLayout(std::move(widths));
}

DeploymentPlan build_plan(const NetworkSpec& spec, const CostParams& cost, const Solution& solution) {
  spec.validate();
  cost.validate();
  if (!solution.converged) {
    throw Error(ErrorKind::NonConvergence, "refusing to build a plan from a non-converged solution");
  }
  const CoronaLayout& layout = solution.widths;
  check_layout(spec, layout, solution.variant);

  DeploymentPlan plan;
  plan.spec = spec;
  plan.cost = cost;
  plan.variant = solution.variant;
  plan.cpua_value = solution.cpua_value;

  for (std::size_t i = 1; i <= layout.size(); ++i) {
    const CoronaRates rates = model::corona_energy_rate(spec, layout, solution.variant, i);
    CoronaProvision p;
    p.index = i;
    p.inner_radius_m = layout.inner_radius(i);
    p.outer_radius_m = layout.outer_radius(i);
    p.width_m = layout.width(i);
    p.node_count = static_cast<std::int64_t>(std::floor(rates.node_count + 0.5));
    p.cluster_count = static_cast<std::int64_t>(std::ceil(rates.head_count));
    p.member_tx_distance_m = layout.width(i);
    p.head_tx_distance_m = model::head_tx_distance(layout, solution.variant, i);
    p.initial_energy_J = rates.provisioned_energy;
    p.head_fraction = rates.head_fraction;
    if (p.node_count < p.cluster_count) {
      throw Error(ErrorKind::InfeasibleProvision,
                  fmt::format("corona {} gets {} nodes but needs {} clusters", i, p.node_count,
                              p.cluster_count));
    }
    plan.coronas.push_back(p);
  }
  plan.total_cost = provisioned_cost(plan);
  return plan;
}

double provisioned_cost(const DeploymentPlan& plan) {
  double nodes = 0.0;
  double battery = 0.0;
  for (const CoronaProvision& c : plan.coronas) {
    nodes += static_cast<double>(c.node_count);
    battery += static_cast<double>(c.node_count) * c.initial_energy_J;
  }
  return plan.cost.hw_cost * nodes + plan.cost.energy_cost * battery + plan.cost.sink_cost;
}

// Key order below is the documented file layout.
std::string to_json(const DeploymentPlan& plan) {
  Json doc;
  doc["schema_version"] = plan.schema_version;
  doc["variant"] = std::string(to_string(plan.variant));

  const NetworkSpec& s = plan.spec;
  Json& net = doc["network"];
  net["radius_m"] = s.radius_m;
  net["density_per_m2"] = s.density_per_m2;
  net["data_rate_bit_per_min"] = s.data_rate_bits;
  net["compression"] = s.compression;
  net["lifetime_min"] = s.lifetime_min;
  net["mgmt_energy_J_per_min"] = s.mgmt_energy_J;
  net["tx_min_m"] = s.tx_min_m;
  net["tx_max_m"] = s.tx_max_m;
  net["e0_J_per_bit"] = s.e0_J_per_bit;
  net["e1_J_per_bit"] = s.e1_J_per_bit;
  net["e2_J_per_bit_m2"] = s.e2_J_per_bit_m2;
  net["e3_J_per_bit"] = s.e3_J_per_bit;

  Json& cost = doc["cost"];
  cost["hw_cost"] = plan.cost.hw_cost;
  cost["energy_cost_per_J"] = plan.cost.energy_cost;
  cost["sink_cost"] = plan.cost.sink_cost;

  doc["total_cost"] = plan.total_cost;
  doc["cpua"] = plan.cpua_value;

  Json& coronas = doc["coronas"] = Json::array();
  for (const CoronaProvision& c : plan.coronas) {
    Json row;
    row["index"] = c.index;
    row["inner_radius_m"] = c.inner_radius_m;
    row["outer_radius_m"] = c.outer_radius_m;
    row["width_m"] = c.width_m;
    row["node_count"] = c.node_count;
    row["cluster_count"] = c.cluster_count;
    row["member_tx_distance_m"] = c.member_tx_distance_m;
    row["head_tx_distance_m"] = c.head_tx_distance_m;
    row["initial_energy_J"] = c.initial_energy_J;
    row["head_fraction"] = c.head_fraction;
    coronas.push_back(std::move(row));
  }
  return doc.dump(2) + "\n";
}

namespace {

void check_corona(const CoronaProvision& c, std::size_t expected_index, double previous_outer,
                  const std::string& where) {
  if (c.index != expected_index) ObjectReader::fail(where + ".index", fmt::format("expected {}", expected_index));
  if (!(c.width_m > 0.0)) ObjectReader::fail(where + ".width_m", "must be > 0");
  const double tol = 1e-9 * std::max(1.0, c.outer_radius_m);
  if (std::abs(c.inner_radius_m - previous_outer) > tol) {
    ObjectReader::fail(where + ".inner_radius_m", "does not match the previous outer radius");
  }
  if (std::abs(c.outer_radius_m - c.inner_radius_m - c.width_m) > tol) {
    ObjectReader::fail(where + ".outer_radius_m", "inconsistent with inner_radius_m + width_m");
  }
  if (c.cluster_count < 1) ObjectReader::fail(where + ".cluster_count", "must be >= 1");
  if (c.node_count < c.cluster_count) ObjectReader::fail(where + ".node_count", "must be >= cluster_count");
  if (!(c.initial_energy_J > 0.0)) ObjectReader::fail(where + ".initial_energy_J", "must be > 0");
  if (!(c.head_fraction > 0.0 && c.head_fraction <= 1.0)) {
    ObjectReader::fail(where + ".head_fraction", "must lie in (0, 1]");
  }
}

}  // namespace

DeploymentPlan plan_from_json(std::string_view text) {
  const Json doc = detail::parse_json_text(text, "plan");
  ObjectReader root(doc, "$");

  DeploymentPlan plan;
  plan.schema_version = static_cast<int>(root.integer("schema_version"));
  if (plan.schema_version != DeploymentPlan::kSchemaVersion) {
    throw Error(ErrorKind::SchemaMismatch,
                fmt::format("plan schema_version {} is not the supported version {}", plan.schema_version,
                            DeploymentPlan::kSchemaVersion));
  }

  try {
    plan.variant = parse_variant(root.string("variant"));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InvalidArgument) throw;
    ObjectReader::fail(root.at("variant"), e.what());
  }

  {
    ObjectReader net = root.object("network");
    NetworkSpec& s = plan.spec;
    s.radius_m = net.number("radius_m");
    s.density_per_m2 = net.number("density_per_m2");
    s.data_rate_bits = net.number("data_rate_bit_per_min");
    s.compression = net.number("compression");
    s.lifetime_min = net.number("lifetime_min");
    s.mgmt_energy_J = net.number("mgmt_energy_J_per_min");
    s.tx_min_m = net.number("tx_min_m");
    s.tx_max_m = net.number("tx_max_m");
    s.e0_J_per_bit = net.number("e0_J_per_bit");
    s.e1_J_per_bit = net.number("e1_J_per_bit");
    s.e2_J_per_bit_m2 = net.number("e2_J_per_bit_m2");
    s.e3_J_per_bit = net.number("e3_J_per_bit");
    net.finish();
    try {
      s.validate();
    } catch (const Error& e) {
      ObjectReader::fail(net.path(), e.what());
    }
  }
  {
    ObjectReader cost = root.object("cost");
    plan.cost.hw_cost = cost.number("hw_cost");
    plan.cost.energy_cost = cost.number("energy_cost_per_J");
    plan.cost.sink_cost = cost.number("sink_cost");
    cost.finish();
    try {
      plan.cost.validate();
    } catch (const Error& e) {
      ObjectReader::fail(cost.path(), e.what());
    }
  }

  plan.total_cost = root.number("total_cost");
  plan.cpua_value = root.number("cpua");

  const Json& rows = root.array("coronas");
  if (rows.empty()) ObjectReader::fail(root.at("coronas"), "a plan needs at least one corona");
  double previous_outer = 0.0;
  for (std::size_t n = 0; n < rows.size(); ++n) {
    const std::string where = fmt::format("$.coronas[{}]", n);
    ObjectReader row(rows[n], where);
    CoronaProvision c;
    const std::int64_t index = row.integer("index");
    if (index < 1) ObjectReader::fail(where + ".index", "must be >= 1");
    c.index = static_cast<std::size_t>(index);
    c.inner_radius_m = row.number("inner_radius_m");
    c.outer_radius_m = row.number("outer_radius_m");
    c.width_m = row.number("width_m");
    c.node_count = row.integer("node_count");
    c.cluster_count = row.integer("cluster_count");
    c.member_tx_distance_m = row.number("member_tx_distance_m");
    c.head_tx_distance_m = row.number("head_tx_distance_m");
    c.initial_energy_J = row.number("initial_energy_J");
    c.head_fraction = row.number("head_fraction");
    row.finish();
    check_corona(c, n + 1, previous_outer, where);
    previous_outer = c.outer_radius_m;
    plan.coronas.push_back(c);
  }
  if (std::abs(previous_outer - plan.spec.radius_m) > 1e-9 * plan.spec.radius_m) {
    ObjectReader::fail("$.coronas", "outer radius of the last corona does not equal network.radius_m");
  }
  root.finish();
  return plan;
}

DeploymentPlan roundtrip(const DeploymentPlan& plan) { return plan_from_json(to_json(plan)); }

void write_plan(const DeploymentPlan& plan, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, fmt::format("cannot open {} for writing", path.string()));
  out << to_json(plan);
  if (!out) throw Error(ErrorKind::IoError, fmt::format("failed writing {}", path.string()));
}

DeploymentPlan read_plan(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, fmt::format("cannot open {}", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return plan_from_json(buf.str());
}

}  // namespace corona
