#include "corona/config.hpp"

#include <fstream>
#include <sstream>

#include "corona/error.hpp"
#include "json_reader.hpp"

namespace corona {

using detail::Json;
using detail::ObjectReader;

namespace {
// Divide by exact powers of ten so converted values match SI literals bit for bit.
constexpr double kNanoPerUnit = 1e9;
constexpr double kPicoPerUnit = 1e12;
}  // namespace

TableFormat parse_table_format(std::string_view text) {
  if (text == "md") return TableFormat::Markdown;
  if (text == "csv") return TableFormat::Csv;
  throw Error(ErrorKind::InvalidArgument, fmt::format("unknown table format '{}' (expected md|csv)", text));
}

void RunConfig::validate() const {
  spec.validate();
  cost.validate();
  solver.validate();
}

RunConfig parse_run_config(std::string_view text) {
  const Json doc = detail::parse_json_text(text, "config");
  ObjectReader root(doc, "$");
  RunConfig cfg;

  {
    ObjectReader net = root.object("network");
    NetworkSpec& s = cfg.spec;
    s.radius_m = net.number("radius_m");
    s.density_per_m2 = net.number("density_per_m2");
    s.data_rate_bits = net.number("data_rate_bit_per_min");
    s.compression = net.number("compression");
    s.lifetime_min = net.number("lifetime_min");
    s.mgmt_energy_J = net.number("mgmt_energy_nJ_per_min") / kNanoPerUnit;
    s.tx_min_m = net.number("tx_min_m");
    s.tx_max_m = net.number("tx_max_m");
    s.e0_J_per_bit = net.number("e0_nJ_per_bit") / kNanoPerUnit;
    s.e1_J_per_bit = net.number("e1_nJ_per_bit") / kNanoPerUnit;
    s.e2_J_per_bit_m2 = net.number("e2_pJ_per_bit_m2") / kPicoPerUnit;
    s.e3_J_per_bit = net.number("e3_nJ_per_bit") / kNanoPerUnit;
    net.finish();
  }
  {
    ObjectReader cost = root.object("cost");
    cfg.cost.hw_cost = cost.number("hw_cost_per_sensor");
    cfg.cost.energy_cost = cost.number("energy_cost_per_J");
    cfg.cost.sink_cost = cost.number("sink_cost");
    cost.finish();
  }
  if (root.has("variant")) {
    const std::string v = root.string("variant");
    try {
      cfg.variant = parse_variant(v);
    } catch (const Error& e) {
      ObjectReader::fail(root.at("variant"), e.what());
    }
  }
  if (root.has("solver")) {
    ObjectReader solver = root.object("solver");
    auto count = [&](const char* key, std::size_t fallback) -> std::size_t {
      if (!solver.has(key)) return fallback;
      const std::int64_t v = solver.integer(key);
      if (v < 0) ObjectReader::fail(solver.at(key), "must be >= 0");
      return static_cast<std::size_t>(v);
    };
    cfg.solver.restarts = count("restarts", cfg.solver.restarts);
    cfg.solver.max_iterations = count("max_iterations", cfg.solver.max_iterations);
    cfg.solver.width_tolerance = solver.number_or("width_tolerance_m", cfg.solver.width_tolerance);
    cfg.solver.objective_tolerance =
        solver.number_or("objective_tolerance_J_per_min", cfg.solver.objective_tolerance);
    cfg.solver.seed = count("seed", cfg.solver.seed);
    solver.finish();
  }
  if (root.has("output")) {
    ObjectReader output = root.object("output");
    cfg.out_path = output.string_or("path", "");
    if (output.has("format")) {
      const std::string f = output.string("format");
      try {
        cfg.format = parse_table_format(f);
      } catch (const Error& e) {
        ObjectReader::fail(output.at("format"), e.what());
      }
    }
    output.finish();
  }
  root.finish();
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, fmt::format("cannot open config {}", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

std::string to_json(const RunConfig& config) {
  const NetworkSpec& s = config.spec;
  Json doc;
  Json& net = doc["network"];
  net["radius_m"] = s.radius_m;
  net["density_per_m2"] = s.density_per_m2;
  net["data_rate_bit_per_min"] = s.data_rate_bits;
  net["compression"] = s.compression;
  net["lifetime_min"] = s.lifetime_min;
  net["mgmt_energy_nJ_per_min"] = s.mgmt_energy_J * kNanoPerUnit;
  net["tx_min_m"] = s.tx_min_m;
  net["tx_max_m"] = s.tx_max_m;
  net["e0_nJ_per_bit"] = s.e0_J_per_bit * kNanoPerUnit;
  net["e1_nJ_per_bit"] = s.e1_J_per_bit * kNanoPerUnit;
  net["e2_pJ_per_bit_m2"] = s.e2_J_per_bit_m2 * kPicoPerUnit;
  net["e3_nJ_per_bit"] = s.e3_J_per_bit * kNanoPerUnit;
  Json& cost = doc["cost"];
  cost["hw_cost_per_sensor"] = config.cost.hw_cost;
  cost["energy_cost_per_J"] = config.cost.energy_cost;
  cost["sink_cost"] = config.cost.sink_cost;
  doc["variant"] = std::string(to_string(config.variant));
  Json& solver = doc["solver"];
  solver["restarts"] = config.solver.restarts;
  solver["max_iterations"] = config.solver.max_iterations;
  solver["width_tolerance_m"] = config.solver.width_tolerance;
  solver["objective_tolerance_J_per_min"] = config.solver.objective_tolerance;
  solver["seed"] = config.solver.seed;
  Json& output = doc["output"];
  if (!config.out_path.empty()) output["path"] = config.out_path;
  output["format"] = config.format == TableFormat::Csv ? "csv" : "md";
  return doc.dump(2) + "\n";
}

}  // namespace corona
