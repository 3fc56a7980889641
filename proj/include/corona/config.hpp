#pragma once

// Run configuration files. Keys carry their units (nJ, pJ, m, min) and are
// converted to SI on load.

#include <filesystem>
#include <string>
#include <string_view>

#include "corona/model.hpp"
#include "corona/optimizer.hpp"

namespace corona {

enum class TableFormat { Markdown, Csv };

TableFormat parse_table_format(std::string_view text);

struct RunConfig {
  NetworkSpec spec = NetworkSpec::reference();
  CostParams cost = CostParams::reference();
  Variant variant = Variant::Baseline;
  SolverConfig solver;
  std::string out_path;  // empty: command default
  TableFormat format = TableFormat::Markdown;

  void validate() const;
};

// Parses and validates. Unknown keys are rejected with their location;
// violated invariants surface as Error(InvalidArgument).
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path& path);

// Serializes in the same unit-bearing layout parse_run_config accepts.
std::string to_json(const RunConfig& config);

}  // namespace corona
