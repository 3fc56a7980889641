#include "corona/table.hpp"

#include <algorithm>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace corona {

namespace {

std::string join_row(const std::vector<std::string>& cells, TableFormat format) {
  if (format == TableFormat::Csv) return fmt::format("{}\n", fmt::join(cells, ","));
  return fmt::format("| {} |\n", fmt::join(cells, " | "));
}

}  // namespace

std::string render_sweep_table(const SweepResult& result, TableFormat format) {
  std::size_t max_k = 0;
  for (const Solution& s : result.per_k) max_k = std::max(max_k, s.k);

  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{format == TableFormat::Csv ? "quantity" : ""};
  for (const Solution& s : result.per_k) header.push_back(fmt::format("k={}", s.k));
  rows.push_back(header);

  std::vector<std::string> energy{"Total energy (J/min)"};
  std::vector<std::string> scaled{"Total energy (1e-5 J/min; inferred scale)"};
  std::vector<std::string> cpua{"CPUA"};
  for (const Solution& s : result.per_k) {
    energy.push_back(fmt::format("{:.8f}", s.total_energy));
    scaled.push_back(fmt::format("{:.2f}", s.total_energy * 1e5));
    cpua.push_back(fmt::format("{:.7f}", s.cpua_value));
  }
  rows.push_back(energy);
  rows.push_back(scaled);
  rows.push_back(cpua);
  for (std::size_t j = 1; j <= max_k; ++j) {
    std::vector<std::string> row{fmt::format("h{}", j)};
    for (const Solution& s : result.per_k) {
      row.push_back(j <= s.k ? fmt::format("{:.1f}", s.widths.width(j)) : std::string());
    }
    rows.push_back(row);
  }

  std::string out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out += join_row(rows[r], format);
    if (r == 0 && format == TableFormat::Markdown) {
      std::vector<std::string> rule{"---"};
      rule.resize(rows[0].size(), "---:");
      out += join_row(rule, format);
    }
  }
  if (format == TableFormat::Markdown && !result.per_k.empty()) {
    const Solution& best = result.best_solution();
    out += fmt::format("\nBest: k={} (CPUA {:.7f})\n", best.k, best.cpua_value);
  }
  return out;
}

}  // namespace corona
