#pragma once

#include <string>

#include "corona/config.hpp"
#include "corona/optimizer.hpp"

namespace corona {

// One column per corona count: total energy (J/min, and again in units of
// 1e-5 J/min), CPUA to 7 decimals, widths h1..hK to 0.1 m.
std::string render_sweep_table(const SweepResult& result, TableFormat format);

}  // namespace corona
