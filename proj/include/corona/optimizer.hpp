#pragma once

// Width optimization over the feasible set
//   d1 <= c_i <= d2,  sum(c_i) = R,  and c_i <= c_{i-1} for the improved variant,
// solved per corona count k and swept over every feasible k.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "corona/model.hpp"

namespace corona {

struct SolverConfig {
  std::size_t restarts = 8;
  std::size_t max_iterations = 5000;
  double width_tolerance = 1e-7;       // m
  double objective_tolerance = 1e-15;  // J per minute
  std::uint64_t seed = 1;

  void validate() const;
};

struct Solution {
  std::size_t k = 0;
  CoronaLayout widths;
  double total_energy = 0.0;  // J per minute
  double cpua_value = 0.0;
  Variant variant = Variant::Baseline;
  bool converged = false;
  std::size_t evaluations = 0;
};

struct SweepResult {
  std::vector<Solution> per_k;
  std::size_t best = 0;

  const Solution& best_solution() const { return per_k.at(best); }
};

struct CoronaRange {
  std::size_t min_k = 0;
  std::size_t max_k = 0;

  bool contains(std::size_t k) const { return k >= min_k && k <= max_k; }
};

struct Gradient {
  std::vector<double> values;  // d(sum E_i)/d(c_j), j = 1..k
  bool at_boundary = false;    // some c_j sits on d1 or d2
};

// Throws Error(Infeasible) when no k satisfies k*d1 <= R <= k*d2.
CoronaRange feasible_corona_counts(const NetworkSpec& spec);

// Multi-start spectral projected gradient. A solve that exhausts its
// iteration budget is returned with converged = false.
Solution optimize_widths(const NetworkSpec& spec, const CostParams& cost, std::size_t k,
                         Variant variant, const SolverConfig& cfg);

SweepResult sweep(const NetworkSpec& spec, const CostParams& cost, Variant variant,
                  const SolverConfig& cfg);

// Exhaustive search over widths d1 + j*step with the last width closing the
// disk. Throws Error(GridTooLarge) when the candidate count exceeds the budget.
Solution grid_oracle(const NetworkSpec& spec, const CostParams& cost, std::size_t k, Variant variant,
                     double step, std::size_t max_evaluations = 50'000'000);

Gradient objective_gradient(const NetworkSpec& spec, const CoronaLayout& layout, Variant variant);

namespace detail {

// Total energy rate as a smooth function of unconstrained widths (the outer
// radius is not forced to R). Agrees with model::total_energy_rate on
// feasible layouts.
double energy_objective(const NetworkSpec& spec, std::span<const double> widths, Variant variant);

// Gradient of energy_objective; writes k partials into grad.
void energy_gradient(const NetworkSpec& spec, std::span<const double> widths, Variant variant,
                     std::span<double> grad);

// Euclidean projection onto {lo <= x_i <= hi, sum x = total}, intersected with
// the non-increasing cone when monotone is set.
std::vector<double> project_feasible(std::span<const double> y, double lo, double hi, double total,
                                     bool monotone);

}  // namespace detail
}  // namespace corona
