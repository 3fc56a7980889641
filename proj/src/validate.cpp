#include "corona/validate.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "corona/error.hpp"
#include "corona/model.hpp"
#include "corona/optimizer.hpp"

namespace corona {

namespace {

constexpr std::size_t kIdentitySamples = 200;
constexpr std::size_t kGradientSamples = 50;
constexpr double kIdentityTolerance = 1e-12;
constexpr double kGradientTolerance = 1e-5;
constexpr double kFiniteStep = 1e-4;

double rel_err(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

class LayoutSampler {
 public:
  LayoutSampler(const NetworkSpec& spec, CoronaRange range, std::uint64_t seed)
      : spec_(spec), range_(range), rng_(seed) {}

  // Random feasible layout; `margin` keeps every width that far inside the box.
  std::vector<double> draw(Variant variant, double margin = 0.0) {
    std::uniform_int_distribution<std::size_t> pick_k(range_.min_k, range_.max_k);
    const double lo = spec_.tx_min_m + margin;
    const double hi = spec_.tx_max_m - margin;
    std::uniform_real_distribution<double> width(lo, hi);
    for (;;) {
      const std::size_t k = pick_k(rng_);
      const double kd = static_cast<double>(k);
      if (kd * lo > spec_.radius_m || kd * hi < spec_.radius_m) continue;
      std::vector<double> y(k);
      for (double& v : y) v = width(rng_);
      return detail::project_feasible(y, lo, hi, spec_.radius_m, variant == Variant::Improved);
    }
  }

 private:
  const NetworkSpec& spec_;
  CoronaRange range_;
  std::mt19937_64 rng_;
};

PropertyResult check_feasibility(const NetworkSpec& spec, CoronaRange range) {
  for (std::size_t k = range.min_k; k <= range.max_k; ++k) {
    const CoronaLayout layout(std::vector<double>(k, spec.radius_m / static_cast<double>(k)));
    try {
      for (std::size_t i = 1; i <= k; ++i) model::head_fraction(spec, layout, i);
    } catch (const Error& e) {
      return {"model_feasibility", CheckStatus::Fail, fmt::format("k={}: {}", k, e.what())};
    }
  }
  return {"model_feasibility", CheckStatus::Pass, fmt::format("k={}..{}", range.min_k, range.max_k)};
}

PropertyResult check_decomposition(const NetworkSpec& spec, LayoutSampler& sampler) {
  double worst = 0.0;
  std::size_t checked = 0;
  std::size_t skipped = 0;
  for (Variant v : {Variant::Baseline, Variant::Improved}) {
    for (std::size_t n = 0; n < kIdentitySamples; ++n) {
      const CoronaLayout layout(sampler.draw(v));
      try {
        for (std::size_t i = 1; i <= layout.size(); ++i) {
          const double N = model::node_count(spec, layout, i);
          const double p = model::head_fraction(spec, layout, i);
          const double split = N * p * model::ch_energy_rate(spec, layout, v, i) +
                               N * (1.0 - p) * model::member_energy_rate(spec, layout, i);
          worst = std::max(worst, rel_err(model::intra_energy_rate(spec, layout, v, i), split));
          ++checked;
        }
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::ModelInfeasible) throw;
        ++skipped;
      }
    }
  }
  return {"decomposition_identity", worst <= kIdentityTolerance ? CheckStatus::Pass : CheckStatus::Fail,
          fmt::format("max_rel_err={:.3e} coronas={} skipped_layouts={}", worst, checked, skipped)};
}

PropertyResult check_cost_identity(const NetworkSpec& spec, const CostParams& cost, LayoutSampler& sampler) {
  double worst = 0.0;
  for (Variant v : {Variant::Baseline, Variant::Improved}) {
    for (std::size_t n = 0; n < kIdentitySamples; ++n) {
      const CoronaLayout layout(sampler.draw(v));
      try {
        worst = std::max(worst, rel_err(model::total_cost(spec, cost, layout, v) / model::area(spec),
                                        model::cpua(spec, cost, layout, v)));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::ModelInfeasible) throw;
      }
    }
  }
  return {"cost_cpua_identity", worst <= kIdentityTolerance ? CheckStatus::Pass : CheckStatus::Fail,
          fmt::format("max_rel_err={:.3e}", worst)};
}

PropertyResult check_outer_inter(const NetworkSpec& spec, LayoutSampler& sampler) {
  for (Variant v : {Variant::Baseline, Variant::Improved}) {
    for (std::size_t n = 0; n < kIdentitySamples; ++n) {
      const CoronaLayout layout(sampler.draw(v));
      const double e = model::inter_energy_rate(spec, layout, v, layout.size());
      if (e != 0.0) return {"outer_inter_zero", CheckStatus::Fail, fmt::format("E_inter(k)={}", e)};
    }
  }
  return {"outer_inter_zero", CheckStatus::Pass, ""};
}

PropertyResult check_gradient(const NetworkSpec& spec, LayoutSampler& sampler) {
  const double margin = 0.05 * (spec.tx_max_m - spec.tx_min_m);
  double worst = 0.0;
  std::size_t points = 0;
  for (Variant v : {Variant::Baseline, Variant::Improved}) {
    for (std::size_t n = 0; n < kGradientSamples; ++n) {
      std::vector<double> w = sampler.draw(v, margin);
      const Gradient g = objective_gradient(spec, CoronaLayout(w), v);
      for (std::size_t j = 0; j < w.size(); ++j) {
        const double keep = w[j];
        w[j] = keep + kFiniteStep;
        const double up = detail::energy_objective(spec, w, v);
        w[j] = keep - kFiniteStep;
        const double down = detail::energy_objective(spec, w, v);
        w[j] = keep;
        worst = std::max(worst, rel_err(g.values[j], (up - down) / (2.0 * kFiniteStep)));
      }
      ++points;
    }
  }
  return {"gradient_check", worst <= kGradientTolerance ? CheckStatus::Pass : CheckStatus::Fail,
          fmt::format("max_rel_err={:.3e} points={} h={}", worst, points, kFiniteStep)};
}

PropertyResult check_grid(const NetworkSpec& spec, const CostParams& cost, const SolverConfig& solver,
                          Variant variant, CoronaRange range) {
  const std::size_t k = range.min_k;
  if (k > 4) return {"solver_vs_grid", CheckStatus::Skip, fmt::format("smallest k={} too large for a grid", k)};
  const double step = (spec.tx_max_m - spec.tx_min_m) / 200.0;
  if (!(step > 0.0)) return {"solver_vs_grid", CheckStatus::Skip, "d1 == d2 leaves nothing to search"};
  const Solution grid = grid_oracle(spec, cost, k, variant, step);
  const Solution local = optimize_widths(spec, cost, k, variant, solver);
  // Objective change when stepping to any neighbouring grid point.
  std::vector<double> w(grid.widths.widths().begin(), grid.widths.widths().end());
  const double centre = detail::energy_objective(spec, w, variant);
  double cell = 0.0;
  for (std::size_t j = 0; j + 1 < w.size(); ++j) {
    for (double sign : {-1.0, 1.0}) {
      std::vector<double> nb = w;
      nb[j] += sign * step;
      nb.back() -= sign * step;
      cell = std::max(cell, std::abs(detail::energy_objective(spec, nb, variant) - centre));
    }
  }
  const double tolerance = 1e-12 * grid.total_energy;
  const bool ok = local.total_energy <= grid.total_energy + tolerance &&
                  grid.total_energy - local.total_energy <= cell + tolerance;
  return {"solver_vs_grid", ok ? CheckStatus::Pass : CheckStatus::Fail,
          fmt::format("k={} step={:.3g} solver={:.10g} grid={:.10g} cell={:.3e}", k, step, local.total_energy,
                      grid.total_energy, cell)};
}

PropertyResult check_sweep(const NetworkSpec& spec, const CostParams& cost, const SolverConfig& solver,
                           Variant variant) {
  const SweepResult result = sweep(spec, cost, variant, solver);
  for (const Solution& s : result.per_k) {
    if (!s.converged) return {"sweep_converged", CheckStatus::Fail, fmt::format("k={} did not converge", s.k)};
  }
  return {"sweep_converged", CheckStatus::Pass, fmt::format("best k={} cpua={:.7f}", result.best_solution().k,
                                                            result.best_solution().cpua_value)};
}

}  // namespace

std::vector<PropertyResult> run_property_suites(const RunConfig& config) {
  const NetworkSpec& spec = config.spec;
  std::vector<PropertyResult> out;

  CoronaRange range;
  try {
    range = feasible_corona_counts(spec);
    out.push_back({"corona_counts", CheckStatus::Pass, fmt::format("k={}..{}", range.min_k, range.max_k)});
  } catch (const Error& e) {
    out.push_back({"corona_counts", CheckStatus::Fail, e.what()});
    return out;
  }

  out.push_back(check_feasibility(spec, range));
  if (out.back().status == CheckStatus::Fail) return out;

  LayoutSampler sampler(spec, range, config.solver.seed);
  out.push_back(check_decomposition(spec, sampler));
  out.push_back(check_cost_identity(spec, config.cost, sampler));
  out.push_back(check_outer_inter(spec, sampler));
  out.push_back(check_gradient(spec, sampler));
  try {
    out.push_back(check_grid(spec, config.cost, config.solver, config.variant, range));
    out.push_back(check_sweep(spec, config.cost, config.solver, config.variant));
  } catch (const Error& e) {
    out.push_back({"solver", CheckStatus::Fail, e.what()});
  }
  return out;
}

}  // namespace corona
