#include "corona/optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "corona/error.hpp"

namespace corona {

void SolverConfig::validate() const {
  if (restarts < 1) throw Error(ErrorKind::InvalidArgument, "solver restarts must be >= 1");
  if (max_iterations < 1) throw Error(ErrorKind::InvalidArgument, "solver max_iterations must be >= 1");
  if (!(width_tolerance > 0.0)) throw Error(ErrorKind::InvalidArgument, "width_tolerance must be > 0");
  if (!(objective_tolerance > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "objective_tolerance must be > 0");
  }
}

namespace detail {

using std::numbers::pi;

namespace {

std::size_t distance_source(Variant variant, std::size_t j) {
  return (variant == Variant::Improved && j > 0) ? j - 1 : j;
}

}  // namespace

// Per corona, with N = rho*pi*(r^2 - q^2) nodes and H = 2*pi*r/c heads:
//   E_i = l*[N*(A + e2 c^2 + m e2 d^2) - H*(2 e1 + e2 c^2)] + rho*pi*(R^2 - r^2)*m*l*(2 e1 + e2 d^2)
// with A = e0 + (2 + m) e1 + e3.
double energy_objective(const NetworkSpec& spec, std::span<const double> widths, Variant variant) {
  const double K = spec.density_per_m2 * pi;
  const double l = spec.data_rate_bits;
  const double m = spec.compression;
  const double e1 = spec.e1_J_per_bit;
  const double e2 = spec.e2_J_per_bit_m2;
  const double A = spec.e0_J_per_bit + (2.0 + m) * e1 + spec.e3_J_per_bit;
  const double R2 = spec.radius_m * spec.radius_m;

  double sum = 0.0;
  double q = 0.0;
  for (std::size_t j = 0; j < widths.size(); ++j) {
    const double c = widths[j];
    const double r = q + c;
    const double d = widths[distance_source(variant, j)];
    const double N = K * (r * r - q * q);
    const double H = 2.0 * pi * r / c;
    sum += l * (N * (A + e2 * c * c + m * e2 * d * d) - H * (2.0 * e1 + e2 * c * c)) +
           K * (R2 - r * r) * m * l * (2.0 * e1 + e2 * d * d);
    q = r;
  }
  return sum;
}

void energy_gradient(const NetworkSpec& spec, std::span<const double> widths, Variant variant,
                     std::span<double> grad) {
  const std::size_t k = widths.size();
  const double K = spec.density_per_m2 * pi;
  const double l = spec.data_rate_bits;
  const double m = spec.compression;
  const double e1 = spec.e1_J_per_bit;
  const double e2 = spec.e2_J_per_bit_m2;
  const double A = spec.e0_J_per_bit + (2.0 + m) * e1 + spec.e3_J_per_bit;
  const double R2 = spec.radius_m * spec.radius_m;

  // by_radius[j]: partial of the sum with respect to r_j, holding the
  // transmission distances fixed.
  std::vector<double> by_radius(k, 0.0);
  std::fill(grad.begin(), grad.end(), 0.0);

  double q = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double c = widths[j];
    const double r = q + c;
    const double d = widths[distance_source(variant, j)];
    const double N = K * (r * r - q * q);
    const double H = 2.0 * pi * r / c;
    const double B = A + e2 * c * c + m * e2 * d * d;
    const double D = 2.0 * e1 + e2 * c * c;
    const double G = 2.0 * e1 + e2 * d * d;

    const double dH_dr = 2.0 * pi / c - 2.0 * pi * r / (c * c);
    const double dH_dq = 2.0 * pi * r / (c * c);
    const double d_outer = l * (2.0 * K * r * B + N * 2.0 * e2 * c - dH_dr * D - H * 2.0 * e2 * c) -
                           2.0 * K * r * m * l * G;
    const double d_inner = l * (-2.0 * K * q * B - N * 2.0 * e2 * c - dH_dq * D + H * 2.0 * e2 * c);
    const double d_dist = l * N * 2.0 * m * e2 * d + K * (R2 - r * r) * m * l * 2.0 * e2 * d;

    by_radius[j] += d_outer;
    if (j > 0) by_radius[j - 1] += d_inner;
    grad[distance_source(variant, j)] += d_dist;
    q = r;
  }

  // r_i depends on every c_j with j <= i.
  double suffix = 0.0;
  for (std::size_t j = k; j-- > 0;) {
    suffix += by_radius[j];
    grad[j] += suffix;
  }
}

namespace {

// Pool-adjacent-violators fit of a non-increasing sequence.
std::vector<double> isotonic_nonincreasing(std::span<const double> y) {
  std::vector<double> level;
  std::vector<std::size_t> count;
  for (double v : y) {
    level.push_back(v);
    count.push_back(1);
    while (level.size() > 1 && level[level.size() - 2] < level.back()) {
      const std::size_t n = count.back() + count[count.size() - 2];
      const double mean =
          (level.back() * count.back() + level[level.size() - 2] * count[count.size() - 2]) / n;
      level.pop_back();
      count.pop_back();
      level.back() = mean;
      count.back() = n;
    }
  }
  std::vector<double> out;
  out.reserve(y.size());
  for (std::size_t b = 0; b < level.size(); ++b) out.insert(out.end(), count[b], level[b]);
  return out;
}

}  // namespace

std::vector<double> project_feasible(std::span<const double> y, double lo, double hi, double total,
                                     bool monotone) {
  const std::size_t k = y.size();
  std::vector<double> z = monotone ? isotonic_nonincreasing(y) : std::vector<double>(y.begin(), y.end());

  // sum_i clamp(z_i - lambda, lo, hi) is non-increasing and piecewise linear
  // in lambda with kinks at z_i - hi and z_i - lo.
  auto shifted_sum = [&](double lambda) {
    double s = 0.0;
    for (double v : z) s += std::clamp(v - lambda, lo, hi);
    return s;
  };
  std::vector<double> kinks;
  kinks.reserve(2 * k);
  for (double v : z) {
    kinks.push_back(v - hi);
    kinks.push_back(v - lo);
  }
  std::sort(kinks.begin(), kinks.end());

  double lambda = kinks.front();
  if (shifted_sum(kinks.front()) <= total) {
    lambda = kinks.front();
  } else if (shifted_sum(kinks.back()) >= total) {
    lambda = kinks.back();
  } else {
    // Find adjacent kinks bracketing the target, then solve the linear piece.
    std::size_t a = 0;
    std::size_t b = kinks.size() - 1;
    while (b - a > 1) {
      const std::size_t mid = (a + b) / 2;
      if (shifted_sum(kinks[mid]) >= total) a = mid; else b = mid;
    }
    const double sa = shifted_sum(kinks[a]);
    const double sb = shifted_sum(kinks[b]);
    lambda = sa == sb ? kinks[a] : kinks[a] + (sa - total) * (kinks[b] - kinks[a]) / (sa - sb);
  }

  std::vector<double> x(k);
  for (std::size_t i = 0; i < k; ++i) x[i] = std::clamp(z[i] - lambda, lo, hi);

  // Push the rounding residual onto a coordinate with room to absorb it.
  const double residual = total - std::accumulate(x.begin(), x.end(), 0.0);
  if (residual != 0.0) {
    for (std::size_t t = 0; t < k; ++t) {
      const std::size_t i = residual > 0.0 ? t : k - 1 - t;
      const double moved = std::clamp(x[i] + residual, lo, hi);
      const bool keeps_order = !monotone || ((i == 0 || moved <= x[i - 1]) && (i + 1 == k || moved >= x[i + 1]));
      if (moved == x[i] + residual && keeps_order) {
        x[i] = moved;
        break;
      }
    }
  }
  return x;
}

}  // namespace detail

namespace {

constexpr double kCountSlack = 1e-12;

bool single_point(const NetworkSpec& spec, std::size_t k) {
  const double R = spec.radius_m;
  const double kd = static_cast<double>(k);
  return std::abs(kd * spec.tx_min_m - R) <= kCountSlack * R ||
         std::abs(kd * spec.tx_max_m - R) <= kCountSlack * R;
}

void require_feasible_k(const NetworkSpec& spec, std::size_t k) {
  const CoronaRange range = feasible_corona_counts(spec);
  if (!range.contains(k)) {
    throw Error(ErrorKind::Infeasible, fmt::format("k = {} outside feasible corona counts [{}, {}]", k,
                                                   range.min_k, range.max_k));
  }
}

Solution make_solution(const NetworkSpec& spec, const CostParams& cost, std::vector<double> widths,
                       Variant variant, bool converged, std::size_t evaluations) {
  CoronaLayout layout(std::move(widths));
  const double energy = model::total_energy_rate(spec, layout, variant);
  for (std::size_t i = 1; i <= layout.size(); ++i) model::head_fraction(spec, layout, i);
  const std::size_t k = layout.size();
  return Solution{k, std::move(layout), energy, model::cpua_from_energy(spec, cost, energy), variant,
                  converged, evaluations};
}

// Radical-inverse sequence in the first k prime bases.
double radical_inverse(std::uint64_t index, std::uint64_t base) {
  double result = 0.0;
  double f = 1.0 / static_cast<double>(base);
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= static_cast<double>(base);
  }
  return result;
}

constexpr std::array<std::uint64_t, 16> kPrimes = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

struct Descent {
  std::vector<double> x;
  double f = 0.0;
  bool converged = false;
  std::size_t evaluations = 0;
};

double inf_norm(std::span<const double> v) {
  double n = 0.0;
  for (double x : v) n = std::max(n, std::abs(x));
  return n;
}

// Spectral projected gradient with a non-monotone Armijo line search.
Descent descend(const NetworkSpec& spec, Variant variant, std::vector<double> start,
                const SolverConfig& cfg) {
  const std::size_t k = start.size();
  const double lo = spec.tx_min_m;
  const double hi = spec.tx_max_m;
  const double R = spec.radius_m;
  const bool monotone = variant == Variant::Improved;
  constexpr std::size_t kMemory = 10;
  constexpr double kArmijo = 1e-4;

  Descent out;
  auto objective = [&](std::span<const double> w) {
    ++out.evaluations;
    return detail::energy_objective(spec, w, variant);
  };
  auto project = [&](std::span<const double> y) { return detail::project_feasible(y, lo, hi, R, monotone); };

  std::vector<double> x = project(start);
  double f = objective(x);
  std::vector<double> g(k);
  detail::energy_gradient(spec, x, variant, g);

  // Length scale turning a gradient into a displacement in meters.
  const double typical = R / static_cast<double>(k);
  const double g0 = std::max(inf_norm(g), std::numeric_limits<double>::min());
  const double scale = typical / g0;
  const double alpha_min = 1e-12 * scale;
  const double alpha_max = 1e6 * scale;
  double alpha = 0.1 * scale;

  std::deque<double> history{f};
  std::vector<double> trial(k), step(k), xn(k), gn(k);

  for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
    for (std::size_t i = 0; i < k; ++i) trial[i] = x[i] - scale * g[i];
    const std::vector<double> pg = project(trial);
    double stationarity = 0.0;
    for (std::size_t i = 0; i < k; ++i) stationarity = std::max(stationarity, std::abs(pg[i] - x[i]));
    if (stationarity <= cfg.width_tolerance) {
      out.converged = true;
      break;
    }

    for (std::size_t i = 0; i < k; ++i) trial[i] = x[i] - alpha * g[i];
    const std::vector<double> target = project(trial);
    double slope = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      step[i] = target[i] - x[i];
      slope += g[i] * step[i];
    }

    const double reference = *std::max_element(history.begin(), history.end());
    double t = 1.0;
    double fn = 0.0;
    bool accepted = false;
    for (int backtrack = 0; backtrack < 60; ++backtrack) {
      for (std::size_t i = 0; i < k; ++i) xn[i] = x[i] + t * step[i];
      fn = objective(xn);
      if (fn <= reference + kArmijo * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;

    detail::energy_gradient(spec, xn, variant, gn);
    double ss = 0.0;
    double sy = 0.0;
    double moved = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double s = xn[i] - x[i];
      const double y = gn[i] - g[i];
      ss += s * s;
      sy += s * y;
      moved = std::max(moved, std::abs(s));
    }
    alpha = sy > 0.0 ? std::clamp(ss / sy, alpha_min, alpha_max) : alpha_max;

    const double change = std::abs(fn - f);
    x.swap(xn);
    g.swap(gn);
    f = fn;
    history.push_back(f);
    if (history.size() > kMemory) history.pop_front();

    if (moved <= cfg.width_tolerance && change <= cfg.objective_tolerance) {
      out.converged = true;
      break;
    }
  }

  out.x = project(x);
  out.f = objective(out.x);
  return out;
}

}  // namespace

CoronaRange feasible_corona_counts(const NetworkSpec& spec) {
  spec.validate();
  const double R = spec.radius_m;
  const auto lo = static_cast<std::size_t>(std::ceil(R / spec.tx_max_m - kCountSlack));
  const auto hi = static_cast<std::size_t>(std::floor(R / spec.tx_min_m + kCountSlack));
  const std::size_t min_k = std::max<std::size_t>(lo, 1);
  if (min_k > hi) {
    throw Error(ErrorKind::Infeasible,
                fmt::format("no corona count fits R = {} with widths in [{}, {}] (ceil(R/d2) = {} > floor(R/d1) = {})",
                            R, spec.tx_min_m, spec.tx_max_m, lo, hi));
  }
  return CoronaRange{min_k, hi};
}

Solution optimize_widths(const NetworkSpec& spec, const CostParams& cost, std::size_t k,
                         Variant variant, const SolverConfig& cfg) {
  cost.validate();
  cfg.validate();
  require_feasible_k(spec, k);

  const double lo = spec.tx_min_m;
  const double hi = spec.tx_max_m;
  const double R = spec.radius_m;

  if (single_point(spec, k)) {
    const double w = std::abs(static_cast<double>(k) * lo - R) <= kCountSlack * R ? lo : hi;
    std::vector<double> widths(k, w);
    widths.back() = R - w * static_cast<double>(k - 1);
    return make_solution(spec, cost, std::move(widths), variant, true, 0);
  }

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> shift(k);
  for (double& s : shift) s = unit(rng);

  Descent best;
  bool have_best = false;
  std::size_t evaluations = 0;
  for (std::size_t restart = 0; restart < cfg.restarts; ++restart) {
    std::vector<double> start(k, R / static_cast<double>(k));
    if (restart > 0) {
      for (std::size_t i = 0; i < k; ++i) {
        const std::uint64_t base = kPrimes[i % kPrimes.size()];
        const double u = std::fmod(radical_inverse(restart, base) + shift[i], 1.0);
        start[i] = lo + u * (hi - lo);
      }
    }
    Descent run = descend(spec, variant, std::move(start), cfg);
    evaluations += run.evaluations;
    if (!have_best || run.f < best.f) {
      best = std::move(run);
      have_best = true;
    }
  }
  return make_solution(spec, cost, std::move(best.x), variant, best.converged, evaluations);
}

SweepResult sweep(const NetworkSpec& spec, const CostParams& cost, Variant variant,
                  const SolverConfig& cfg) {
  const CoronaRange range = feasible_corona_counts(spec);
  SweepResult result;
  for (std::size_t k = range.min_k; k <= range.max_k; ++k) {
    result.per_k.push_back(optimize_widths(spec, cost, k, variant, cfg));
    if (result.per_k.back().cpua_value < result.per_k[result.best].cpua_value) {
      result.best = result.per_k.size() - 1;
    }
  }
  return result;
}

Solution grid_oracle(const NetworkSpec& spec, const CostParams& cost, std::size_t k, Variant variant,
                     double step, std::size_t max_evaluations) {
  cost.validate();
  if (!(step > 0.0)) throw Error(ErrorKind::InvalidArgument, "grid step must be > 0");
  require_feasible_k(spec, k);

  const double lo = spec.tx_min_m;
  const double hi = spec.tx_max_m;
  const double R = spec.radius_m;
  const double tol = 1e-9 * R;
  const auto per_axis = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;

  double candidates = 1.0;
  for (std::size_t j = 1; j < k; ++j) candidates *= static_cast<double>(per_axis);
  if (candidates > static_cast<double>(max_evaluations)) {
    throw Error(ErrorKind::GridTooLarge,
                fmt::format("grid of {:.3g} candidates exceeds budget {}", candidates, max_evaluations));
  }

  std::vector<double> widths(k);
  std::vector<double> best_widths;
  double best_energy = std::numeric_limits<double>::infinity();
  std::size_t evaluations = 0;

  auto consider = [&] {
    const double prefix = std::accumulate(widths.begin(), widths.end() - 1, 0.0);
    double last = R - prefix;
    if (last < lo - tol || last > hi + tol) return;
    last = std::clamp(last, lo, hi);
    if (variant == Variant::Improved && k > 1 && last > widths[k - 2]) return;
    widths.back() = last;
    ++evaluations;
    const double energy = model::total_energy_rate(spec, CoronaLayout(widths), variant);
    if (energy < best_energy) {
      best_energy = energy;
      best_widths = widths;
    }
  };

  // Depth-first over the first k-1 widths, pruning prefixes that cannot close.
  auto recurse = [&](auto&& self, std::size_t j, double used) -> void {
    if (j + 1 == k) {
      consider();
      return;
    }
    const double remaining_slots = static_cast<double>(k - j - 1);
    for (std::size_t n = 0; n < per_axis; ++n) {
      const double c = lo + static_cast<double>(n) * step;
      if (variant == Variant::Improved && j > 0 && c > widths[j - 1]) break;
      const double rest = R - used - c;
      if (rest > remaining_slots * hi + tol) continue;
      if (rest < remaining_slots * lo - tol) break;
      widths[j] = c;
      self(self, j + 1, used + c);
    }
  };
  recurse(recurse, 0, 0.0);

  if (best_widths.empty()) {
    throw Error(ErrorKind::Infeasible, fmt::format("no grid point with step {} is feasible for k = {}", step, k));
  }
  return make_solution(spec, cost, std::move(best_widths), variant, true, evaluations);
}

Gradient objective_gradient(const NetworkSpec& spec, const CoronaLayout& layout, Variant variant) {
  Gradient out;
  out.values.resize(layout.size());
  detail::energy_gradient(spec, layout.widths(), variant, out.values);
  const double eps = 1e-12 * spec.tx_max_m;
  for (double c : layout.widths()) {
    if (std::abs(c - spec.tx_min_m) <= eps || std::abs(c - spec.tx_max_m) <= eps) out.at_boundary = true;
  }
  return out;
}

}  // namespace corona
