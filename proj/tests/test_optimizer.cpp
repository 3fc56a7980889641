#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "corona/error.hpp"
#include "corona/model.hpp"
#include "corona/optimizer.hpp"
#include "oracles.hpp"

using namespace corona;

namespace {

const NetworkSpec kSpec = NetworkSpec::reference();
const CostParams kCost = CostParams::reference();
const SolverConfig kSolver{};

// Small spec whose k=2 grid is cheap: one free width in [20, 30].
NetworkSpec toy_spec() {
  NetworkSpec s = kSpec;
  s.radius_m = 50.0;
  s.tx_min_m = 20.0;
  s.tx_max_m = 30.0;
  return s;
}

std::vector<double> widths_of(const Solution& s) { return {s.widths.widths().begin(), s.widths.widths().end()}; }

void expect_feasible(const NetworkSpec& spec, const Solution& s, bool monotone) {
  const std::vector<double> w = widths_of(s);
  EXPECT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), spec.radius_m, 1e-9 * spec.radius_m);
  for (std::size_t i = 0; i < w.size(); ++i) {
    EXPECT_GE(w[i], spec.tx_min_m - 1e-9);
    EXPECT_LE(w[i], spec.tx_max_m + 1e-9);
    if (monotone && i > 0) EXPECT_LE(w[i], w[i - 1] + 1e-9);
  }
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected corona::Error";
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(FeasibleCoronaCounts, Examples) {
  const CoronaRange r = feasible_corona_counts(kSpec);
  EXPECT_EQ(r.min_k, 3u);
  EXPECT_EQ(r.max_k, 10u);

  NetworkSpec two = kSpec;
  two.radius_m = 100.0;
  two.tx_min_m = 40.0;
  two.tx_max_m = 60.0;
  const CoronaRange r2 = feasible_corona_counts(two);
  EXPECT_EQ(r2.min_k, 2u);
  EXPECT_EQ(r2.max_k, 2u);

  NetworkSpec none = kSpec;
  none.radius_m = 100.0;
  none.tx_min_m = 35.0;
  none.tx_max_m = 45.0;
  EXPECT_EQ(kind_of([&] { feasible_corona_counts(none); }), ErrorKind::Infeasible);
}

TEST(OptimizeWidths, TightestCountIsForced) {
  for (Variant v : {Variant::Baseline, Variant::Improved}) {
    const Solution s = optimize_widths(kSpec, kCost, 10, v, kSolver);
    EXPECT_TRUE(s.converged);
    for (double w : s.widths.widths()) EXPECT_NEAR(w, 20.0, 1e-9);
    EXPECT_NEAR(s.cpua_value, 0.6771291, 1e-3);
  }
}

TEST(OptimizeWidths, BaselineSixCoronas) {
  const Solution s = optimize_widths(kSpec, kCost, 6, Variant::Baseline, kSolver);
  ASSERT_TRUE(s.converged);
  const std::vector<double> target{58.5, 42.3, 33.9, 25.3, 20.0, 20.0};
  for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(widths_of(s)[i], target[i], 2.0) << "corona " << i + 1;
  EXPECT_NEAR(s.cpua_value, 0.6448367, 1e-3);
  expect_feasible(kSpec, s, false);
}

TEST(OptimizeWidths, ImprovedSixCoronas) {
  const Solution s = optimize_widths(kSpec, kCost, 6, Variant::Improved, kSolver);
  ASSERT_TRUE(s.converged);
  const std::vector<double> expected{49.7, 46.0, 36.5, 27.8, 20.0, 20.0};
  for (std::size_t i = 0; i < 6; ++i) EXPECT_NEAR(widths_of(s)[i], expected[i], 2.0) << "corona " << i + 1;
  expect_feasible(kSpec, s, true);
}

TEST(OptimizeWidths, DeterministicForFixedSeed) {
  for (Variant v : {Variant::Baseline, Variant::Improved}) {
    const Solution a = optimize_widths(kSpec, kCost, 5, v, kSolver);
    const Solution b = optimize_widths(kSpec, kCost, 5, v, kSolver);
    EXPECT_EQ(widths_of(a), widths_of(b));
    EXPECT_EQ(a.total_energy, b.total_energy);
  }
}

TEST(OptimizeWidths, SeedDoesNotChangeTheOptimum) {
  SolverConfig other = kSolver;
  other.seed = 12345;
  const Solution a = optimize_widths(kSpec, kCost, 7, Variant::Baseline, kSolver);
  const Solution b = optimize_widths(kSpec, kCost, 7, Variant::Baseline, other);
  EXPECT_LE(oracle::rel_err(a.total_energy, b.total_energy), 1e-9);
}

TEST(OptimizeWidths, ConstraintsHoldForEveryCount) {
  for (std::size_t k = 3; k <= 10; ++k) {
    for (Variant v : {Variant::Baseline, Variant::Improved}) {
      const Solution s = optimize_widths(kSpec, kCost, k, v, kSolver);
      EXPECT_TRUE(s.converged) << "k=" << k;
      EXPECT_EQ(s.widths.size(), k);
      expect_feasible(kSpec, s, v == Variant::Improved);
      EXPECT_NEAR(s.total_energy, model::total_energy_rate(kSpec, s.widths, v), 1e-15);
    }
  }
}

TEST(OptimizeWidths, ImprovedNeverBeatsBaseline) {
  // The improved variant pays more per head and also restricts the shape.
  for (std::size_t k = 3; k <= 10; ++k) {
    const Solution b = optimize_widths(kSpec, kCost, k, Variant::Baseline, kSolver);
    const Solution i = optimize_widths(kSpec, kCost, k, Variant::Improved, kSolver);
    EXPECT_GE(i.cpua_value, b.cpua_value - 1e-12) << "k=" << k;
  }
}

TEST(OptimizeWidths, NoRandomFeasiblePointDoesBetter) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(20.0, 80.0);
  for (Variant v : {Variant::Baseline, Variant::Improved}) {
    const Solution s = optimize_widths(kSpec, kCost, 5, v, kSolver);
    for (int n = 0; n < 2000; ++n) {
      std::vector<double> y(5);
      for (double& x : y) x = u(rng);
      const CoronaLayout probe(detail::project_feasible(y, 20.0, 80.0, 200.0, v == Variant::Improved));
      ASSERT_GE(model::total_energy_rate(kSpec, probe, v), s.total_energy - 1e-12 * s.total_energy);
    }
  }
}

TEST(OptimizeWidths, RejectsInfeasibleCount) {
  EXPECT_EQ(kind_of([&] { optimize_widths(kSpec, kCost, 11, Variant::Baseline, kSolver); }),
            ErrorKind::Infeasible);
  EXPECT_EQ(kind_of([&] { optimize_widths(kSpec, kCost, 2, Variant::Baseline, kSolver); }),
            ErrorKind::Infeasible);
}

TEST(OptimizeWidths, ExhaustedBudgetIsReportedNotHidden) {
  SolverConfig starved = kSolver;
  starved.max_iterations = 1;
  starved.restarts = 1;
  const Solution s = optimize_widths(kSpec, kCost, 6, Variant::Baseline, starved);
  EXPECT_FALSE(s.converged);
  expect_feasible(kSpec, s, false);
}

TEST(Sweep, BestCountAndShape) {
  for (Variant v : {Variant::Baseline, Variant::Improved}) {
    const SweepResult r = sweep(kSpec, kCost, v, kSolver);
    ASSERT_EQ(r.per_k.size(), 8u);
    EXPECT_EQ(r.best_solution().k, 6u);
    // Falls to the minimum, then rises.
    for (std::size_t j = 1; j < r.per_k.size(); ++j) {
      if (r.per_k[j].k <= 6) {
        EXPECT_LT(r.per_k[j].cpua_value, r.per_k[j - 1].cpua_value);
      } else {
        EXPECT_GT(r.per_k[j].cpua_value, r.per_k[j - 1].cpua_value);
      }
    }
  }
}

TEST(GridOracle, AgreesWithSolverOnThreeCoronas) {
  const Solution grid = grid_oracle(kSpec, kCost, 3, Variant::Baseline, 0.1);
  const Solution local = optimize_widths(kSpec, kCost, 3, Variant::Baseline, kSolver);
  EXPECT_EQ(grid.evaluations, 80601u);
  EXPECT_LE(local.total_energy, grid.total_energy * (1.0 + 1e-12));
  EXPECT_LE(grid.cpua_value - local.cpua_value, 1e-5);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(widths_of(grid)[i], widths_of(local)[i], 0.1 + 1e-9);
}

TEST(GridOracle, AgreesWithSolverOnToySpec) {
  const NetworkSpec toy = toy_spec();
  for (Variant v : {Variant::Baseline, Variant::Improved}) {
    const Solution grid = grid_oracle(toy, kCost, 2, v, 0.01);
    const Solution local = optimize_widths(toy, kCost, 2, v, kSolver);
    EXPECT_LE(local.total_energy, grid.total_energy * (1.0 + 1e-12));
    EXPECT_NEAR(widths_of(grid)[0], widths_of(local)[0], 0.01 + 1e-9);
    // Independent scan of the single free width with the ledger oracle.
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j <= 1000; ++j) {
      const double c1 = 20.0 + 0.01 * j;
      if (v == Variant::Improved && c1 < 50.0 - c1) continue;
      best = std::min(best, oracle::total_energy(toy, {c1, 50.0 - c1}, v == Variant::Improved));
    }
    EXPECT_LE(oracle::rel_err(best, grid.total_energy), 1e-9);
  }
}

TEST(GridOracle, BudgetAndCoarseStep) {
  EXPECT_EQ(kind_of([&] { grid_oracle(kSpec, kCost, 8, Variant::Baseline, 0.01, 1'000'000); }),
            ErrorKind::GridTooLarge);
  // A step of d2 - d1 leaves only the two box corners per free width.
  const Solution s = grid_oracle(kSpec, kCost, 3, Variant::Baseline, 60.0);
  EXPECT_EQ(s.evaluations, 1u);
  EXPECT_EQ(widths_of(s), (std::vector<double>{80.0, 80.0, 40.0}));
  EXPECT_EQ(kind_of([&] { grid_oracle(kSpec, kCost, 3, Variant::Baseline, 100.0); }), ErrorKind::Infeasible);
}

TEST(Gradient, MatchesCentralDifferences) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(25.0, 75.0);
  for (Variant v : {Variant::Baseline, Variant::Improved}) {
    for (int n = 0; n < 40; ++n) {
      std::vector<double> y(6);
      for (double& x : y) x = u(rng);
      const std::vector<double> w = detail::project_feasible(y, 25.0, 75.0, 200.0, v == Variant::Improved);
      const Gradient g = objective_gradient(kSpec, CoronaLayout(w), v);
      ASSERT_EQ(g.values.size(), 6u);
      // Only directions that keep the disk closed are meaningful to the oracle.
      for (std::size_t j = 0; j + 1 < 6; ++j) {
        const auto f = [&](double t) {
          std::vector<double> p = w;
          p[j] += t;
          p[5] -= t;
          return oracle::total_energy(kSpec, p, v == Variant::Improved);
        };
        EXPECT_LE(oracle::rel_err(g.values[j] - g.values[5], oracle::central_difference(f, 0.0, 1e-4)), 1e-5);
      }
    }
  }
}

TEST(Gradient, BoundaryFlag) {
  EXPECT_TRUE(objective_gradient(kSpec, CoronaLayout(std::vector<double>(10, 20.0)), Variant::Baseline).at_boundary);
  EXPECT_FALSE(
      objective_gradient(kSpec, CoronaLayout({50.0, 50.0, 50.0, 50.0}), Variant::Baseline).at_boundary);
}

TEST(Gradient, StationaryAlongFeasibleDirectionsAtInteriorOptimum) {
  const Solution s = optimize_widths(kSpec, kCost, 4, Variant::Baseline, kSolver);
  const std::vector<double> w = widths_of(s);
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (std::size_t j = i + 1; j < w.size(); ++j) {
      const bool free_i = w[i] > 20.0 + 1e-6 && w[i] < 80.0 - 1e-6;
      const bool free_j = w[j] > 20.0 + 1e-6 && w[j] < 80.0 - 1e-6;
      if (!free_i || !free_j) continue;
      for (double h : {1e-3, -1e-3}) {
        std::vector<double> p = w;
        p[i] += h;
        p[j] -= h;
        EXPECT_GE(oracle::total_energy(kSpec, p, false), s.total_energy * (1.0 - 1e-13));
      }
    }
  }
}

TEST(Projection, IdempotentAndFeasible) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-50.0, 150.0);
  for (bool monotone : {false, true}) {
    for (int n = 0; n < 500; ++n) {
      std::vector<double> y(7);
      for (double& x : y) x = u(rng);
      const std::vector<double> x = detail::project_feasible(y, 20.0, 80.0, 200.0, monotone);
      EXPECT_NEAR(std::accumulate(x.begin(), x.end(), 0.0), 200.0, 1e-9);
      for (std::size_t i = 0; i < x.size(); ++i) {
        EXPECT_GE(x[i], 20.0 - 1e-12);
        EXPECT_LE(x[i], 80.0 + 1e-12);
        if (monotone && i > 0) EXPECT_LE(x[i], x[i - 1] + 1e-12);
      }
      const std::vector<double> again = detail::project_feasible(x, 20.0, 80.0, 200.0, monotone);
      for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(again[i], x[i], 1e-9);
    }
  }
}

TEST(Projection, IsTheClosestFeasiblePoint) {
  // Variational inequality: (y - P(y)) . (z - P(y)) <= 0 for feasible z.
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  for (bool monotone : {false, true}) {
    for (int n = 0; n < 200; ++n) {
      std::vector<double> y(5);
      std::vector<double> z(5);
      for (double& x : y) x = u(rng);
      for (double& x : z) x = u(rng);
      const std::vector<double> p = detail::project_feasible(y, 20.0, 80.0, 200.0, monotone);
      const std::vector<double> q = detail::project_feasible(z, 20.0, 80.0, 200.0, monotone);
      double dot = 0.0;
      for (std::size_t i = 0; i < 5; ++i) dot += (y[i] - p[i]) * (q[i] - p[i]);
      EXPECT_LE(dot, 1e-7);
    }
  }
}
