#include "corona/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

#include <fmt/format.h>

#include "corona/error.hpp"

namespace corona {

using std::numbers::pi;

void SimConfig::validate() const {
  if (!(lifetime_scale > 0.0 && lifetime_scale <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "lifetime_scale must lie in (0, 1]");
  }
}

World place_nodes(const DeploymentPlan& plan, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  World world;
  world.sectors.resize(plan.coronas.size());
  for (const CoronaProvision& c : plan.coronas) {
    auto& sectors = world.sectors[c.index - 1];
    sectors.resize(static_cast<std::size_t>(c.cluster_count));
    const double q2 = c.inner_radius_m * c.inner_radius_m;
    const double r2 = c.outer_radius_m * c.outer_radius_m;
    const double sector_width = 2.0 * pi / static_cast<double>(c.cluster_count);
    for (std::int64_t n = 0; n < c.node_count; ++n) {
      SimNode node;
      node.corona = c.index;
      // Inverse CDF of the area-uniform radius on the annulus.
      node.radius_m = std::clamp(std::sqrt(q2 + unit(rng) * (r2 - q2)), c.inner_radius_m, c.outer_radius_m);
      node.angle_rad = 2.0 * pi * unit(rng);
      node.sector = std::min(static_cast<std::size_t>(node.angle_rad / sector_width), sectors.size() - 1);
      node.residual_J = c.initial_energy_J;
      sectors[node.sector].push_back(world.nodes.size());
      world.nodes.push_back(node);
    }
  }
  return world;
}

namespace {

struct Head {
  std::size_t node = 0;
  std::size_t members = 0;  // alive nodes in the sector, head included
  double relay_in = 0.0;    // bits received from outer heads this round
};

double angular_gap(double a, double b) {
  const double d = std::fmod(std::abs(a - b), 2.0 * pi);
  return std::min(d, 2.0 * pi - d);
}

double euclidean(const SimNode& a, const SimNode& b) {
  const double dx = a.radius_m * std::cos(a.angle_rad) - b.radius_m * std::cos(b.angle_rad);
  const double dy = a.radius_m * std::sin(a.angle_rad) - b.radius_m * std::sin(b.angle_rad);
  return std::hypot(dx, dy);
}

void check_world(const World& world, const DeploymentPlan& plan) {
  if (world.sectors.size() != plan.coronas.size()) {
    throw Error(ErrorKind::InvalidArgument, "world and plan disagree on the number of coronas");
  }
  for (const CoronaProvision& c : plan.coronas) {
    const auto& sectors = world.sectors[c.index - 1];
    if (sectors.size() != static_cast<std::size_t>(c.cluster_count)) {
      throw Error(ErrorKind::InvalidArgument, fmt::format("corona {} sector count differs from plan", c.index));
    }
    std::size_t n = 0;
    for (const auto& s : sectors) n += s.size();
    if (n != static_cast<std::size_t>(c.node_count)) {
      throw Error(ErrorKind::InvalidArgument, fmt::format("corona {} node count differs from plan", c.index));
    }
  }
}

std::vector<double> model_round_energy(const NetworkSpec& spec, const DeploymentPlan& plan) {
  const CoronaLayout layout = plan.layout();
  std::vector<double> out;
  for (std::size_t i = 1; i <= layout.size(); ++i) {
    const CoronaRates rates = model::corona_energy_rate(spec, layout, plan.variant, i);
    out.push_back(rates.total_energy + rates.node_count * spec.mgmt_energy_J);
  }
  return out;
}

}  // namespace

SimulationReport run(World world, const DeploymentPlan& plan, const SimConfig& cfg) {
  cfg.validate();
  check_world(world, plan);

  const NetworkSpec& spec = plan.spec;
  const std::size_t k = plan.coronas.size();
  const double l = spec.data_rate_bits;
  const double m = spec.compression;
  const double e0 = spec.e0_J_per_bit;
  const double e1 = spec.e1_J_per_bit;
  const double e2 = spec.e2_J_per_bit_m2;
  const double e3 = spec.e3_J_per_bit;
  const bool geometric = cfg.distance_mode == DistanceMode::Geometric;

  for (SimNode& node : world.nodes) node.residual_J *= cfg.lifetime_scale;

  SimulationReport report;
  report.coronas = k;
  report.node_energy_drawn_J.assign(world.nodes.size(), 0.0);
  report.node_lifetime.assign(world.nodes.size(), std::nullopt);

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::vector<Head>> heads(k);
  std::vector<std::vector<bool>> reported_empty(k);
  for (std::size_t i = 0; i < k; ++i) reported_empty[i].assign(world.sectors[i].size(), false);
  std::vector<double> charge(world.nodes.size(), 0.0);
  std::vector<std::size_t> alive_members;
  std::size_t alive_total = 0;
  for (const SimNode& node : world.nodes) alive_total += node.alive ? 1 : 0;

  for (std::size_t round = 0; round < cfg.rounds && alive_total > 0; ++round) {
    std::fill(charge.begin(), charge.end(), 0.0);

    // Elect one head per non-empty sector and charge members.
    for (std::size_t i = 0; i < k; ++i) {
      heads[i].clear();
      const double member_d = plan.coronas[i].member_tx_distance_m;
      for (std::size_t s = 0; s < world.sectors[i].size(); ++s) {
        alive_members.clear();
        for (std::size_t id : world.sectors[i][s]) {
          if (world.nodes[id].alive) alive_members.push_back(id);
        }
        if (alive_members.empty()) {
          if (!reported_empty[i][s]) {
            report.empty_sectors.push_back({round, i + 1, s});
            reported_empty[i][s] = true;
          }
          continue;
        }
        std::uniform_int_distribution<std::size_t> pick(0, alive_members.size() - 1);
        const std::size_t head = alive_members[pick(rng)];
        heads[i].push_back({head, alive_members.size(), 0.0});
        for (std::size_t id : alive_members) {
          if (id == head) continue;
          const double d = geometric ? euclidean(world.nodes[id], world.nodes[head]) : member_d;
          charge[id] = e0 * l + l * (e1 + e2 * d * d) + spec.mgmt_energy_J;
        }
      }
    }

    // Heads aggregate, then forward outermost corona first so relay volumes
    // are complete before each inner corona transmits.
    std::vector<double> relay_in(k, 0.0);
    for (std::size_t i = k; i-- > 0;) {
      for (Head& h : heads[i]) relay_in[i] += h.relay_in;
      for (Head& h : heads[i]) {
        const SimNode& self = world.nodes[h.node];
        const double sector_bits = l * static_cast<double>(h.members);
        Head* next = nullptr;
        if (i > 0) {
          double best = 0.0;
          for (Head& candidate : heads[i - 1]) {
            const double gap = angular_gap(self.angle_rad, world.nodes[candidate.node].angle_rad);
            if (next == nullptr || gap < best) {
              next = &candidate;
              best = gap;
            }
          }
        }
        double d = plan.coronas[i].head_tx_distance_m;
        if (geometric) d = next != nullptr ? euclidean(self, world.nodes[next->node]) : self.radius_m;
        const double send = e1 + e2 * d * d;
        const double outgoing = m * sector_bits + h.relay_in;

        charge[h.node] = e0 * l + (sector_bits - l) * e1 + e3 * sector_bits + m * sector_bits * send +
                         h.relay_in * (e1 + send) + spec.mgmt_energy_J;
        if (i == 0) continue;
        if (next != nullptr) {
          next->relay_in += outgoing;
        } else {
          report.dropped_bits += outgoing;
        }
      }
    }

    // Settle the round. A node that cannot pay in full dies here.
    std::vector<double> ledger(k, 0.0);
    std::vector<std::size_t> alive_after(k, 0);
    for (std::size_t id = 0; id < world.nodes.size(); ++id) {
      SimNode& node = world.nodes[id];
      if (!node.alive) continue;
      if (node.residual_J >= charge[id]) {
        node.residual_J -= charge[id];
        report.node_energy_drawn_J[id] += charge[id];
        ledger[node.corona - 1] += charge[id];
        ++alive_after[node.corona - 1];
      } else {
        node.alive = false;
        --alive_total;
        report.node_lifetime[id] = round;
        if (!report.first_death_round) report.first_death_round = round;
      }
    }
    report.corona_energy_J.push_back(std::move(ledger));
    report.alive_count.push_back(std::move(alive_after));
    report.relay_bits_in.push_back(std::move(relay_in));
    ++report.rounds_run;
  }

  report.mean_lifetime.assign(k, 0.0);
  report.min_lifetime.assign(k, static_cast<double>(report.rounds_run));
  std::vector<std::size_t> population(k, 0);
  for (std::size_t id = 0; id < world.nodes.size(); ++id) {
    const std::size_t i = world.nodes[id].corona - 1;
    const auto life = static_cast<double>(report.node_lifetime[id].value_or(report.rounds_run));
    report.mean_lifetime[i] += life;
    report.min_lifetime[i] = std::min(report.min_lifetime[i], life);
    ++population[i];
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (population[i] > 0) report.mean_lifetime[i] /= static_cast<double>(population[i]);
  }

  report.mean_round_energy_J.assign(k, 0.0);
  for (const auto& row : report.corona_energy_J) {
    for (std::size_t i = 0; i < k; ++i) report.mean_round_energy_J[i] += row[i];
  }
  if (report.rounds_run > 0) {
    for (double& e : report.mean_round_energy_J) e /= static_cast<double>(report.rounds_run);
  }
  report.model_round_energy_J = model_round_energy(spec, plan);
  report.analytic_deviation.assign(k, 0.0);
  if (report.rounds_run > 0) {
    for (std::size_t i = 0; i < k; ++i) {
      report.analytic_deviation[i] =
          (report.mean_round_energy_J[i] - report.model_round_energy_J[i]) / report.model_round_energy_J[i];
    }
  }
  return report;
}

DeviationSummary compare_to_model(const SimulationReport& report, const NetworkSpec& spec,
                                  const DeploymentPlan& plan, double bound) {
  DeviationSummary out;
  out.bound = bound;
  if (report.rounds_run == 0) {
    out.per_corona.assign(report.coronas, 0.0);
    out.worst_corona = report.coronas > 0 ? 1 : 0;
    return out;
  }
  const std::vector<double> expected = model_round_energy(spec, plan);
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const double dev = std::abs(report.mean_round_energy_J.at(i) - expected[i]) / expected[i];
    out.per_corona.push_back(dev);
    if (out.worst_corona == 0 || dev > out.worst) {
      out.worst = dev;
      out.worst_corona = i + 1;
    }
  }
  out.pass = out.worst <= bound;
  return out;
}

void write_trace_csv(const SimulationReport& report, std::ostream& out) {
  out << "round,corona,energy_J,alive_count\n";
  for (std::size_t t = 0; t < report.rounds_run; ++t) {
    for (std::size_t i = 0; i < report.coronas; ++i) {
      out << fmt::format("{},{},{},{}\n", t, i + 1, report.corona_energy_J[t][i], report.alive_count[t][i]);
    }
  }
}

std::string summary_text(const SimulationReport& report, const DeviationSummary& deviation) {
  std::string s;
  s += fmt::format("rounds_run: {}\n", report.rounds_run);
  s += fmt::format("nodes: {}\n", report.node_lifetime.size());
  s += fmt::format("first_death_round: {}\n",
                   report.first_death_round ? fmt::format("{}", *report.first_death_round) : std::string("none"));
  s += fmt::format("empty_sector_events: {}\n", report.empty_sectors.size());
  s += fmt::format("dropped_bits: {}\n", report.dropped_bits);
  s += "corona,mean_round_energy_J,model_round_energy_J,deviation,mean_lifetime,min_lifetime\n";
  for (std::size_t i = 0; i < report.coronas; ++i) {
    s += fmt::format("{},{:.9g},{:.9g},{:.6f},{:.2f},{:.0f}\n", i + 1, report.mean_round_energy_J[i],
                     report.model_round_energy_J[i], deviation.per_corona.at(i), report.mean_lifetime[i],
                     report.min_lifetime[i]);
  }
  s += fmt::format("max_deviation: {:.6f} (corona {}, bound {:.4f}) {}\n", deviation.worst, deviation.worst_corona,
                   deviation.bound, deviation.pass ? "PASS" : "FAIL");
  return s;
}

}  // namespace corona
