#include "corona/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <fmt/format.h>

#include "corona/error.hpp"

namespace corona {
namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorKind::InvalidArgument, what);
}

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

void check_index(const CoronaLayout& layout, std::size_t i) {
  if (i < 1 || i > layout.size()) {
    throw Error(ErrorKind::IndexOutOfRange,
                fmt::format("corona index {} outside [1, {}]", i, layout.size()));
  }
}

}  // namespace

void NetworkSpec::validate() const {
  require(std::isfinite(radius_m) && radius_m > 0.0, "radius_R must be > 0");
  require(std::isfinite(density_per_m2) && density_per_m2 > 0.0, "density_rho must be > 0");
  require(std::isfinite(data_rate_bits) && data_rate_bits > 0.0, "data_rate_l must be > 0");
  // m = 0 is admitted as the degenerate no-relay case.
  require(std::isfinite(compression) && compression >= 0.0 && compression <= 1.0,
          "compression_m must lie in [0, 1]");
  require(std::isfinite(lifetime_min) && lifetime_min > 0.0, "lifetime_T must be > 0");
  require(finite_nonneg(mgmt_energy_J), "mgmt_energy_Estar must be >= 0");
  require(std::isfinite(tx_min_m) && tx_min_m > 0.0, "tx_min_d1 must be > 0");
  require(std::isfinite(tx_max_m) && tx_min_m <= tx_max_m, "tx_min_d1 must not exceed tx_max_d2");
  require(finite_nonneg(e0_J_per_bit) && finite_nonneg(e1_J_per_bit) &&
              finite_nonneg(e2_J_per_bit_m2) && finite_nonneg(e3_J_per_bit),
          "energy coefficients e0..e3 must be >= 0");
}

NetworkSpec NetworkSpec::reference() {
  NetworkSpec s;
  s.radius_m = 200.0;
  s.density_per_m2 = 0.0318;
  s.data_rate_bits = 256.0;
  s.compression = 0.1;
  s.lifetime_min = 100000.0;
  s.mgmt_energy_J = 100e-9;
  s.tx_min_m = 20.0;
  s.tx_max_m = 80.0;
  s.e0_J_per_bit = 50e-9;
  s.e1_J_per_bit = 50e-9;
  s.e2_J_per_bit_m2 = 10e-12;
  s.e3_J_per_bit = 5e-9;
  return s;
}

void CostParams::validate() const {
  require(finite_nonneg(hw_cost), "hw_cost_a must be >= 0");
  require(finite_nonneg(energy_cost), "energy_cost_b must be >= 0");
  require(finite_nonneg(sink_cost), "sink_cost_cstar must be >= 0");
}

CostParams CostParams::reference() { return CostParams{10.0, 2.0, 200.0}; }

std::string_view to_string(Variant v) {
  return v == Variant::Baseline ? "baseline" : "improved";
}

Variant parse_variant(std::string_view text) {
  if (text == "baseline") return Variant::Baseline;
  if (text == "improved") return Variant::Improved;
  throw Error(ErrorKind::InvalidArgument,
              fmt::format("unknown variant '{}' (expected baseline|improved)", text));
}

CoronaLayout::CoronaLayout(std::vector<double> widths) : widths_(std::move(widths)) {
  require(!widths_.empty(), "layout needs at least one corona");
  radii_.reserve(widths_.size());
  double r = 0.0;
  for (double c : widths_) {
    require(std::isfinite(c) && c > 0.0, "corona widths must be > 0");
    r += c;
    radii_.push_back(r);
  }
}

double CoronaLayout::width(std::size_t i) const {
  check_index(*this, i);
  return widths_[i - 1];
}

double CoronaLayout::outer_radius(std::size_t i) const {
  check_index(*this, i);
  return radii_[i - 1];
}

double CoronaLayout::inner_radius(std::size_t i) const {
  check_index(*this, i);
  return i == 1 ? 0.0 : radii_[i - 2];
}

void check_layout(const NetworkSpec& spec, const CoronaLayout& layout, Variant variant) {
  const double rk = layout.radii().back();
  if (std::abs(rk - spec.radius_m) > 1e-9 * spec.radius_m) {
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("layout outer radius {} does not close at R = {}", rk, spec.radius_m));
  }
  if (variant == Variant::Improved) {
    auto w = layout.widths();
    for (std::size_t j = 1; j < w.size(); ++j) {
      if (w[j] > w[j - 1]) {
        throw Error(ErrorKind::InvalidArgument,
                    fmt::format("improved variant needs non-increasing widths (c_{} > c_{})", j + 1, j));
      }
    }
  }
}

namespace model {

using std::numbers::pi;

double area(const NetworkSpec& spec) { return pi * spec.radius_m * spec.radius_m; }

double node_count(const NetworkSpec& spec, const CoronaLayout& layout, std::size_t i) {
  const double r = layout.outer_radius(i);
  const double q = layout.inner_radius(i);
  return spec.density_per_m2 * pi * (r * r - q * q);
}

double head_count(const CoronaLayout& layout, std::size_t i) {
  return 2.0 * pi * layout.outer_radius(i) / layout.width(i);
}

double head_fraction(const NetworkSpec& spec, const CoronaLayout& layout, std::size_t i) {
  const double r = layout.outer_radius(i);
  const double c = layout.width(i);
  const double p = 2.0 * r / (spec.density_per_m2 * c * c * (2.0 * r - c));
  if (!(p <= 1.0)) {
    throw Error(ErrorKind::ModelInfeasible,
                fmt::format("corona {} needs head fraction {:.6g} > 1 (density too low or corona too thin)",
                            i, p));
  }
  return p;
}

double head_tx_distance(const CoronaLayout& layout, Variant variant, std::size_t i) {
  if (variant == Variant::Improved && i > 1) {
    check_index(layout, i);
    return layout.width(i - 1);
  }
  return layout.width(i);
}

double ch_energy_rate(const NetworkSpec& spec, const CoronaLayout& layout, Variant variant,
                      std::size_t i) {
  const double p = head_fraction(spec, layout, i);
  const double d = head_tx_distance(layout, variant, i);
  const double l = spec.data_rate_bits;
  const double m = spec.compression;
  return spec.e0_J_per_bit * l + (1.0 / p - 1.0) * spec.e1_J_per_bit * l +
         spec.e3_J_per_bit * l / p +
         m * l * (spec.e2_J_per_bit_m2 * d * d + spec.e1_J_per_bit) / p;
}

double member_energy_rate(const NetworkSpec& spec, const CoronaLayout& layout, std::size_t i) {
  const double c = layout.width(i);
  const double l = spec.data_rate_bits;
  return spec.e0_J_per_bit * l + l * (spec.e2_J_per_bit_m2 * c * c + spec.e1_J_per_bit);
}

double intra_energy_rate(const NetworkSpec& spec, const CoronaLayout& layout, Variant variant,
                         std::size_t i) {
  const double n = node_count(spec, layout, i);
  const double p = head_fraction(spec, layout, i);
  const double c = layout.width(i);
  const double d = head_tx_distance(layout, variant, i);
  const double m = spec.compression;
  return n * spec.data_rate_bits *
         (spec.e0_J_per_bit + (2.0 * (1.0 - p) + m) * spec.e1_J_per_bit +
          (1.0 - p) * spec.e2_J_per_bit_m2 * c * c + m * spec.e2_J_per_bit_m2 * d * d +
          spec.e3_J_per_bit);
}

double inter_energy_rate(const NetworkSpec& spec, const CoronaLayout& layout, Variant variant,
                         std::size_t i) {
  const double d = head_tx_distance(layout, variant, i);
  // The outermost corona closes at R and relays nothing.
  if (i == layout.size()) return 0.0;
  const double r = layout.outer_radius(i);
  const double R = spec.radius_m;
  return spec.density_per_m2 * pi * (R * R - r * r) * spec.compression * spec.data_rate_bits *
         (2.0 * spec.e1_J_per_bit + spec.e2_J_per_bit_m2 * d * d);
}

CoronaRates corona_energy_rate(const NetworkSpec& spec, const CoronaLayout& layout, Variant variant,
                               std::size_t i) {
  CoronaRates out;
  out.index = i;
  out.node_count = node_count(spec, layout, i);
  out.head_fraction = head_fraction(spec, layout, i);
  out.head_count = head_count(layout, i);
  out.head_energy = ch_energy_rate(spec, layout, variant, i);
  out.member_energy = member_energy_rate(spec, layout, i);
  out.intra_energy = intra_energy_rate(spec, layout, variant, i);
  out.inter_energy = inter_energy_rate(spec, layout, variant, i);
  out.total_energy = out.intra_energy + out.inter_energy;
  out.mean_node_energy = out.total_energy / out.node_count;
  out.provisioned_energy = (out.mean_node_energy + spec.mgmt_energy_J) * spec.lifetime_min;
  return out;
}

double total_energy_rate(const NetworkSpec& spec, const CoronaLayout& layout, Variant variant) {
  check_layout(spec, layout, variant);
  double sum = 0.0;
  for (std::size_t i = 1; i <= layout.size(); ++i) {
    sum += intra_energy_rate(spec, layout, variant, i) + inter_energy_rate(spec, layout, variant, i);
  }
  return sum;
}

double total_cost(const NetworkSpec& spec, const CostParams& cost, const CoronaLayout& layout,
                  Variant variant) {
  check_layout(spec, layout, variant);
  double battery = 0.0;
  for (std::size_t i = 1; i <= layout.size(); ++i) {
    const CoronaRates rates = corona_energy_rate(spec, layout, variant, i);
    battery += rates.node_count * rates.provisioned_energy;
  }
  return cost.hw_cost * area(spec) * spec.density_per_m2 + cost.energy_cost * battery +
         cost.sink_cost;
}

double cpua_from_energy(const NetworkSpec& spec, const CostParams& cost, double total_energy) {
  const double S = area(spec);
  return cost.hw_cost * spec.density_per_m2 +
         cost.energy_cost * spec.density_per_m2 * spec.mgmt_energy_J * spec.lifetime_min +
         spec.lifetime_min * cost.energy_cost * total_energy / S + cost.sink_cost / S;
}

double cpua(const NetworkSpec& spec, const CostParams& cost, const CoronaLayout& layout,
            Variant variant) {
  return cpua_from_energy(spec, cost, total_energy_rate(spec, layout, variant));
}

}  // namespace model
}  // namespace corona
