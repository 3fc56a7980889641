#pragma once

// Analytic energy and cost model for a circular field of radius R split into
// concentric coronas. Corona indices are 1-based: corona 1 touches the sink.
//
// Units are SI throughout (meters, joules) with one minute as the time unit.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace corona {

struct NetworkSpec {
  double radius_m = 0.0;
  double density_per_m2 = 0.0;
  double data_rate_bits = 0.0;    // bits generated per node per minute
  double compression = 1.0;       // ratio of forwarded to received bits at a head
  double lifetime_min = 0.0;      // design lifetime T
  double mgmt_energy_J = 0.0;     // fixed management draw E* per node per minute
  double tx_min_m = 0.0;          // d1
  double tx_max_m = 0.0;          // d2
  double e0_J_per_bit = 0.0;      // generation
  double e1_J_per_bit = 0.0;      // radio electronics, send or receive
  double e2_J_per_bit_m2 = 0.0;   // amplifier, scaled by d^2
  double e3_J_per_bit = 0.0;      // aggregation

  // Throws Error(InvalidArgument) naming the first violated invariant.
  void validate() const;

  static NetworkSpec reference();

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

struct CostParams {
  double hw_cost = 0.0;        // a, per sensor
  double energy_cost = 0.0;    // b, per joule of provisioned battery
  double sink_cost = 0.0;      // c*, base station

  void validate() const;

  static CostParams reference();

  friend bool operator==(const CostParams&, const CostParams&) = default;
};

enum class Variant { Baseline, Improved };

std::string_view to_string(Variant v);
// Accepts "baseline" or "improved"; throws Error(InvalidArgument) otherwise.
Variant parse_variant(std::string_view text);

class CoronaLayout {
 public:
  // Throws Error(InvalidArgument) if empty or any width is not positive.
  explicit CoronaLayout(std::vector<double> widths);

  std::size_t size() const noexcept { return widths_.size(); }
  std::span<const double> widths() const noexcept { return widths_; }
  std::span<const double> radii() const noexcept { return radii_; }

  // 1-based accessors; throw Error(IndexOutOfRange).
  double width(std::size_t i) const;
  double outer_radius(std::size_t i) const;
  double inner_radius(std::size_t i) const;

  friend bool operator==(const CoronaLayout& a, const CoronaLayout& b) { return a.widths_ == b.widths_; }

 private:
  std::vector<double> widths_;
  std::vector<double> radii_;
};

// Checks that the layout closes at R (1e-9 relative) and, for the improved
// variant, that widths are non-increasing outward.
void check_layout(const NetworkSpec& spec, const CoronaLayout& layout, Variant variant);

struct CoronaRates {
  std::size_t index = 0;
  double node_count = 0.0;
  double head_fraction = 0.0;
  double head_count = 0.0;
  double head_energy = 0.0;
  double member_energy = 0.0;
  double intra_energy = 0.0;
  double inter_energy = 0.0;
  double total_energy = 0.0;
  double mean_node_energy = 0.0;
  double provisioned_energy = 0.0;
};

namespace model {

double node_count(const NetworkSpec& spec, const CoronaLayout& layout, std::size_t i);

// Throws Error(ModelInfeasible) when the covering head count exceeds the
// node count of the corona.
double head_fraction(const NetworkSpec& spec, const CoronaLayout& layout, std::size_t i);

// Continuous minimum covering cluster count 2*pi*r_i/c_i.
double head_count(const CoronaLayout& layout, std::size_t i);

// Baseline heads transmit over their own corona width; improved heads use
// the width of the next corona inward (corona 1 keeps its own).
double head_tx_distance(const CoronaLayout& layout, Variant variant, std::size_t i);

double ch_energy_rate(const NetworkSpec& spec, const CoronaLayout& layout, Variant variant,
                      std::size_t i);
double member_energy_rate(const NetworkSpec& spec, const CoronaLayout& layout, std::size_t i);
double intra_energy_rate(const NetworkSpec& spec, const CoronaLayout& layout, Variant variant,
                         std::size_t i);
double inter_energy_rate(const NetworkSpec& spec, const CoronaLayout& layout, Variant variant,
                         std::size_t i);
CoronaRates corona_energy_rate(const NetworkSpec& spec, const CoronaLayout& layout, Variant variant,
                               std::size_t i);

// Sum of E_i over all coronas, excluding the fixed management draw.
double total_energy_rate(const NetworkSpec& spec, const CoronaLayout& layout, Variant variant);

double total_cost(const NetworkSpec& spec, const CostParams& cost, const CoronaLayout& layout,
                  Variant variant);
double cpua(const NetworkSpec& spec, const CostParams& cost, const CoronaLayout& layout,
            Variant variant);

// CPUA as an affine function of the total energy rate; shared by the
// optimizer so both report identical values.
double cpua_from_energy(const NetworkSpec& spec, const CostParams& cost, double total_energy);

double area(const NetworkSpec& spec);

}  // namespace model
}  // namespace corona
