#pragma once

#include <array>
#include <optional>
#include <string>

namespace tariffkit {

// Elasticities are magnitudes: demand falls as price rises with exponent
// -eta_d_*, supply rises with exponent +eta_s.
struct ElasticityParams {
  double eta_d_us = 0.0;
  double eta_d_china = 0.0;
  double eta_d_row = 0.0;
  double eta_s = 0.0;

  void validate() const;
};

// Quantities at the reference price p0, million bushels. Baseline supply is
// the sum of the three demand segments, so the market clears at p0 when the
// tariff is zero.
struct MarketBaseline {
  double p0 = 1.0;
  double q_us = 0.0;
  double q_china = 0.0;
  double q_row = 0.0;

  double total() const { return q_us + q_china + q_row; }
  void validate() const;
};

struct TariffScenario {
  double tau = 0.0;           // ad valorem, applied to the China segment
  double subsidy_rate = 0.0;  // currency per bushel, paid on total supply

  void validate() const;
};

struct EquilibriumSolution {
  double tau = 0.0;
  double p_producer = 0.0;
  double p_china = 0.0;  // p_producer * (1 + tau)
  double q_us = 0.0;
  double q_china = 0.0;
  double q_row = 0.0;
  double total_supply = 0.0;
  double producer_revenue = 0.0;  // market revenue plus subsidy_payment
  double subsidy_payment = 0.0;
  double price_change_frac = 0.0;

  double market_revenue() const { return producer_revenue - subsidy_payment; }
};

// Demand shares at the baseline price; used to form the effective
// elasticities of the first-order incidence formula.
struct DemandShares {
  double us = 0.0;
  double china = 0.0;
  double row = 0.0;

  static DemandShares of(const MarketBaseline& baseline);
};

/// First-order incidence: -eta_d / (eta_s + eta_d) * tau.
double incidence_approx(double eta_d_eff, double eta_s_eff, double tau);

/// First-order incidence of a tariff on the China segment of a three-segment
/// market. The tariffed segment enters with weight shares.china * eta_d_china;
/// the untariffed segments behave like extra supply elasticity, so the
/// effective supply elasticity is eta_s + shares.us * eta_d_us +
/// shares.row * eta_d_row. With China as the only demand this is exactly the
/// two-parameter formula above.
double incidence_approx(const ElasticityParams& elas, double tau, const DemandShares& shares);

/// Market-clearing producer price under isoelastic demand and supply, anchored
/// at the baseline. Bisection on log-price over [p0/100, 100 p0] followed by a
/// Newton polish.
EquilibriumSolution solve_equilibrium(const MarketBaseline& baseline,
                                      const ElasticityParams& elas,
                                      const TariffScenario& scenario);

/// Lump-sum per-bushel transfer on total supply; quantities and prices are
/// left unchanged.
EquilibriumSolution apply_subsidy(const EquilibriumSolution& sol, double rate);

/// Subsidy payment of `post` divided by the market-revenue loss from `pre` to
/// `post`. Returns std::nullopt (the no-loss sentinel) when revenue did not
/// fall.
std::optional<double> compensation_ratio(const EquilibriumSolution& pre,
                                         const EquilibriumSolution& post);

// ---------------------------------------------------------------------------
// Two exporters (US, Brazil) selling to two destinations (China, rest of
// world). The tariff applies only to the US -> China flow.

struct ExporterSupply {
  double p0 = 1.0;
  double q0 = 0.0;
  double eta_s = 0.0;
  double supply(double price) const;
};

struct DestinationDemand {
  double p0 = 1.0;
  double q0 = 0.0;
  double eta_d = 0.0;
  double demand(double price) const;
};

struct TwoExporterMarket {
  ExporterSupply us;
  ExporterSupply brazil;
  DestinationDemand china;
  DestinationDemand row;

  void validate() const;
};

enum class TradeRegime {
  integrated,      // one world price; tau == 0 or Brazil alone covers China
  segmented,       // Brazil serves only China, US serves only the rest of world
  china_parity,    // China buys from both at p_brazil == p_us * (1 + tau)
};

std::string to_string(TradeRegime regime);

struct TwoExporterSolution {
  enum Exporter { kUs = 0, kBrazil = 1 };
  enum Destination { kChina = 0, kRow = 1 };

  double tau = 0.0;
  double p_us = 0.0;
  double p_brazil = 0.0;
  double p_china_paid = 0.0;  // price paid by Chinese buyers
  double p_row_paid = 0.0;
  std::array<std::array<double, 2>, 2> flow{};  // [exporter][destination]
  double diversion_share = 0.0;  // share of China's imports sourced from Brazil
  TradeRegime regime = TradeRegime::integrated;

  double exporter_total(int e) const { return flow[e][kChina] + flow[e][kRow]; }
  double destination_total(int d) const { return flow[kUs][d] + flow[kBrazil][d]; }
};

/// Buyers purchase from the cheapest effective source. When a destination is
/// indifferent between sources and market clearing leaves the split
/// undetermined (tau == 0), purchases are split in proportion to exporter
/// supply.
TwoExporterSolution solve_two_exporter(const TwoExporterMarket& market, double tau);

}  // namespace tariffkit
