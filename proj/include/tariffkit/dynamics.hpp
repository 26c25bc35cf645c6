#pragma once

#include <cstddef>
#include <vector>

#include "tariffkit/market_model.hpp"

namespace tariffkit {

// Annual planting model. Acreage solves the linear first-order condition
// E[P] * yield = c1 + c2 * A of the quadratic cost C(A) = c0 + c1 A + c2 A^2 / 2.
struct DynamicsParams {
  double beta = 0.96;                // carried, unused by the myopic FOC
  double yield = 50.0;               // bushels per acre
  double cost_c1 = 0.0;              // currency per acre
  double cost_c2 = 1.0;              // currency per acre^2, > 0
  double expectation_lambda = 1.0;   // 1 = naive expectations
  double storage_loss = 0.0;         // per-season decay of carried stocks
  double working_stock = 0.0;        // carry-out held when the market clears
  double price_floor_frac = 0.8;     // administered floor as a fraction of p0
  bool subsidy_in_expectations = false;  // add last season's subsidy rate to E[P]

  void validate() const;
};

struct SeasonRecord {
  int t = 0;
  double expected_price = 0.0;
  double realized_price = 0.0;
  double acreage = 0.0;      // million acres
  double production = 0.0;   // million bushels
  double exports_china = 0.0;
  double exports_row = 0.0;
  double domestic_use = 0.0;
  double inventory_end = 0.0;
  double market_income = 0.0;  // million currency
  double subsidy_income = 0.0;
  double tau = 0.0;
  bool floor_binding = false;

  double sales() const { return exports_china + exports_row + domestic_use; }
};

// Per-season shocks for seasons 1..T (index t - 1).
struct ShockPath {
  std::vector<double> tau;
  std::vector<double> eps_x;        // log shift of China demand
  std::vector<double> yield_shock;  // production = A * yield * (1 + shock)
  std::vector<double> subsidy_rate; // per-bushel payment on production

  static ShockPath zeros(std::size_t seasons);
  // tau and eps_x held at the given values from `first_season` onward.
  static ShockPath persistent(std::size_t seasons, double tau, double eps_x,
                              std::size_t first_season = 1);
  std::size_t size() const { return tau.size(); }
  void validate(std::size_t seasons) const;
};

double optimal_acreage(double expected_price, const DynamicsParams& params);

/// Log deviation of export volume: eps_x - eta_d * (p_hat + ln(1 + tau)).
double export_demand_loglin(double p_hat, double tau, double eps_x, double eta_d);

/// Cost intercept that makes `acreage` optimal at `price`.
double steady_state_intercept(double price, double acreage, const DynamicsParams& params);

/// Acreage that reproduces baseline sales plus storage loss on the working stock.
double steady_state_acreage(const MarketBaseline& baseline, const DynamicsParams& params);

/// Season-0 record of the tau = 0 steady state. Requires params.cost_c1 to be
/// consistent with steady_state_acreage (see steady_state_intercept).
SeasonRecord steady_state(const DynamicsParams& params, const ElasticityParams& elas,
                          const MarketBaseline& baseline);

/// Simulates seasons 1..T after `init` (season 0). Returns T + 1 records,
/// the first being `init`. Within a season production is fixed, so the price
/// clears demand against the quantity offered after the working stock is
/// held back; if it would fall below the floor, sales are rationed at the
/// floor and the unsold remainder is stored.
std::vector<SeasonRecord> simulate_path(const SeasonRecord& init, const DynamicsParams& params,
                                        const ElasticityParams& elas,
                                        const MarketBaseline& baseline,
                                        const ShockPath& shocks, std::size_t seasons);

}  // namespace tariffkit
