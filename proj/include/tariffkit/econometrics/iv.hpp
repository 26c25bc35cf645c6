#pragma once

#include <optional>
#include <vector>

#include "tariffkit/datagen.hpp"
#include "tariffkit/econometrics/ols.hpp"

namespace tariffkit {

inline constexpr double kWeakInstrumentF = 10.0;

struct IvResult {
  RegressionResult second_stage;
  std::vector<std::size_t> instrumented;  // columns of X not found among the columns of Z
  std::vector<double> first_stage_f;      // one per instrumented column
  bool weak_instruments = false;          // some first-stage F below kWeakInstrumentF
};

/// Two-stage least squares. Residuals for the covariance come from the
/// original X. The first-stage F for an instrumented column tests the
/// excluded instruments, given the columns of X that also appear in Z.
IvResult tsls(const Vector& y, const Matrix& X, const Matrix& Z,
              const std::optional<std::vector<long>>& cluster_ids = std::nullopt);

// Both curves of the log price / log quantity market estimated by 2SLS:
// demand instrumented by the weather shifters, supply by tariff and China
// industrial production.
struct SupplyDemandFit {
  IvResult demand;  // q on [1, p, tariff, china_ip]
  IvResult supply;  // q on [1, p, weather1, weather2]
  double demand_slope = 0.0;   // b, magnitude
  double supply_slope = 0.0;   // s
  double tariff_effect = 0.0;  // c

  /// Predicted change in log price in tariff periods if the tariff shift is removed.
  double no_tariff_log_price_change() const { return -tariff_effect / (demand_slope + supply_slope); }
  double no_tariff_price_change_frac() const;
};

SupplyDemandFit fit_supply_demand(const SupplyDemandSample& sample);

}  // namespace tariffkit
