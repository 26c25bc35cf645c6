#include "tariffkit/dynamics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "tariffkit/errors.hpp"
#include "tariffkit/root_finding.hpp"

namespace tariffkit {

namespace {

double at_or_zero(const std::vector<double>& v, std::size_t i) {
  return i < v.size() ? v[i] : 0.0;
}

}  // namespace

void DynamicsParams::validate() const {
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("beta must lie in (0, 1)");
  if (!(yield > 0.0) || !std::isfinite(yield)) throw ConfigError("yield must be > 0");
  if (!(cost_c2 > 0.0) || !std::isfinite(cost_c2)) throw ConfigError("cost_c2 must be > 0");
  if (!std::isfinite(cost_c1)) throw ConfigError("cost_c1 must be finite");
  if (!(expectation_lambda >= 0.0 && expectation_lambda <= 1.0)) {
    throw ConfigError("expectation_lambda must lie in [0, 1]");
  }
  if (!(storage_loss >= 0.0 && storage_loss < 1.0)) {
    throw ConfigError("storage_loss must lie in [0, 1)");
  }
  if (!(working_stock >= 0.0) || !std::isfinite(working_stock)) {
    throw ConfigError("working_stock must be >= 0");
  }
  if (!(price_floor_frac >= 0.0 && price_floor_frac < 1.0)) {
    throw ConfigError("price_floor_frac must lie in [0, 1)");
  }
}

ShockPath ShockPath::zeros(std::size_t seasons) {
  ShockPath s;
  s.tau.assign(seasons, 0.0);
  s.eps_x.assign(seasons, 0.0);
  s.yield_shock.assign(seasons, 0.0);
  s.subsidy_rate.assign(seasons, 0.0);
  return s;
}

ShockPath ShockPath::persistent(std::size_t seasons, double tau, double eps_x,
                                std::size_t first_season) {
  ShockPath s = zeros(seasons);
  for (std::size_t t = first_season; t <= seasons; ++t) {
    s.tau[t - 1] = tau;
    s.eps_x[t - 1] = eps_x;
  }
  return s;
}

void ShockPath::validate(std::size_t seasons) const {
  for (const auto* v : {&tau, &eps_x, &yield_shock, &subsidy_rate}) {
    if (!v->empty() && v->size() < seasons) {
      throw ConfigError(fmt::format("shock path covers {} seasons, {} requested", v->size(),
                                    seasons));
    }
    for (double x : *v) {
      if (!std::isfinite(x)) throw ConfigError("shock path contains a non-finite value");
    }
  }
  for (double t : tau) {
    if (t < 0.0) throw ConfigError("shock path tau must be >= 0");
  }
  for (double y : yield_shock) {
    if (y <= -1.0) throw ConfigError("yield shock must exceed -1");
  }
  for (double r : subsidy_rate) {
    if (r < 0.0) throw ConfigError("subsidy rate must be >= 0");
  }
}

double optimal_acreage(double expected_price, const DynamicsParams& params) {
  params.validate();
  const double acreage = (expected_price * params.yield - params.cost_c1) / params.cost_c2;
  return std::max(0.0, acreage);
}

double export_demand_loglin(double p_hat, double tau, double eps_x, double eta_d) {
  if (!(tau > -1.0)) throw ConfigError("export demand requires 1 + tau > 0");
  return eps_x - eta_d * (p_hat + std::log1p(tau));
}

double steady_state_intercept(double price, double acreage, const DynamicsParams& params) {
  return price * params.yield - params.cost_c2 * acreage;
}

double steady_state_acreage(const MarketBaseline& baseline, const DynamicsParams& params) {
  return (baseline.total() + params.storage_loss * params.working_stock) / params.yield;
}

SeasonRecord steady_state(const DynamicsParams& params, const ElasticityParams& elas,
                          const MarketBaseline& baseline) {
  params.validate();
  elas.validate();
  baseline.validate();
  const double a0 = steady_state_acreage(baseline, params);
  const double chosen = optimal_acreage(baseline.p0, params);
  if (std::abs(chosen - a0) > 1e-9 * std::max(1.0, a0)) {
    throw ConfigError(fmt::format(
        "cost_c1 = {} is not a steady state: acreage {} is optimal at p0 but {} is needed "
        "(cost_c1 should be {})",
        params.cost_c1, chosen, a0, steady_state_intercept(baseline.p0, a0, params)));
  }
  SeasonRecord r;
  r.t = 0;
  r.expected_price = baseline.p0;
  r.realized_price = baseline.p0;
  r.acreage = a0;
  r.production = a0 * params.yield;
  r.domestic_use = baseline.q_us;
  r.exports_china = baseline.q_china;
  r.exports_row = baseline.q_row;
  r.inventory_end = params.working_stock;
  r.market_income = baseline.p0 * baseline.total();
  return r;
}

std::vector<SeasonRecord> simulate_path(const SeasonRecord& init, const DynamicsParams& params,
                                        const ElasticityParams& elas,
                                        const MarketBaseline& baseline,
                                        const ShockPath& shocks, std::size_t seasons) {
  params.validate();
  elas.validate();
  baseline.validate();
  if (seasons < 1) throw ConfigError("simulate_path needs at least one season");
  shocks.validate(seasons);

  const double scale = std::max(1.0, baseline.total());
  if (std::abs(optimal_acreage(init.expected_price, params) - init.acreage) >
          1e-9 * std::max(1.0, init.acreage) ||
      std::abs(init.production - params.storage_loss * init.inventory_end - baseline.total()) >
          1e-9 * scale) {
    throw ConfigError("initial season is not a tau = 0 steady state of the given parameters");
  }

  const double p0 = baseline.p0;
  const double floor_price = params.price_floor_frac * p0;
  std::vector<SeasonRecord> path;
  path.reserve(seasons + 1);
  path.push_back(init);

  for (std::size_t t = 1; t <= seasons; ++t) {
    const SeasonRecord& prev = path.back();
    const double tau = at_or_zero(shocks.tau, t - 1);
    const double eps = at_or_zero(shocks.eps_x, t - 1);
    const double rate = at_or_zero(shocks.subsidy_rate, t - 1);

    SeasonRecord r;
    r.t = static_cast<int>(t);
    r.tau = tau;
    r.expected_price = params.expectation_lambda * prev.realized_price +
                       (1.0 - params.expectation_lambda) * prev.expected_price;
    if (params.subsidy_in_expectations && t >= 2) {
      r.expected_price += at_or_zero(shocks.subsidy_rate, t - 2);
    }
    r.acreage = optimal_acreage(r.expected_price, params);
    r.production = r.acreage * params.yield * (1.0 + at_or_zero(shocks.yield_shock, t - 1));

    const double carried = (1.0 - params.storage_loss) * prev.inventory_end;
    const double available = r.production + carried;
    const double offered = available - params.working_stock;

    const double log_wedge = std::log1p(tau);
    const double q_china = baseline.q_china * std::exp(eps);
    auto segments = [&](double x, double& us, double& china, double& row) {
      us = baseline.q_us * std::exp(-elas.eta_d_us * x);
      china = q_china * std::exp(-elas.eta_d_china * (x + log_wedge));
      row = baseline.q_row * std::exp(-elas.eta_d_row * x);
    };
    auto excess = [&](double x) {
      double us, china, row;
      segments(x, us, china, row);
      return us + china + row - offered;
    };
    auto slope = [&](double x) {
      double us, china, row;
      segments(x, us, china, row);
      return -elas.eta_d_us * us - elas.eta_d_china * china - elas.eta_d_row * row;
    };

    double x = 0.0;
    try {
      if (!(offered > 0.0)) {
        throw NumericalError("nothing offered to the market after holding the working stock");
      }
      x = solve_log_price(excess, slope, LogBracket{p0});
    } catch (const NumericalError& e) {
      throw NumericalError(fmt::format("season {}: {}", t, e.what()));
    }

    double price = p0 * std::exp(x);
    if (price < floor_price) {
      price = floor_price;
      x = std::log(params.price_floor_frac);
      r.floor_binding = true;
    }
    r.realized_price = price;
    segments(x, r.domestic_use, r.exports_china, r.exports_row);
    r.inventory_end = available - r.sales();
    r.market_income = price * r.sales();
    r.subsidy_income = rate * r.production;
    path.push_back(r);
  }
  return path;
}

}  // namespace tariffkit
