#include "tariffkit/market_model.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "tariffkit/errors.hpp"
#include "tariffkit/root_finding.hpp"

namespace tariffkit {

namespace {

void require_elasticity(double value, const char* name) {
  if (!std::isfinite(value) || value < 0.0) {
    throw ConfigError(fmt::format("{} must be finite and >= 0 (got {})", name, value));
  }
}

void require_quantity(double value, const char* name) {
  if (!std::isfinite(value) || value < 0.0) {
    throw ConfigError(fmt::format("{} must be finite and >= 0 (got {})", name, value));
  }
}

}  // namespace

void ElasticityParams::validate() const {
  require_elasticity(eta_d_us, "eta_d_us");
  require_elasticity(eta_d_china, "eta_d_china");
  require_elasticity(eta_d_row, "eta_d_row");
  require_elasticity(eta_s, "eta_s");
  if (eta_d_us + eta_d_china + eta_d_row + eta_s <= 0.0) {
    throw ConfigError("all elasticities are zero: the equilibrium price is indeterminate");
  }
}

void MarketBaseline::validate() const {
  if (!std::isfinite(p0) || p0 <= 0.0) {
    throw ConfigError(fmt::format("p0 must be > 0 (got {})", p0));
  }
  require_quantity(q_us, "q_us");
  require_quantity(q_china, "q_china");
  require_quantity(q_row, "q_row");
  if (total() <= 0.0) throw ConfigError("baseline quantities sum to zero");
}

void TariffScenario::validate() const {
  if (!std::isfinite(tau) || tau < 0.0) {
    throw ConfigError(fmt::format("tau must be >= 0 (got {})", tau));
  }
  if (!std::isfinite(subsidy_rate) || subsidy_rate < 0.0) {
    throw ConfigError(fmt::format("subsidy_rate must be >= 0 (got {})", subsidy_rate));
  }
}

DemandShares DemandShares::of(const MarketBaseline& baseline) {
  const double total = baseline.total();
  return {baseline.q_us / total, baseline.q_china / total, baseline.q_row / total};
}

double incidence_approx(double eta_d_eff, double eta_s_eff, double tau) {
  const double denom = eta_s_eff + eta_d_eff;
  if (denom == 0.0 || !std::isfinite(denom)) {
    throw ConfigError("incidence formula denominator eta_s + eta_d is zero");
  }
  return -eta_d_eff / denom * tau;
}

double incidence_approx(const ElasticityParams& elas, double tau, const DemandShares& shares) {
  for (double s : {shares.us, shares.china, shares.row}) {
    if (!(s >= 0.0 && s <= 1.0)) throw ConfigError("demand shares must lie in [0, 1]");
  }
  const double eta_d_eff = shares.china * elas.eta_d_china;
  const double eta_s_eff = elas.eta_s + shares.us * elas.eta_d_us + shares.row * elas.eta_d_row;
  return incidence_approx(eta_d_eff, eta_s_eff, tau);
}

EquilibriumSolution solve_equilibrium(const MarketBaseline& baseline,
                                      const ElasticityParams& elas,
                                      const TariffScenario& scenario) {
  baseline.validate();
  elas.validate();
  scenario.validate();
  const DemandShares shares = DemandShares::of(baseline);
  if (elas.eta_s + shares.us * elas.eta_d_us + shares.china * elas.eta_d_china +
          shares.row * elas.eta_d_row <=
      0.0) {
    throw ConfigError("eta_s plus share-weighted demand elasticity must be > 0");
  }

  const double q0 = baseline.total();
  const double log_wedge = std::log1p(scenario.tau);
  auto segments = [&](double x, double& us, double& china, double& row) {
    us = baseline.q_us * std::exp(-elas.eta_d_us * x);
    china = baseline.q_china * std::exp(-elas.eta_d_china * (x + log_wedge));
    row = baseline.q_row * std::exp(-elas.eta_d_row * x);
  };
  auto excess = [&](double x) {
    double us, china, row;
    segments(x, us, china, row);
    return (us + china + row) - q0 * std::exp(elas.eta_s * x);
  };
  auto slope = [&](double x) {
    double us, china, row;
    segments(x, us, china, row);
    return -elas.eta_d_us * us - elas.eta_d_china * china - elas.eta_d_row * row -
           elas.eta_s * q0 * std::exp(elas.eta_s * x);
  };

  const double x = solve_log_price(excess, slope, LogBracket{baseline.p0});

  EquilibriumSolution sol;
  sol.tau = scenario.tau;
  sol.p_producer = baseline.p0 * std::exp(x);
  sol.p_china = sol.p_producer * (1.0 + scenario.tau);
  segments(x, sol.q_us, sol.q_china, sol.q_row);
  sol.total_supply = q0 * std::exp(elas.eta_s * x);
  sol.producer_revenue = sol.p_producer * sol.total_supply;
  sol.price_change_frac = std::expm1(x);
  if (scenario.subsidy_rate > 0.0) sol = apply_subsidy(sol, scenario.subsidy_rate);
  return sol;
}

EquilibriumSolution apply_subsidy(const EquilibriumSolution& sol, double rate) {
  if (!std::isfinite(rate) || rate < 0.0) {
    throw ConfigError(fmt::format("subsidy rate must be >= 0 (got {})", rate));
  }
  EquilibriumSolution out = sol;
  const double market = sol.market_revenue();
  out.subsidy_payment = rate * sol.total_supply;
  out.producer_revenue = market + out.subsidy_payment;
  return out;
}

std::optional<double> compensation_ratio(const EquilibriumSolution& pre,
                                         const EquilibriumSolution& post) {
  const double loss = pre.market_revenue() - post.market_revenue();
  if (!(loss > 0.0)) return std::nullopt;
  return post.subsidy_payment / loss;
}

// ---------------------------------------------------------------------------

double ExporterSupply::supply(double price) const { return q0 * std::pow(price / p0, eta_s); }

double DestinationDemand::demand(double price) const {
  return q0 * std::pow(price / p0, -eta_d);
}

void TwoExporterMarket::validate() const {
  for (const ExporterSupply* e : {&us, &brazil}) {
    if (!(e->p0 > 0.0) || !(e->q0 > 0.0)) {
      throw ConfigError("exporter baseline price and quantity must be > 0");
    }
    require_elasticity(e->eta_s, "exporter eta_s");
  }
  for (const DestinationDemand* d : {&china, &row}) {
    if (!(d->p0 > 0.0) || !(d->q0 > 0.0)) {
      throw ConfigError("destination baseline price and quantity must be > 0");
    }
    require_elasticity(d->eta_d, "destination eta_d");
  }
  if (us.eta_s + brazil.eta_s + china.eta_d + row.eta_d <= 0.0) {
    throw ConfigError("all two-exporter elasticities are zero: prices are indeterminate");
  }
}

std::string to_string(TradeRegime regime) {
  switch (regime) {
    case TradeRegime::integrated: return "integrated";
    case TradeRegime::segmented: return "segmented";
    case TradeRegime::china_parity: return "china_parity";
  }
  return "unknown";
}

TwoExporterSolution solve_two_exporter(const TwoExporterMarket& m, double tau) {
  m.validate();
  if (!std::isfinite(tau) || tau < 0.0) {
    throw ConfigError(fmt::format("tau must be >= 0 (got {})", tau));
  }
  using S = TwoExporterSolution;
  const double ref = m.us.p0;
  const LogBracket bracket{ref};
  const double wedge = 1.0 + tau;

  auto integrated_price = [&] {
    const double x = solve_log_price(
        [&](double x) {
          const double p = ref * std::exp(x);
          return m.china.demand(p) + m.row.demand(p) - m.us.supply(p) - m.brazil.supply(p);
        },
        {}, bracket);
    return ref * std::exp(x);
  };

  S sol;
  sol.tau = tau;

  if (tau == 0.0) {
    const double p = integrated_price();
    const double s_us = m.us.supply(p);
    const double s_br = m.brazil.supply(p);
    const double total = s_us + s_br;
    const double d_cn = m.china.demand(p);
    const double d_row = m.row.demand(p);
    sol.p_us = sol.p_brazil = sol.p_china_paid = sol.p_row_paid = p;
    sol.flow[S::kUs][S::kChina] = s_us * d_cn / total;
    sol.flow[S::kUs][S::kRow] = s_us * d_row / total;
    sol.flow[S::kBrazil][S::kChina] = s_br * d_cn / total;
    sol.flow[S::kBrazil][S::kRow] = s_br * d_row / total;
    sol.diversion_share = s_br / total;
    sol.regime = TradeRegime::integrated;
    return sol;
  }

  // Candidate: each exporter clears one destination on its own.
  const double p_br_seg =
      ref * std::exp(solve_log_price(
                [&](double x) {
                  const double p = ref * std::exp(x);
                  return m.china.demand(p) - m.brazil.supply(p);
                },
                {}, bracket));
  const double p_us_seg =
      ref * std::exp(solve_log_price(
                [&](double x) {
                  const double p = ref * std::exp(x);
                  return m.row.demand(p) - m.us.supply(p);
                },
                {}, bracket));

  if (p_br_seg < p_us_seg) {
    // Brazil has supply left over for the rest of the world at one common price;
    // China buys only from Brazil because US beans carry the tariff.
    const double p = integrated_price();
    const double d_cn = m.china.demand(p);
    sol.p_us = sol.p_brazil = sol.p_china_paid = sol.p_row_paid = p;
    sol.flow[S::kBrazil][S::kChina] = d_cn;
    sol.flow[S::kBrazil][S::kRow] = std::max(0.0, m.brazil.supply(p) - d_cn);
    sol.flow[S::kUs][S::kRow] = m.us.supply(p);
    sol.diversion_share = 1.0;
    sol.regime = TradeRegime::integrated;
  } else if (p_br_seg <= wedge * p_us_seg) {
    sol.p_us = sol.p_row_paid = p_us_seg;
    sol.p_brazil = sol.p_china_paid = p_br_seg;
    sol.flow[S::kBrazil][S::kChina] = m.brazil.supply(p_br_seg);
    sol.flow[S::kUs][S::kRow] = m.us.supply(p_us_seg);
    sol.diversion_share = 1.0;
    sol.regime = TradeRegime::segmented;
  } else {
    const double x = solve_log_price(
        [&](double x) {
          const double p_us = ref * std::exp(x);
          const double p_br = wedge * p_us;
          return m.china.demand(p_br) + m.row.demand(p_us) - m.us.supply(p_us) -
                 m.brazil.supply(p_br);
        },
        {}, bracket);
    const double p_us = ref * std::exp(x);
    const double p_br = wedge * p_us;
    const double d_cn = m.china.demand(p_br);
    const double s_br = m.brazil.supply(p_br);
    sol.p_us = sol.p_row_paid = p_us;
    sol.p_brazil = sol.p_china_paid = p_br;
    sol.flow[S::kBrazil][S::kChina] = s_br;
    sol.flow[S::kUs][S::kChina] = std::max(0.0, d_cn - s_br);
    sol.flow[S::kUs][S::kRow] = m.row.demand(p_us);
    sol.diversion_share = s_br / d_cn;
    sol.regime = TradeRegime::china_parity;
  }
  return sol;
}

}  // namespace tariffkit
