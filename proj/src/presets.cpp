#include "tariffkit/presets.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "tariffkit/errors.hpp"

namespace tariffkit {

namespace {

std::vector<double> steps(double lo, double hi, double step) {
  std::vector<double> v;
  const auto n = static_cast<int>(std::llround((hi - lo) / step));
  for (int i = 0; i <= n; ++i) v.push_back(lo + step * i);
  return v;
}

PresetBundle base_2018() {
  PresetBundle b;
  b.name = "paper2018";
  b.description =
      "25% Chinese tariff on US soybeans in the 2018/19 marketing year; season 0 is 2017/18";

  b.baseline = MarketBaseline{9.30, 2200.0, 1300.0, 890.0};
  b.elasticities = ElasticityParams{0.3, 3.0, 1.0, 2.5};
  b.tariff = TariffScenario{0.25, 1.65};

  b.dynamics.beta = 0.96;
  b.dynamics.yield = 50.0;
  b.dynamics.expectation_lambda = 1.0;
  b.dynamics.storage_loss = 0.025;
  b.dynamics.working_stock = 400.0;
  b.dynamics.price_floor_frac = 0.902;
  b.dynamics.cost_c2 = 3.55;
  b.dynamics.cost_c1 = steady_state_intercept(
      b.baseline.p0, steady_state_acreage(b.baseline, b.dynamics), b.dynamics);
  b.seasons = 4;
  b.shocks = ShockPath::persistent(b.seasons, b.tariff.tau, -0.93);

  b.targets.static_price = Band{-0.05, -0.04};
  b.targets.dynamic_price = Band{-0.10, -0.08};
  b.targets.acreage = Band{-0.15, -0.14};
  b.targets.exports_china = Band{-0.75, -0.70};
  b.grid.eta_d_china = {2.0, 2.5, 3.0, 3.5, 4.0};
  b.grid.eta_s = {1.5, 2.0, 2.5, 3.0, 3.5};
  b.grid.cost_c2 = steps(2.0, 5.0, 0.05);
  b.grid.lambda = {0.5, 0.75, 1.0};

  b.two_exporter.us = ExporterSupply{9.30, 2200.0, 1.0};
  b.two_exporter.brazil = ExporterSupply{9.30, 2600.0, 1.0};
  b.two_exporter.china = DestinationDemand{9.30, 3400.0, 0.5};
  b.two_exporter.row = DestinationDemand{9.30, 1400.0, 1.5};

  b.panel.n_states = 50;
  b.panel.first_year = 2015;
  b.panel.last_year = 2019;
  b.panel.exposure.kind = ExposureRule::Kind::binary;
  b.panel.exposure.n_treated = 12;
  b.panel.alpha = 10.0;
  b.panel.beta_true = -1.6;
  b.panel.sigma_state = 1.0;
  b.panel.sigma_year = 0.5;
  b.panel.sigma_noise = 1.75;
  b.panel.treatment_year = 2018;
  b.panel.post_year_shift = -0.2;
  b.panel.seed = 2018;
  b.did_mode = ExposureMode::binary;
  b.treatment_year = 2018;

  VarSpec& v = b.var;
  v.names = {"price", "exports", "inventory"};
  Matrix a1(3, 3), a2(3, 3), a3(3, 3);
  a1 << 0.60, 0.15, -0.05,
        0.05, 0.50, 0.00,
       -0.10, -0.20, 0.70;
  a2 << 0.10, 0.05, 0.00,
        0.00, 0.15, 0.00,
        0.00, 0.00, 0.10;
  a3 << 0.05, 0.00, 0.00,
        0.00, 0.05, 0.00,
        0.00, 0.00, 0.05;
  v.lags = {a1, a2, a3};
  v.b0 = Matrix::Zero(3, 3);
  v.b0(0, 0) = 0.8;
  v.b0(0, 1) = 1.4;
  v.b0(1, 1) = 8.0;
  v.b0(2, 0) = 0.5;
  v.b0(2, 1) = -3.0;
  v.b0(2, 2) = 3.0;
  v.mean = Vector::Constant(3, 100.0);
  v.ordering = {1, 0, 2};
  v.T = 60;
  v.shock_date = 42;
  v.shock_vector = Vector::Zero(3);
  v.shock_vector(1) = -10.5;
  v.dummy_length = 1;
  v.seed = 1805;
  b.var_lags = 3;
  b.var_p_max = 6;

  b.supply_demand.seed = 2019;
  return b;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"paper2018", "paper2018-2x", "tradewar", "placebo2015"};
}

PresetBundle preset(const std::string& name) {
  PresetBundle b = base_2018();
  if (name == "paper2018") return b;
  if (name == "paper2018-2x") {
    b.name = name;
    b.description = "2018 tariff with Brazil as a second exporter serving China";
    return b;
  }
  if (name == "tradewar") {
    b.name = name;
    b.description = "monthly price, exports and inventory with the tariff as a large negative "
                    "exports shock, plus a supply-demand sample for 2SLS";
    return b;
  }
  if (name == "placebo2015") {
    b.name = name;
    b.description = "fake tariff in 2015 on a panel that ends before the real 2018 tariff";
    b.panel.first_year = 2014;
    b.panel.last_year = 2017;
    b.panel.treatment_year = 2015;
    b.panel.beta_true = 0.0;
    b.panel.post_year_shift = 0.0;
    b.panel.seed = 2015;
    b.treatment_year = 2015;
    b.real_treatment_year = 2018;
    return b;
  }
  throw ConfigError(fmt::format("unknown preset '{}'; available presets: {}", name,
                                fmt::join(preset_names(), ", ")));
}

CalibrationProblem calibration_problem(const PresetBundle& bundle) {
  CalibrationProblem p;
  p.baseline = bundle.baseline;
  p.elasticities = bundle.elasticities;
  p.dynamics = bundle.dynamics;
  p.shocks = bundle.shocks;
  p.static_tau = bundle.tariff.tau;
  return p;
}

}  // namespace tariffkit
