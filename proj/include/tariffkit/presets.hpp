#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tariffkit/calibration.hpp"
#include "tariffkit/datagen.hpp"
#include "tariffkit/dynamics.hpp"
#include "tariffkit/econometrics/did.hpp"
#include "tariffkit/market_model.hpp"

namespace tariffkit {

// Every block is populated for every preset; a preset differs from the
// common 2018 scenario only where its name says so.
struct PresetBundle {
  std::string name;
  std::string description;

  // Static market and tariff.
  MarketBaseline baseline;
  ElasticityParams elasticities;
  TariffScenario tariff;

  // Seasonal path.
  DynamicsParams dynamics;
  ShockPath shocks;
  std::size_t seasons = 0;
  CalibrationTargets targets;
  CalibrationGrid grid;

  TwoExporterMarket two_exporter;

  // State panel and DiD.
  PanelSpec panel;
  ExposureMode did_mode = ExposureMode::binary;
  int treatment_year = 0;                  // cutoff handed to the estimator
  std::optional<int> real_treatment_year;  // set when treatment_year is a placebo

  // Monthly trade series and SVAR.
  VarSpec var;
  std::size_t var_lags = 3;
  std::size_t var_p_max = 6;

  // Log price / quantity sample for 2SLS.
  SupplyDemandSpec supply_demand;
};

std::vector<std::string> preset_names();

/// Throws ConfigError listing the available names for an unknown preset.
PresetBundle preset(const std::string& name);

/// The calibration problem implied by a bundle (targets and grid alongside).
CalibrationProblem calibration_problem(const PresetBundle& bundle);

}  // namespace tariffkit
