#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tariffkit/datagen.hpp"
#include "tariffkit/econometrics/did.hpp"
#include "tariffkit/parallel.hpp"

namespace tariffkit {

// |t| above this counts as significant in the DiD experiments.
inline constexpr double kSignificanceT = 2.0;

struct ExperimentConfig {
  std::string experiment;
  std::size_t reps = 200;
  std::uint64_t seed = 0;
  Execution exec = Execution::parallel;

  // did-recovery, placebo, pretrend, table1
  PanelSpec panel;
  ExposureMode did_mode = ExposureMode::continuous;
  int fake_year = 0;  // placebo cutoff
  std::optional<int> real_treatment_year;
  double level = 0.95;

  // lag-selection, svar-recovery, shrinkage-risk
  VarSpec var;
  std::size_t fit_lags = 1;  // svar-recovery and shrinkage-risk
  std::size_t p_max = 6;     // lag-selection
  std::vector<double> lambda_grid;

  // iv-simultaneity
  SupplyDemandSpec supply_demand;
};

std::vector<std::string> experiment_names();

/// Default setup of a named experiment; throws ConfigError listing the names.
ExperimentConfig default_experiment(const std::string& name);

struct McResult {
  std::string experiment;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> columns;          // per-replication table, "rep" first
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, double>> aggregate;

  double aggregate_value(const std::string& key) const;
};

/// Replication r draws everything from derive_seed(seed, kStreamReplication, r),
/// so serial and parallel runs give identical tables.
McResult run_experiment(const ExperimentConfig& config);

}  // namespace tariffkit
