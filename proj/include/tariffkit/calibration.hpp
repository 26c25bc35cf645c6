#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <vector>

#include "tariffkit/dynamics.hpp"
#include "tariffkit/market_model.hpp"
#include "tariffkit/parallel.hpp"

namespace tariffkit {

struct Band {
  double lo = 0.0;
  double hi = 0.0;

  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double x) const { return x >= std::min(lo, hi) && x <= std::max(lo, hi); }
};

// Targets are signed fractional changes relative to season 0 (drops are
// negative). static_price is the tau-only incidence from solve_equilibrium.
struct CalibrationTargets {
  std::optional<Band> static_price;
  Band dynamic_price;   // season-1 realized price
  Band acreage;         // season-2 acreage
  Band exports_china;   // season-1 exports to China
};

struct CalibrationGrid {
  std::vector<double> eta_d_china;
  std::vector<double> eta_s;
  std::vector<double> cost_c2;
  std::vector<double> lambda;

  std::size_t size() const {
    return eta_d_china.size() * eta_s.size() * cost_c2.size() * lambda.size();
  }
};

// Everything held fixed while the grid is searched. The cost intercept is
// re-derived at each grid point so season 0 stays a steady state.
struct CalibrationProblem {
  MarketBaseline baseline;
  ElasticityParams elasticities;
  DynamicsParams dynamics;
  ShockPath shocks;  // must cover at least two seasons
  double static_tau = 0.25;
};

struct CalibrationMetrics {
  double static_price = 0.0;
  double dynamic_price = 0.0;
  double acreage = 0.0;
  double exports_china = 0.0;
};

struct CalibrationResult {
  ElasticityParams elasticities;
  DynamicsParams dynamics;
  CalibrationMetrics achieved;
  double loss = 0.0;
  bool all_in_band = false;
  std::size_t grid_index = 0;
};

/// Parameters at one grid point (row-major over eta_d_china, eta_s, c2, lambda).
void apply_grid_point(const CalibrationGrid& grid, std::size_t index, ElasticityParams& elas,
                      DynamicsParams& dyn, const MarketBaseline& baseline);

CalibrationMetrics evaluate_calibration(const CalibrationProblem& problem,
                                        const ElasticityParams& elas,
                                        const DynamicsParams& dyn);

/// Sum over targets of ((achieved - midpoint) / midpoint)^2.
double calibration_loss(const CalibrationMetrics& m, const CalibrationTargets& targets);

/// Exhaustive grid search; ties go to the lowest grid index. Grid points whose
/// simulation fails are skipped. The result is flagged (all_in_band = false)
/// when the best point misses any band.
CalibrationResult calibrate_to_targets(const CalibrationProblem& problem,
                                       const CalibrationTargets& targets,
                                       const CalibrationGrid& grid,
                                       Execution exec = Execution::parallel);

}  // namespace tariffkit
