#include "tariffkit/calibration.hpp"

#include <cmath>
#include <limits>

#include "tariffkit/errors.hpp"

namespace tariffkit {

void apply_grid_point(const CalibrationGrid& grid, std::size_t index, ElasticityParams& elas,
                      DynamicsParams& dyn, const MarketBaseline& baseline) {
  const std::size_t n_lambda = grid.lambda.size();
  const std::size_t n_c2 = grid.cost_c2.size();
  const std::size_t n_s = grid.eta_s.size();
  const std::size_t i_lambda = index % n_lambda;
  index /= n_lambda;
  const std::size_t i_c2 = index % n_c2;
  index /= n_c2;
  const std::size_t i_s = index % n_s;
  index /= n_s;
  const std::size_t i_d = index;

  elas.eta_d_china = grid.eta_d_china.at(i_d);
  elas.eta_s = grid.eta_s[i_s];
  dyn.cost_c2 = grid.cost_c2[i_c2];
  dyn.expectation_lambda = grid.lambda[i_lambda];
  dyn.cost_c1 = steady_state_intercept(baseline.p0, steady_state_acreage(baseline, dyn), dyn);
}

CalibrationMetrics evaluate_calibration(const CalibrationProblem& problem,
                                        const ElasticityParams& elas,
                                        const DynamicsParams& dyn) {
  CalibrationMetrics m;
  const EquilibriumSolution stat =
      solve_equilibrium(problem.baseline, elas, TariffScenario{problem.static_tau, 0.0});
  m.static_price = stat.price_change_frac;

  const SeasonRecord init = steady_state(dyn, elas, problem.baseline);
  const auto path = simulate_path(init, dyn, elas, problem.baseline, problem.shocks, 2);
  m.dynamic_price = path[1].realized_price / init.realized_price - 1.0;
  m.acreage = path[2].acreage / init.acreage - 1.0;
  m.exports_china = path[1].exports_china / init.exports_china - 1.0;
  return m;
}

double calibration_loss(const CalibrationMetrics& m, const CalibrationTargets& targets) {
  auto term = [](double achieved, const Band& band) {
    const double mid = band.mid();
    const double d = (achieved - mid) / mid;
    return d * d;
  };
  double loss = term(m.dynamic_price, targets.dynamic_price) + term(m.acreage, targets.acreage) +
                term(m.exports_china, targets.exports_china);
  if (targets.static_price) loss += term(m.static_price, *targets.static_price);
  return loss;
}

CalibrationResult calibrate_to_targets(const CalibrationProblem& problem,
                                       const CalibrationTargets& targets,
                                       const CalibrationGrid& grid, Execution exec) {
  const std::size_t n = grid.size();
  if (n == 0) throw ConfigError("calibration grid is empty");
  for (const Band* b : {&targets.dynamic_price, &targets.acreage, &targets.exports_china}) {
    if (b->mid() == 0.0) throw ConfigError("calibration target band has a zero midpoint");
  }
  if (targets.static_price && targets.static_price->mid() == 0.0) {
    throw ConfigError("calibration target band has a zero midpoint");
  }
  if (problem.shocks.size() < 2) throw ConfigError("calibration needs a two-season shock path");

  std::vector<double> losses(n, std::numeric_limits<double>::infinity());
  std::vector<CalibrationMetrics> metrics(n);
  for_each_index(n, exec, [&](std::size_t i) {
    ElasticityParams elas = problem.elasticities;
    DynamicsParams dyn = problem.dynamics;
    apply_grid_point(grid, i, elas, dyn, problem.baseline);
    try {
      metrics[i] = evaluate_calibration(problem, elas, dyn);
      losses[i] = calibration_loss(metrics[i], targets);
    } catch (const Error&) {
      // Infeasible grid point: leave its loss at +inf.
    }
  });

  std::size_t best = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isfinite(losses[i]) && (best == n || losses[i] < losses[best])) best = i;
  }
  if (best == n) throw NumericalError("calibration failed at every grid point");

  CalibrationResult out;
  out.elasticities = problem.elasticities;
  out.dynamics = problem.dynamics;
  apply_grid_point(grid, best, out.elasticities, out.dynamics, problem.baseline);
  out.achieved = metrics[best];
  out.loss = losses[best];
  out.grid_index = best;
  out.all_in_band = targets.dynamic_price.contains(out.achieved.dynamic_price) &&
                    targets.acreage.contains(out.achieved.acreage) &&
                    targets.exports_china.contains(out.achieved.exports_china) &&
                    (!targets.static_price || targets.static_price->contains(out.achieved.static_price));
  return out;
}

}  // namespace tariffkit
