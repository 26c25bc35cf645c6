#include <doctest.h>

#include <cmath>

#include "tariffkit/calibration.hpp"
#include "tariffkit/dynamics.hpp"
#include "tariffkit/errors.hpp"
#include "tariffkit/presets.hpp"

using namespace tariffkit;

namespace {

std::vector<SeasonRecord> preset_path(const PresetBundle& b, const ShockPath& shocks) {
  const SeasonRecord init = steady_state(b.dynamics, b.elasticities, b.baseline);
  return simulate_path(init, b.dynamics, b.elasticities, b.baseline, shocks, shocks.size());
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("acreage solves the linear first-order condition") {
  DynamicsParams d;
  d.yield = 50.0;
  d.cost_c1 = 150.0;
  d.cost_c2 = 3.5;
  CHECK(optimal_acreage(9.3, d) == doctest::Approx((9.3 * 50.0 - 150.0) / 3.5));
  CHECK(optimal_acreage(1.0, d) == 0.0);  // corner
  d.cost_c2 = 0.0;
  CHECK_THROWS_AS(optimal_acreage(9.3, d), ConfigError);
}

TEST_CASE("log-linear export demand") {
  CHECK(export_demand_loglin(0.0, 0.0, 0.0, 3.0) == 0.0);
  CHECK(export_demand_loglin(-0.044, 0.25, 0.0, 3.0) ==
        doctest::Approx(-3.0 * (-0.044 + std::log(1.25))));
  CHECK(export_demand_loglin(-0.1, 0.25, -0.93, 1.5) ==
        doctest::Approx(-0.93 - 1.5 * (-0.1 + std::log(1.25))));
  CHECK_THROWS_AS(export_demand_loglin(0.0, -1.0, 0.0, 1.0), ConfigError);
}

TEST_CASE("steady-state intercept reproduces baseline acreage") {
  const PresetBundle b = preset("paper2018");
  const double a0 = steady_state_acreage(b.baseline, b.dynamics);
  CHECK(a0 == doctest::Approx((4390.0 + 0.025 * 400.0) / 50.0));
  CHECK(b.dynamics.cost_c1 == doctest::Approx(9.30 * 50.0 - b.dynamics.cost_c2 * a0));
  CHECK(optimal_acreage(b.baseline.p0, b.dynamics) == doctest::Approx(a0));

  DynamicsParams wrong = b.dynamics;
  wrong.cost_c1 += 1.0;
  CHECK_THROWS_AS(steady_state(wrong, b.elasticities, b.baseline), ConfigError);
}

TEST_CASE("no shocks keeps the market at its steady state") {
  const PresetBundle b = preset("paper2018");
  const auto path = preset_path(b, ShockPath::zeros(6));
  REQUIRE(path.size() == 7);
  for (const auto& r : path) {
    CHECK(r.realized_price == doctest::Approx(b.baseline.p0).epsilon(1e-10));
    CHECK(r.acreage == doctest::Approx(path[0].acreage).epsilon(1e-10));
    CHECK(r.inventory_end == doctest::Approx(b.dynamics.working_stock).epsilon(1e-9));
    CHECK_FALSE(r.floor_binding);
  }
}

TEST_CASE("mass balance holds in every season") {
  const PresetBundle b = preset("paper2018");
  ShockPath s = ShockPath::persistent(8, 0.25, -0.93);
  s.yield_shock[2] = 0.1;
  s.yield_shock[5] = -0.2;
  const auto path = preset_path(b, s);
  for (std::size_t t = 1; t < path.size(); ++t) {
    const double carried = (1.0 - b.dynamics.storage_loss) * path[t - 1].inventory_end;
    CHECK(path[t].production + carried ==
          doctest::Approx(path[t].sales() + path[t].inventory_end).epsilon(1e-12));
    CHECK(path[t].inventory_end >= b.dynamics.working_stock - 1e-9);
  }
}

TEST_CASE("the floor is never breached and rationing builds stocks") {
  const PresetBundle b = preset("paper2018");
  const auto path = preset_path(b, b.shocks);
  const double floor_price = b.dynamics.price_floor_frac * b.baseline.p0;
  for (std::size_t t = 1; t < path.size(); ++t) {
    CHECK(path[t].realized_price >= floor_price - 1e-12);
    if (path[t].floor_binding) {
      CHECK(path[t].realized_price == doctest::Approx(floor_price));
      CHECK(path[t].inventory_end > b.dynamics.working_stock);
    }
  }
  CHECK(path[1].floor_binding);
  CHECK(path[1].inventory_end / path[0].inventory_end >= 1.8);
}

TEST_CASE("adaptive expectations") {
  const PresetBundle base = preset("paper2018");
  for (double lambda : {0.0, 0.5, 1.0}) {
    PresetBundle b = base;
    b.dynamics.expectation_lambda = lambda;
    const auto path = preset_path(b, b.shocks);
    for (std::size_t t = 1; t < path.size(); ++t) {
      CHECK(path[t].expected_price ==
            doctest::Approx(lambda * path[t - 1].realized_price +
                            (1.0 - lambda) * path[t - 1].expected_price));
      CHECK(path[t].acreage == doctest::Approx(optimal_acreage(path[t].expected_price, b.dynamics)));
    }
  }
}

TEST_CASE("acreage responds to a lower expected price") {
  const PresetBundle b = preset("paper2018");
  const double a0 = optimal_acreage(b.baseline.p0, b.dynamics);
  const double a1 = optimal_acreage(0.9 * b.baseline.p0, b.dynamics);
  CHECK(a1 < a0);
  CHECK(a1 / a0 - 1.0 == doctest::Approx(-0.1 * b.baseline.p0 * b.dynamics.yield /
                                         (b.dynamics.cost_c2 * a0)));
}

TEST_CASE("subsidy income is rate times production") {
  const PresetBundle b = preset("paper2018");
  ShockPath s = b.shocks;
  for (auto& r : s.subsidy_rate) r = 1.65;
  const auto path = preset_path(b, s);
  CHECK(path[1].production == doctest::Approx(4400.0));
  CHECK(path[1].subsidy_income == doctest::Approx(7260.0));
  for (std::size_t t = 1; t < path.size(); ++t) {
    CHECK(path[t].subsidy_income == doctest::Approx(1.65 * path[t].production));
  }
}

TEST_CASE("shock path validation") {
  ShockPath s = ShockPath::persistent(3, 0.25, -0.5);
  CHECK(s.tau == std::vector<double>{0.25, 0.25, 0.25});
  CHECK_THROWS_AS(s.validate(4), ConfigError);
  s.subsidy_rate[0] = -1.0;
  CHECK_THROWS_AS(s.validate(3), ConfigError);
}

TEST_CASE("grid points are row-major with lambda fastest") {
  const PresetBundle b = preset("paper2018");
  const CalibrationGrid& g = b.grid;
  ElasticityParams e = b.elasticities;
  DynamicsParams d = b.dynamics;
  const std::size_t i = 1, j = 3, k = 7, l = 2;
  const std::size_t index = ((i * g.eta_s.size() + j) * g.cost_c2.size() + k) * g.lambda.size() + l;
  apply_grid_point(g, index, e, d, b.baseline);
  CHECK(e.eta_d_china == g.eta_d_china[i]);
  CHECK(e.eta_s == g.eta_s[j]);
  CHECK(d.cost_c2 == g.cost_c2[k]);
  CHECK(d.expectation_lambda == g.lambda[l]);
  CHECK(optimal_acreage(b.baseline.p0, d) ==
        doctest::Approx(steady_state_acreage(b.baseline, d)));
}

TEST_CASE("calibration loss") {
  CalibrationTargets t;
  t.static_price = Band{-0.05, -0.04};
  t.dynamic_price = Band{-0.10, -0.08};
  t.acreage = Band{-0.15, -0.14};
  t.exports_china = Band{-0.75, -0.70};
  CalibrationMetrics m{-0.045, -0.09, -0.145, -0.725};
  CHECK(calibration_loss(m, t) == doctest::Approx(0.0));
  m.exports_china = -0.8;
  const double r = (-0.8 + 0.725) / -0.725;
  CHECK(calibration_loss(m, t) == doctest::Approx(r * r));
  t.static_price.reset();
  m.static_price = 1.0;
  CHECK(calibration_loss(m, t) == doctest::Approx(r * r));
}

TEST_CASE("calibration on a small grid: serial equals parallel, ties go low") {
  const PresetBundle b = preset("paper2018");
  CalibrationGrid g;
  g.eta_d_china = {3.0, 3.0};  // duplicate values tie exactly
  g.eta_s = {2.0, 2.5};
  g.cost_c2 = {3.0, 3.55, 4.0};
  g.lambda = {1.0};
  const auto problem = calibration_problem(b);
  const auto serial = calibrate_to_targets(problem, b.targets, g, Execution::serial);
  const auto parallel = calibrate_to_targets(problem, b.targets, g, Execution::parallel);
  CHECK(serial.grid_index == parallel.grid_index);
  CHECK(serial.loss == parallel.loss);
  CHECK(serial.grid_index < g.eta_s.size() * g.cost_c2.size());

  double best = INFINITY;
  for (std::size_t i = 0; i < g.size(); ++i) {
    ElasticityParams e = problem.elasticities;
    DynamicsParams d = problem.dynamics;
    apply_grid_point(g, i, e, d, problem.baseline);
    best = std::min(best, calibration_loss(evaluate_calibration(problem, e, d), b.targets));
  }
  CHECK(serial.loss == best);
}

TEST_CASE("preset parameters sit at the calibrated grid point") {
  const PresetBundle b = preset("paper2018");
  const auto m = evaluate_calibration(calibration_problem(b), b.elasticities, b.dynamics);
  CHECK(b.targets.static_price->contains(m.static_price));
  CHECK(b.targets.dynamic_price.contains(m.dynamic_price));
  CHECK(b.targets.acreage.contains(m.acreage));
  CHECK(b.targets.exports_china.contains(m.exports_china));
}

}  // TEST_SUITE
