#include <doctest.h>

#include <cmath>
#include <set>

#include "tariffkit/datagen.hpp"
#include "tariffkit/errors.hpp"
#include "tariffkit/presets.hpp"
#include "tariffkit/rng.hpp"

using namespace tariffkit;

namespace {

PanelSpec small_panel() {
  PanelSpec s;
  s.n_states = 12;
  s.first_year = 2014;
  s.last_year = 2019;
  s.alpha = 3.0;
  s.beta_true = -1.6;
  s.treatment_year = 2018;
  s.seed = 11;
  return s;
}

}  // namespace

TEST_SUITE("datagen") {

TEST_CASE("stream splitting is deterministic and distinct") {
  static_assert(derive_seed(1, 2) == derive_seed(1, 2));
  CHECK(derive_seed(1, 2) != derive_seed(1, 3));
  CHECK(derive_seed(1, 2) != derive_seed(2, 2));
  CHECK(derive_seed(5, 8, 0) != derive_seed(5, 8, 1));
  CHECK(derive_seed(5, 8, 3) == derive_seed(derive_seed(5, 8), 3));
  // SplitMix64 reference value for input 0.
  CHECK(splitmix64(0) == 0xE220A8397B1DCDAFULL);

  Rng a(3), b(3);
  CHECK(a.normal(0.0, 0.0) == 0.0);
  (void)b.normal();
  CHECK(a.normal() == b.normal());  // sd = 0 still consumed a draw
}

TEST_CASE("panel is balanced, sorted and reproducible") {
  const PanelSpec s = small_panel();
  const StatePanel p = generate_did_panel(s);
  CHECK(p.rows.size() == s.n_states * s.n_years());
  CHECK(p.states().size() == s.n_states);
  CHECK(p.years() == std::vector<int>{2014, 2015, 2016, 2017, 2018, 2019});
  CHECK_NOTHROW(p.validate_balanced());
  for (std::size_t i = 1; i < p.rows.size(); ++i) {
    const auto& a = p.rows[i - 1];
    const auto& b = p.rows[i];
    CHECK((a.state_id < b.state_id || (a.state_id == b.state_id && a.year < b.year)));
  }
  const StatePanel again = generate_did_panel(s);
  for (std::size_t i = 0; i < p.rows.size(); ++i) CHECK(p.rows[i].outcome == again.rows[i].outcome);

  PanelSpec other = s;
  other.seed = 12;
  CHECK(generate_did_panel(other).rows[0].outcome != p.rows[0].outcome);
  REQUIRE(p.ground_truth.has_value());
  CHECK(p.ground_truth->beta_true == s.beta_true);
}

TEST_CASE("outcome decomposes into its planted components") {
  PanelSpec s = small_panel();
  s.differential_trend = 0.3;
  s.post_year_shift = -0.2;
  const PanelDraws d = generate_did_panel_draws(s);
  const std::size_t T = s.n_years();
  for (std::size_t i = 0; i < s.n_states; ++i) {
    for (std::size_t t = 0; t < T; ++t) {
      const std::size_t row = i * T + t;
      const int year = s.first_year + static_cast<int>(t);
      const double post = year >= s.treatment_year ? 1.0 : 0.0;
      const double e = d.exposure[i];
      const double want = s.alpha + d.state_effect[i] + d.year_effect[t] +
                          s.beta_true * post * e +
                          s.differential_trend * e * (year - s.treatment_year + 1) + d.noise[row];
      CHECK(d.panel.rows[row].outcome == doctest::Approx(want).epsilon(1e-13));
      CHECK(d.panel.rows[row].exposure == e);
    }
  }
}

TEST_CASE("noiseless panel") {
  PanelSpec s = small_panel();
  s.sigma_state = s.sigma_year = s.sigma_noise = 0.0;
  const StatePanel p = generate_did_panel(s);
  for (const auto& r : p.rows) {
    const double post = r.year >= s.treatment_year ? 1.0 : 0.0;
    CHECK(r.outcome == doctest::Approx(s.alpha + s.beta_true * post * r.exposure));
  }
}

TEST_CASE("exposure rules") {
  PanelSpec s = small_panel();
  s.exposure.kind = ExposureRule::Kind::binary;
  s.exposure.n_treated = 4;
  const PanelDraws d = generate_did_panel_draws(s);
  for (std::size_t i = 0; i < s.n_states; ++i) CHECK(d.exposure[i] == (i < 4 ? 1.0 : 0.0));

  s.exposure.kind = ExposureRule::Kind::uniform;
  for (double e : generate_did_panel_draws(s).exposure) CHECK((e >= 0.05 && e <= 0.6));

  s.exposure.kind = ExposureRule::Kind::explicit_values;
  s.exposure.values = {0.1, 0.2};
  CHECK_THROWS_AS(generate_did_panel(s), ConfigError);

  CHECK(parse_exposure_kind(to_string(ExposureRule::Kind::binary)) == ExposureRule::Kind::binary);
  CHECK_THROWS_AS(parse_exposure_kind("lognormal"), ConfigError);
}

TEST_CASE("invalid panel specs") {
  PanelSpec s = small_panel();
  s.last_year = s.first_year - 1;
  CHECK_THROWS_AS(generate_did_panel(s), ConfigError);
  s = small_panel();
  s.sigma_noise = -1.0;
  CHECK_THROWS_AS(generate_did_panel(s), ConfigError);
  s = small_panel();
  s.n_states = 0;
  CHECK_THROWS_AS(generate_did_panel(s), ConfigError);
}

TEST_CASE("balanced-panel validation catches gaps and duplicates") {
  StatePanel p = generate_did_panel(small_panel());
  StatePanel gap = p;
  gap.rows.pop_back();
  CHECK_THROWS_AS(gap.validate_balanced(), ConfigError);
  StatePanel dup = p;
  dup.rows[1].year = dup.rows[0].year;
  CHECK_THROWS_AS(dup.validate_balanced(), ConfigError);
  StatePanel varying = p;
  varying.rows[1].exposure += 0.1;
  CHECK_THROWS_AS(varying.validate_balanced(), ConfigError);
}

TEST_CASE("instrument column is fixed within state and correlated with exposure") {
  PanelSpec s = small_panel();
  s.n_states = 400;
  const StatePanel p = attach_exposure_instrument(generate_did_panel(s), 0.5, 3);
  const auto* z = p.column("instrument");
  REQUIRE(z != nullptr);
  const std::size_t T = s.n_years();
  double sx = 0, sz = 0, sxx = 0, szz = 0, sxz = 0;
  for (std::size_t i = 0; i < s.n_states; ++i) {
    for (std::size_t t = 1; t < T; ++t) CHECK((*z)[i * T + t] == (*z)[i * T]);
    const double x = p.rows[i * T].exposure, w = (*z)[i * T];
    sx += x; sz += w; sxx += x * x; szz += w * w; sxz += x * w;
  }
  const double n = static_cast<double>(s.n_states);
  const double cov = sxz / n - sx * sz / (n * n);
  const double r2 = cov * cov / ((sxx / n - sx * sx / (n * n)) * (szz / n - sz * sz / (n * n)));
  CHECK(r2 == doctest::Approx(0.5).epsilon(0.25));
  CHECK_THROWS_AS(attach_exposure_instrument(p, 1.5, 3), ConfigError);
}

TEST_CASE("VAR spec validation") {
  VarSpec v = preset("tradewar").var;
  CHECK_NOTHROW(v.validate());
  VarSpec upper = v;
  upper.b0(1, 2) = 0.5;  // exports would respond to inventory on impact
  CHECK_THROWS_AS(upper.validate(), ConfigError);
  VarSpec neg = v;
  neg.b0(1, 1) = -1.0;
  CHECK_THROWS_AS(neg.validate(), ConfigError);
  VarSpec explosive = v;
  explosive.lags[0] = Matrix::Identity(3, 3) * 1.05;
  CHECK_THROWS_AS(explosive.validate(), NonStationary);
  VarSpec bad_order = v;
  bad_order.ordering = {0, 0, 1};
  CHECK_THROWS_AS(bad_order.validate(), ConfigError);
}

TEST_CASE("VAR series: shocks are recorded and resimulation is exact") {
  const VarSpec v = preset("tradewar").var;
  const TimeSeriesPanel s = generate_var_series(v);
  CHECK(s.observations.rows() == static_cast<Eigen::Index>(v.T));
  CHECK(s.observations.cols() == 3);
  CHECK(s.presample.rows() == static_cast<Eigen::Index>(v.p()));
  CHECK(s.shocks.row(v.shock_date).transpose().isApprox(v.shock_vector));
  REQUIRE(s.dummy.has_value());
  CHECK((*s.dummy)(v.shock_date) == 1.0);
  CHECK(s.dummy->sum() == v.dummy_length);
  const Matrix again = resimulate(v, s);
  CHECK((again - s.observations).cwiseAbs().maxCoeff() <= 1e-12);

  const Eigen::Index d = v.shock_date;
  const double pre_mean = s.observations.col(1).segment(d - 12, 12).mean();
  CHECK(s.observations(d, 1) / pre_mean - 1.0 <= -0.70);
}

TEST_CASE("VAR recursion by hand for a bivariate VAR(1)") {
  VarSpec v;
  v.names = {"a", "b"};
  Matrix a1(2, 2);
  a1 << 0.5, 0.1, -0.2, 0.3;
  v.lags = {a1};
  v.b0 = Matrix::Identity(2, 2);
  v.mean = Vector::Constant(2, 10.0);
  v.T = 30;
  v.seed = 4;
  const TimeSeriesPanel s = generate_var_series(v);
  Vector prev = (s.presample.row(0).transpose() - v.mean);
  for (Eigen::Index t = 0; t < 30; ++t) {
    const Vector x = a1 * prev + s.shocks.row(t).transpose();
    CHECK((s.observations.row(t).transpose() - v.mean - x).cwiseAbs().maxCoeff() <= 1e-12);
    prev = x;
  }
}

TEST_CASE("supply-demand sample satisfies both equations") {
  SupplyDemandSpec spec;
  spec.seed = 9;
  const SupplyDemandSample s = generate_supply_demand(spec);
  CHECK(s.log_price.size() == 360);
  CHECK(s.tariff.sum() == 90.0);
  CHECK(s.tariff(269) == 0.0);
  CHECK(s.tariff(270) == 1.0);
  for (Eigen::Index t = 0; t < s.log_price.size(); ++t) {
    const double qd = spec.demand_intercept - spec.demand_slope * s.log_price(t) +
                      spec.tariff_effect * s.tariff(t) + spec.ip_effect * s.china_ip(t) +
                      s.u_demand(t);
    const double qs = spec.supply_intercept + spec.supply_slope * s.log_price(t) +
                      spec.weather_effect[0] * s.weather1(t) +
                      spec.weather_effect[1] * s.weather2(t) + s.u_supply(t);
    CHECK(s.log_quantity(t) == doctest::Approx(qd).epsilon(1e-12));
    CHECK(s.log_quantity(t) == doctest::Approx(qs).epsilon(1e-12));
  }
  CHECK(spec.no_tariff_log_price_change() == doctest::Approx(0.14 / 2.0));
  spec.demand_slope = -1.0;
  CHECK_THROWS_AS(generate_supply_demand(spec), ConfigError);
  CHECK_THROWS_AS(s.column("price"), ConfigError);
}

}  // TEST_SUITE
