#include <doctest.h>

#include <map>

#include "tariffkit/datagen.hpp"
#include "tariffkit/econometrics/did.hpp"
#include "tariffkit/errors.hpp"
#include "tariffkit/presets.hpp"

using namespace tariffkit;

namespace {

StatePanel two_by_two(double t_pre, double t_post, double c_pre, double c_post) {
  StatePanel p;
  p.rows = {{1, 2017, t_pre, 1.0}, {1, 2018, t_post, 1.0}, {2, 2017, c_pre, 0.0},
            {2, 2018, c_post, 0.0}};
  return p;
}

// Difference of group-period means, computed straight from the rows.
double diff_of_means(const StatePanel& p, int treatment_year) {
  double s[2][2] = {{0, 0}, {0, 0}};
  double n[2][2] = {{0, 0}, {0, 0}};
  for (const auto& r : p.rows) {
    const int g = r.exposure > 0.5 ? 1 : 0;
    const int t = r.year >= treatment_year ? 1 : 0;
    s[g][t] += r.outcome;
    n[g][t] += 1.0;
  }
  return (s[1][1] / n[1][1] - s[1][0] / n[1][0]) - (s[0][1] / n[0][1] - s[0][0] / n[0][0]);
}

PanelSpec noisy_spec(ExposureRule::Kind kind) {
  PanelSpec s;
  s.n_states = 30;
  s.first_year = 2013;
  s.last_year = 2019;
  s.exposure.kind = kind;
  s.exposure.n_treated = 9;
  s.beta_true = -1.6;
  s.treatment_year = 2017;
  s.seed = 77;
  return s;
}

}  // namespace

TEST_SUITE("did") {

TEST_CASE("2x2 panel: TWFE equals the difference of means") {
  const StatePanel p = two_by_two(10.0, 8.2, 7.0, 6.8);
  const DidResult d = twfe_did(p, 2018, ExposureMode::binary);
  CHECK(d.beta_hat == doctest::Approx((8.2 - 10.0) - (6.8 - 7.0)).epsilon(1e-14));
  CHECK(d.beta_hat == doctest::Approx(diff_of_means(p, 2018)).epsilon(1e-14));
  CHECK(d.cells.treated_change() == doctest::Approx(-1.8));
  CHECK(d.cells.control_change() == doctest::Approx(-0.2));
  CHECK(d.n_states == 2);
  CHECK(d.n_years == 2);
  CHECK_FALSE(d.event_study.has_value());
  CHECK_FALSE(d.pretrend_joint_p.has_value());
}

TEST_CASE("balanced binary panel: TWFE equals the difference of means") {
  const StatePanel p = generate_did_panel(noisy_spec(ExposureRule::Kind::binary));
  const DidResult d = twfe_did(p, 2017, ExposureMode::binary);
  CHECK(d.beta_hat == doctest::Approx(diff_of_means(p, 2017)).epsilon(1e-12));
  CHECK(d.cells.n_treated == 9);
  CHECK(d.cells.n_control == 21);
  CHECK(d.beta_hat ==
        doctest::Approx(d.cells.treated_change() - d.cells.control_change()).epsilon(1e-12));
}

TEST_CASE("continuous exposure: slope of within-state changes on exposure") {
  const PanelSpec spec = noisy_spec(ExposureRule::Kind::uniform);
  const StatePanel p = generate_did_panel(spec);
  std::map<long, double> e, pre, post, npre, npost;
  for (const auto& r : p.rows) {
    e[r.state_id] = r.exposure;
    if (r.year >= spec.treatment_year) {
      post[r.state_id] += r.outcome;
      npost[r.state_id] += 1.0;
    } else {
      pre[r.state_id] += r.outcome;
      npre[r.state_id] += 1.0;
    }
  }
  double ebar = 0.0;
  for (const auto& [id, v] : e) ebar += v;
  ebar /= static_cast<double>(e.size());
  double num = 0.0, den = 0.0;
  for (const auto& [id, v] : e) {
    const double delta = post[id] / npost[id] - pre[id] / npre[id];
    num += (v - ebar) * delta;
    den += (v - ebar) * (v - ebar);
  }
  const DidResult d = twfe_did(p, spec.treatment_year, ExposureMode::continuous);
  CHECK(d.beta_hat == doctest::Approx(num / den).epsilon(1e-10));
}

TEST_CASE("clustered standard error by hand") {
  const StatePanel p = generate_did_panel(noisy_spec(ExposureRule::Kind::uniform));
  const DidResult d = twfe_did(p, 2017, ExposureMode::continuous);
  Vector x(static_cast<Eigen::Index>(p.rows.size())), y(x.size());
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    x(static_cast<Eigen::Index>(i)) = (p.rows[i].year >= 2017 ? 1.0 : 0.0) * p.rows[i].exposure;
    y(static_cast<Eigen::Index>(i)) = p.rows[i].outcome;
  }
  const Vector xt = two_way_demean(p, x);
  const Vector yt = two_way_demean(p, y);
  const double b = xt.dot(yt) / xt.squaredNorm();
  const Vector e = yt - b * xt;
  std::map<long, double> score;
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    score[p.rows[i].state_id] += xt(k) * e(k);
  }
  double meat = 0.0;
  for (const auto& [id, s] : score) meat += s * s;
  const double G = 30.0, n = static_cast<double>(p.rows.size());
  const double v = G / (G - 1.0) * (n - 1.0) / (n - 1.0) * meat / (xt.squaredNorm() * xt.squaredNorm());
  CHECK(d.beta_hat == doctest::Approx(b).epsilon(1e-12));
  CHECK(d.std_error == doctest::Approx(std::sqrt(v)).epsilon(1e-10));
  CHECK(d.regression.df_resid == 29.0);
}

TEST_CASE("two-way demeaning is idempotent and removes both effects") {
  const StatePanel p = generate_did_panel(noisy_spec(ExposureRule::Kind::uniform));
  Vector y(static_cast<Eigen::Index>(p.rows.size()));
  for (std::size_t i = 0; i < p.rows.size(); ++i) y(static_cast<Eigen::Index>(i)) = p.rows[i].outcome;
  const Vector once = two_way_demean(p, y);
  const Vector twice = two_way_demean(p, once);
  CHECK((once - twice).cwiseAbs().maxCoeff() <= 1e-12);
  std::map<long, double> by_state;
  std::map<int, double> by_year;
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    by_state[p.rows[i].state_id] += once(static_cast<Eigen::Index>(i));
    by_year[p.rows[i].year] += once(static_cast<Eigen::Index>(i));
  }
  for (const auto& [k, v] : by_state) CHECK(std::abs(v) <= 1e-11);
  for (const auto& [k, v] : by_year) CHECK(std::abs(v) <= 1e-11);
}

TEST_CASE("zero noise: exact estimate and zero standard error") {
  PanelSpec s = noisy_spec(ExposureRule::Kind::binary);
  s.sigma_noise = 0.0;
  const DidResult d = twfe_did(generate_did_panel(s), 2017, ExposureMode::binary);
  CHECK(d.beta_hat == doctest::Approx(-1.6).epsilon(1e-12));
  CHECK(d.std_error <= 1e-12);
}

TEST_CASE("event study recovers a planted differential trend") {
  PanelSpec s = noisy_spec(ExposureRule::Kind::binary);
  s.sigma_noise = 0.0;
  s.differential_trend = 0.25;
  const DidResult d = twfe_did(generate_did_panel(s), 2017, ExposureMode::binary);
  REQUIRE(d.event_study.has_value());
  const EventStudy& es = *d.event_study;
  CHECK(es.base_year == 2016);
  CHECK(es.years.size() == 7);
  CHECK(es.pre_index.size() == 3);
  for (std::size_t i = 0; i < es.years.size(); ++i) {
    const int y = es.years[i];
    const double want = 0.25 * (y - 2016) + (y >= 2017 ? -1.6 : 0.0);
    CHECK(es.coefficients(static_cast<Eigen::Index>(i)) == doctest::Approx(want).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("pre-trend test") {
  PanelSpec s = noisy_spec(ExposureRule::Kind::binary);
  const DidResult flat = twfe_did(generate_did_panel(s), 2017, ExposureMode::binary);
  REQUIRE(flat.pretrend_joint_p.has_value());
  CHECK(*flat.pretrend_joint_p == doctest::Approx(pretrend_test(flat)));
  CHECK((*flat.pretrend_joint_p > 0.0 && *flat.pretrend_joint_p <= 1.0));

  s.differential_trend = 1.0;
  const DidResult trending = twfe_did(generate_did_panel(s), 2017, ExposureMode::binary);
  CHECK(pretrend_test(trending) < 0.01);

  const DidResult short_pre = twfe_did(generate_did_panel(s), 2015, ExposureMode::binary);
  CHECK_THROWS_AS(pretrend_test(short_pre), ConfigError);
}

TEST_CASE("binary mode splits at the midrange of exposure") {
  StatePanel p = two_by_two(1, 2, 3, 4);
  for (auto& r : p.rows) r.exposure = r.state_id == 1 ? 0.7 : 0.2;
  const auto t = treatment_intensity(p, ExposureMode::binary);
  CHECK(t == std::vector<double>{1, 1, 0, 0});
  for (auto& r : p.rows) r.exposure = 0.4;
  CHECK_THROWS_AS(treatment_intensity(p, ExposureMode::binary), ConfigError);
  CHECK(parse_exposure_mode("continuous") == ExposureMode::continuous);
  CHECK_THROWS_AS(parse_exposure_mode("other"), ConfigError);
}

TEST_CASE("treatment year must leave pre and post periods") {
  const StatePanel p = generate_did_panel(noisy_spec(ExposureRule::Kind::binary));
  CHECK_THROWS_AS(twfe_did(p, 2013, ExposureMode::binary), ConfigError);
  CHECK_THROWS_AS(twfe_did(p, 2020, ExposureMode::binary), ConfigError);
  StatePanel gap = p;
  gap.rows.erase(gap.rows.begin() + 3);
  CHECK_THROWS_AS(twfe_did(gap, 2017, ExposureMode::binary), ConfigError);
}

TEST_CASE("placebo drops the real treatment period") {
  PanelSpec s = noisy_spec(ExposureRule::Kind::binary);
  s.treatment_year = 2018;
  const StatePanel p = generate_did_panel(s);
  const DidResult d = placebo_did(p, 2015, std::nullopt, ExposureMode::binary);
  CHECK(d.n_years == 5);  // 2013..2017
  CHECK(d.treatment_year == 2015);

  StatePanel pre_only;
  for (const auto& r : p.rows) {
    if (r.year < 2018) pre_only.rows.push_back(r);
  }
  const DidResult direct = twfe_did(pre_only, 2015, ExposureMode::binary);
  CHECK(d.beta_hat == direct.beta_hat);
  CHECK(d.std_error == direct.std_error);

  CHECK_THROWS_AS(placebo_did(p, 2013, 2018, ExposureMode::binary), ConfigError);
  CHECK_THROWS_AS(placebo_did(p, 2018, 2018, ExposureMode::binary), ConfigError);
}

TEST_CASE("placebo preset: the fake tariff is small relative to its error") {
  const PresetBundle b = preset("placebo2015");
  const DidResult d = placebo_did(generate_did_panel(b.panel), b.treatment_year,
                                  b.real_treatment_year, b.did_mode);
  CHECK(std::abs(d.t_stat()) < 4.0);
}

}  // TEST_SUITE
