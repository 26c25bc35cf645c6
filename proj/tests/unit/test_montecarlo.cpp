#include <doctest.h>

#include "tariffkit/errors.hpp"
#include "tariffkit/montecarlo.hpp"

using namespace tariffkit;

namespace {

ExperimentConfig small(const std::string& name, std::size_t reps) {
  ExperimentConfig c = default_experiment(name);
  c.reps = reps;
  c.seed = 123;
  if (name == "svar-recovery") c.var.T = 500;
  if (name == "lag-selection") c.var.T = 300;
  return c;
}

}  // namespace

TEST_SUITE("montecarlo") {

TEST_CASE("every experiment: serial and parallel tables are bit-identical") {
  for (const auto& name : experiment_names()) {
    CAPTURE(name);
    ExperimentConfig c = small(name, 6);
    c.exec = Execution::serial;
    const McResult a = run_experiment(c);
    c.exec = Execution::parallel;
    const McResult b = run_experiment(c);
    CHECK(a.rows == b.rows);
    REQUIRE(a.aggregate.size() == b.aggregate.size());
    for (std::size_t i = 0; i < a.aggregate.size(); ++i) {
      CHECK(a.aggregate[i].first == b.aggregate[i].first);
      CHECK(a.aggregate[i].second == b.aggregate[i].second);
    }
    CHECK(a.columns.front() == "rep");
    CHECK(a.aggregate.front().first == "reps");
    CHECK(a.rows.size() == 6);
    for (const auto& row : a.rows) CHECK(row.size() == a.columns.size());
  }
}

TEST_CASE("a single replication: aggregates equal that replication") {
  const McResult r = run_experiment(small("did-recovery", 1));
  REQUIRE(r.rows.size() == 1);
  CHECK(r.aggregate_value("reps") == 1.0);
  CHECK(r.aggregate_value("mean_beta_hat") == r.rows[0][1]);
  CHECK(r.aggregate_value("mean_std_error") == r.rows[0][2]);
  CHECK(r.aggregate_value("coverage") == r.rows[0][5]);
  CHECK(r.aggregate_value("significant_rate") == r.rows[0][6]);
  CHECK(r.aggregate_value("sd_beta_hat") == 0.0);

  const McResult t = run_experiment(small("table1", 1));
  CHECK(t.aggregate_value("beta_hat") == t.rows[0][3]);
  CHECK(t.aggregate_value("std_error") == t.rows[0][4]);
}

TEST_CASE("replications are a prefix-stable stream") {
  const McResult short_run = run_experiment(small("placebo", 4));
  const McResult long_run = run_experiment(small("placebo", 9));
  for (std::size_t r = 0; r < 4; ++r) CHECK(short_run.rows[r] == long_run.rows[r]);
}

TEST_CASE("seed changes the draws") {
  ExperimentConfig c = small("iv-simultaneity", 3);
  const McResult a = run_experiment(c);
  c.seed = 124;
  CHECK(run_experiment(c).rows != a.rows);
}

TEST_CASE("unknown experiment and bad replication count") {
  CHECK_THROWS_AS(default_experiment("bootstrap"), ConfigError);
  ExperimentConfig c = small("placebo", 0);
  CHECK_THROWS_AS(run_experiment(c), ConfigError);
  CHECK_THROWS_AS(run_experiment(small("placebo", 2)).aggregate_value("missing"), ConfigError);
}

TEST_CASE("pretrend test has power against a differential trend") {
  ExperimentConfig c = small("pretrend", 40);
  c.panel.differential_trend = 0.5;
  CHECK(run_experiment(c).aggregate_value("rejection_rate") > 0.9);
}

}  // TEST_SUITE
