#include <doctest.h>

#include <limits>
#include <random>

#include "tariffkit/errors.hpp"
#include "tariffkit/io/csv.hpp"
#include "tariffkit/io/json_io.hpp"
#include "tariffkit/presets.hpp"

using namespace tariffkit;
using io::Json;

TEST_SUITE("io") {

TEST_CASE("numbers round-trip through their text form") {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(gen) * std::pow(10.0, (i % 40) - 20);
    const io::CsvTable t = io::parse_csv("x\n" + io::format_number(x) + "\n");
    CHECK(t.number(0, 0) == x);
  }
  CHECK(io::format_number(9.3) == "9.3");
  CHECK(io::format_number(0.0) == "0");
  CHECK(io::format_number(-1.6) == "-1.6");
}

TEST_CASE("panel CSV round trip") {
  PanelSpec s;
  s.n_states = 5;
  s.first_year = 2016;
  s.last_year = 2019;
  s.seed = 3;
  const StatePanel p = attach_exposure_instrument(generate_did_panel(s), 0.5, 1);
  const io::CsvTable t = io::panel_table(p);
  CHECK(t.header == std::vector<std::string>{"state_id", "year", "outcome", "exposure", "instrument"});
  const StatePanel back = io::panel_from_table(io::parse_csv(io::to_csv(t), "panel.csv"));
  REQUIRE(back.rows.size() == p.rows.size());
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    CHECK(back.rows[i].state_id == p.rows[i].state_id);
    CHECK(back.rows[i].year == p.rows[i].year);
    CHECK(back.rows[i].outcome == p.rows[i].outcome);
    CHECK(back.rows[i].exposure == p.rows[i].exposure);
  }
  REQUIRE(back.column("instrument") != nullptr);
  CHECK(*back.column("instrument") == *p.column("instrument"));
}

TEST_CASE("series and supply-demand CSV round trips") {
  const PresetBundle b = preset("tradewar");
  const TimeSeriesPanel s = generate_var_series(b.var);
  const io::SeriesData d = io::series_from_table(io::parse_csv(io::to_csv(io::series_table(s))));
  CHECK(d.names == b.var.names);
  CHECK(d.observations == s.observations);
  REQUIRE(d.dummy.has_value());
  CHECK(*d.dummy == *s.dummy);

  const auto sub = io::series_from_table(io::parse_csv(io::to_csv(io::series_table(s))), "dummy",
                                         {"exports", "price"});
  CHECK(sub.names == std::vector<std::string>{"exports", "price"});
  CHECK(sub.observations.col(0) == s.observations.col(1));

  const io::CsvTable shocks = io::shocks_table(s);
  CHECK(shocks.header[1] == "shock_price");

  const SupplyDemandSample iv = generate_supply_demand(b.supply_demand);
  const SupplyDemandSample back =
      io::supply_demand_from_table(io::parse_csv(io::to_csv(io::supply_demand_table(iv))));
  CHECK(back.log_price == iv.log_price);
  CHECK(back.weather2 == iv.weather2);
  CHECK(back.tariff == iv.tariff);
}

TEST_CASE("schema errors name the column and the row") {
  try {
    io::panel_from_table(io::parse_csv("state_id,year,exposure\n1,2018,0.5\n", "p.csv"));
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.column() == "outcome");
    CHECK(std::string(e.what()).find("outcome") != std::string::npos);
  }
  try {
    io::panel_from_table(io::parse_csv(
        "state_id,year,outcome,exposure\n1,2018,1.0,0.5\n1,2019,abc,0.5\n", "p.csv"));
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.column() == "outcome");
    CHECK(e.row() == 2);
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }
  CHECK_THROWS_AS(io::parse_csv("a,b\n1\n"), SchemaError);
  CHECK_THROWS_AS(io::parse_csv("a,b\n\"1\",2\n"), SchemaError);
  CHECK_THROWS_AS(io::parse_csv(""), SchemaError);
  CHECK_THROWS_AS(io::panel_from_table(io::parse_csv(
                      "state_id,year,outcome,exposure\n1,2018,1.0,1.5\n1,2019,1.0,1.5\n")),
                  SchemaError);
  CHECK_THROWS_AS(io::panel_from_table(io::parse_csv(
                      "state_id,year,outcome,exposure\n1,2018,1,0\n2,2019,1,0\n")),
                  SchemaError);
}

TEST_CASE("CRLF line endings and a byte-order mark are accepted") {
  const io::CsvTable t = io::parse_csv("\xEF\xBB\xBFt,x\r\n0,1.5\r\n1,2.5\r\n");
  CHECK(t.header == std::vector<std::string>{"t", "x"});
  CHECK(t.number(1, 1) == 2.5);
  CHECK(t.integer(1, 0) == 1);
  CHECK_THROWS_AS(t.integer(0, 1), SchemaError);
}

TEST_CASE("JSON merge is strict") {
  PanelSpec s;
  io::merge(Json::parse(R"({"n_states": 7, "exposure": {"kind": "binary", "n_treated": 2}})"), s,
            "panel");
  CHECK(s.n_states == 7);
  CHECK(s.exposure.kind == ExposureRule::Kind::binary);
  CHECK(s.exposure.n_treated == 2);
  CHECK(s.first_year == PanelSpec{}.first_year);

  try {
    io::merge(Json::parse(R"({"n_state": 7})"), s, "datagen.panel");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("datagen.panel") != std::string::npos);
    CHECK(std::string(e.what()).find("n_state") != std::string::npos);
  }
  CHECK_THROWS_AS(io::merge(Json::parse(R"({"n_states": "many"})"), s, "p"), ConfigError);
  CHECK_THROWS_AS(io::merge(Json::parse(R"({"n_states": -1})"), s, "p"), ConfigError);
  CHECK_THROWS_AS(io::merge(Json::parse(R"([1, 2])"), s, "p"), ConfigError);
  CHECK_THROWS_AS(io::parse_json("{", "c.json"), ConfigError);
}

TEST_CASE("spec JSON round trips") {
  const PresetBundle b = preset("tradewar");
  VarSpec v;
  io::merge(Json::parse(io::to_json(b.var).dump()), v, "var");
  CHECK(v.names == b.var.names);
  REQUIRE(v.lags.size() == 3);
  CHECK(v.lags[1] == b.var.lags[1]);
  CHECK(v.b0 == b.var.b0);
  CHECK(v.ordering == b.var.ordering);
  CHECK(v.shock_vector == b.var.shock_vector);
  CHECK(v.seed == b.var.seed);

  PanelSpec p;
  io::merge(Json::parse(io::to_json(b.panel).dump()), p, "panel");
  CHECK(io::to_json(p) == io::to_json(b.panel));

  SupplyDemandSpec sd;
  sd.n = 1;
  io::merge(Json::parse(io::to_json(b.supply_demand).dump()), sd, "sd");
  CHECK(io::to_json(sd) == io::to_json(b.supply_demand));

  DynamicsParams d;
  io::merge(io::to_json(b.dynamics), d, "dynamics");
  CHECK(io::to_json(d) == io::to_json(b.dynamics));

  CalibrationTargets t;
  io::merge(io::to_json(b.targets), t, "targets");
  CHECK(io::to_json(t) == io::to_json(b.targets));
}

TEST_CASE("JSON output keeps insertion order") {
  const Json j = io::to_json(MarketBaseline{9.3, 1, 2, 3});
  CHECK(io::dump(j) == "{\n  \"p0\": 9.3,\n  \"q_us\": 1.0,\n  \"q_china\": 2.0,\n  \"q_row\": 3.0\n}\n");
}

}  // TEST_SUITE
