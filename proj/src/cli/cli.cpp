#include "tariffkit/cli/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

#include "tariffkit/calibration.hpp"
#include "tariffkit/datagen.hpp"
#include "tariffkit/dynamics.hpp"
#include "tariffkit/econometrics/did.hpp"
#include "tariffkit/econometrics/iv.hpp"
#include "tariffkit/errors.hpp"
#include "tariffkit/io/csv.hpp"
#include "tariffkit/io/json_io.hpp"
#include "tariffkit/market_model.hpp"

namespace tariffkit::cli {

namespace fs = std::filesystem;
using io::Json;

namespace {

const std::vector<std::string> kCommands = {"simulate", "datagen", "estimate", "montecarlo",
                                            "report"};

struct Flags {
  std::string config, preset, out, format, input, method, experiment, kind, criterion;
  std::uint64_t seed = 0;
  double tau = 0.0, subsidy = 0.0, lambda = 0.0;
  std::size_t seasons = 0, reps = 0, lags = 0, horizon = 0;
  int threads = 0, treatment_year = 0, fake_year = 0;
  bool serial = false, calibrate = false;
};

bool given(const CLI::App& app, const std::string& name) {
  try {
    return app.count(name) > 0;
  } catch (const CLI::OptionNotFound&) {
    return false;
  }
}

void add_common(CLI::App& app, Flags& f) {
  app.add_option("--config", f.config, "JSON config file");
  app.add_option("--preset", f.preset, "Named scenario preset");
  app.add_option("--seed", f.seed, "Top-level seed; overrides every generator seed");
  app.add_option("--out", f.out, "Output directory");
  app.add_option("--format", f.format, "Table format: csv or json");
  app.add_option("--threads", f.threads, "OpenMP threads (0 = runtime default)");
  app.add_flag("--serial", f.serial, "Use the serial reference kernels");
}

// Resizes every shock vector to `seasons`, repeating the last entry.
void resize_shocks(ShockPath& s, std::size_t seasons) {
  for (auto* v : {&s.tau, &s.eps_x, &s.yield_shock, &s.subsidy_rate}) {
    const double last = v->empty() ? 0.0 : v->back();
    v->resize(seasons, last);
  }
}

// Scales the tariff path (and the China demand shift that accompanies it) so
// that the scenario tariff becomes `tau`.
void rescale_tariff(PresetBundle& b, double tau) {
  if (!std::isfinite(tau) || tau < 0.0) {
    throw ConfigError(fmt::format("--tau must be >= 0 (got {})", tau));
  }
  const double base = b.tariff.tau;
  if (base > 0.0) {
    const double f = tau / base;
    for (auto& x : b.shocks.tau) x *= f;
    for (auto& x : b.shocks.eps_x) x *= f;
  } else {
    for (auto& x : b.shocks.tau) x = tau;
  }
  b.tariff.tau = tau;
}

void check_blocks(const Json& cfg, const std::string& command) {
  for (const auto& c : kCommands) {
    if (c != command && cfg.contains(c)) {
      throw ConfigError(fmt::format(
          "config has a '{}' block but the command is '{}'; a config holds one command block", c,
          command));
    }
  }
}

void merge_simulate(const Json& j, RunConfig& rc) {
  io::ObjectReader r(j, "simulate");
  PresetBundle& b = rc.bundle;
  r.read_into("baseline", b.baseline);
  r.read_into("elasticities", b.elasticities);
  r.read_into("tariff", b.tariff);
  r.read_into("dynamics", b.dynamics);
  r.read("seasons", b.seasons);
  r.read_into("shocks", b.shocks);
  r.read_into("two_exporter", b.two_exporter);
  r.read_into("targets", b.targets);
  r.read_into("grid", b.grid);
  r.read("calibrate", rc.calibrate);
  r.finish();
}

void merge_datagen(const Json& j, RunConfig& rc) {
  io::ObjectReader r(j, "datagen");
  r.read("kind", rc.kind);
  r.read_into("panel", rc.bundle.panel);
  r.read_into("var", rc.bundle.var);
  r.read_into("supply_demand", rc.bundle.supply_demand);
  r.read("instrument_relevance", rc.instrument_relevance);
  r.finish();
}

void merge_estimate(const Json& j, RunConfig& rc) {
  io::ObjectReader r(j, "estimate");
  PresetBundle& b = rc.bundle;
  r.read("method", rc.method);
  if (r.has("input")) {
    std::string in;
    r.read("input", in);
    rc.input = in;
  }
  r.read("treatment_year", b.treatment_year);
  if (r.has("real_treatment_year")) {
    int y = 0;
    r.read("real_treatment_year", y);
    b.real_treatment_year = y;
  }
  if (r.has("mode")) {
    std::string m;
    r.read("mode", m);
    b.did_mode = parse_exposure_mode(m);
  }
  if (r.has("lags")) {
    std::size_t p = 0;
    r.read("lags", p);
    rc.lags = p;
  }
  if (r.has("criterion")) {
    std::string c;
    r.read("criterion", c);
    rc.criterion = parse_criterion(c);
  }
  r.read("p_max", b.var_p_max);
  r.read("horizon", rc.horizon);
  r.read("lambda", rc.lambda);
  r.read("ordering", rc.ordering);
  r.read("variables", rc.variables);
  r.finish();
}

void merge_montecarlo(const Json& j, ExperimentConfig& e) {
  io::ObjectReader r(j, "montecarlo");
  std::string name;
  r.read("experiment", name);
  r.read("reps", e.reps);
  r.read_into("panel", e.panel);
  if (r.has("did_mode")) {
    std::string m;
    r.read("did_mode", m);
    e.did_mode = parse_exposure_mode(m);
  }
  r.read("fake_year", e.fake_year);
  if (r.has("real_treatment_year")) {
    int y = 0;
    r.read("real_treatment_year", y);
    e.real_treatment_year = y;
  }
  r.read("level", e.level);
  r.read_into("var", e.var);
  r.read("fit_lags", e.fit_lags);
  r.read("p_max", e.p_max);
  r.read("lambda_grid", e.lambda_grid);
  r.read_into("supply_demand", e.supply_demand);
  r.finish();
}

std::string experiment_from_block(const Json& cfg) {
  if (!cfg.contains("montecarlo")) return {};
  const Json& m = cfg["montecarlo"];
  if (m.is_object() && m.contains("experiment") && m["experiment"].is_string()) {
    return m["experiment"].get<std::string>();
  }
  return {};
}

RunConfig resolve(const std::string& command, const CLI::App& sub, const Flags& f) {
  RunConfig rc;
  rc.command = command;

  Json cfg = Json::object();
  if (!f.config.empty()) {
    cfg = io::parse_json(io::read_text(f.config), f.config);
    if (!cfg.is_object()) throw ConfigError(fmt::format("{}: expected a JSON object", f.config));
    check_blocks(cfg, command);
  }
  io::ObjectReader top(cfg, "");

  // Preset first, then the file, then flags.
  top.read("preset", rc.preset_name);
  if (given(sub, "--preset")) rc.preset_name = f.preset;
  rc.bundle = preset(rc.preset_name);

  if (top.has("seed")) {
    std::size_t s = 0;
    top.read("seed", s);
    rc.seed = s;
  }
  if (top.has("out")) {
    std::string o;
    top.read("out", o);
    rc.out = o;
  }
  std::string format = "csv";
  top.read("format", format);
  top.read("threads", rc.threads);
  bool serial = false;
  top.read("serial", serial);

  if (command == "montecarlo") {
    std::string name = experiment_from_block(cfg);
    if (given(sub, "--experiment")) name = f.experiment;
    if (name.empty()) {
      throw ConfigError(fmt::format("montecarlo needs --experiment; available experiments: {}",
                                    fmt::join(experiment_names(), ", ")));
    }
    rc.experiment = default_experiment(name);
  }
  if (cfg.contains(command)) {
    const Json& block = top.raw(command);
    if (command == "simulate") merge_simulate(block, rc);
    else if (command == "datagen") merge_datagen(block, rc);
    else if (command == "estimate") merge_estimate(block, rc);
    else if (command == "montecarlo") merge_montecarlo(block, rc.experiment);
    else {
      io::ObjectReader r(block, "report");
      if (r.has("input")) {
        std::string in;
        r.read("input", in);
        rc.input = in;
      }
      r.finish();
    }
  }
  top.finish();

  if (given(sub, "--seed")) rc.seed = f.seed;
  if (given(sub, "--out")) rc.out = f.out;
  if (given(sub, "--format")) format = f.format;
  if (given(sub, "--threads")) rc.threads = f.threads;
  if (given(sub, "--serial")) serial = f.serial;
  if (format == "csv") rc.format = TableFormat::csv;
  else if (format == "json") rc.format = TableFormat::json;
  else throw ConfigError(fmt::format("unknown format '{}'; expected csv or json", format));
  if (rc.threads < 0) throw ConfigError("--threads must be >= 0");
  rc.exec = serial ? Execution::serial : Execution::parallel;
  rc.experiment.exec = rc.exec;

  PresetBundle& b = rc.bundle;
  if (command == "simulate") {
    if (given(sub, "--seasons")) b.seasons = f.seasons;
    if (b.seasons < 1) throw ConfigError("seasons must be >= 1");
    resize_shocks(b.shocks, b.seasons);
    if (given(sub, "--tau")) rescale_tariff(b, f.tau);
    if (given(sub, "--subsidy")) b.tariff.subsidy_rate = f.subsidy;
    if (given(sub, "--calibrate")) rc.calibrate = f.calibrate;
  }
  if (command == "datagen") {
    if (given(sub, "--kind")) rc.kind = f.kind;
    if (given(sub, "--treatment-year")) b.panel.treatment_year = f.treatment_year;
    if (rc.kind != "panel" && rc.kind != "series" && rc.kind != "iv" && rc.kind != "all") {
      throw ConfigError(fmt::format("unknown kind '{}'; expected panel, series, iv or all", rc.kind));
    }
  }
  if (command == "estimate" || command == "report") {
    if (given(sub, "--input")) rc.input = f.input;
  }
  if (command == "estimate") {
    if (given(sub, "--method")) rc.method = f.method;
    // Under a placebo the scenario's own tariff year becomes the real one.
    if (rc.method == "placebo" && !b.real_treatment_year && given(sub, "--fake-year")) {
      b.real_treatment_year = b.treatment_year;
    }
    if (given(sub, "--treatment-year")) {
      if (rc.method == "placebo") b.real_treatment_year = f.treatment_year;
      else b.treatment_year = f.treatment_year;
    }
    if (given(sub, "--fake-year")) b.treatment_year = f.fake_year;
    if (given(sub, "--lags")) rc.lags = f.lags;
    if (given(sub, "--criterion")) rc.criterion = parse_criterion(f.criterion);
    if (given(sub, "--horizon")) rc.horizon = f.horizon;
    if (given(sub, "--lambda")) rc.lambda = f.lambda;
    const std::vector<std::string> methods = {"did", "placebo", "svar", "shrunk", "iv"};
    if (std::find(methods.begin(), methods.end(), rc.method) == methods.end()) {
      throw ConfigError(fmt::format("unknown method '{}'; available methods: {}", rc.method,
                                    fmt::join(methods, ", ")));
    }
    if (rc.input.empty()) throw ConfigError("estimate needs --input FILE");
    if (rc.horizon < 1) throw ConfigError("--horizon must be >= 1");
  }
  if (command == "montecarlo") {
    ExperimentConfig& e = rc.experiment;
    if (given(sub, "--reps")) e.reps = f.reps;
    if (given(sub, "--fake-year")) e.fake_year = f.fake_year;
    if (given(sub, "--treatment-year")) e.real_treatment_year = f.treatment_year;
    if (given(sub, "--lags")) e.fit_lags = f.lags;
    if (e.reps < 1) throw ConfigError("--reps must be >= 1");
    e.seed = rc.seed.value_or(kDefaultMonteCarloSeed);
  }
  if (rc.seed) {
    b.panel.seed = *rc.seed;
    b.var.seed = *rc.seed;
    b.supply_demand.seed = *rc.seed;
  }
  return rc;
}

// ---------------------------------------------------------------------------
// Output helpers

Json cell_value(const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (!s.empty() && ec == std::errc() && ptr == end) return v;
  return s;
}

void write_table(const RunConfig& rc, const std::string& stem, const io::CsvTable& t,
                 std::ostream& out) {
  fs::path path;
  if (rc.format == TableFormat::csv) {
    path = rc.out / (stem + ".csv");
    io::write_text(path, io::to_csv(t));
  } else {
    Json rows = Json::array();
    for (const auto& r : t.rows) {
      Json o = Json::object();
      for (std::size_t c = 0; c < t.header.size(); ++c) o[t.header[c]] = cell_value(r[c]);
      rows.push_back(std::move(o));
    }
    path = rc.out / (stem + ".json");
    io::write_text(path, io::dump(rows));
  }
  out << "wrote " << path.string() << "\n";
}

void write_json(const RunConfig& rc, const std::string& name, const Json& j, std::ostream& out) {
  const fs::path path = rc.out / name;
  io::write_text(path, io::dump(j));
  out << "wrote " << path.string() << "\n";
}

std::string n(double x) { return io::format_number(x); }

// ---------------------------------------------------------------------------
// simulate

void cmd_simulate(const RunConfig& rc, std::ostream& out) {
  PresetBundle b = rc.bundle;
  if (rc.calibrate) {
    const CalibrationResult cal =
        calibrate_to_targets(calibration_problem(b), b.targets, b.grid, rc.exec);
    b.elasticities = cal.elasticities;
    b.dynamics = cal.dynamics;
    Json j = io::to_json(cal);
    j["targets"] = io::to_json(b.targets);
    j["grid_size"] = b.grid.size();
    write_json(rc, "calibration.json", j, out);
    if (!cal.all_in_band) out << "warning: calibrated point misses at least one target band\n";
  }

  const EquilibriumSolution pre =
      solve_equilibrium(b.baseline, b.elasticities, TariffScenario{0.0, 0.0});
  // The subsidy compensates the tariff and is paid only while one is in force.
  TariffScenario scenario = b.tariff;
  if (scenario.tau <= 0.0) scenario.subsidy_rate = 0.0;
  const EquilibriumSolution post = solve_equilibrium(b.baseline, b.elasticities, scenario);
  write_table(rc, "equilibrium", io::equilibrium_table({pre, post}), out);

  ShockPath shocks = b.shocks;
  for (std::size_t t = 0; t < shocks.size(); ++t) {
    if (shocks.tau[t] > 0.0 && shocks.subsidy_rate[t] == 0.0) {
      shocks.subsidy_rate[t] = b.tariff.subsidy_rate;
    }
  }
  const SeasonRecord init = steady_state(b.dynamics, b.elasticities, b.baseline);
  const auto path = simulate_path(init, b.dynamics, b.elasticities, b.baseline, shocks, b.seasons);
  write_table(rc, "path", io::path_table(path), out);

  const TwoExporterSolution free_trade = solve_two_exporter(b.two_exporter, 0.0);
  const TwoExporterSolution tariffed = solve_two_exporter(b.two_exporter, b.tariff.tau);
  write_table(rc, "two_exporter", io::two_exporter_table({free_trade, tariffed}), out);

  const SeasonRecord& s0 = path.front();
  double peak_inventory = 0.0;
  for (const auto& r : path) peak_inventory = std::max(peak_inventory, r.inventory_end);
  auto change = [](double x, double base) { return base != 0.0 ? x / base - 1.0 : 0.0; };

  Json dyn = Json::object();
  dyn["seasons"] = b.seasons;
  dyn["season1_price_change_frac"] = change(path[1].realized_price, s0.realized_price);
  dyn["season2_acreage_change_frac"] =
      path.size() > 2 ? Json(change(path[2].acreage, s0.acreage)) : Json(nullptr);
  dyn["season1_exports_china_change_frac"] = change(path[1].exports_china, s0.exports_china);
  dyn["peak_inventory_ratio"] = s0.inventory_end > 0.0 ? peak_inventory / s0.inventory_end : 0.0;
  double market = 0.0, subsidy = 0.0;
  for (std::size_t t = 1; t < path.size(); ++t) {
    market += path[t].market_income;
    subsidy += path[t].subsidy_income;
  }
  dyn["market_income_total"] = market;
  dyn["subsidy_income_total"] = subsidy;

  const auto ratio = compensation_ratio(pre, post);
  Json summary = {
      {"preset", b.name},
      {"tau", b.tariff.tau},
      {"price_change_frac", post.price_change_frac},
      {"incidence_approx",
       incidence_approx(b.elasticities, b.tariff.tau, DemandShares::of(b.baseline))},
      {"calibrated", rc.calibrate},
      {"elasticities", io::to_json(b.elasticities)},
      {"static", {{"baseline", io::to_json(pre)}, {"tariff", io::to_json(post)}}},
      {"subsidy",
       {{"rate", b.tariff.subsidy_rate},
        {"payment", post.subsidy_payment},
        {"market_revenue_loss", pre.market_revenue() - post.market_revenue()},
        {"compensation_ratio", ratio ? Json(*ratio) : Json(nullptr)}}},
      {"dynamic", dyn},
      {"two_exporter",
       {{"regime", to_string(tariffed.regime)},
        {"p_us", tariffed.p_us},
        {"p_brazil", tariffed.p_brazil},
        {"diversion_share", tariffed.diversion_share},
        {"diversion_share_free_trade", free_trade.diversion_share}}}};
  write_json(rc, "summary.json", summary, out);
  out << fmt::format("static price change {:.4f}, season-1 price change {:.4f}\n",
                     post.price_change_frac, dyn["season1_price_change_frac"].get<double>());
}

// ---------------------------------------------------------------------------
// datagen

void cmd_datagen(const RunConfig& rc, std::ostream& out) {
  const PresetBundle& b = rc.bundle;
  const bool all = rc.kind == "all";
  Json spec = {{"preset", b.name}, {"kind", rc.kind}};
  if (rc.seed) spec["seed"] = *rc.seed;
  if (all || rc.kind == "panel") {
    StatePanel panel = generate_did_panel(b.panel);
    if (rc.instrument_relevance > 0.0) {
      panel = attach_exposure_instrument(panel, rc.instrument_relevance, b.panel.seed);
    }
    write_table(rc, "panel", io::panel_table(panel), out);
    spec["panel"] = io::to_json(b.panel);
    spec["instrument_relevance"] = rc.instrument_relevance;
  }
  if (all || rc.kind == "series") {
    const TimeSeriesPanel s = generate_var_series(b.var);
    write_table(rc, "series", io::series_table(s), out);
    write_table(rc, "shocks", io::shocks_table(s), out);
    spec["var"] = io::to_json(b.var);
  }
  if (all || rc.kind == "iv") {
    write_table(rc, "iv", io::supply_demand_table(generate_supply_demand(b.supply_demand)), out);
    spec["supply_demand"] = io::to_json(b.supply_demand);
  }
  write_json(rc, "spec.json", spec, out);
}

// ---------------------------------------------------------------------------
// estimate

io::CsvTable did_table(const DidResult& d) {
  io::CsvTable t;
  t.header = {"term", "estimate", "std_error", "t_stat", "p_value"};
  t.rows.push_back({"post_x_exposure", n(d.beta_hat), n(d.std_error), n(d.t_stat()),
                    n(d.p_value())});
  if (d.event_study) {
    const auto& es = *d.event_study;
    for (std::size_t i = 0; i < es.years.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      const double se = es.std_errors(k);
      const double tt = se > 0.0 ? es.coefficients(k) / se : 0.0;
      t.rows.push_back({fmt::format("event_{}", es.years[i]), n(es.coefficients(k)), n(se),
                        n(tt), ""});
    }
  }
  return t;
}

void estimate_did(const RunConfig& rc, std::ostream& out) {
  const PresetBundle& b = rc.bundle;
  const StatePanel panel = io::panel_from_table(io::read_csv(rc.input));
  const bool placebo = rc.method == "placebo";
  const DidResult d = placebo ? placebo_did(panel, b.treatment_year, b.real_treatment_year, b.did_mode)
                              : twfe_did(panel, b.treatment_year, b.did_mode);
  const std::string stem = placebo ? "placebo" : "did";
  Json j = {{"method", rc.method}, {"input", rc.input.filename().string()}};
  if (placebo) {
    j["fake_year"] = b.treatment_year;
    j["real_treatment_year"] =
        b.real_treatment_year ? Json(*b.real_treatment_year) : Json(nullptr);
  }
  j["result"] = io::to_json(d);
  write_json(rc, stem + ".json", j, out);
  write_table(rc, stem + "_coefficients", did_table(d), out);
  out << fmt::format("beta_hat {} (se {})\n", n(d.beta_hat), n(d.std_error));
}

std::vector<std::string> regressor_names(const VarModel& m) {
  std::vector<std::string> r{"const"};
  for (std::size_t l = 1; l <= m.p; ++l) {
    for (const auto& v : m.names) r.push_back(fmt::format("{}_lag{}", v, l));
  }
  for (Eigen::Index j = 0; j < m.exog.cols(); ++j) {
    r.push_back(m.exog.cols() == 1 ? "dummy" : fmt::format("exog{}", j + 1));
  }
  return r;
}

void estimate_var(const RunConfig& rc, std::ostream& out) {
  const PresetBundle& b = rc.bundle;
  const io::SeriesData data = io::series_from_table(io::read_csv(rc.input), "dummy", rc.variables);
  std::optional<Matrix> exog;
  if (data.dummy) exog = Matrix(*data.dummy);

  std::size_t p = rc.lags.value_or(b.var_lags);
  if (rc.criterion) p = select_lag(data.observations, b.var_p_max, *rc.criterion, exog);
  const bool shrunk = rc.method == "shrunk";
  const VarModel model = shrunk ? fit_var_shrunk(data.observations, p, rc.lambda, exog, data.names)
                                : fit_var(data.observations, p, exog, data.names);
  const std::vector<int> ordering =
      rc.ordering.empty() ? default_trade_ordering(data.names) : rc.ordering;
  const StructuralId id = identify_short_run(model, ordering);
  const Irf responses = irf(model, id, rc.horizon);
  const Fevd shares = fevd(responses, rc.horizon);

  Json j = {{"method", rc.method},
            {"input", rc.input.filename().string()},
            {"lags", p},
            {"lag_criterion", rc.criterion ? Json(to_string(*rc.criterion)) : Json(nullptr)},
            {"horizon", rc.horizon},
            {"model", io::to_json(model)},
            {"identification", io::to_json(id)}};
  write_json(rc, "svar.json", j, out);

  const auto regs = regressor_names(model);
  io::CsvTable coef;
  coef.header = {"equation", "regressor", "estimate", "std_error"};
  for (std::size_t eq = 0; eq < model.k; ++eq) {
    for (std::size_t r = 0; r < regs.size(); ++r) {
      const auto ri = static_cast<Eigen::Index>(r);
      const auto ei = static_cast<Eigen::Index>(eq);
      coef.rows.push_back({model.names[eq], regs[r], n(model.coefficients(ri, ei)),
                           n(model.std_errors(ri, ei))});
    }
  }
  write_table(rc, "var_coefficients", coef, out);

  // The trade shock is a negative exports shock of one standard deviation.
  const auto exports_it = std::find(data.names.begin(), data.names.end(), "exports");
  const Eigen::Index exports_col =
      exports_it == data.names.end() ? -1 : static_cast<Eigen::Index>(exports_it - data.names.begin());

  io::CsvTable irf_t;
  irf_t.header = {"horizon", "variable", "shock", "value"};
  for (std::size_t h = 0; h < responses.response.size(); ++h) {
    const Matrix& r = responses.response[h];
    for (std::size_t i = 0; i < model.k; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      for (std::size_t s = 0; s < model.k; ++s) {
        irf_t.rows.push_back({fmt::format("{}", h), data.names[i], data.names[s],
                              n(r(ii, static_cast<Eigen::Index>(s)))});
      }
      if (exports_col >= 0) {
        irf_t.rows.push_back(
            {fmt::format("{}", h), data.names[i], "trade", n(-r(ii, exports_col))});
      }
    }
  }
  write_table(rc, "irf", irf_t, out);

  io::CsvTable fevd_t;
  fevd_t.header = {"horizon", "variable", "shock", "value"};
  for (std::size_t h = 0; h < shares.share.size(); ++h) {
    for (std::size_t i = 0; i < model.k; ++i) {
      for (std::size_t s = 0; s < model.k; ++s) {
        fevd_t.rows.push_back(
            {fmt::format("{}", h + 1), data.names[i], data.names[s],
             n(shares.share[h](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(s)))});
      }
    }
  }
  write_table(rc, "fevd", fevd_t, out);
  out << fmt::format("VAR({}) on {} observations, k = {}\n", p, data.observations.rows(), model.k);
}

void estimate_iv(const RunConfig& rc, std::ostream& out) {
  const SupplyDemandSample sample = io::supply_demand_from_table(io::read_csv(rc.input));
  const SupplyDemandFit fit = fit_supply_demand(sample);
  Json j = {{"method", "iv"}, {"input", rc.input.filename().string()}, {"fit", io::to_json(fit)}};
  write_json(rc, "iv.json", j, out);

  io::CsvTable t;
  t.header = {"equation", "regressor", "estimate", "std_error", "t_stat", "p_value"};
  auto add = [&](const std::string& eq, const IvResult& r, const std::vector<std::string>& regs) {
    const auto& s = r.second_stage;
    for (std::size_t i = 0; i < regs.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      t.rows.push_back({eq, regs[i], n(s.coefficients(k)), n(s.std_errors(k)), n(s.t_stats(k)),
                        n(s.p_values(k))});
    }
  };
  add("demand", fit.demand, {"const", "log_price", "tariff", "china_ip"});
  add("supply", fit.supply, {"const", "log_price", "weather1", "weather2"});
  write_table(rc, "iv_coefficients", t, out);
  out << fmt::format("no-tariff price change {:.4f}\n", fit.no_tariff_price_change_frac());
}

// ---------------------------------------------------------------------------
// montecarlo

void cmd_montecarlo(const RunConfig& rc, std::ostream& out) {
  const McResult res = run_experiment(rc.experiment);
  io::CsvTable t;
  t.header = res.columns;
  for (const auto& row : res.rows) {
    std::vector<std::string> f;
    for (double v : row) f.push_back(n(v));
    t.rows.push_back(std::move(f));
  }
  write_table(rc, res.experiment + "_reps", t, out);
  write_json(rc, res.experiment + "_aggregate.json", io::to_json(res), out);
  for (const auto& [k, v] : res.aggregate) out << fmt::format("  {} = {}\n", k, n(v));
}

// ---------------------------------------------------------------------------
// report

std::string stars(double p) {
  if (p < 0.01) return "\\*\\*\\*";
  if (p < 0.05) return "\\*\\*";
  if (p < 0.10) return "\\*";
  return "";
}

double number_at(const Json& j, const std::string& key, const std::string& source) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw ConfigError(fmt::format("{}: missing numeric field '{}'", source, key));
  }
  return j[key].get<double>();
}

void cmd_report(const RunConfig& rc, std::ostream& out) {
  const fs::path dir = rc.input.empty() ? rc.out : rc.input;
  if (!fs::is_directory(dir) || fs::is_empty(dir)) {
    throw ConfigError(fmt::format("report: no estimation outputs in '{}'; run montecarlo "
                                  "--experiment table1 or estimate --method did first",
                                  dir.string()));
  }
  double treated = 0.0, control = 0.0, beta = 0.0, se = 0.0, p = 1.0;
  std::string source;
  const fs::path mc = dir / "table1_aggregate.json";
  const fs::path did = dir / "did.json";
  if (fs::exists(mc)) {
    source = mc.filename().string();
    const Json j = io::parse_json(io::read_text(mc), source);
    const Json& a = j.at("aggregate");
    treated = number_at(a, "treated_change", source);
    control = number_at(a, "control_change", source);
    beta = number_at(a, "beta_hat", source);
    se = number_at(a, "std_error", source);
    const double g = number_at(a, "n_states", source);
    p = se > 0.0 ? student_t_two_sided_p(beta / se, g - 1.0) : (beta != 0.0 ? 0.0 : 1.0);
    source += fmt::format(" (mean over {} replications)", number_at(a, "reps", source));
  } else if (fs::exists(did)) {
    source = did.filename().string();
    const Json j = io::parse_json(io::read_text(did), source);
    const Json& r = j.at("result");
    const Json& c = r.at("cells");
    treated = number_at(c, "treated_change", source);
    control = number_at(c, "control_change", source);
    beta = number_at(r, "beta_hat", source);
    se = number_at(r, "std_error", source);
    p = r.at("p_value").is_number() ? r.at("p_value").get<double>()
                                    : (se > 0.0 ? 1.0 : (beta != 0.0 ? 0.0 : 1.0));
  } else {
    throw ConfigError(fmt::format("report: neither table1_aggregate.json nor did.json in '{}'",
                                  dir.string()));
  }

  std::string md;
  md += "| Group | Change in outcome |\n";
  md += "|---|---|\n";
  md += fmt::format("| Treated states | {:.2f} |\n", treated);
  md += fmt::format("| Control states | {:.2f} |\n", control);
  md += fmt::format("| **DiD estimate** | **{:.2f}{}** |\n", beta, stars(p));
  md += fmt::format("| (Standard error) | ({:.2f}) |\n", se);
  md += "\n";
  md += fmt::format("Source: {}. Stars: \\*\\*\\* p < 0.01, \\*\\* p < 0.05, \\* p < 0.10.\n", source);
  fs::create_directories(rc.out);
  io::write_text(rc.out / "table1.md", md);
  out << md;
}

}  // namespace

std::optional<RunConfig> parse_args(const std::vector<std::string>& args, std::ostream& out) {
  CLI::App app{"Tariff incidence, panel and time-series toolkit for the 2018 soybean tariff",
               "tariffkit"};
  app.require_subcommand(1);
  Flags f;

  auto* sim = app.add_subcommand("simulate", "Static equilibrium, seasonal path, two exporters");
  add_common(*sim, f);
  sim->add_option("--tau", f.tau, "Scenario tariff; the shock path is rescaled");
  sim->add_option("--subsidy", f.subsidy, "Per-bushel subsidy rate");
  sim->add_option("--seasons", f.seasons, "Seasons to simulate after season 0");
  sim->add_flag("--calibrate", f.calibrate, "Grid-search the targets before simulating");

  auto* gen = app.add_subcommand("datagen", "Synthetic panel, series and supply-demand data");
  add_common(*gen, f);
  gen->add_option("--kind", f.kind, "panel, series, iv or all");
  gen->add_option("--treatment-year", f.treatment_year, "Panel treatment year");

  auto* est = app.add_subcommand("estimate", "DiD, placebo, SVAR, shrunk VAR or 2SLS on a CSV");
  add_common(*est, f);
  est->add_option("--input", f.input, "Input CSV");
  est->add_option("--method", f.method, "did, placebo, svar, shrunk or iv");
  est->add_option("--treatment-year", f.treatment_year,
                  "DiD cutoff (placebo: the real treatment year)");
  est->add_option("--fake-year", f.fake_year, "Placebo cutoff");
  est->add_option("--lags", f.lags, "VAR lag order");
  est->add_option("--criterion", f.criterion, "Select the lag order by aic, bic or hq");
  est->add_option("--horizon", f.horizon, "IRF and FEVD horizon");
  est->add_option("--lambda", f.lambda, "Shrinkage tightness for --method shrunk");

  auto* mc = app.add_subcommand("montecarlo", "Seeded recovery experiments");
  add_common(*mc, f);
  mc->add_option("--experiment", f.experiment, "Experiment name");
  mc->add_option("--reps", f.reps, "Replications");
  mc->add_option("--fake-year", f.fake_year, "Placebo cutoff");
  mc->add_option("--treatment-year", f.treatment_year, "Real treatment year (placebo)");
  mc->add_option("--lags", f.lags, "Fitted lag order (svar-recovery, shrinkage-risk)");

  auto* rep = app.add_subcommand("report", "Markdown summary table of a DiD run");
  add_common(*rep, f);
  rep->add_option("--input", f.input, "Directory holding table1_aggregate.json or did.json");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }
  for (auto* sub : app.get_subcommands()) {
    return resolve(sub->get_name(), *sub, f);
  }
  throw ConfigError("no command given");
}

void run(const RunConfig& rc, std::ostream& out) {
  set_parallel_threads(rc.threads);
  if (rc.command != "report") fs::create_directories(rc.out);
  if (rc.command == "simulate") cmd_simulate(rc, out);
  else if (rc.command == "datagen") cmd_datagen(rc, out);
  else if (rc.command == "estimate") {
    if (rc.method == "did" || rc.method == "placebo") estimate_did(rc, out);
    else if (rc.method == "iv") estimate_iv(rc, out);
    else estimate_var(rc, out);
  } else if (rc.command == "montecarlo") cmd_montecarlo(rc, out);
  else if (rc.command == "report") cmd_report(rc, out);
  else throw ConfigError(fmt::format("unknown command '{}'", rc.command));
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    const auto rc = parse_args(args, out);
    if (!rc) return 0;
    run(*rc, out);
    return 0;
  } catch (const ConfigError& e) {
    err << "tariffkit: error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "tariffkit: error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace tariffkit::cli
