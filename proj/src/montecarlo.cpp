#include "tariffkit/montecarlo.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "tariffkit/econometrics/iv.hpp"
#include "tariffkit/econometrics/var.hpp"
#include "tariffkit/errors.hpp"
#include "tariffkit/presets.hpp"
#include "tariffkit/rng.hpp"

namespace tariffkit {

std::vector<std::string> experiment_names() {
  return {"did-recovery",   "placebo",        "pretrend",        "table1",
          "lag-selection",  "svar-recovery",  "shrinkage-risk",  "iv-simultaneity"};
}

namespace {

VarSpec diagonal_var(std::vector<Matrix> lags, Matrix b0, std::size_t T) {
  VarSpec v;
  v.lags = std::move(lags);
  v.b0 = std::move(b0);
  v.T = T;
  for (Eigen::Index i = 0; i < v.b0.rows(); ++i) v.names.push_back(fmt::format("y{}", i + 1));
  return v;
}

}  // namespace

ExperimentConfig default_experiment(const std::string& name) {
  ExperimentConfig c;
  c.experiment = name;
  if (name == "did-recovery") {
    c.reps = 1000;
    c.panel.n_states = 100;
    c.panel.first_year = 2012;
    c.panel.last_year = 2019;
    c.panel.exposure.kind = ExposureRule::Kind::uniform;
    c.panel.beta_true = -1.6;
    c.panel.treatment_year = 2018;
    c.did_mode = ExposureMode::continuous;
    return c;
  }
  if (name == "placebo") {
    const PresetBundle b = preset("placebo2015");
    c.panel = b.panel;
    c.did_mode = b.did_mode;
    c.fake_year = b.treatment_year;
    c.real_treatment_year = b.real_treatment_year;
    return c;
  }
  if (name == "pretrend") {
    c.reps = 500;
    c.panel.n_states = 50;
    c.panel.first_year = 2012;
    c.panel.last_year = 2019;
    c.panel.exposure.kind = ExposureRule::Kind::binary;
    c.panel.exposure.n_treated = 25;
    c.panel.treatment_year = 2018;
    c.did_mode = ExposureMode::binary;
    return c;
  }
  if (name == "table1") {
    const PresetBundle b = preset("paper2018");
    c.reps = 1000;
    c.panel = b.panel;
    c.did_mode = b.did_mode;
    return c;
  }
  if (name == "lag-selection") {
    Matrix a1(3, 3), a2(3, 3), a3(3, 3);
    a1 << 0.50, 0.10, 0.00,
          0.00, 0.40, 0.10,
          0.10, 0.00, 0.30;
    a2 << 0.15, 0.00, 0.00,
          0.00, 0.15, 0.00,
          0.00, 0.00, 0.15;
    a3 << 0.20, 0.00, 0.00,
          0.00, -0.20, 0.00,
          0.00, 0.00, 0.15;
    c.var = diagonal_var({a1, a2, a3}, Matrix::Identity(3, 3), 1000);
    c.p_max = 6;
    return c;
  }
  if (name == "svar-recovery") {
    c.reps = 50;
    Matrix a1 = Matrix::Zero(3, 3);
    a1.diagonal() << 0.5, 0.4, 0.3;
    Matrix b0(3, 3);
    b0 << 1.0, 0.0, 0.0,
          0.5, 1.0, 0.0,
          0.3, -0.4, 0.8;
    c.var = diagonal_var({a1}, b0, 10000);
    c.fit_lags = 1;
    return c;
  }
  if (name == "shrinkage-risk") {
    Matrix a1 = Matrix::Constant(3, 3, 0.05);
    a1.diagonal() << 0.9, 0.85, 0.8;
    c.var = diagonal_var({a1}, Matrix::Identity(3, 3), 60);
    c.fit_lags = 3;
    c.lambda_grid = {0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0};
    return c;
  }
  if (name == "iv-simultaneity") {
    c.supply_demand.sigma_demand = 0.1;
    c.supply_demand.sigma_supply = 0.1;
    return c;
  }
  throw ConfigError(fmt::format("unknown experiment '{}'; available experiments: {}", name,
                                fmt::join(experiment_names(), ", ")));
}

double McResult::aggregate_value(const std::string& key) const {
  for (const auto& [k, v] : aggregate) {
    if (k == key) return v;
  }
  throw ConfigError(fmt::format("experiment {} has no aggregate '{}'", experiment, key));
}

namespace {

using Row = std::vector<double>;

struct Moments {
  double mean = 0.0;
  double sd = 0.0;     // sample sd, 0 for one replication
  double mc_se = 0.0;  // sd / sqrt(R)
};

Moments moments(const std::vector<Row>& rows, std::size_t col) {
  Moments m;
  const double n = static_cast<double>(rows.size());
  for (const auto& r : rows) m.mean += r[col];
  m.mean /= n;
  if (rows.size() > 1) {
    double ss = 0.0;
    for (const auto& r : rows) ss += (r[col] - m.mean) * (r[col] - m.mean);
    m.sd = std::sqrt(ss / (n - 1.0));
  }
  m.mc_se = m.sd / std::sqrt(n);
  return m;
}

double col_mean(const std::vector<Row>& rows, std::size_t col) { return moments(rows, col).mean; }

// Runs body(rep, seed) -> row for every replication.
std::vector<Row> replicate(const ExperimentConfig& c,
                           const std::function<Row(std::size_t, std::uint64_t)>& body) {
  std::vector<Row> rows(c.reps);
  for_each_index(c.reps, c.exec, [&](std::size_t r) {
    rows[r] = body(r, derive_seed(c.seed, kStreamReplication, r));
  });
  return rows;
}

void did_recovery(const ExperimentConfig& c, McResult& out) {
  out.columns = {"rep", "beta_hat", "std_error", "ci_lo", "ci_hi", "covered", "significant"};
  out.rows = replicate(c, [&](std::size_t r, std::uint64_t seed) {
    PanelSpec spec = c.panel;
    spec.seed = seed;
    const DidResult d = twfe_did(generate_did_panel(spec), spec.treatment_year, c.did_mode);
    const double crit = d.regression.critical_value(c.level);
    const double lo = d.beta_hat - crit * d.std_error;
    const double hi = d.beta_hat + crit * d.std_error;
    const bool covered = lo <= spec.beta_true && spec.beta_true <= hi;
    return Row{static_cast<double>(r), d.beta_hat, d.std_error, lo, hi, covered ? 1.0 : 0.0,
               std::abs(d.t_stat()) > kSignificanceT ? 1.0 : 0.0};
  });
  const Moments b = moments(out.rows, 1);
  out.aggregate = {{"beta_true", c.panel.beta_true},
                   {"mean_beta_hat", b.mean},
                   {"sd_beta_hat", b.sd},
                   {"mc_se_beta_hat", b.mc_se},
                   {"mean_std_error", col_mean(out.rows, 2)},
                   {"coverage", col_mean(out.rows, 5)},
                   {"significant_rate", col_mean(out.rows, 6)}};
}

void placebo(const ExperimentConfig& c, McResult& out) {
  out.columns = {"rep", "beta_hat", "std_error", "t_stat", "significant"};
  out.rows = replicate(c, [&](std::size_t r, std::uint64_t seed) {
    PanelSpec spec = c.panel;
    spec.seed = seed;
    StatePanel panel = generate_did_panel(spec);
    const DidResult d = placebo_did(panel, c.fake_year, c.real_treatment_year, c.did_mode);
    return Row{static_cast<double>(r), d.beta_hat, d.std_error, d.t_stat(),
               std::abs(d.t_stat()) > kSignificanceT ? 1.0 : 0.0};
  });
  out.aggregate = {{"mean_beta_hat", col_mean(out.rows, 1)},
                   {"mean_std_error", col_mean(out.rows, 2)},
                   {"significant_rate", col_mean(out.rows, 4)}};
}

void pretrend(const ExperimentConfig& c, McResult& out) {
  out.columns = {"rep", "joint_p", "reject"};
  const double alpha = 1.0 - c.level;
  out.rows = replicate(c, [&](std::size_t r, std::uint64_t seed) {
    PanelSpec spec = c.panel;
    spec.seed = seed;
    const DidResult d = twfe_did(generate_did_panel(spec), spec.treatment_year, c.did_mode);
    const double p = pretrend_test(d);
    return Row{static_cast<double>(r), p, p < alpha ? 1.0 : 0.0};
  });
  out.aggregate = {{"differential_trend", c.panel.differential_trend},
                   {"level", c.level},
                   {"rejection_rate", col_mean(out.rows, 2)}};
}

void table1(const ExperimentConfig& c, McResult& out) {
  out.columns = {"rep", "treated_change", "control_change", "beta_hat", "std_error", "t_stat"};
  out.rows = replicate(c, [&](std::size_t r, std::uint64_t seed) {
    PanelSpec spec = c.panel;
    spec.seed = seed;
    const DidResult d = twfe_did(generate_did_panel(spec), spec.treatment_year, c.did_mode);
    return Row{static_cast<double>(r), d.cells.treated_change(), d.cells.control_change(),
               d.beta_hat, d.std_error, d.t_stat()};
  });
  std::size_t significant = 0;
  for (const auto& row : out.rows) significant += std::abs(row[5]) > kSignificanceT ? 1 : 0;
  out.aggregate = {{"beta_true", c.panel.beta_true},
                   {"n_states", static_cast<double>(c.panel.n_states)},
                   {"treated_change", col_mean(out.rows, 1)},
                   {"control_change", col_mean(out.rows, 2)},
                   {"beta_hat", col_mean(out.rows, 3)},
                   {"std_error", col_mean(out.rows, 4)},
                   {"mc_se_beta_hat", moments(out.rows, 3).mc_se},
                   {"significant_rate",
                    static_cast<double>(significant) / static_cast<double>(out.rows.size())}};
}

void lag_selection(const ExperimentConfig& c, McResult& out) {
  out.columns = {"rep", "p_aic", "p_bic", "p_hq"};
  out.rows = replicate(c, [&](std::size_t r, std::uint64_t seed) {
    VarSpec spec = c.var;
    spec.seed = seed;
    const Matrix y = generate_var_series(spec).observations;
    return Row{static_cast<double>(r),
               static_cast<double>(select_lag(y, c.p_max, InfoCriterion::aic)),
               static_cast<double>(select_lag(y, c.p_max, InfoCriterion::bic)),
               static_cast<double>(select_lag(y, c.p_max, InfoCriterion::hq))};
  });
  const double truth = static_cast<double>(c.var.p());
  auto share = [&](std::size_t col) {
    double hits = 0.0;
    for (const auto& row : out.rows) hits += row[col] == truth ? 1.0 : 0.0;
    return hits / static_cast<double>(out.rows.size());
  };
  out.aggregate = {{"true_p", truth},
                   {"p_max", static_cast<double>(c.p_max)},
                   {"share_correct_aic", share(1)},
                   {"share_correct_bic", share(2)},
                   {"share_correct_hq", share(3)}};
}

void svar_recovery(const ExperimentConfig& c, McResult& out) {
  const auto k = static_cast<Eigen::Index>(c.var.k());
  out.columns = {"rep", "max_abs_error"};
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) out.columns.push_back(fmt::format("b0_{}_{}", i, j));
  }
  const std::vector<int> ordering = c.var.effective_ordering();
  out.rows = replicate(c, [&](std::size_t r, std::uint64_t seed) {
    VarSpec spec = c.var;
    spec.seed = seed;
    const VarModel m = fit_var(generate_var_series(spec).observations, c.fit_lags);
    const StructuralId id = identify_short_run(m, ordering);
    Row row{static_cast<double>(r), (id.impact - spec.b0).cwiseAbs().maxCoeff()};
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = 0; j <= i; ++j) row.push_back(id.impact(i, j));
    }
    return row;
  });
  double within = 0.0;
  for (const auto& row : out.rows) within += row[1] <= 0.05 ? 1.0 : 0.0;
  out.aggregate = {{"T", static_cast<double>(c.var.T)},
                   {"mean_max_abs_error", col_mean(out.rows, 1)},
                   {"share_within_0.05", within / static_cast<double>(out.rows.size())}};
}

void shrinkage_risk(const ExperimentConfig& c, McResult& out) {
  if (c.lambda_grid.empty()) throw ConfigError("shrinkage-risk needs a non-empty lambda grid");
  const auto k = static_cast<Eigen::Index>(c.var.k());
  std::vector<Matrix> truth = c.var.lags;
  while (truth.size() < c.fit_lags) truth.push_back(Matrix::Zero(k, k));
  auto mse = [&](const VarModel& m) {
    double s = 0.0;
    for (std::size_t j = 0; j < c.fit_lags; ++j) s += (m.lags[j] - truth[j]).squaredNorm();
    return s / static_cast<double>(c.fit_lags * static_cast<std::size_t>(k * k));
  };
  out.columns = {"rep", "mse_ols"};
  for (double l : c.lambda_grid) out.columns.push_back(fmt::format("mse_lambda_{}", l));
  out.rows = replicate(c, [&](std::size_t r, std::uint64_t seed) {
    VarSpec spec = c.var;
    spec.seed = seed;
    const Matrix y = generate_var_series(spec).observations;
    Row row{static_cast<double>(r), mse(fit_var(y, c.fit_lags))};
    for (double l : c.lambda_grid) row.push_back(mse(fit_var_shrunk(y, c.fit_lags, l)));
    return row;
  });
  const double ols_mse = col_mean(out.rows, 1);
  out.aggregate = {{"T", static_cast<double>(c.var.T)}, {"mean_mse_ols", ols_mse}};
  double best = ols_mse;
  double best_lambda = 0.0;
  for (std::size_t i = 0; i < c.lambda_grid.size(); ++i) {
    const double v = col_mean(out.rows, 2 + i);
    out.aggregate.emplace_back(fmt::format("mean_mse_lambda_{}", c.lambda_grid[i]), v);
    if (v < best) {
      best = v;
      best_lambda = c.lambda_grid[i];
    }
  }
  out.aggregate.emplace_back("best_lambda", best_lambda);
  out.aggregate.emplace_back("best_mse_ratio", best / ols_mse);
  out.aggregate.emplace_back("shrinkage_beats_ols", best < ols_mse ? 1.0 : 0.0);
}

void iv_simultaneity(const ExperimentConfig& c, McResult& out) {
  out.columns = {"rep", "ols_slope", "tsls_slope", "first_stage_f"};
  out.rows = replicate(c, [&](std::size_t r, std::uint64_t seed) {
    SupplyDemandSpec spec = c.supply_demand;
    spec.seed = seed;
    const SupplyDemandSample s = generate_supply_demand(spec);
    const Eigen::Index n = s.log_price.size();
    Matrix X(n, 4), Z(n, 5);
    X << Vector::Ones(n), s.log_price, s.weather1, s.weather2;
    Z << Vector::Ones(n), s.weather1, s.weather2, s.tariff, s.china_ip;
    const RegressionResult o = ols(s.log_quantity, X);
    const IvResult iv = tsls(s.log_quantity, X, Z);
    return Row{static_cast<double>(r), o.coefficients(1), iv.second_stage.coefficients(1),
               iv.first_stage_f.front()};
  });
  const double truth = c.supply_demand.supply_slope;
  const Moments o = moments(out.rows, 1);
  const Moments t = moments(out.rows, 2);
  auto in_se = [](double bias, double se) { return se > 0.0 ? bias / se : (bias == 0.0 ? 0.0 : INFINITY); };
  out.aggregate = {{"true_slope", truth},
                   {"mean_ols_slope", o.mean},
                   {"mean_tsls_slope", t.mean},
                   {"mc_se_ols", o.mc_se},
                   {"mc_se_tsls", t.mc_se},
                   {"ols_bias_in_mc_se", in_se(o.mean - truth, o.mc_se)},
                   {"tsls_bias_in_mc_se", in_se(t.mean - truth, t.mc_se)},
                   {"mean_first_stage_f", col_mean(out.rows, 3)}};
}

}  // namespace

McResult run_experiment(const ExperimentConfig& config) {
  if (config.reps < 1) throw ConfigError("Monte Carlo needs reps >= 1");
  if (!(config.level > 0.0 && config.level < 1.0)) throw ConfigError("level must lie in (0, 1)");
  McResult out;
  out.experiment = config.experiment;
  out.reps = config.reps;
  out.seed = config.seed;
  const std::string& e = config.experiment;
  if (e == "did-recovery") did_recovery(config, out);
  else if (e == "placebo") placebo(config, out);
  else if (e == "pretrend") pretrend(config, out);
  else if (e == "table1") table1(config, out);
  else if (e == "lag-selection") lag_selection(config, out);
  else if (e == "svar-recovery") svar_recovery(config, out);
  else if (e == "shrinkage-risk") shrinkage_risk(config, out);
  else if (e == "iv-simultaneity") iv_simultaneity(config, out);
  else default_experiment(e);  // throws with the list
  out.aggregate.insert(out.aggregate.begin(), {"reps", static_cast<double>(config.reps)});
  return out;
}

}  // namespace tariffkit
