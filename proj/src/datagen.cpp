#include "tariffkit/datagen.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "tariffkit/econometrics/var.hpp"
#include "tariffkit/errors.hpp"
#include "tariffkit/rng.hpp"

namespace tariffkit {

std::string to_string(ExposureRule::Kind kind) {
  switch (kind) {
    case ExposureRule::Kind::uniform: return "uniform";
    case ExposureRule::Kind::binary: return "binary";
    case ExposureRule::Kind::explicit_values: return "explicit";
  }
  return "unknown";
}

ExposureRule::Kind parse_exposure_kind(const std::string& text) {
  if (text == "uniform") return ExposureRule::Kind::uniform;
  if (text == "binary") return ExposureRule::Kind::binary;
  if (text == "explicit") return ExposureRule::Kind::explicit_values;
  throw ConfigError(fmt::format("unknown exposure rule '{}' (uniform|binary|explicit)", text));
}

void PanelSpec::validate() const {
  if (n_states < 2) throw ConfigError("panel needs at least two states");
  if (last_year < first_year) throw ConfigError("panel last_year precedes first_year");
  if (!(treatment_year > first_year && treatment_year <= last_year)) {
    throw ConfigError(fmt::format(
        "treatment_year {} must leave at least one pre and one post year in [{}, {}]",
        treatment_year, first_year, last_year));
  }
  for (double s : {sigma_state, sigma_year, sigma_noise}) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw ConfigError("panel sigmas must be >= 0");
  }
  switch (exposure.kind) {
    case ExposureRule::Kind::uniform:
      if (!(exposure.lo >= 0.0 && exposure.lo <= exposure.hi && exposure.hi <= 1.0)) {
        throw ConfigError("uniform exposure bounds must satisfy 0 <= lo <= hi <= 1");
      }
      break;
    case ExposureRule::Kind::binary:
      if (exposure.n_treated > n_states) throw ConfigError("n_treated exceeds n_states");
      break;
    case ExposureRule::Kind::explicit_values:
      if (exposure.values.size() != n_states) {
        throw ConfigError(fmt::format("explicit exposure has {} values for {} states",
                                      exposure.values.size(), n_states));
      }
      for (double e : exposure.values) {
        if (!(e >= 0.0 && e <= 1.0)) throw ConfigError("exposure values must lie in [0, 1]");
      }
      break;
  }
}

// ---------------------------------------------------------------------------

std::vector<long> StatePanel::states() const {
  std::set<long> s;
  for (const auto& r : rows) s.insert(r.state_id);
  return {s.begin(), s.end()};
}

std::vector<int> StatePanel::years() const {
  std::set<int> s;
  for (const auto& r : rows) s.insert(r.year);
  return {s.begin(), s.end()};
}

const std::vector<double>* StatePanel::column(const std::string& name) const {
  for (std::size_t c = 0; c < extra_names.size(); ++c) {
    if (extra_names[c] == name) return &extra[c];
  }
  return nullptr;
}

void StatePanel::add_column(const std::string& name, std::vector<double> values) {
  if (values.size() != rows.size()) {
    throw ConfigError(fmt::format("column '{}' has {} values for {} rows", name, values.size(),
                                  rows.size()));
  }
  for (std::size_t c = 0; c < extra_names.size(); ++c) {
    if (extra_names[c] == name) {
      extra[c] = std::move(values);
      return;
    }
  }
  extra_names.push_back(name);
  extra.push_back(std::move(values));
}

void StatePanel::sort() {
  std::vector<std::size_t> order(rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (rows[a].state_id != rows[b].state_id) return rows[a].state_id < rows[b].state_id;
    return rows[a].year < rows[b].year;
  });
  std::vector<PanelRow> sorted;
  sorted.reserve(rows.size());
  for (std::size_t i : order) sorted.push_back(rows[i]);
  rows = std::move(sorted);
  for (auto& col : extra) {
    std::vector<double> s;
    s.reserve(col.size());
    for (std::size_t i : order) s.push_back(col[i]);
    col = std::move(s);
  }
}

void StatePanel::validate_balanced() const {
  if (rows.empty()) throw ConfigError("panel has no rows");
  const auto st = states();
  const auto yr = years();
  if (rows.size() != st.size() * yr.size()) {
    throw ConfigError(fmt::format("panel is not balanced: {} rows for {} states x {} years",
                                  rows.size(), st.size(), yr.size()));
  }
  std::set<std::pair<long, int>> seen;
  std::map<long, double> exposure;
  for (const auto& r : rows) {
    if (!seen.emplace(r.state_id, r.year).second) {
      throw ConfigError(fmt::format("panel has duplicate cell (state {}, year {})", r.state_id,
                                    r.year));
    }
    if (!std::isfinite(r.outcome)) {
      throw ConfigError(fmt::format("missing outcome for state {}, year {}", r.state_id, r.year));
    }
    auto [it, inserted] = exposure.emplace(r.state_id, r.exposure);
    if (!inserted && it->second != r.exposure) {
      throw ConfigError(fmt::format("exposure varies over time for state {}", r.state_id));
    }
  }
}

// ---------------------------------------------------------------------------

PanelDraws generate_did_panel_draws(const PanelSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n_states;
  const std::size_t n_years = spec.n_years();

  PanelDraws d;
  d.exposure.resize(n);
  switch (spec.exposure.kind) {
    case ExposureRule::Kind::uniform: {
      Rng rng(derive_seed(spec.seed, kStreamExposure));
      for (auto& e : d.exposure) e = rng.uniform(spec.exposure.lo, spec.exposure.hi);
      break;
    }
    case ExposureRule::Kind::binary:
      for (std::size_t i = 0; i < n; ++i) d.exposure[i] = i < spec.exposure.n_treated ? 1.0 : 0.0;
      break;
    case ExposureRule::Kind::explicit_values:
      d.exposure = spec.exposure.values;
      break;
  }

  Rng state_rng(derive_seed(spec.seed, kStreamStateEffect));
  d.state_effect.resize(n);
  for (auto& g : d.state_effect) g = state_rng.normal(0.0, spec.sigma_state);

  Rng year_rng(derive_seed(spec.seed, kStreamYearEffect));
  d.year_effect.resize(n_years);
  for (std::size_t t = 0; t < n_years; ++t) {
    const int year = spec.first_year + static_cast<int>(t);
    d.year_effect[t] = year_rng.normal(0.0, spec.sigma_year) +
                       (year >= spec.treatment_year ? spec.post_year_shift : 0.0);
  }

  d.panel.rows.reserve(n * n_years);
  d.noise.reserve(n * n_years);
  for (std::size_t i = 0; i < n; ++i) {
    Rng noise_rng(derive_seed(spec.seed, kStreamNoise, i));
    for (std::size_t t = 0; t < n_years; ++t) {
      const int year = spec.first_year + static_cast<int>(t);
      const double post = year >= spec.treatment_year ? 1.0 : 0.0;
      const double eps = noise_rng.normal(0.0, spec.sigma_noise);
      PanelRow r;
      r.state_id = static_cast<long>(i + 1);
      r.year = year;
      r.exposure = d.exposure[i];
      r.outcome = spec.alpha + d.state_effect[i] + d.year_effect[t] +
                  spec.beta_true * post * d.exposure[i] +
                  spec.differential_trend * d.exposure[i] * (year - spec.treatment_year + 1) +
                  eps;
      d.panel.rows.push_back(r);
      d.noise.push_back(eps);
    }
  }
  d.panel.ground_truth = spec;
  return d;
}

StatePanel generate_did_panel(const PanelSpec& spec) {
  return generate_did_panel_draws(spec).panel;
}

StatePanel attach_exposure_instrument(const StatePanel& panel, double relevance,
                                      std::uint64_t seed) {
  if (!(relevance > 0.0 && relevance < 1.0)) {
    throw ConfigError(fmt::format("instrument relevance must lie in (0, 1) (got {})", relevance));
  }
  panel.validate_balanced();
  std::map<long, double> exposure;
  for (const auto& r : panel.rows) exposure.emplace(r.state_id, r.exposure);
  double mean = 0.0;
  for (const auto& [id, e] : exposure) mean += e;
  mean /= static_cast<double>(exposure.size());
  double var = 0.0;
  for (const auto& [id, e] : exposure) var += (e - mean) * (e - mean);
  var /= static_cast<double>(exposure.size());
  if (!(var > 0.0)) throw ConfigError("exposure has no cross-state variation to instrument");

  const double scale = std::sqrt(var * (1.0 - relevance) / relevance);
  Rng rng(derive_seed(seed, kStreamInstrument));
  std::map<long, double> instrument;
  for (const auto& [id, e] : exposure) instrument[id] = e + scale * rng.normal();

  StatePanel out = panel;
  std::vector<double> col;
  col.reserve(panel.rows.size());
  for (const auto& r : panel.rows) col.push_back(instrument[r.state_id]);
  out.add_column("instrument", std::move(col));
  return out;
}

// ---------------------------------------------------------------------------

std::vector<int> VarSpec::effective_ordering() const {
  if (!ordering.empty()) return ordering;
  std::vector<int> id(k());
  for (std::size_t i = 0; i < id.size(); ++i) id[i] = static_cast<int>(i);
  return id;
}

void VarSpec::validate() const {
  const std::size_t n = k();
  if (n == 0 || b0.cols() != b0.rows()) throw ConfigError("b0 must be a non-empty square matrix");
  if (lags.empty()) throw ConfigError("VAR spec needs at least one lag matrix");
  for (const auto& a : lags) {
    if (static_cast<std::size_t>(a.rows()) != n || static_cast<std::size_t>(a.cols()) != n) {
      throw ConfigError("lag matrices must be k x k");
    }
  }
  if (!names.empty() && names.size() != n) throw ConfigError("VAR names must have k entries");
  if (mean.size() != 0 && static_cast<std::size_t>(mean.size()) != n) {
    throw ConfigError("VAR mean must have k entries");
  }
  const auto ord = effective_ordering();
  {
    std::vector<int> sorted = ord;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < n; ++i) {
      if (sorted.size() != n || sorted[i] != static_cast<int>(i)) {
        throw ConfigError("VAR ordering must be a permutation of 0..k-1");
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(b0(ord[i], ord[i]) > 0.0)) throw ConfigError("b0 must have a positive diagonal");
    for (std::size_t j = i + 1; j < n; ++j) {
      if (b0(ord[i], ord[j]) != 0.0) {
        throw ConfigError("b0 must be lower triangular under the variable ordering");
      }
    }
  }
  if (T == 0) throw ConfigError("VAR spec needs T >= 1");
  if (shock_date >= static_cast<int>(T)) throw ConfigError("shock_date lies beyond the sample");
  if (shock_date >= 0 && static_cast<std::size_t>(shock_vector.size()) != n) {
    throw ConfigError("shock_vector must have k entries");
  }
  if (dummy_length > 0 && shock_date < 0) throw ConfigError("a dummy needs a shock_date");
  const double rho = spectral_radius(lags);
  if (!(rho < 1.0)) throw NonStationary(rho);
}

namespace {

Vector spec_mean(const VarSpec& spec) {
  return spec.mean.size() == 0 ? Vector::Zero(static_cast<Eigen::Index>(spec.k())) : spec.mean;
}

// Deviation recursion y_t = sum_j A_j y_{t-j} + b0 eps_t on a row-major history.
void step(const VarSpec& spec, const Matrix& history, Eigen::Index t, const Vector& eps,
          Matrix& out) {
  Vector y = spec.b0 * eps;
  for (std::size_t j = 0; j < spec.p(); ++j) {
    y.noalias() += spec.lags[j] * history.row(t - 1 - static_cast<Eigen::Index>(j)).transpose();
  }
  out.row(t) = y.transpose();
}

}  // namespace

TimeSeriesPanel generate_var_series(const VarSpec& spec) {
  spec.validate();
  const auto k = static_cast<Eigen::Index>(spec.k());
  const auto p = static_cast<Eigen::Index>(spec.p());
  const auto T = static_cast<Eigen::Index>(spec.T);
  const auto burn = static_cast<Eigen::Index>(kVarBurnIn);
  const Eigen::Index total = p + burn + T;

  Rng rng(derive_seed(spec.seed, kStreamVarShocks));
  Matrix dev = Matrix::Zero(total, k);
  Matrix shocks(T, k);
  for (Eigen::Index t = p; t < total; ++t) {
    Vector eps(k);
    for (Eigen::Index j = 0; j < k; ++j) eps(j) = rng.normal();
    const Eigen::Index s = t - p - burn;
    if (s >= 0) {
      if (s == spec.shock_date) eps = spec.shock_vector;
      shocks.row(s) = eps.transpose();
    }
    step(spec, dev, t, eps, dev);
  }

  const Vector mu = spec_mean(spec);
  TimeSeriesPanel out;
  out.names = spec.names;
  if (out.names.empty()) {
    for (Eigen::Index j = 0; j < k; ++j) out.names.push_back(fmt::format("y{}", j + 1));
  }
  out.observations = dev.bottomRows(T).rowwise() + mu.transpose();
  out.presample = dev.middleRows(burn, p).rowwise() + mu.transpose();
  out.shocks = shocks;
  if (spec.dummy_length > 0) {
    Vector d = Vector::Zero(T);
    for (int s = spec.shock_date; s < spec.shock_date + spec.dummy_length && s < T; ++s) d(s) = 1.0;
    out.dummy = d;
  }
  return out;
}

Matrix resimulate(const VarSpec& spec, const TimeSeriesPanel& panel) {
  spec.validate();
  const auto k = static_cast<Eigen::Index>(spec.k());
  const auto p = static_cast<Eigen::Index>(spec.p());
  const auto T = static_cast<Eigen::Index>(panel.shocks.rows());
  if (panel.presample.rows() != p || panel.presample.cols() != k || panel.shocks.cols() != k) {
    throw ConfigError("time-series panel does not match the VAR spec dimensions");
  }
  const Vector mu = spec_mean(spec);
  Matrix dev(p + T, k);
  dev.topRows(p) = panel.presample.rowwise() - mu.transpose();
  for (Eigen::Index s = 0; s < T; ++s) {
    step(spec, dev, p + s, panel.shocks.row(s).transpose(), dev);
  }
  return dev.bottomRows(T).rowwise() + mu.transpose();
}

// ---------------------------------------------------------------------------

void SupplyDemandSpec::validate() const {
  if (n < 10) throw ConfigError("supply-demand sample needs n >= 10");
  if (!(demand_slope + supply_slope > 0.0)) {
    throw ConfigError("demand_slope + supply_slope must be > 0");
  }
  if (!(sigma_demand >= 0.0 && sigma_supply >= 0.0)) throw ConfigError("sigmas must be >= 0");
  if (!(tariff_share >= 0.0 && tariff_share <= 1.0)) {
    throw ConfigError("tariff_share must lie in [0, 1]");
  }
}

const std::vector<std::string>& SupplyDemandSample::column_names() {
  static const std::vector<std::string> names{"log_price", "log_quantity", "tariff",
                                              "china_ip",  "weather1",     "weather2"};
  return names;
}

const Vector& SupplyDemandSample::column(const std::string& name) const {
  if (name == "log_price") return log_price;
  if (name == "log_quantity") return log_quantity;
  if (name == "tariff") return tariff;
  if (name == "china_ip") return china_ip;
  if (name == "weather1") return weather1;
  if (name == "weather2") return weather2;
  throw ConfigError(fmt::format("unknown supply-demand column '{}'", name));
}

SupplyDemandSample generate_supply_demand(const SupplyDemandSpec& spec) {
  spec.validate();
  const auto n = static_cast<Eigen::Index>(spec.n);
  const auto first_tariff =
      n - static_cast<Eigen::Index>(std::llround(spec.tariff_share * static_cast<double>(n)));
  Rng rng(derive_seed(spec.seed, kStreamIv));

  SupplyDemandSample s;
  for (Vector* v : {&s.log_price, &s.log_quantity, &s.tariff, &s.china_ip, &s.weather1,
                    &s.weather2, &s.u_demand, &s.u_supply}) {
    v->resize(n);
  }
  const double slope_sum = spec.demand_slope + spec.supply_slope;
  for (Eigen::Index t = 0; t < n; ++t) {
    s.tariff(t) = t >= first_tariff ? 1.0 : 0.0;
    s.china_ip(t) = rng.normal();
    s.weather1(t) = rng.normal();
    s.weather2(t) = rng.normal();
    s.u_demand(t) = rng.normal(0.0, spec.sigma_demand);
    s.u_supply(t) = rng.normal(0.0, spec.sigma_supply);
    const double demand_shift = spec.demand_intercept + spec.tariff_effect * s.tariff(t) +
                                spec.ip_effect * s.china_ip(t) + s.u_demand(t);
    const double supply_shift = spec.supply_intercept +
                                spec.weather_effect[0] * s.weather1(t) +
                                spec.weather_effect[1] * s.weather2(t) + s.u_supply(t);
    s.log_price(t) = (demand_shift - supply_shift) / slope_sum;
    s.log_quantity(t) = supply_shift + spec.supply_slope * s.log_price(t);
  }
  return s;
}

}  // namespace tariffkit
