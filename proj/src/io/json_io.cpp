#include "tariffkit/io/json_io.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <type_traits>

#include "tariffkit/errors.hpp"

namespace tariffkit::io {

static_assert(std::is_same_v<std::size_t, std::uint64_t>,
              "seeds are read through the size_t overload");

Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(fmt::format("{}: invalid JSON: {}", source, e.what()));
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// ObjectReader

ObjectReader::ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
  if (!j_.is_object()) throw ConfigError(fmt::format("{}: expected an object", path_));
}

bool ObjectReader::has(const std::string& key) const { return j_.contains(key); }

std::string ObjectReader::child_path(const std::string& key) const {
  return path_.empty() ? key : path_ + "." + key;
}

const Json& ObjectReader::raw(const std::string& key) {
  used_.push_back(key);
  return j_.at(key);
}

namespace {

[[noreturn]] void type_error(const std::string& path, const char* expected, const Json& v) {
  throw ConfigError(fmt::format("{}: expected {}, got {}", path, expected, v.dump()));
}

double as_double(const Json& v, const std::string& path) {
  if (!v.is_number()) type_error(path, "a number", v);
  return v.get<double>();
}

long as_long(const Json& v, const std::string& path) {
  if (!v.is_number_integer()) type_error(path, "an integer", v);
  return v.get<long>();
}

std::size_t as_size(const Json& v, const std::string& path) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long>() >= 0)) {
    type_error(path, "a non-negative integer", v);
  }
  return v.get<std::size_t>();
}

const Json& as_array(const Json& v, const std::string& path) {
  if (!v.is_array()) type_error(path, "an array", v);
  return v;
}

std::vector<double> as_doubles(const Json& v, const std::string& path) {
  std::vector<double> out;
  for (std::size_t i = 0; i < as_array(v, path).size(); ++i) {
    out.push_back(as_double(v[i], fmt::format("{}[{}]", path, i)));
  }
  return out;
}

Matrix as_matrix(const Json& v, const std::string& path) {
  as_array(v, path);
  const auto rows = v.size();
  std::size_t cols = 0;
  std::vector<std::vector<double>> data;
  for (std::size_t r = 0; r < rows; ++r) {
    data.push_back(as_doubles(v[r], fmt::format("{}[{}]", path, r)));
    if (r == 0) cols = data.back().size();
    if (data.back().size() != cols) {
      throw ConfigError(fmt::format("{}: row {} has {} entries, expected {}", path, r,
                                    data.back().size(), cols));
    }
  }
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = data[r][c];
    }
  }
  return m;
}

}  // namespace

void ObjectReader::read(const std::string& key, double& out) {
  if (has(key)) out = as_double(raw(key), child_path(key));
}
void ObjectReader::read(const std::string& key, int& out) {
  if (has(key)) out = static_cast<int>(as_long(raw(key), child_path(key)));
}
void ObjectReader::read(const std::string& key, long& out) {
  if (has(key)) out = as_long(raw(key), child_path(key));
}
void ObjectReader::read(const std::string& key, std::size_t& out) {
  if (has(key)) out = as_size(raw(key), child_path(key));
}
void ObjectReader::read(const std::string& key, bool& out) {
  if (!has(key)) return;
  const Json& v = raw(key);
  if (!v.is_boolean()) type_error(child_path(key), "true or false", v);
  out = v.get<bool>();
}
void ObjectReader::read(const std::string& key, std::string& out) {
  if (!has(key)) return;
  const Json& v = raw(key);
  if (!v.is_string()) type_error(child_path(key), "a string", v);
  out = v.get<std::string>();
}
void ObjectReader::read(const std::string& key, std::vector<double>& out) {
  if (has(key)) out = as_doubles(raw(key), child_path(key));
}
void ObjectReader::read(const std::string& key, std::vector<int>& out) {
  if (!has(key)) return;
  const std::string p = child_path(key);
  const Json& v = as_array(raw(key), p);
  out.clear();
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(static_cast<int>(as_long(v[i], fmt::format("{}[{}]", p, i))));
  }
}
void ObjectReader::read(const std::string& key, std::vector<std::string>& out) {
  if (!has(key)) return;
  const std::string p = child_path(key);
  const Json& v = as_array(raw(key), p);
  out.clear();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string()) type_error(fmt::format("{}[{}]", p, i), "a string", v[i]);
    out.push_back(v[i].get<std::string>());
  }
}
void ObjectReader::read(const std::string& key, Vector& out) {
  if (!has(key)) return;
  const auto d = as_doubles(raw(key), child_path(key));
  out = Eigen::Map<const Vector>(d.data(), static_cast<Eigen::Index>(d.size()));
}
void ObjectReader::read(const std::string& key, Matrix& out) {
  if (has(key)) out = as_matrix(raw(key), child_path(key));
}

void ObjectReader::finish() const {
  std::vector<std::string> unknown;
  for (auto it = j_.begin(); it != j_.end(); ++it) {
    if (std::find(used_.begin(), used_.end(), it.key()) == used_.end()) unknown.push_back(it.key());
  }
  if (!unknown.empty()) {
    throw ConfigError(fmt::format("{}: unknown key{} {}", path_.empty() ? "config" : path_,
                                  unknown.size() > 1 ? "s" : "", fmt::join(unknown, ", ")));
  }
}

// ---------------------------------------------------------------------------
// to_json

Json to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json to_json(const Matrix& m) {
  Json a = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    a.push_back(std::move(row));
  }
  return a;
}

Json to_json(const MarketBaseline& b) {
  return {{"p0", b.p0}, {"q_us", b.q_us}, {"q_china", b.q_china}, {"q_row", b.q_row}};
}

Json to_json(const ElasticityParams& e) {
  return {{"eta_d_us", e.eta_d_us},
          {"eta_d_china", e.eta_d_china},
          {"eta_d_row", e.eta_d_row},
          {"eta_s", e.eta_s}};
}

Json to_json(const TariffScenario& t) {
  return {{"tau", t.tau}, {"subsidy_rate", t.subsidy_rate}};
}

Json to_json(const DynamicsParams& d) {
  return {{"beta", d.beta},
          {"yield", d.yield},
          {"cost_c1", d.cost_c1},
          {"cost_c2", d.cost_c2},
          {"expectation_lambda", d.expectation_lambda},
          {"storage_loss", d.storage_loss},
          {"working_stock", d.working_stock},
          {"price_floor_frac", d.price_floor_frac},
          {"subsidy_in_expectations", d.subsidy_in_expectations}};
}

Json to_json(const ShockPath& s) {
  return {{"tau", s.tau},
          {"eps_x", s.eps_x},
          {"yield_shock", s.yield_shock},
          {"subsidy_rate", s.subsidy_rate}};
}

Json to_json(const EquilibriumSolution& s) {
  return {{"tau", s.tau},
          {"p_producer", s.p_producer},
          {"p_china", s.p_china},
          {"q_us", s.q_us},
          {"q_china", s.q_china},
          {"q_row", s.q_row},
          {"total_supply", s.total_supply},
          {"producer_revenue", s.producer_revenue},
          {"market_revenue", s.market_revenue()},
          {"subsidy_payment", s.subsidy_payment},
          {"price_change_frac", s.price_change_frac}};
}

Json to_json(const SeasonRecord& r) {
  return {{"t", r.t},
          {"tau", r.tau},
          {"expected_price", r.expected_price},
          {"realized_price", r.realized_price},
          {"acreage", r.acreage},
          {"production", r.production},
          {"exports_china", r.exports_china},
          {"exports_row", r.exports_row},
          {"domestic_use", r.domestic_use},
          {"inventory_end", r.inventory_end},
          {"market_income", r.market_income},
          {"subsidy_income", r.subsidy_income},
          {"floor_binding", r.floor_binding}};
}

namespace {
Json supply_json(const ExporterSupply& s) {
  return {{"p0", s.p0}, {"q0", s.q0}, {"eta_s", s.eta_s}};
}
Json demand_json(const DestinationDemand& d) {
  return {{"p0", d.p0}, {"q0", d.q0}, {"eta_d", d.eta_d}};
}
Json band_json(const Band& b) { return {{"lo", b.lo}, {"hi", b.hi}}; }
}  // namespace

Json to_json(const TwoExporterMarket& m) {
  return {{"us", supply_json(m.us)},
          {"brazil", supply_json(m.brazil)},
          {"china", demand_json(m.china)},
          {"row", demand_json(m.row)}};
}

Json to_json(const TwoExporterSolution& s) {
  using S = TwoExporterSolution;
  return {{"tau", s.tau},
          {"regime", to_string(s.regime)},
          {"p_us", s.p_us},
          {"p_brazil", s.p_brazil},
          {"p_china_paid", s.p_china_paid},
          {"p_row_paid", s.p_row_paid},
          {"flows",
           {{"us_to_china", s.flow[S::kUs][S::kChina]},
            {"us_to_row", s.flow[S::kUs][S::kRow]},
            {"brazil_to_china", s.flow[S::kBrazil][S::kChina]},
            {"brazil_to_row", s.flow[S::kBrazil][S::kRow]}}},
          {"diversion_share", s.diversion_share}};
}

Json to_json(const CalibrationTargets& t) {
  Json j = Json::object();
  j["static_price"] = t.static_price ? band_json(*t.static_price) : Json(nullptr);
  j["dynamic_price"] = band_json(t.dynamic_price);
  j["acreage"] = band_json(t.acreage);
  j["exports_china"] = band_json(t.exports_china);
  return j;
}

Json to_json(const CalibrationGrid& g) {
  return {{"eta_d_china", g.eta_d_china},
          {"eta_s", g.eta_s},
          {"cost_c2", g.cost_c2},
          {"lambda", g.lambda}};
}

Json to_json(const CalibrationResult& r) {
  return {{"grid_index", r.grid_index},
          {"loss", r.loss},
          {"all_in_band", r.all_in_band},
          {"elasticities", to_json(r.elasticities)},
          {"dynamics", to_json(r.dynamics)},
          {"achieved",
           {{"static_price", r.achieved.static_price},
            {"dynamic_price", r.achieved.dynamic_price},
            {"acreage", r.achieved.acreage},
            {"exports_china", r.achieved.exports_china}}}};
}

Json to_json(const ExposureRule& r) {
  Json j = {{"kind", to_string(r.kind)}};
  switch (r.kind) {
    case ExposureRule::Kind::uniform:
      j["lo"] = r.lo;
      j["hi"] = r.hi;
      break;
    case ExposureRule::Kind::binary:
      j["n_treated"] = r.n_treated;
      break;
    case ExposureRule::Kind::explicit_values:
      j["values"] = r.values;
      break;
  }
  return j;
}

Json to_json(const PanelSpec& s) {
  return {{"n_states", s.n_states},
          {"first_year", s.first_year},
          {"last_year", s.last_year},
          {"exposure", to_json(s.exposure)},
          {"alpha", s.alpha},
          {"beta_true", s.beta_true},
          {"sigma_state", s.sigma_state},
          {"sigma_year", s.sigma_year},
          {"sigma_noise", s.sigma_noise},
          {"treatment_year", s.treatment_year},
          {"post_year_shift", s.post_year_shift},
          {"differential_trend", s.differential_trend},
          {"seed", s.seed}};
}

Json to_json(const VarSpec& s) {
  Json lags = Json::array();
  for (const auto& a : s.lags) lags.push_back(to_json(a));
  return {{"names", s.names},
          {"lags", lags},
          {"b0", to_json(s.b0)},
          {"mean", to_json(s.mean)},
          {"ordering", s.ordering},
          {"T", s.T},
          {"shock_date", s.shock_date},
          {"shock_vector", to_json(s.shock_vector)},
          {"dummy_length", s.dummy_length},
          {"seed", s.seed}};
}

Json to_json(const SupplyDemandSpec& s) {
  return {{"n", s.n},
          {"demand_intercept", s.demand_intercept},
          {"demand_slope", s.demand_slope},
          {"tariff_effect", s.tariff_effect},
          {"ip_effect", s.ip_effect},
          {"supply_intercept", s.supply_intercept},
          {"supply_slope", s.supply_slope},
          {"weather_effect", std::vector<double>(s.weather_effect.begin(), s.weather_effect.end())},
          {"sigma_demand", s.sigma_demand},
          {"sigma_supply", s.sigma_supply},
          {"tariff_share", s.tariff_share},
          {"seed", s.seed}};
}

Json to_json(const RegressionResult& r) {
  return {{"coefficients", to_json(r.coefficients)},
          {"std_errors", to_json(r.std_errors)},
          {"t_stats", to_json(r.t_stats)},
          {"p_values", to_json(r.p_values)},
          {"covariance_type", to_string(r.covariance_type)},
          {"n_obs", r.n_obs},
          {"n_clusters", r.n_clusters},
          {"df_resid", r.df_resid},
          {"r_squared", r.r_squared}};
}

Json to_json(const DidResult& r) {
  Json j = {{"beta_hat", r.beta_hat},
            {"std_error", r.std_error},
            {"t_stat", r.t_stat()},
            {"p_value", r.p_value()},
            {"mode", to_string(r.mode)},
            {"treatment_year", r.treatment_year},
            {"n_states", r.n_states},
            {"n_years", r.n_years},
            {"n_clusters", r.regression.n_clusters},
            {"cells",
             {{"treated_pre", r.cells.treated_pre},
              {"treated_post", r.cells.treated_post},
              {"control_pre", r.cells.control_pre},
              {"control_post", r.cells.control_post},
              {"treated_change", r.cells.treated_change()},
              {"control_change", r.cells.control_change()},
              {"n_treated", r.cells.n_treated},
              {"n_control", r.cells.n_control}}}};
  if (r.event_study) {
    const auto& es = *r.event_study;
    Json rows = Json::array();
    for (std::size_t i = 0; i < es.years.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      rows.push_back({{"year", es.years[i]},
                      {"coefficient", es.coefficients(k)},
                      {"std_error", es.std_errors(k)}});
    }
    j["event_study"] = {{"base_year", es.base_year}, {"coefficients", rows}};
  } else {
    j["event_study"] = nullptr;
  }
  j["pretrend_joint_p"] = r.pretrend_joint_p ? Json(*r.pretrend_joint_p) : Json(nullptr);
  return j;
}

Json to_json(const VarModel& m) {
  Json lags = Json::array();
  for (const auto& a : m.lags) lags.push_back(to_json(a));
  return {{"names", m.names},
          {"k", m.k},
          {"p", m.p},
          {"n_eff", m.n_eff},
          {"shrinkage_lambda", m.shrinkage_lambda},
          {"intercept", to_json(m.intercept)},
          {"lags", lags},
          {"exog", to_json(m.exog)},
          {"sigma", to_json(m.sigma)},
          {"aic", m.aic},
          {"bic", m.bic},
          {"hq", m.hq}};
}

Json to_json(const StructuralId& id) {
  return {{"ordering", id.ordering}, {"impact", to_json(id.impact)}};
}

Json to_json(const IvResult& r) {
  return {{"second_stage", to_json(r.second_stage)},
          {"instrumented", r.instrumented},
          {"first_stage_f", r.first_stage_f},
          {"weak_instruments", r.weak_instruments}};
}

Json to_json(const SupplyDemandFit& f) {
  return {{"demand_slope", f.demand_slope},
          {"supply_slope", f.supply_slope},
          {"tariff_effect", f.tariff_effect},
          {"no_tariff_log_price_change", f.no_tariff_log_price_change()},
          {"no_tariff_price_change_frac", f.no_tariff_price_change_frac()},
          {"demand", to_json(f.demand)},
          {"supply", to_json(f.supply)}};
}

Json to_json(const McResult& r) {
  Json agg = Json::object();
  for (const auto& [k, v] : r.aggregate) agg[k] = v;
  return {{"experiment", r.experiment}, {"reps", r.reps}, {"seed", r.seed}, {"aggregate", agg}};
}

// ---------------------------------------------------------------------------
// merge

void merge(const Json& j, MarketBaseline& out, const std::string& path) {
  ObjectReader r(j, path);
  r.read("p0", out.p0);
  r.read("q_us", out.q_us);
  r.read("q_china", out.q_china);
  r.read("q_row", out.q_row);
  r.finish();
}

void merge(const Json& j, ElasticityParams& out, const std::string& path) {
  ObjectReader r(j, path);
  r.read("eta_d_us", out.eta_d_us);
  r.read("eta_d_china", out.eta_d_china);
  r.read("eta_d_row", out.eta_d_row);
  r.read("eta_s", out.eta_s);
  r.finish();
}

void merge(const Json& j, TariffScenario& out, const std::string& path) {
  ObjectReader r(j, path);
  r.read("tau", out.tau);
  r.read("subsidy_rate", out.subsidy_rate);
  r.finish();
}

void merge(const Json& j, DynamicsParams& out, const std::string& path) {
  ObjectReader r(j, path);
  r.read("beta", out.beta);
  r.read("yield", out.yield);
  r.read("cost_c1", out.cost_c1);
  r.read("cost_c2", out.cost_c2);
  r.read("expectation_lambda", out.expectation_lambda);
  r.read("storage_loss", out.storage_loss);
  r.read("working_stock", out.working_stock);
  r.read("price_floor_frac", out.price_floor_frac);
  r.read("subsidy_in_expectations", out.subsidy_in_expectations);
  r.finish();
}

void merge(const Json& j, ShockPath& out, const std::string& path) {
  ObjectReader r(j, path);
  r.read("tau", out.tau);
  r.read("eps_x", out.eps_x);
  r.read("yield_shock", out.yield_shock);
  r.read("subsidy_rate", out.subsidy_rate);
  r.finish();
}

namespace {
void merge_supply(const Json& j, ExporterSupply& out, const std::string& path) {
  ObjectReader r(j, path);
  r.read("p0", out.p0);
  r.read("q0", out.q0);
  r.read("eta_s", out.eta_s);
  r.finish();
}
void merge_demand(const Json& j, DestinationDemand& out, const std::string& path) {
  ObjectReader r(j, path);
  r.read("p0", out.p0);
  r.read("q0", out.q0);
  r.read("eta_d", out.eta_d);
  r.finish();
}
void merge_band(const Json& j, Band& out, const std::string& path) {
  ObjectReader r(j, path);
  r.read("lo", out.lo);
  r.read("hi", out.hi);
  r.finish();
}
}  // namespace

void merge(const Json& j, TwoExporterMarket& out, const std::string& path) {
  ObjectReader r(j, path);
  if (r.has("us")) merge_supply(r.raw("us"), out.us, r.child_path("us"));
  if (r.has("brazil")) merge_supply(r.raw("brazil"), out.brazil, r.child_path("brazil"));
  if (r.has("china")) merge_demand(r.raw("china"), out.china, r.child_path("china"));
  if (r.has("row")) merge_demand(r.raw("row"), out.row, r.child_path("row"));
  r.finish();
}

void merge(const Json& j, CalibrationTargets& out, const std::string& path) {
  ObjectReader r(j, path);
  if (r.has("static_price")) {
    const Json& v = r.raw("static_price");
    if (v.is_null()) {
      out.static_price.reset();
    } else {
      Band b = out.static_price.value_or(Band{});
      merge_band(v, b, r.child_path("static_price"));
      out.static_price = b;
    }
  }
  if (r.has("dynamic_price")) merge_band(r.raw("dynamic_price"), out.dynamic_price, r.child_path("dynamic_price"));
  if (r.has("acreage")) merge_band(r.raw("acreage"), out.acreage, r.child_path("acreage"));
  if (r.has("exports_china")) merge_band(r.raw("exports_china"), out.exports_china, r.child_path("exports_china"));
  r.finish();
}

void merge(const Json& j, CalibrationGrid& out, const std::string& path) {
  ObjectReader r(j, path);
  r.read("eta_d_china", out.eta_d_china);
  r.read("eta_s", out.eta_s);
  r.read("cost_c2", out.cost_c2);
  r.read("lambda", out.lambda);
  r.finish();
}

void merge(const Json& j, ExposureRule& out, const std::string& path) {
  ObjectReader r(j, path);
  if (r.has("kind")) {
    std::string kind;
    r.read("kind", kind);
    out.kind = parse_exposure_kind(kind);
  }
  r.read("lo", out.lo);
  r.read("hi", out.hi);
  r.read("n_treated", out.n_treated);
  r.read("values", out.values);
  r.finish();
}

void merge(const Json& j, PanelSpec& out, const std::string& path) {
  ObjectReader r(j, path);
  r.read("n_states", out.n_states);
  r.read("first_year", out.first_year);
  r.read("last_year", out.last_year);
  r.read_into("exposure", out.exposure);
  r.read("alpha", out.alpha);
  r.read("beta_true", out.beta_true);
  r.read("sigma_state", out.sigma_state);
  r.read("sigma_year", out.sigma_year);
  r.read("sigma_noise", out.sigma_noise);
  r.read("treatment_year", out.treatment_year);
  r.read("post_year_shift", out.post_year_shift);
  r.read("differential_trend", out.differential_trend);
  r.read("seed", out.seed);
  r.finish();
}

void merge(const Json& j, VarSpec& out, const std::string& path) {
  ObjectReader r(j, path);
  r.read("names", out.names);
  if (r.has("lags")) {
    const std::string p = r.child_path("lags");
    const Json& v = as_array(r.raw("lags"), p);
    out.lags.clear();
    for (std::size_t i = 0; i < v.size(); ++i) out.lags.push_back(as_matrix(v[i], fmt::format("{}[{}]", p, i)));
  }
  r.read("b0", out.b0);
  r.read("mean", out.mean);
  r.read("ordering", out.ordering);
  r.read("T", out.T);
  r.read("shock_date", out.shock_date);
  r.read("shock_vector", out.shock_vector);
  r.read("dummy_length", out.dummy_length);
  r.read("seed", out.seed);
  r.finish();
}

void merge(const Json& j, SupplyDemandSpec& out, const std::string& path) {
  ObjectReader r(j, path);
  r.read("n", out.n);
  r.read("demand_intercept", out.demand_intercept);
  r.read("demand_slope", out.demand_slope);
  r.read("tariff_effect", out.tariff_effect);
  r.read("ip_effect", out.ip_effect);
  r.read("supply_intercept", out.supply_intercept);
  r.read("supply_slope", out.supply_slope);
  if (r.has("weather_effect")) {
    const std::string p = r.child_path("weather_effect");
    const auto w = as_doubles(r.raw("weather_effect"), p);
    if (w.size() != 2) throw ConfigError(fmt::format("{}: expected 2 entries, got {}", p, w.size()));
    out.weather_effect = {w[0], w[1]};
  }
  r.read("sigma_demand", out.sigma_demand);
  r.read("sigma_supply", out.sigma_supply);
  r.read("tariff_share", out.tariff_share);
  r.read("seed", out.seed);
  r.finish();
}

}  // namespace tariffkit::io
