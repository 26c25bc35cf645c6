#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tariffkit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// ---------------------------------------------------------------------------
// State-year panels

struct ExposureRule {
  enum class Kind { uniform, binary, explicit_values };
  Kind kind = Kind::uniform;
  double lo = 0.05;            // uniform bounds
  double hi = 0.6;
  std::size_t n_treated = 0;   // binary: states 0..n_treated-1 get exposure 1
  std::vector<double> values;  // explicit, one per state
};

std::string to_string(ExposureRule::Kind kind);
ExposureRule::Kind parse_exposure_kind(const std::string& text);

struct PanelSpec {
  std::size_t n_states = 50;
  int first_year = 2015;
  int last_year = 2020;
  ExposureRule exposure;
  double alpha = 0.0;
  double beta_true = 0.0;
  double sigma_state = 1.0;
  double sigma_year = 1.0;
  double sigma_noise = 1.0;
  int treatment_year = 2018;
  double post_year_shift = 0.0;     // common shift added to every post year
  double differential_trend = 0.0;  // per-year slope times exposure, zero at the last pre-year
  std::uint64_t seed = 0;

  std::size_t n_years() const { return static_cast<std::size_t>(last_year - first_year + 1); }
  void validate() const;
};

struct PanelRow {
  long state_id = 0;
  int year = 0;
  double outcome = 0.0;
  double exposure = 0.0;
};

// Long format, sorted by (state_id, year).
struct StatePanel {
  std::vector<PanelRow> rows;
  std::vector<std::string> extra_names;
  std::vector<std::vector<double>> extra;  // extra[c][row]
  std::optional<PanelSpec> ground_truth;

  std::vector<long> states() const;
  std::vector<int> years() const;
  const std::vector<double>* column(const std::string& name) const;
  void add_column(const std::string& name, std::vector<double> values);
  void sort();
  /// Throws ConfigError unless every state appears in every year exactly once.
  void validate_balanced() const;
};

// Components behind a generated panel, kept for tests of the estimators.
struct PanelDraws {
  StatePanel panel;
  std::vector<double> exposure;      // per state
  std::vector<double> state_effect;  // gamma_i
  std::vector<double> year_effect;   // delta_t (includes post_year_shift)
  std::vector<double> noise;         // per row
};

/// outcome = alpha + gamma_i + delta_t + beta * 1[t >= treatment_year] * exposure_i
///           + trend * exposure_i * (t - treatment_year + 1) + noise.
PanelDraws generate_did_panel_draws(const PanelSpec& spec);
StatePanel generate_did_panel(const PanelSpec& spec);

/// Adds an "instrument" column: exposure_i + s * u_i with s chosen so the
/// cross-state first-stage R^2 is `relevance` in expectation. u is drawn from
/// its own stream, independent of the outcome noise.
StatePanel attach_exposure_instrument(const StatePanel& panel, double relevance,
                                      std::uint64_t seed);

// ---------------------------------------------------------------------------
// Multivariate monthly series

inline constexpr std::size_t kVarBurnIn = 200;

struct VarSpec {
  std::vector<std::string> names;
  std::vector<Matrix> lags;  // A_1..A_p, each k x k
  Matrix b0;                 // lower triangular once variables are permuted by `ordering`
  Vector mean;               // level around which the deviations evolve
  std::vector<int> ordering; // empty = identity
  int shock_date = -1;       // index into the retained sample; -1 = none
  Vector shock_vector;       // structural shocks imposed at shock_date
  std::size_t T = 0;
  std::uint64_t seed = 0;
  int dummy_length = 0;      // >0 adds an exogenous dummy for [shock_date, shock_date + len)

  std::size_t k() const { return static_cast<std::size_t>(b0.rows()); }
  std::size_t p() const { return lags.size(); }
  std::vector<int> effective_ordering() const;
  /// Dimensions, b0 structure and stationarity (throws NonStationary).
  void validate() const;
};

struct TimeSeriesPanel {
  std::vector<std::string> names;
  Matrix observations;  // T x k levels
  Matrix shocks;        // T x k structural shocks actually applied
  Matrix presample;     // p x k levels preceding the first observation
  std::optional<Vector> dummy;
};

TimeSeriesPanel generate_var_series(const VarSpec& spec);

/// Re-runs the recursion from the panel's presample and recorded shocks.
Matrix resimulate(const VarSpec& spec, const TimeSeriesPanel& panel);

// ---------------------------------------------------------------------------
// Log price / log quantity market with a tariff demand shifter, for 2SLS.
//
//   demand:  q = a_d - b p + c * tariff + h * china_ip + u_d
//   supply:  q = a_s + s p + g1 * weather1 + g2 * weather2 + u_s

struct SupplyDemandSpec {
  std::size_t n = 360;
  double demand_intercept = 2.0;
  double demand_slope = 1.5;  // b, magnitude
  double tariff_effect = -0.14;
  double ip_effect = 0.3;
  double supply_intercept = 0.0;
  double supply_slope = 0.5;
  std::array<double, 2> weather_effect{0.4, 0.3};
  double sigma_demand = 0.05;
  double sigma_supply = 0.05;
  double tariff_share = 0.25;  // trailing fraction of the sample under the tariff
  std::uint64_t seed = 0;

  void validate() const;
  /// Planted change in log price from removing the tariff in tariff periods.
  double no_tariff_log_price_change() const {
    return -tariff_effect / (demand_slope + supply_slope);
  }
};

struct SupplyDemandSample {
  Vector log_price, log_quantity, tariff, china_ip, weather1, weather2;
  Vector u_demand, u_supply;

  static const std::vector<std::string>& column_names();
  const Vector& column(const std::string& name) const;
};

SupplyDemandSample generate_supply_demand(const SupplyDemandSpec& spec);

}  // namespace tariffkit
