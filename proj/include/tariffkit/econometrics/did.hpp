#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tariffkit/datagen.hpp"
#include "tariffkit/econometrics/ols.hpp"

namespace tariffkit {

enum class ExposureMode { binary, continuous };

std::string to_string(ExposureMode mode);
ExposureMode parse_exposure_mode(const std::string& text);

// Means of the outcome by group and period. In binary mode "treated" is the
// indicator group; in continuous mode states above the midrange of exposure.
struct CellMeans {
  double treated_pre = 0.0;
  double treated_post = 0.0;
  double control_pre = 0.0;
  double control_post = 0.0;
  std::size_t n_treated = 0;
  std::size_t n_control = 0;

  double treated_change() const { return treated_post - treated_pre; }
  double control_change() const { return control_post - control_pre; }
};

struct EventStudy {
  std::vector<int> years;     // every panel year, base included
  Vector coefficients;        // base year entry is exactly 0
  Vector std_errors;
  Matrix covariance;          // clustered, base row/column zero
  int base_year = 0;
  std::vector<std::size_t> pre_index;  // entries of `years` before the base year
};

struct DidResult {
  double beta_hat = 0.0;
  double std_error = 0.0;
  RegressionResult regression;  // on the two-way demeaned interaction
  ExposureMode mode = ExposureMode::continuous;
  int treatment_year = 0;
  std::size_t n_states = 0;
  std::size_t n_years = 0;
  CellMeans cells;
  std::optional<EventStudy> event_study;  // needs >= 2 pre years
  std::optional<double> pretrend_joint_p;  // needs >= 2 pre-period coefficients

  double t_stat() const { return regression.t_stats(0); }
  double p_value() const { return regression.p_values(0); }
};

/// Treatment intensity per row. Binary mode maps exposure to 1 above the
/// midrange of state exposures (so a 0/1 column passes through unchanged).
std::vector<double> treatment_intensity(const StatePanel& panel, ExposureMode mode);

/// y_it - ybar_i - ybar_t + ybar on a balanced panel sorted by (state, year).
Vector two_way_demean(const StatePanel& panel, const Vector& values);

/// Y_it = beta * Post_t * Exposure_i + gamma_i + delta_t + e_it with both
/// effect sets removed by demeaning; standard errors clustered by state
/// (CR1), p-values from t(G - 1). The event study uses the last pre-year as
/// base.
DidResult twfe_did(const StatePanel& panel, int treatment_year,
                   ExposureMode mode = ExposureMode::continuous);

/// Drops rows at or after `real_treatment_year` (taken from the panel's
/// ground truth when not given) and runs twfe_did with `fake_year` as the
/// cutoff. The fake year must leave at least one earlier year.
DidResult placebo_did(const StatePanel& panel, int fake_year,
                      std::optional<int> real_treatment_year = std::nullopt,
                      ExposureMode mode = ExposureMode::continuous);

/// Wald test that all pre-period event-study coefficients are zero, referred
/// to F(q, G - 1).
double pretrend_test(const DidResult& did);

}  // namespace tariffkit
