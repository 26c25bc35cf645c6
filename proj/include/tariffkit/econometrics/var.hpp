#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace tariffkit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// kp x kp companion matrix of A_1..A_p.
Matrix companion(const std::vector<Matrix>& lags);
double spectral_radius(const std::vector<Matrix>& lags);

struct VarModel {
  std::size_t k = 0;
  std::size_t p = 0;
  std::vector<std::string> names;
  Vector intercept;           // k
  std::vector<Matrix> lags;   // p matrices, k x k; lags[j](i, m) = effect of x_{m,t-j-1} on x_i
  Matrix exog;                // k x m exogenous coefficients (m may be 0)
  // Regressor layout per equation: [1, x_{t-1}', ..., x_{t-p}', exog_t'].
  Matrix coefficients;        // (1 + kp + m) x k, column i = equation i
  Matrix std_errors;          // same shape
  Matrix sigma;               // residual covariance, denominator n_eff = T - p
  Matrix residuals;           // n_eff x k
  std::size_t n_eff = 0;
  double aic = 0.0, bic = 0.0, hq = 0.0;
  double shrinkage_lambda = 0.0;  // 0 for plain least squares

  std::size_t n_regressors() const { return static_cast<std::size_t>(coefficients.rows()); }
  /// Row of `coefficients` holding exogenous regressor j.
  std::size_t exog_row(std::size_t j) const { return 1 + k * p + j; }
};

/// Equation-by-equation least squares with intercept. `exog`, if given, has
/// the same number of rows as `series` and is aligned with it.
/// Requires T > k p + p + 5.
VarModel fit_var(const Matrix& series, std::size_t p, const std::optional<Matrix>& exog = {},
                 const std::vector<std::string>& names = {});

enum class InfoCriterion { aic, bic, hq };
InfoCriterion parse_criterion(const std::string& text);
std::string to_string(InfoCriterion c);

/// Fits p = 1..p_max on the common sample t = p_max..T-1 and returns the
/// minimizer of the criterion; ties go to the smaller p.
std::size_t select_lag(const Matrix& series, std::size_t p_max, InfoCriterion criterion,
                       const std::optional<Matrix>& exog = {});

/// Minnesota-style shrinkage toward a random walk: the prior mean is 1 on the
/// own first lag and 0 elsewhere; the prior standard deviation of the
/// coefficient on lag l of variable j in equation i is
///   lambda / l * sigma_i / sigma_j,
/// with sigma from univariate AR(p) fits. Intercept and exogenous terms are
/// unpenalized. Solved as an augmented least-squares problem per equation.
VarModel fit_var_shrunk(const Matrix& series, std::size_t p, double lambda,
                        const std::optional<Matrix>& exog = {},
                        const std::vector<std::string>& names = {});

// ---------------------------------------------------------------------------
// Structural identification

struct StructuralId {
  Matrix impact;              // B0 in the original variable order, B0 B0' = sigma
  std::vector<int> ordering;  // ordering[i] = variable placed i-th in the recursion
};

/// Lower-triangular factor of sigma after permuting variables by `ordering`
/// (empty = identity), mapped back to the original order. Shock j belongs
/// to variable j; every diagonal entry of B0 is positive. Throws
/// NotPositiveDefinite with the smallest eigenvalue.
StructuralId identify_short_run(const VarModel& model, const std::vector<int>& ordering = {});
StructuralId identify_short_run(const Matrix& sigma, const std::vector<int>& ordering = {});

/// Default recursion for (price, exports, inventory) data: exports first.
std::vector<int> default_trade_ordering(const std::vector<std::string>& names);

struct Irf {
  std::vector<std::string> names;
  std::vector<Matrix> response;  // response[h](i, j): variable i, shock j; h = 0..H
  std::size_t horizon() const { return response.empty() ? 0 : response.size() - 1; }
};

struct Fevd {
  std::vector<std::string> names;
  std::vector<Matrix> share;  // share[h - 1](i, j), h = 1..H
};

/// Responses to one-standard-deviation structural shocks via powers of the
/// companion matrix; response[0] is B0.
Irf irf(const VarModel& model, const StructuralId& id, std::size_t horizon);
Irf irf(const std::vector<Matrix>& lags, const Matrix& impact, std::size_t horizon);

/// Share of the h-step forecast-error variance of each variable due to each
/// shock, h = 1..horizon.
Fevd fevd(const VarModel& model, const StructuralId& id, std::size_t horizon);
Fevd fevd(const Irf& responses, std::size_t horizon);

}  // namespace tariffkit
