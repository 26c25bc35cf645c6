#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace tariffkit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class CovarianceType { classical, cluster_robust };

std::string to_string(CovarianceType type);

struct RegressionResult {
  Vector coefficients;
  Matrix covariance;
  CovarianceType covariance_type = CovarianceType::classical;
  Vector std_errors;
  Vector t_stats;
  Vector p_values;  // two-sided; t(n - k) classical, t(G - 1) clustered
  std::size_t n_obs = 0;
  std::size_t n_clusters = 0;  // 0 when not clustered
  double r_squared = 0.0;
  double df_resid = 0.0;       // degrees of freedom behind p_values
  Vector residuals;

  // z (normal) is not used: intervals use the same t reference as p_values.
  double critical_value(double level = 0.95) const;
};

struct OlsOptions {
  std::optional<std::vector<long>> cluster_ids;
  // Parameters partialled out before the call (e.g. absorbed fixed effects);
  // subtracted from n - k in the classical residual variance only.
  std::size_t absorbed_dof = 0;
  bool centered_r2 = true;
};

/// Least squares via Householder QR. Throws RankDeficient naming the first
/// column that is numerically in the span of earlier columns. Clustered
/// covariance uses CR1: G/(G-1) * (n-1)/(n-k).
RegressionResult ols(const Vector& y, const Matrix& X, const OlsOptions& options = {});

/// Convenience overload with cluster ids.
RegressionResult ols(const Vector& y, const Matrix& X, const std::vector<long>& cluster_ids);

/// Sandwich covariance (X'X)^-1 meat (X'X)^-1 with CR1 scaling, for a design
/// whose bread (X'X)^-1 is already known. Rows of `scores_x` are the rows used
/// in the meat (X for OLS, fitted X for 2SLS).
Matrix cluster_covariance(const Matrix& bread, const Matrix& scores_x, const Vector& resid,
                          const std::vector<long>& cluster_ids, std::size_t k,
                          std::size_t* n_clusters = nullptr);

/// Index of the first column of X lying in the span of earlier columns, or
/// std::nullopt when X has full column rank.
std::optional<std::size_t> first_dependent_column(const Matrix& X, double tol = 1e-10);

// distributions.cpp
double student_t_two_sided_p(double t, double df);
double student_t_quantile(double prob, double df);
double fisher_f_upper_p(double f, double df1, double df2);
double chi_squared_upper_p(double x, double df);

}  // namespace tariffkit
