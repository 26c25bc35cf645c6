#include "tariffkit/econometrics/ols.hpp"

#include <fmt/format.h>

#include <cmath>
#include <unordered_map>

#include "tariffkit/errors.hpp"

namespace tariffkit {

std::string to_string(CovarianceType type) {
  return type == CovarianceType::classical ? "classical" : "cluster_robust";
}

double RegressionResult::critical_value(double level) const {
  return student_t_quantile(0.5 + 0.5 * level, df_resid);
}

std::optional<std::size_t> first_dependent_column(const Matrix& X, double tol) {
  const Eigen::HouseholderQR<Matrix> qr(X);
  const Matrix& packed = qr.matrixQR();
  const auto k = static_cast<std::size_t>(X.cols());
  for (std::size_t j = 0; j < k; ++j) {
    const double col_norm = X.col(static_cast<Eigen::Index>(j)).norm();
    if (j >= static_cast<std::size_t>(X.rows())) return j;
    const double r_jj = std::abs(packed(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)));
    if (col_norm == 0.0 || r_jj <= tol * col_norm) return j;
  }
  return std::nullopt;
}

Matrix cluster_covariance(const Matrix& bread, const Matrix& scores_x, const Vector& resid,
                          const std::vector<long>& cluster_ids, std::size_t k,
                          std::size_t* n_clusters) {
  const auto n = static_cast<std::size_t>(scores_x.rows());
  if (cluster_ids.size() != n) {
    throw ConfigError(fmt::format("cluster ids have {} rows, design has {}", cluster_ids.size(), n));
  }
  std::unordered_map<long, Eigen::Index> slot;
  std::vector<Vector> sums;
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, inserted] = slot.emplace(cluster_ids[i], static_cast<Eigen::Index>(sums.size()));
    if (inserted) sums.emplace_back(Vector::Zero(scores_x.cols()));
    sums[static_cast<std::size_t>(it->second)] +=
        scores_x.row(static_cast<Eigen::Index>(i)).transpose() * resid(static_cast<Eigen::Index>(i));
  }
  const std::size_t g = sums.size();
  if (g < 2) throw ConfigError("cluster-robust covariance needs at least two clusters");
  Matrix meat = Matrix::Zero(scores_x.cols(), scores_x.cols());
  for (const Vector& s : sums) meat.noalias() += s * s.transpose();
  const double dn = static_cast<double>(n);
  const double dg = static_cast<double>(g);
  const double scale = dg / (dg - 1.0) * (dn - 1.0) / (dn - static_cast<double>(k));
  Matrix cov = scale * (bread * meat * bread);
  if (n_clusters) *n_clusters = g;
  return 0.5 * (cov + cov.transpose());
}

RegressionResult ols(const Vector& y, const Matrix& X, const OlsOptions& options) {
  const auto n = static_cast<std::size_t>(X.rows());
  const auto k = static_cast<std::size_t>(X.cols());
  if (static_cast<std::size_t>(y.size()) != n) {
    throw ConfigError(fmt::format("y has {} rows but X has {}", y.size(), n));
  }
  if (k == 0) throw ConfigError("design matrix has no columns");
  const std::size_t used = options.cluster_ids ? k : k + options.absorbed_dof;
  if (n <= used) throw InsufficientObservations(n, used + 1);
  if (auto bad = first_dependent_column(X)) throw RankDeficient(*bad);

  const Eigen::HouseholderQR<Matrix> qr(X);
  const auto K = static_cast<Eigen::Index>(k);
  const Matrix r = qr.matrixQR().topLeftCorner(K, K).triangularView<Eigen::Upper>();
  const Matrix r_inv = r.triangularView<Eigen::Upper>().solve(Matrix::Identity(K, K));
  const Matrix bread = r_inv * r_inv.transpose();

  RegressionResult res;
  res.coefficients = qr.solve(y);
  res.residuals = y - X * res.coefficients;
  res.n_obs = n;
  const double rss = res.residuals.squaredNorm();
  const double tss = options.centered_r2 ? (y.array() - y.mean()).matrix().squaredNorm()
                                         : y.squaredNorm();
  res.r_squared = tss > 0.0 ? 1.0 - rss / tss : (rss == 0.0 ? 1.0 : 0.0);

  if (options.cluster_ids) {
    res.covariance = cluster_covariance(bread, X, res.residuals, *options.cluster_ids, k,
                                        &res.n_clusters);
    res.covariance_type = CovarianceType::cluster_robust;
    res.df_resid = static_cast<double>(res.n_clusters) - 1.0;
  } else {
    res.df_resid = static_cast<double>(n - k - options.absorbed_dof);
    const Matrix cov = (rss / res.df_resid) * bread;
    res.covariance = 0.5 * (cov + cov.transpose());
    res.covariance_type = CovarianceType::classical;
  }
  res.std_errors = res.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
  res.t_stats = res.coefficients.cwiseQuotient(res.std_errors);
  res.p_values.resize(K);
  for (Eigen::Index j = 0; j < K; ++j) {
    res.p_values(j) = student_t_two_sided_p(res.t_stats(j), res.df_resid);
  }
  return res;
}

RegressionResult ols(const Vector& y, const Matrix& X, const std::vector<long>& cluster_ids) {
  OlsOptions opts;
  opts.cluster_ids = cluster_ids;
  return ols(y, X, opts);
}

}  // namespace tariffkit
