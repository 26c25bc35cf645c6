#include "tariffkit/econometrics/iv.hpp"

#include <fmt/format.h>

#include <cmath>

#include "tariffkit/errors.hpp"

namespace tariffkit {

namespace {

std::optional<Eigen::Index> find_column(const Matrix& Z, const Vector& x) {
  for (Eigen::Index j = 0; j < Z.cols(); ++j) {
    if (Z.col(j) == x) return j;
  }
  return std::nullopt;
}

double rss_on(const Matrix& W, const Vector& x) {
  if (W.cols() == 0) return x.squaredNorm();
  const Vector b = W.householderQr().solve(x);
  return (x - W * b).squaredNorm();
}

}  // namespace

IvResult tsls(const Vector& y, const Matrix& X, const Matrix& Z,
              const std::optional<std::vector<long>>& cluster_ids) {
  const Eigen::Index n = X.rows();
  const Eigen::Index k = X.cols();
  const Eigen::Index l = Z.cols();
  if (y.size() != n || Z.rows() != n) {
    throw ConfigError(fmt::format("tsls dimensions disagree: y {}, X {}, Z {} rows", y.size(), n,
                                  Z.rows()));
  }
  if (l < k) {
    throw ConfigError(fmt::format("under-identified: {} instruments for {} regressors", l, k));
  }
  if (n <= l) throw InsufficientObservations(static_cast<std::size_t>(n), static_cast<std::size_t>(l + 1));
  if (auto bad = first_dependent_column(Z)) {
    throw ConfigError(fmt::format("instrument column {} is collinear with earlier instruments", *bad));
  }

  const Eigen::HouseholderQR<Matrix> z_qr(Z);
  const Matrix x_hat = Z * z_qr.solve(X);
  if (auto bad = first_dependent_column(x_hat)) throw RankDeficient(*bad);

  const Eigen::HouseholderQR<Matrix> qr(x_hat);
  const Matrix r = qr.matrixQR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  const Matrix r_inv = r.triangularView<Eigen::Upper>().solve(Matrix::Identity(k, k));
  const Matrix bread = r_inv * r_inv.transpose();

  IvResult res;
  RegressionResult& s = res.second_stage;
  s.coefficients = qr.solve(y);
  s.residuals = y - X * s.coefficients;
  s.n_obs = static_cast<std::size_t>(n);
  const double rss = s.residuals.squaredNorm();
  const double tss = (y.array() - y.mean()).matrix().squaredNorm();
  s.r_squared = tss > 0.0 ? 1.0 - rss / tss : 0.0;
  if (cluster_ids) {
    s.covariance = cluster_covariance(bread, x_hat, s.residuals, *cluster_ids,
                                      static_cast<std::size_t>(k), &s.n_clusters);
    s.covariance_type = CovarianceType::cluster_robust;
    s.df_resid = static_cast<double>(s.n_clusters) - 1.0;
  } else {
    s.df_resid = static_cast<double>(n - k);
    const Matrix cov = (rss / s.df_resid) * bread;
    s.covariance = 0.5 * (cov + cov.transpose());
    s.covariance_type = CovarianceType::classical;
  }
  s.std_errors = s.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
  s.t_stats = s.coefficients.cwiseQuotient(s.std_errors);
  s.p_values.resize(k);
  for (Eigen::Index j = 0; j < k; ++j) s.p_values(j) = student_t_two_sided_p(s.t_stats(j), s.df_resid);

  std::vector<Eigen::Index> included;  // columns of Z that duplicate a column of X
  for (Eigen::Index j = 0; j < k; ++j) {
    if (auto zc = find_column(Z, X.col(j))) {
      included.push_back(*zc);
    } else {
      res.instrumented.push_back(static_cast<std::size_t>(j));
    }
  }
  Matrix W(n, static_cast<Eigen::Index>(included.size()));
  for (std::size_t c = 0; c < included.size(); ++c) W.col(static_cast<Eigen::Index>(c)) = Z.col(included[c]);
  const double q = static_cast<double>(l - static_cast<Eigen::Index>(included.size()));
  const double dof = static_cast<double>(n - l);
  for (std::size_t j : res.instrumented) {
    const Vector xj = X.col(static_cast<Eigen::Index>(j));
    const double rss_u = rss_on(Z, xj);
    const double rss_r = rss_on(W, xj);
    double f = 0.0;
    if (q > 0.0) {
      f = rss_u > 0.0 ? ((rss_r - rss_u) / q) / (rss_u / dof) : INFINITY;
    }
    res.first_stage_f.push_back(f);
    if (f < kWeakInstrumentF) res.weak_instruments = true;
  }
  return res;
}

double SupplyDemandFit::no_tariff_price_change_frac() const {
  return std::expm1(no_tariff_log_price_change());
}

SupplyDemandFit fit_supply_demand(const SupplyDemandSample& s) {
  const Eigen::Index n = s.log_price.size();
  const Vector ones = Vector::Ones(n);

  Matrix Xd(n, 4), Zd(n, 5);
  Xd << ones, s.log_price, s.tariff, s.china_ip;
  Zd << ones, s.tariff, s.china_ip, s.weather1, s.weather2;
  Matrix Xs(n, 4), Zs(n, 5);
  Xs << ones, s.log_price, s.weather1, s.weather2;
  Zs << ones, s.weather1, s.weather2, s.tariff, s.china_ip;

  SupplyDemandFit fit;
  fit.demand = tsls(s.log_quantity, Xd, Zd);
  fit.supply = tsls(s.log_quantity, Xs, Zs);
  fit.demand_slope = -fit.demand.second_stage.coefficients(1);
  fit.tariff_effect = fit.demand.second_stage.coefficients(2);
  fit.supply_slope = fit.supply.second_stage.coefficients(1);
  if (!(fit.demand_slope + fit.supply_slope != 0.0)) {
    throw NumericalError("estimated demand and supply slopes cancel");
  }
  return fit;
}

}  // namespace tariffkit
