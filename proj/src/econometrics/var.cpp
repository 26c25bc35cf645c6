#include "tariffkit/econometrics/var.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "tariffkit/econometrics/ols.hpp"
#include "tariffkit/errors.hpp"

namespace tariffkit {

Matrix companion(const std::vector<Matrix>& lags) {
  if (lags.empty()) throw ConfigError("companion matrix needs at least one lag");
  const Eigen::Index k = lags.front().rows();
  const auto p = static_cast<Eigen::Index>(lags.size());
  Matrix c = Matrix::Zero(k * p, k * p);
  for (Eigen::Index j = 0; j < p; ++j) c.block(0, j * k, k, k) = lags[static_cast<std::size_t>(j)];
  if (p > 1) c.block(k, 0, k * (p - 1), k * (p - 1)).setIdentity();
  return c;
}

double spectral_radius(const std::vector<Matrix>& lags) {
  const Matrix c = companion(lags);
  const Eigen::EigenSolver<Matrix> es(c, false);
  if (es.info() != Eigen::Success) throw NumericalError("eigenvalue solver failed on companion matrix");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

InfoCriterion parse_criterion(const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (t == "aic") return InfoCriterion::aic;
  if (t == "bic") return InfoCriterion::bic;
  if (t == "hq") return InfoCriterion::hq;
  throw ConfigError(fmt::format("unknown information criterion '{}' (aic|bic|hq)", text));
}

std::string to_string(InfoCriterion c) {
  switch (c) {
    case InfoCriterion::aic: return "aic";
    case InfoCriterion::bic: return "bic";
    case InfoCriterion::hq: return "hq";
  }
  return "unknown";
}

namespace {

struct Design {
  Matrix X;  // n_eff x (1 + kp + m)
  Matrix Y;  // n_eff x k
};

Design build_design(const Matrix& series, std::size_t p, const std::optional<Matrix>& exog) {
  const Eigen::Index T = series.rows();
  const Eigen::Index k = series.cols();
  const auto P = static_cast<Eigen::Index>(p);
  const Eigen::Index m = exog ? exog->cols() : 0;
  const Eigen::Index n = T - P;
  Design d;
  d.X.resize(n, 1 + k * P + m);
  d.Y = series.bottomRows(n);
  d.X.col(0).setOnes();
  for (Eigen::Index j = 0; j < P; ++j) {
    d.X.block(0, 1 + j * k, n, k) = series.middleRows(P - 1 - j, n);
  }
  if (m > 0) d.X.rightCols(m) = exog->bottomRows(n);
  return d;
}

void check_inputs(const Matrix& series, std::size_t p, const std::optional<Matrix>& exog,
                  const std::vector<std::string>& names) {
  if (p < 1) throw ConfigError("VAR lag order must be >= 1");
  const auto T = static_cast<std::size_t>(series.rows());
  const auto k = static_cast<std::size_t>(series.cols());
  if (k == 0) throw ConfigError("VAR series has no variables");
  const std::size_t required = k * p + p + 6;
  if (T < required) throw InsufficientObservations(T, required);
  if (exog && exog->rows() != series.rows()) {
    throw ConfigError(fmt::format("exogenous block has {} rows, series has {}", exog->rows(), T));
  }
  if (!names.empty() && names.size() != k) {
    throw ConfigError(fmt::format("{} names given for {} variables", names.size(), k));
  }
  if (!series.allFinite()) throw ConfigError("VAR series contains non-finite values");
}

void set_criteria(VarModel& model) {
  const double n = static_cast<double>(model.n_eff);
  const double params = static_cast<double>(model.k * model.n_regressors());
  const Eigen::LDLT<Matrix> ldlt(model.sigma);
  double log_det = 0.0;
  const Vector d = ldlt.vectorD();
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    log_det += d(i) > 0.0 ? std::log(d(i)) : -std::numeric_limits<double>::infinity();
  }
  model.aic = log_det + 2.0 * params / n;
  model.bic = log_det + std::log(n) * params / n;
  model.hq = log_det + 2.0 * std::log(std::log(n)) * params / n;
}

void unpack(VarModel& model, const Matrix& X, const Matrix& Y, Matrix coefficients,
            const Matrix& bread, std::size_t dof_regressors) {
  const auto k = static_cast<Eigen::Index>(model.k);
  const auto P = static_cast<Eigen::Index>(model.p);
  const Eigen::Index m = X.cols() - 1 - k * P;
  model.coefficients = std::move(coefficients);
  model.residuals = Y - X * model.coefficients;
  model.n_eff = static_cast<std::size_t>(X.rows());
  const double n = static_cast<double>(model.n_eff);
  model.sigma = model.residuals.transpose() * model.residuals / n;
  model.sigma = 0.5 * (model.sigma + model.sigma.transpose());

  const double dof = std::max(1.0, n - static_cast<double>(dof_regressors));
  model.std_errors.resize(model.coefficients.rows(), k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double s2 = model.residuals.col(i).squaredNorm() / dof;
    model.std_errors.col(i) = (s2 * bread.diagonal().array()).cwiseMax(0.0).sqrt().matrix();
  }

  model.intercept = model.coefficients.row(0).transpose();
  model.lags.assign(model.p, Matrix());
  for (Eigen::Index j = 0; j < P; ++j) {
    model.lags[static_cast<std::size_t>(j)] = model.coefficients.middleRows(1 + j * k, k).transpose();
  }
  model.exog = m > 0 ? Matrix(model.coefficients.bottomRows(m).transpose()) : Matrix(k, 0);
  set_criteria(model);
}

VarModel empty_model(const Matrix& series, std::size_t p, const std::vector<std::string>& names) {
  VarModel model;
  model.k = static_cast<std::size_t>(series.cols());
  model.p = p;
  model.names = names;
  if (model.names.empty()) {
    for (std::size_t i = 0; i < model.k; ++i) model.names.push_back(fmt::format("y{}", i + 1));
  }
  return model;
}

Matrix inverse_gram(const Matrix& X) {
  const Eigen::HouseholderQR<Matrix> qr(X);
  const Eigen::Index K = X.cols();
  const Matrix r = qr.matrixQR().topLeftCorner(K, K).triangularView<Eigen::Upper>();
  const Matrix r_inv = r.triangularView<Eigen::Upper>().solve(Matrix::Identity(K, K));
  return r_inv * r_inv.transpose();
}

// Residual standard deviation of a univariate AR(p) with intercept.
double ar_residual_sd(const Vector& x, std::size_t p) {
  const auto P = static_cast<Eigen::Index>(p);
  const Eigen::Index n = x.size() - P;
  Matrix X(n, 1 + P);
  X.col(0).setOnes();
  for (Eigen::Index j = 0; j < P; ++j) X.col(1 + j) = x.segment(P - 1 - j, n);
  const Vector y = x.tail(n);
  const Vector b = X.householderQr().solve(y);
  const double dof = std::max(1.0, static_cast<double>(n - 1 - P));
  return std::sqrt((y - X * b).squaredNorm() / dof);
}

}  // namespace

VarModel fit_var(const Matrix& series, std::size_t p, const std::optional<Matrix>& exog,
                 const std::vector<std::string>& names) {
  check_inputs(series, p, exog, names);
  const Design d = build_design(series, p, exog);
  if (auto bad = first_dependent_column(d.X)) throw RankDeficient(*bad);
  VarModel model = empty_model(series, p, names);
  const Eigen::HouseholderQR<Matrix> qr(d.X);
  unpack(model, d.X, d.Y, qr.solve(d.Y), inverse_gram(d.X), static_cast<std::size_t>(d.X.cols()));
  return model;
}

std::size_t select_lag(const Matrix& series, std::size_t p_max, InfoCriterion criterion,
                       const std::optional<Matrix>& exog) {
  if (p_max < 1) throw ConfigError("p_max must be >= 1");
  const Eigen::Index T = series.rows();
  std::size_t best = 1;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t p = 1; p <= p_max; ++p) {
    const auto drop = static_cast<Eigen::Index>(p_max - p);
    if (drop >= T) throw InsufficientObservations(static_cast<std::size_t>(T), p_max + 1);
    std::optional<Matrix> ex;
    if (exog) ex = Matrix(exog->bottomRows(exog->rows() - std::min(drop, exog->rows())));
    const VarModel m = fit_var(series.bottomRows(T - drop), p, ex);
    const double value = criterion == InfoCriterion::aic   ? m.aic
                         : criterion == InfoCriterion::bic ? m.bic
                                                           : m.hq;
    if (value < best_value) {
      best_value = value;
      best = p;
    }
  }
  return best;
}

VarModel fit_var_shrunk(const Matrix& series, std::size_t p, double lambda,
                        const std::optional<Matrix>& exog, const std::vector<std::string>& names) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ConfigError(fmt::format("shrinkage tightness must be > 0 (got {})", lambda));
  }
  check_inputs(series, p, exog, names);
  const Design d = build_design(series, p, exog);
  const auto k = static_cast<Eigen::Index>(series.cols());
  const auto P = static_cast<Eigen::Index>(p);
  const Eigen::Index n = d.X.rows();
  const Eigen::Index K = d.X.cols();
  const Eigen::Index n_prior = k * P;

  Vector scale(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    scale(j) = ar_residual_sd(series.col(j), p);
    if (!(scale(j) > 0.0)) {
      throw NumericalError(fmt::format("variable {} has zero residual scale", j));
    }
  }

  VarModel model = empty_model(series, p, names);
  model.shrinkage_lambda = lambda;
  Matrix coefficients(K, k);
  std::vector<Matrix> breads;
  for (Eigen::Index i = 0; i < k; ++i) {
    // Dummy observations: weight sigma_i / sd = l * sigma_j / lambda per lag coefficient.
    Matrix Xa = Matrix::Zero(n + n_prior, K);
    Vector ya = Vector::Zero(n + n_prior);
    Xa.topRows(n) = d.X;
    ya.head(n) = d.Y.col(i);
    for (Eigen::Index l = 1; l <= P; ++l) {
      for (Eigen::Index j = 0; j < k; ++j) {
        const Eigen::Index row = n + (l - 1) * k + j;
        const Eigen::Index col = 1 + (l - 1) * k + j;
        const double w = static_cast<double>(l) * scale(j) / lambda;
        const double prior_mean = (l == 1 && j == i) ? 1.0 : 0.0;
        Xa(row, col) = w;
        ya(row) = w * prior_mean;
      }
    }
    const Eigen::HouseholderQR<Matrix> qr(Xa);
    coefficients.col(i) = qr.solve(ya);
    breads.push_back(inverse_gram(Xa));
  }
  unpack(model, d.X, d.Y, std::move(coefficients), breads.front(), static_cast<std::size_t>(K));
  const double dof = std::max(1.0, static_cast<double>(n - K));
  for (Eigen::Index i = 0; i < k; ++i) {
    const double s2 = model.residuals.col(i).squaredNorm() / dof;
    model.std_errors.col(i) =
        (s2 * breads[static_cast<std::size_t>(i)].diagonal().array()).cwiseMax(0.0).sqrt().matrix();
  }
  return model;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<int> checked_ordering(const std::vector<int>& ordering, std::size_t k) {
  std::vector<int> ord = ordering;
  if (ord.empty()) {
    ord.resize(k);
    for (std::size_t i = 0; i < k; ++i) ord[i] = static_cast<int>(i);
  }
  std::vector<int> sorted = ord;
  std::sort(sorted.begin(), sorted.end());
  bool ok = sorted.size() == k;
  for (std::size_t i = 0; ok && i < k; ++i) ok = sorted[i] == static_cast<int>(i);
  if (!ok) throw ConfigError("ordering must be a permutation of 0..k-1");
  return ord;
}

}  // namespace

StructuralId identify_short_run(const Matrix& sigma, const std::vector<int>& ordering) {
  if (sigma.rows() != sigma.cols() || sigma.rows() == 0) {
    throw ConfigError("residual covariance must be a non-empty square matrix");
  }
  const auto k = static_cast<std::size_t>(sigma.rows());
  const std::vector<int> ord = checked_ordering(ordering, k);
  const Matrix sym = 0.5 * (sigma + sigma.transpose());
  const Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  const double smallest = es.eigenvalues().minCoeff();
  if (!(smallest > 0.0)) throw NotPositiveDefinite(smallest);

  const auto K = static_cast<Eigen::Index>(k);
  Matrix permuted(K, K);
  for (Eigen::Index a = 0; a < K; ++a) {
    for (Eigen::Index b = 0; b < K; ++b) permuted(a, b) = sym(ord[a], ord[b]);
  }
  const Eigen::LLT<Matrix> llt(permuted);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite(smallest);
  const Matrix l = llt.matrixL();

  StructuralId id;
  id.ordering = ord;
  id.impact = Matrix::Zero(K, K);
  for (Eigen::Index a = 0; a < K; ++a) {
    for (Eigen::Index b = 0; b <= a; ++b) id.impact(ord[a], ord[b]) = l(a, b);
  }
  return id;
}

StructuralId identify_short_run(const VarModel& model, const std::vector<int>& ordering) {
  return identify_short_run(model.sigma, ordering);
}

std::vector<int> default_trade_ordering(const std::vector<std::string>& names) {
  std::vector<int> ord;
  for (const char* wanted : {"exports", "price", "inventory"}) {
    const auto it = std::find(names.begin(), names.end(), wanted);
    if (it != names.end()) ord.push_back(static_cast<int>(it - names.begin()));
  }
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (std::find(ord.begin(), ord.end(), static_cast<int>(i)) == ord.end()) {
      ord.push_back(static_cast<int>(i));
    }
  }
  return ord;
}

Irf irf(const std::vector<Matrix>& lags, const Matrix& impact, std::size_t horizon) {
  const Eigen::Index k = impact.rows();
  for (const auto& a : lags) {
    if (a.rows() != k || a.cols() != k) throw ConfigError("lag matrices must match the impact matrix");
  }
  Irf out;
  out.response.reserve(horizon + 1);
  out.response.push_back(impact);
  if (horizon == 0) return out;
  const Matrix c = companion(lags);
  Matrix power = Matrix::Identity(c.rows(), c.cols());
  for (std::size_t h = 1; h <= horizon; ++h) {
    power = c * power;
    out.response.push_back(power.topLeftCorner(k, k) * impact);
  }
  return out;
}

Irf irf(const VarModel& model, const StructuralId& id, std::size_t horizon) {
  Irf out = irf(model.lags, id.impact, horizon);
  out.names = model.names;
  return out;
}

Fevd fevd(const Irf& responses, std::size_t horizon) {
  if (horizon < 1) throw ConfigError("FEVD horizon must be >= 1");
  if (responses.response.size() < horizon) {
    throw ConfigError(fmt::format("FEVD horizon {} needs responses up to h = {}", horizon,
                                  horizon - 1));
  }
  Fevd out;
  out.names = responses.names;
  const Eigen::Index k = responses.response.front().rows();
  Matrix cumulative = Matrix::Zero(k, responses.response.front().cols());
  for (std::size_t h = 1; h <= horizon; ++h) {
    cumulative += responses.response[h - 1].array().square().matrix();
    Matrix share = cumulative;
    for (Eigen::Index i = 0; i < k; ++i) {
      const double total = cumulative.row(i).sum();
      if (!(total > 0.0)) {
        throw NumericalError(fmt::format("variable {} has zero forecast-error variance", i));
      }
      share.row(i) /= total;
    }
    out.share.push_back(std::move(share));
  }
  return out;
}

Fevd fevd(const VarModel& model, const StructuralId& id, std::size_t horizon) {
  if (horizon < 1) throw ConfigError("FEVD horizon must be >= 1");
  return fevd(irf(model, id, horizon - 1), horizon);
}

}  // namespace tariffkit
