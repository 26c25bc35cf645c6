#include "tariffkit/econometrics/did.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "tariffkit/errors.hpp"

namespace tariffkit {

std::string to_string(ExposureMode mode) {
  return mode == ExposureMode::binary ? "binary" : "continuous";
}

ExposureMode parse_exposure_mode(const std::string& text) {
  if (text == "binary") return ExposureMode::binary;
  if (text == "continuous") return ExposureMode::continuous;
  throw ConfigError(fmt::format("unknown exposure mode '{}' (binary|continuous)", text));
}

namespace {

struct Layout {
  StatePanel panel;  // sorted copy
  std::vector<long> states;
  std::vector<int> years;
  std::size_t n_states = 0;
  std::size_t n_years = 0;
};

Layout prepare(const StatePanel& panel) {
  Layout l;
  l.panel = panel;
  l.panel.sort();
  l.panel.validate_balanced();
  l.states = l.panel.states();
  l.years = l.panel.years();
  l.n_states = l.states.size();
  l.n_years = l.years.size();
  return l;
}

std::pair<double, double> exposure_range(const StatePanel& panel) {
  double lo = panel.rows.front().exposure;
  double hi = lo;
  for (const auto& r : panel.rows) {
    lo = std::min(lo, r.exposure);
    hi = std::max(hi, r.exposure);
  }
  return {lo, hi};
}

std::vector<long> cluster_ids(const StatePanel& panel) {
  std::vector<long> ids;
  ids.reserve(panel.rows.size());
  for (const auto& r : panel.rows) ids.push_back(r.state_id);
  return ids;
}

Vector outcomes(const StatePanel& panel) {
  Vector y(static_cast<Eigen::Index>(panel.rows.size()));
  for (std::size_t i = 0; i < panel.rows.size(); ++i) {
    y(static_cast<Eigen::Index>(i)) = panel.rows[i].outcome;
  }
  return y;
}

CellMeans cell_means(const StatePanel& panel, int treatment_year) {
  const auto [lo, hi] = exposure_range(panel);
  const double cut = 0.5 * (lo + hi);
  CellMeans c;
  double n_tp = 0, n_tq = 0, n_cp = 0, n_cq = 0;
  std::map<long, bool> treated;
  for (const auto& r : panel.rows) {
    const bool is_treated = r.exposure > cut;
    treated.emplace(r.state_id, is_treated);
    const bool post = r.year >= treatment_year;
    if (is_treated) {
      (post ? c.treated_post : c.treated_pre) += r.outcome;
      (post ? n_tq : n_tp) += 1;
    } else {
      (post ? c.control_post : c.control_pre) += r.outcome;
      (post ? n_cq : n_cp) += 1;
    }
  }
  if (n_tp > 0) c.treated_pre /= n_tp;
  if (n_tq > 0) c.treated_post /= n_tq;
  if (n_cp > 0) c.control_pre /= n_cp;
  if (n_cq > 0) c.control_post /= n_cq;
  for (const auto& [id, t] : treated) (t ? c.n_treated : c.n_control) += 1;
  return c;
}

EventStudy event_study(const Layout& l, const std::vector<double>& intensity, int base_year,
                       const Vector& y_dm) {
  EventStudy es;
  es.years = l.years;
  es.base_year = base_year;
  const auto n = static_cast<Eigen::Index>(l.panel.rows.size());
  std::vector<std::size_t> cols;  // indices of non-base years
  for (std::size_t j = 0; j < l.years.size(); ++j) {
    if (l.years[j] != base_year) cols.push_back(j);
    if (l.years[j] < base_year) es.pre_index.push_back(j);
  }
  Matrix X(n, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    Vector x = Vector::Zero(n);
    for (Eigen::Index r = 0; r < n; ++r) {
      if (l.panel.rows[static_cast<std::size_t>(r)].year == l.years[cols[c]]) {
        x(r) = intensity[static_cast<std::size_t>(r)];
      }
    }
    X.col(static_cast<Eigen::Index>(c)) = two_way_demean(l.panel, x);
  }
  OlsOptions opts;
  opts.cluster_ids = cluster_ids(l.panel);
  opts.absorbed_dof = l.n_states + l.n_years - 1;
  opts.centered_r2 = false;
  const RegressionResult fit = ols(y_dm, X, opts);

  const auto m = static_cast<Eigen::Index>(l.years.size());
  es.coefficients = Vector::Zero(m);
  es.covariance = Matrix::Zero(m, m);
  for (std::size_t a = 0; a < cols.size(); ++a) {
    const auto ia = static_cast<Eigen::Index>(cols[a]);
    es.coefficients(ia) = fit.coefficients(static_cast<Eigen::Index>(a));
    for (std::size_t b = 0; b < cols.size(); ++b) {
      es.covariance(ia, static_cast<Eigen::Index>(cols[b])) =
          fit.covariance(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    }
  }
  es.std_errors = es.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
  return es;
}

}  // namespace

std::vector<double> treatment_intensity(const StatePanel& panel, ExposureMode mode) {
  if (panel.rows.empty()) throw ConfigError("panel has no rows");
  std::vector<double> d;
  d.reserve(panel.rows.size());
  if (mode == ExposureMode::continuous) {
    for (const auto& r : panel.rows) d.push_back(r.exposure);
    return d;
  }
  const auto [lo, hi] = exposure_range(panel);
  if (!(hi > lo)) {
    throw ConfigError("binary exposure needs both treated and control states (all states have "
                      "the same exposure)");
  }
  const double cut = 0.5 * (lo + hi);
  for (const auto& r : panel.rows) d.push_back(r.exposure > cut ? 1.0 : 0.0);
  return d;
}

Vector two_way_demean(const StatePanel& panel, const Vector& values) {
  const auto states = panel.states();
  const auto years = panel.years();
  const std::size_t n_s = states.size();
  const std::size_t n_t = years.size();
  if (static_cast<std::size_t>(values.size()) != n_s * n_t || panel.rows.size() != n_s * n_t) {
    throw ConfigError("two-way demeaning needs a balanced panel");
  }
  Vector state_mean = Vector::Zero(static_cast<Eigen::Index>(n_s));
  Vector year_mean = Vector::Zero(static_cast<Eigen::Index>(n_t));
  std::map<long, Eigen::Index> s_idx;
  std::map<int, Eigen::Index> t_idx;
  for (std::size_t i = 0; i < n_s; ++i) s_idx[states[i]] = static_cast<Eigen::Index>(i);
  for (std::size_t i = 0; i < n_t; ++i) t_idx[years[i]] = static_cast<Eigen::Index>(i);
  double grand = 0.0;
  for (std::size_t r = 0; r < panel.rows.size(); ++r) {
    const double v = values(static_cast<Eigen::Index>(r));
    state_mean(s_idx[panel.rows[r].state_id]) += v;
    year_mean(t_idx[panel.rows[r].year]) += v;
    grand += v;
  }
  state_mean /= static_cast<double>(n_t);
  year_mean /= static_cast<double>(n_s);
  grand /= static_cast<double>(n_s * n_t);
  Vector out(values.size());
  for (std::size_t r = 0; r < panel.rows.size(); ++r) {
    const auto i = static_cast<Eigen::Index>(r);
    out(i) = values(i) - state_mean(s_idx[panel.rows[r].state_id]) -
             year_mean(t_idx[panel.rows[r].year]) + grand;
  }
  return out;
}

DidResult twfe_did(const StatePanel& panel, int treatment_year, ExposureMode mode) {
  const Layout l = prepare(panel);
  std::size_t n_pre = 0, n_post = 0;
  for (int y : l.years) (y < treatment_year ? n_pre : n_post) += 1;
  if (n_pre == 0 || n_post == 0) {
    throw ConfigError(fmt::format("treatment year {} leaves no {} years in [{}, {}]",
                                  treatment_year, n_pre == 0 ? "pre" : "post", l.years.front(),
                                  l.years.back()));
  }
  const std::vector<double> intensity = treatment_intensity(l.panel, mode);
  const auto n = static_cast<Eigen::Index>(l.panel.rows.size());
  Vector x(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const bool post = l.panel.rows[static_cast<std::size_t>(r)].year >= treatment_year;
    x(r) = post ? intensity[static_cast<std::size_t>(r)] : 0.0;
  }
  const Vector y_dm = two_way_demean(l.panel, outcomes(l.panel));
  const Vector x_dm = two_way_demean(l.panel, x);

  OlsOptions opts;
  opts.cluster_ids = cluster_ids(l.panel);
  opts.absorbed_dof = l.n_states + l.n_years - 1;
  opts.centered_r2 = false;

  DidResult res;
  res.regression = ols(y_dm, Matrix(x_dm), opts);
  res.beta_hat = res.regression.coefficients(0);
  res.std_error = res.regression.std_errors(0);
  res.mode = mode;
  res.treatment_year = treatment_year;
  res.n_states = l.n_states;
  res.n_years = l.n_years;
  res.cells = cell_means(l.panel, treatment_year);

  if (n_pre >= 2) {
    int base = l.years.front();
    for (int y : l.years) {
      if (y < treatment_year) base = y;
    }
    res.event_study = event_study(l, intensity, base, y_dm);
    if (res.event_study->pre_index.size() >= 2) {
      try {
        res.pretrend_joint_p = pretrend_test(res);
      } catch (const NumericalError&) {
        res.pretrend_joint_p.reset();
      }
    }
  }
  return res;
}

DidResult placebo_did(const StatePanel& panel, int fake_year, std::optional<int> real_treatment_year,
                      ExposureMode mode) {
  if (!real_treatment_year && panel.ground_truth) {
    real_treatment_year = panel.ground_truth->treatment_year;
  }
  StatePanel truncated;
  truncated.ground_truth = panel.ground_truth;
  truncated.extra_names = panel.extra_names;
  truncated.extra.assign(panel.extra.size(), {});
  for (std::size_t r = 0; r < panel.rows.size(); ++r) {
    if (real_treatment_year && panel.rows[r].year >= *real_treatment_year) continue;
    truncated.rows.push_back(panel.rows[r]);
    for (std::size_t c = 0; c < panel.extra.size(); ++c) truncated.extra[c].push_back(panel.extra[c][r]);
  }
  if (truncated.rows.empty()) throw ConfigError("placebo panel has no pre-treatment rows");
  const auto years = truncated.years();
  if (!(fake_year > years.front() && fake_year <= years.back())) {
    throw ConfigError(fmt::format(
        "placebo year {} must lie strictly inside the pre-period [{}, {}]", fake_year,
        years.front(), years.back()));
  }
  return twfe_did(truncated, fake_year, mode);
}

double pretrend_test(const DidResult& did) {
  if (!did.event_study || did.event_study->pre_index.size() < 2) {
    throw ConfigError("pre-trend test needs at least two pre-period event-study coefficients");
  }
  const EventStudy& es = *did.event_study;
  const auto q = static_cast<Eigen::Index>(es.pre_index.size());
  Vector b(q);
  Matrix v(q, q);
  for (Eigen::Index a = 0; a < q; ++a) {
    const auto ia = static_cast<Eigen::Index>(es.pre_index[static_cast<std::size_t>(a)]);
    b(a) = es.coefficients(ia);
    for (Eigen::Index c = 0; c < q; ++c) {
      v(a, c) = es.covariance(ia, static_cast<Eigen::Index>(es.pre_index[static_cast<std::size_t>(c)]));
    }
  }
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(v, Eigen::EigenvaluesOnly);
  const double smallest = eig.eigenvalues().minCoeff();
  const double largest = eig.eigenvalues().maxCoeff();
  if (!(smallest > 1e-12 * std::max(largest, 1e-300))) throw NotPositiveDefinite(smallest);
  const double wald = b.dot(v.ldlt().solve(b));
  const double g = static_cast<double>(did.regression.n_clusters);
  return fisher_f_upper_p(wald / static_cast<double>(q), static_cast<double>(q), g - 1.0);
}

}  // namespace tariffkit
