#include <doctest.h>

#include <random>

#include "tariffkit/datagen.hpp"
#include "tariffkit/econometrics/iv.hpp"
#include "tariffkit/errors.hpp"
#include "tariffkit/presets.hpp"

using namespace tariffkit;

namespace {

struct Endogenous {
  Vector y;
  Matrix X, Z;
};

// y = 1 + 2 x + u with x correlated with u; z1, z2 move x only.
Endogenous endogenous(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z;
  Endogenous d;
  d.y.resize(n);
  d.X.resize(n, 2);
  d.Z.resize(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double z1 = z(gen), z2 = z(gen), u = z(gen), v = z(gen);
    const double x = 0.8 * z1 - 0.5 * z2 + 0.7 * u + v;
    d.X.row(i) << 1.0, x;
    d.Z.row(i) << 1.0, z1, z2;
    d.y(i) = 1.0 + 2.0 * x + u;
  }
  return d;
}

}  // namespace

TEST_SUITE("iv") {

TEST_CASE("instruments equal to the regressors reproduce OLS") {
  const Endogenous d = endogenous(300, 1);
  const IvResult iv = tsls(d.y, d.X, d.X);
  const RegressionResult o = ols(d.y, d.X);
  CHECK((iv.second_stage.coefficients - o.coefficients).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((iv.second_stage.covariance - o.covariance).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(iv.instrumented.empty());
}

TEST_CASE("just-identified IV equals (Z'X)^-1 Z'y") {
  const Endogenous d = endogenous(400, 2);
  Matrix Z(d.Z.rows(), 2);
  Z << d.Z.col(0), d.Z.col(1);
  const IvResult iv = tsls(d.y, d.X, Z);
  const Vector b = (Z.transpose() * d.X).lu().solve(Z.transpose() * d.y);
  CHECK((iv.second_stage.coefficients - b).cwiseAbs().maxCoeff() <= 1e-10);
  // Residuals come from the structural regressors, not the fitted ones.
  const Vector e = d.y - d.X * b;
  CHECK((iv.second_stage.residuals - e).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("over-identified 2SLS formula and first-stage F") {
  const Endogenous d = endogenous(500, 3);
  const IvResult iv = tsls(d.y, d.X, d.Z);
  const Matrix Pz = d.Z * (d.Z.transpose() * d.Z).inverse() * d.Z.transpose();
  const Vector b = (d.X.transpose() * Pz * d.X).ldlt().solve(d.X.transpose() * Pz * d.y);
  CHECK((iv.second_stage.coefficients - b).cwiseAbs().maxCoeff() <= 1e-10);
  REQUIRE(iv.instrumented == std::vector<std::size_t>{1});

  // F for z1, z2 in the regression of x on [1, z1, z2] against [1].
  const Vector x = d.X.col(1);
  const Vector fit = Pz * x;
  const double rss_u = (x - fit).squaredNorm();
  const double rss_r = (x.array() - x.mean()).matrix().squaredNorm();
  const double F = ((rss_r - rss_u) / 2.0) / (rss_u / (500.0 - 3.0));
  CHECK(iv.first_stage_f[0] == doctest::Approx(F).epsilon(1e-10));
  CHECK_FALSE(iv.weak_instruments);
  CHECK(std::abs(iv.second_stage.coefficients(1) - 2.0) < 0.15);
}

TEST_CASE("weak, under-identified and collinear instruments") {
  Endogenous d = endogenous(300, 4);
  std::mt19937_64 gen(5);
  std::normal_distribution<double> z;
  Matrix weak(300, 2);
  for (Eigen::Index i = 0; i < 300; ++i) weak.row(i) << 1.0, z(gen);
  CHECK(tsls(d.y, d.X, weak).weak_instruments);
  CHECK_THROWS_AS(tsls(d.y, d.X, d.Z.leftCols(1)), ConfigError);
  Matrix collinear(300, 3);
  collinear << d.Z.leftCols(2), 2.0 * d.Z.col(1);
  CHECK_THROWS_AS(tsls(d.y, d.X, collinear), ConfigError);
}

TEST_CASE("supply and demand recovered from a large sample") {
  SupplyDemandSpec spec;
  spec.n = 20000;
  spec.seed = 6;
  const SupplyDemandFit f = fit_supply_demand(generate_supply_demand(spec));
  CHECK(f.demand_slope == doctest::Approx(spec.demand_slope).epsilon(0.03));
  CHECK(f.supply_slope == doctest::Approx(spec.supply_slope).epsilon(0.03));
  CHECK(f.tariff_effect == doctest::Approx(spec.tariff_effect).epsilon(0.05));
  CHECK(f.no_tariff_log_price_change() ==
        doctest::Approx(-f.tariff_effect / (f.demand_slope + f.supply_slope)));
  CHECK(f.no_tariff_price_change_frac() == doctest::Approx(std::expm1(f.no_tariff_log_price_change())));
}

TEST_CASE("OLS on equilibrium data is biased toward zero slope") {
  SupplyDemandSpec spec;
  spec.n = 5000;
  spec.sigma_demand = spec.sigma_supply = 0.1;
  spec.seed = 7;
  const SupplyDemandSample s = generate_supply_demand(spec);
  Matrix X(s.log_price.size(), 4);
  X << Vector::Ones(s.log_price.size()), s.log_price, s.tariff, s.china_ip;
  const double ols_slope = -ols(s.log_quantity, X).coefficients(1);
  const double iv_slope = fit_supply_demand(s).demand_slope;
  CHECK(std::abs(iv_slope - 1.5) < std::abs(ols_slope - 1.5));
  CHECK(ols_slope < 1.5);
}

}  // TEST_SUITE
