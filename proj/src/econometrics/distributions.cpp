#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>

#include "tariffkit/econometrics/ols.hpp"

namespace tariffkit {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

double student_t_two_sided_p(double t, double df) {
  if (std::isnan(t) || !(df > 0.0)) return kNaN;
  if (std::isinf(t)) return 0.0;
  const boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

double student_t_quantile(double prob, double df) {
  if (!(df > 0.0) || !(prob > 0.0 && prob < 1.0)) return kNaN;
  return boost::math::quantile(boost::math::students_t(df), prob);
}

double fisher_f_upper_p(double f, double df1, double df2) {
  if (std::isnan(f) || !(df1 > 0.0) || !(df2 > 0.0)) return kNaN;
  if (std::isinf(f)) return 0.0;
  if (f <= 0.0) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::fisher_f(df1, df2), f));
}

double chi_squared_upper_p(double x, double df) {
  if (std::isnan(x) || !(df > 0.0)) return kNaN;
  if (std::isinf(x)) return 0.0;
  if (x <= 0.0) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(df), x));
}

}  // namespace tariffkit
