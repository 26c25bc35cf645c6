#include "tariffkit/root_finding.hpp"

#include "tariffkit/errors.hpp"

namespace tariffkit {

double solve_log_price(const std::function<double(double)>& f,
                       const std::function<double(double)>& df, const LogBracket& bracket,
                       double width) {
  double lo = bracket.log_lo;
  double hi = bracket.log_hi;
  double f_lo = f(lo);
  double f_hi = f(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if (std::signbit(f_lo) == std::signbit(f_hi) || !std::isfinite(f_lo) || !std::isfinite(f_hi)) {
    throw NoRootInBracket(bracket.scale * std::exp(lo), bracket.scale * std::exp(hi), f_lo, f_hi);
  }
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if (std::signbit(f_mid) == std::signbit(f_lo)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  if (df) {
    const double slope = df(x);
    if (slope != 0.0 && std::isfinite(slope)) {
      const double polished = x - f(x) / slope;
      if (polished >= lo && polished <= hi) x = polished;
    }
  }
  return x;
}

}  // namespace tariffkit
