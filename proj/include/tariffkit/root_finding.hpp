#pragma once

#include <cmath>
#include <functional>

namespace tariffkit {

/// Root of a monotone scalar function of log-price.
///
/// Bisects `f` on [log_lo, log_hi] until the bracket is narrower than
/// `width` (in log units, i.e. relative width in price), then applies a single
/// Newton step if `df` is provided and the step stays inside the final
/// bracket. Throws NoRootInBracket (endpoints reported in price units after
/// exponentiation by the caller's scale) when f does not change sign.
struct LogBracket {
  double scale = 1.0;  // price corresponding to log-offset 0
  double log_lo = -std::log(100.0);
  double log_hi = std::log(100.0);
};

double solve_log_price(const std::function<double(double)>& f,
                       const std::function<double(double)>& df,
                       const LogBracket& bracket = {}, double width = 1e-12);

}  // namespace tariffkit
