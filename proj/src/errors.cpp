#include "tariffkit/errors.hpp"

#include <fmt/format.h>

namespace tariffkit {

NoRootInBracket::NoRootInBracket(double lo, double hi, double f_lo, double f_hi)
    : NumericalError(fmt::format(
          "no root in bracket [{}, {}]: excess demand {} and {} have the same sign",
          lo, hi, f_lo, f_hi)),
      lo_(lo),
      hi_(hi) {}

RankDeficient::RankDeficient(std::size_t column)
    : NumericalError(fmt::format(
          "design matrix is rank deficient: column {} is collinear with earlier columns",
          column)),
      column_(column) {}

NotPositiveDefinite::NotPositiveDefinite(double smallest_eigenvalue)
    : NumericalError(fmt::format("matrix is not positive definite (smallest eigenvalue {})",
                                 smallest_eigenvalue)),
      smallest_(smallest_eigenvalue) {}

NonStationary::NonStationary(double spectral_radius)
    : NumericalError(fmt::format(
          "VAR is not stationary: companion spectral radius {} >= 1", spectral_radius)),
      radius_(spectral_radius) {}

InsufficientObservations::InsufficientObservations(std::size_t have, std::size_t required)
    : NumericalError(fmt::format("insufficient observations: have {}, need at least {}",
                                 have, required)),
      required_(required) {}

}  // namespace tariffkit
