#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tariffkit {

// Base of all library errors. The CLI maps ConfigError to exit code 2 and
// every other Error to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameters, unknown names, malformed input files.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A CSV/JSON input that does not match the documented schema.
class SchemaError : public ConfigError {
 public:
  SchemaError(const std::string& what, std::string column, std::size_t row)
      : ConfigError(what), column_(std::move(column)), row_(row) {}
  const std::string& column() const noexcept { return column_; }
  std::size_t row() const noexcept { return row_; }

 private:
  std::string column_;
  std::size_t row_;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class NoRootInBracket : public NumericalError {
 public:
  NoRootInBracket(double lo, double hi, double f_lo, double f_hi);
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

 private:
  double lo_, hi_;
};

class RankDeficient : public NumericalError {
 public:
  explicit RankDeficient(std::size_t column);
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

class NotPositiveDefinite : public NumericalError {
 public:
  explicit NotPositiveDefinite(double smallest_eigenvalue);
  double smallest_eigenvalue() const noexcept { return smallest_; }

 private:
  double smallest_;
};

class NonStationary : public NumericalError {
 public:
  explicit NonStationary(double spectral_radius);
  double spectral_radius() const noexcept { return radius_; }

 private:
  double radius_;
};

class InsufficientObservations : public NumericalError {
 public:
  InsufficientObservations(std::size_t have, std::size_t required);
  std::size_t required() const noexcept { return required_; }

 private:
  std::size_t required_;
};

}  // namespace tariffkit
