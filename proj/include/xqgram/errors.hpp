#pragma once

#include <stdexcept>
#include <string>

namespace xqgram {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Violated precondition or invalid configuration value.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A marginal hit sum of squares vanished, so the correlation ratio is
// undefined. Raised instead of returning NaN.
class ZeroDenominatorError : public Error {
 public:
  ZeroDenominatorError(int lag, const std::string& what)
      : Error(what), lag_(lag) {}
  int lag() const { return lag_; }

 private:
  int lag_;
};

// The hit second-moment matrix could not be inverted (collinear controls
// or degenerate hits).
class SingularHitMatrixError : public Error {
 public:
  using Error::Error;
};

// The self-normalizer matrix is numerically singular; typically the sample
// is too small or the hits are degenerate.
class SingularNormalizerError : public Error {
 public:
  using Error::Error;
};

// The scalar self-normalizer is exactly zero (recursive estimates constant
// in the subsample index), so the normalized statistic is undefined.
class DegenerateNormalizerError : public Error {
 public:
  using Error::Error;
};

// Requested (p, omega, tau) entry absent from the critical-value table.
class TableEntryMissingError : public Error {
 public:
  using Error::Error;
};

// Base class for data ingestion failures.
class DataError : public Error {
 public:
  using Error::Error;
};

class MissingColumnError : public DataError {
 public:
  explicit MissingColumnError(const std::string& column)
      : DataError("missing column: " + column), column_(column) {}
  const std::string& column() const { return column_; }

 private:
  std::string column_;
};

class NonNumericCellError : public DataError {
 public:
  NonNumericCellError(long row, const std::string& column)
      : DataError("non-numeric or missing cell at row " + std::to_string(row) +
                  ", column '" + column + "'"),
        row_(row),
        column_(column) {}
  long row() const { return row_; }
  const std::string& column() const { return column_; }

 private:
  long row_;
  std::string column_;
};

class LengthMismatchError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace xqgram
