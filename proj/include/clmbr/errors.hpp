#pragma once

#include <stdexcept>
#include <string>

namespace clmbr {

// Expected information could not be inverted reliably; carries the condition
// number estimate that triggered the failure.
class SingularInformationError : public std::runtime_error {
 public:
  explicit SingularInformationError(double condition)
      : std::runtime_error("expected information is numerically singular "
                           "(condition estimate " +
                           std::to_string(condition) + ")"),
        condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

// Data carry no information to fit against (e.g. a single observed category).
class DegenerateDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The iteration failed for a reason other than a boundary estimate.
class NumericalFailureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file; message names the offending line/column.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what, long line = 0)
      : std::runtime_error(what), line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

}  // namespace clmbr
