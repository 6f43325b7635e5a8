#ifndef TETIQA_ERRORS_H_
#define TETIQA_ERRORS_H_

#include <stdexcept>
#include <string>

namespace tetiqa {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input that violates an operation's precondition (bad dimensions, wrong
// subband identity, non-PD matrix, malformed document, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A file could not be opened, read, decoded or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// The data is valid but the computation cannot produce a meaningful result
// (constant scores, too few positive multipliers, ...).
class DegenerateData : public Error {
 public:
  using Error::Error;
};

// An iterative estimator failed to converge. Carries its last iterate.
class ConvergenceError : public DegenerateData {
 public:
  ConvergenceError(const std::string& what, double last_iterate)
      : DegenerateData(what), last_iterate_(last_iterate) {}

  double last_iterate() const { return last_iterate_; }

 private:
  double last_iterate_;
};

}  // namespace tetiqa

#endif  // TETIQA_ERRORS_H_
