#ifndef NLKF_ERRORS_HPP
#define NLKF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nlkf {

struct FilterError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Covariance could not be factorized even after the jitter ladder.
struct NotPsdError : FilterError {
  int leading_minor;  // 1-based index of the offending leading minor
  NotPsdError(const std::string& msg, int minor)
      : FilterError(msg), leading_minor(minor) {}
};

// Innovation covariance singular or condition number above threshold.
struct SingularInnovationError : FilterError {
  double condition;
  SingularInnovationError(const std::string& msg, double cond)
      : FilterError(msg), condition(cond) {}
};

struct DomainError : FilterError {
  using FilterError::FilterError;
};

struct DimensionError : FilterError {
  using FilterError::FilterError;
};

}  // namespace nlkf

#endif
