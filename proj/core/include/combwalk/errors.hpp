#pragma once

#include <stdexcept>
#include <string>

namespace combwalk {

/// A computation would exceed a caller-supplied memory or iteration budget.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A linear system has no solution (absorbing set unreachable).
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every replica of a Monte Carlo run was censored.
class EstimationError : public std::runtime_error {
 public:
  EstimationError(const std::string& what, long long replicas, long long censored)
      : std::runtime_error(what), replicas_(replicas), censored_(censored) {}

  long long replicas() const { return replicas_; }
  long long censored() const { return censored_; }

 private:
  long long replicas_;
  long long censored_;
};

}  // namespace combwalk
