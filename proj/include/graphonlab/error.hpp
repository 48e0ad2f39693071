#pragma once

#include <stdexcept>
#include <string>

namespace graphonlab {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: asymmetric matrix, negative mass, bad parameter.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Operation not defined for this graphon family.
class Unsupported : public Error {
 public:
  using Error::Error;
};

// Exact computation refused because its work estimate exceeds the cap.
class CostExceeded : public Error {
 public:
  CostExceeded(const std::string& what, double estimated_work)
      : Error(what + " (estimated work " + std::to_string(estimated_work) + " operations)"),
        estimated_work_(estimated_work) {}
  double estimated_work() const noexcept { return estimated_work_; }

 private:
  double estimated_work_;
};

namespace detail {
inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidArgument(msg);
}
}  // namespace detail

}  // namespace graphonlab
