#pragma once

#include <stdexcept>
#include <string>

namespace trisolve {

/// Invalid input parameter (violated precondition).
class ParameterError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A point was queried outside the domain of a field or nonlinearity.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A numerical procedure (quadrature, root finding) did not reach its tolerance.
class NumericError : public std::runtime_error {
public:
  NumericError(const std::string& what, double achieved = 0.0)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

private:
  double achieved_;
};

} // namespace trisolve
