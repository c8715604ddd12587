#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace excluwall {

using Site = std::int64_t;
using Colour = std::int64_t;

// Argument outside the mathematical domain of an operation (d < 1, rho not in (0,1), ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Query beyond a materialized range (time past a clock horizon, label past n_max, ...).
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Caller broke a documented precondition (unsorted positions, bad wall, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace excluwall
