#pragma once

#include <stdexcept>
#include <string>

namespace sagnac {

// Invalid argument value or non-physical input.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Query outside the tabulated range of a data set.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Measurement data that cannot determine a state (rank deficiency, all-zero counts).
class DegeneracyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file; the message names the offending location.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sagnac
