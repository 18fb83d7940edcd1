#pragma once

#include <stdexcept>
#include <string>

namespace psvm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// eta outside (0, 0.5): the sigmoid link would be flat or inverted.
class DegenerateLink : public Error {
 public:
  using Error::Error;
};

// Solver output contradicts its own optimality conditions.
class NumericalInconsistency : public Error {
 public:
  using Error::Error;
};

// Malformed or unreadable input file.
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace psvm
