#pragma once

#include <stdexcept>
#include <string>

namespace boostmetric {

// Malformed or unusable input data (files, datasets, labels).
class DataError : public std::runtime_error {
public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure: non-convergence, invariant violation, overflow collapse.
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace boostmetric
