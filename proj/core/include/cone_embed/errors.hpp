#pragma once

#include <stdexcept>
#include <string>

namespace cone_embed {

// Malformed or inconsistent input data (files, graphs, node sets).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure: non-finite gradients, residual systems with no
// solution below tolerance, and similar.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cone_embed
