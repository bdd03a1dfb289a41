#pragma once

#include <stdexcept>

namespace hsiband {

// Malformed or inconsistent input data: bad headers, size mismatches,
// out-of-range labels, dimension disagreement between cube and map.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The filesystem refused a read or write.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller-supplied parameters outside their valid domain.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace hsiband
