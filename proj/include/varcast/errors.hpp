#pragma once

#include <stdexcept>
#include <string>

namespace varcast {

// Error taxonomy. The harness maps these onto process exit codes:
// IoError -> 2, DataError -> 3, NumericError -> 4, UsageError -> 64.

/// File or network access failed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data violates a structural precondition (parse, ordering, range,
/// alignment, boundary gaps, insufficient data).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numeric routine left its domain or failed to converge
/// (distribution domain errors, fit/training failures, non-finite values).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Command line or configuration misuse.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace varcast
