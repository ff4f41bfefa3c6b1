#pragma once

#include <stdexcept>
#include <string>

namespace c23 {

// A caller broke a documented precondition (index out of range, shape mismatch, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Invalid parameter combination.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Bad input data: duplicate ids, inconsistent positions, malformed records.
class IngestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operation not defined for this object state (e.g. twin of a fallback region).
class UnsupportedOperation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class NotFound : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class DataIntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Persisted index image is malformed, truncated or fails its checksum.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace c23
