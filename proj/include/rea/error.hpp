#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rea {

// Bad input from the user: config, schema, rows, missing files. The CLI
// maps these to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SchemaError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// One or more CSV rows failed validation. Row numbers are 1-based data rows
// (the header is row 0).
class RowError : public ValidationError {
 public:
  RowError(const std::string& what, std::vector<std::size_t> rows)
      : ValidationError(what), rows_(std::move(rows)) {}
  const std::vector<std::size_t>& rows() const noexcept { return rows_; }

 private:
  std::vector<std::size_t> rows_;
};

// Failures that happen while computing: empty retrieval pools, divergence,
// singular systems. The CLI maps these to exit code 2.
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyPoolError : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

class DivergenceError : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

}  // namespace rea
