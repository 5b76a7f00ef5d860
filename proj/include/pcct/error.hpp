// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pcct {

enum class ErrorKind {
  argument,
  domain,
  range,
  unsupported,
  fit_failure,
  undefined_indices,
  non_convergence,
  topology,
  precondition,
  search_range,
  io,
  config,
  study_aborted,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Base exception for every failure raised by the library. The kind is stable
/// and is what the CLI prints in its machine-readable error line.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Newton power flow failed; carries the infinity norm of the last mismatch.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& message, double last_mismatch)
      : Error(ErrorKind::non_convergence, message), last_mismatch_(last_mismatch) {}

  [[nodiscard]] double last_mismatch() const noexcept { return last_mismatch_; }

 private:
  double last_mismatch_;
};

}  // namespace pcct
