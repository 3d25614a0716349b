#pragma once

#include <stdexcept>
#include <string>

namespace mmreg {

/// Base error. `code()` is a short machine-readable tag, `what()` the
/// human-readable message.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

/// A precondition stated in a function contract was violated by the caller.
class ContractViolation : public Error {
 public:
  explicit ContractViolation(const std::string& message)
      : Error("contract_violation", message) {}
};

/// A scatter matrix is numerically singular (min eigenvalue <= 1e-12 * max).
class SingularScatterError : public Error {
 public:
  explicit SingularScatterError(const std::string& message)
      : Error("singular_scatter", message) {}
};

/// A (weighted) design matrix does not have full column rank.
class RankDeficiencyError : public Error {
 public:
  explicit RankDeficiencyError(const std::string& message)
      : Error("rank_deficient", message) {}
};

/// All observation weights vanished; no support left for a weighted update.
class NoSupportError : public Error {
 public:
  explicit NoSupportError(const std::string& message)
      : Error("no_support", message) {}
};

/// Data too degenerate for subsampling (no nonsingular subsample found).
class DegenerateDataError : public Error {
 public:
  explicit DegenerateDataError(const std::string& message)
      : Error("degenerate_data", message) {}
};

/// A kernel parameterization that makes an expectation degenerate.
class DegenerateKernelError : public Error {
 public:
  explicit DegenerateKernelError(const std::string& message)
      : Error("degenerate_kernel", message) {}
};

/// Problem size outside the supported range of an exact algorithm.
class SizeError : public Error {
 public:
  explicit SizeError(const std::string& message) : Error("size_error", message) {}
};

/// Malformed or unusable input data (parse failures, missing columns, ...).
class DataError : public Error {
 public:
  explicit DataError(const std::string& message) : Error("data_error", message) {}
};

/// Bad command-line usage.
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& message) : Error("usage_error", message) {}
};

}  // namespace mmreg
