#pragma once

#include <stdexcept>
#include <string>

namespace scendi {

/// Process exit codes used by the command-line front end.
enum class ExitCode : int {
  kOk = 0,
  kValidation = 2,
  kNumerical = 3,
  kIo = 4,
};

/// Base of every error raised by the library. Carries the exit code the CLI
/// reports and a short machine-readable kind tag.
class Error : public std::runtime_error {
 public:
  Error(ExitCode code, std::string kind, const std::string& what)
      : std::runtime_error(what), code_(code), kind_(std::move(kind)) {}

  ExitCode code() const noexcept { return code_; }
  const std::string& kind() const noexcept { return kind_; }

 private:
  ExitCode code_;
  std::string kind_;
};

/// Bad input: shapes, pairings, configuration, non-finite values.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what,
                           std::string kind = "validation")
      : Error(ExitCode::kValidation, std::move(kind), what) {}
};

/// Eigensolver failure or a PSD violation outside the roundoff band.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what,
                          std::string kind = "numerical")
      : Error(ExitCode::kNumerical, std::move(kind), what) {}
};

/// Filesystem and file-format failures.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what, std::string kind = "io")
      : Error(ExitCode::kIo, std::move(kind), what) {}
};

}  // namespace scendi
