#pragma once

#include <stdexcept>
#include <string>

namespace apidomain {

/// Process exit codes used by the command-line front end.
enum class ExitCode : int { ok = 0, user_error = 1, data_error = 2, remote_error = 3 };

/// Base of every library error. Each subclass maps onto one exit code so the
/// CLI can translate failures without inspecting messages.
class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  [[nodiscard]] ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

// user errors: bad arguments, bad config, precondition violations
class UserError : public Error {
 public:
  explicit UserError(const std::string& what) : Error(ExitCode::user_error, what) {}
};

class ConfigError : public UserError {
 public:
  using UserError::UserError;
};

class ParameterError : public UserError {
 public:
  using UserError::UserError;
};

class StateError : public UserError {
 public:
  using UserError::UserError;
};

class UnsupportedLanguageError : public UserError {
 public:
  using UserError::UserError;
};

class CompatibilityError : public UserError {
 public:
  using UserError::UserError;
};

class ValidationError : public UserError {
 public:
  using UserError::UserError;
};

// data errors: malformed inputs, integrity violations, degenerate datasets
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ExitCode::data_error, what) {}
};

class SchemaError : public DataError {
 public:
  using DataError::DataError;
};

class DecodeError : public DataError {
 public:
  DecodeError(const std::string& what, std::size_t line)
      : DataError(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IntegrityError : public DataError {
 public:
  using DataError::DataError;
};

class StoreCorruptionError : public DataError {
 public:
  using DataError::DataError;
};

class EmptyLabelError : public DataError {
 public:
  using DataError::DataError;
};

class DatasetTooSmallError : public DataError {
 public:
  using DataError::DataError;
};

class DivergenceError : public DataError {
 public:
  using DataError::DataError;
};

// remote errors: tracker API failures
class RemoteError : public Error {
 public:
  explicit RemoteError(const std::string& what) : Error(ExitCode::remote_error, what) {}
};

class CredentialError : public RemoteError {
 public:
  using RemoteError::RemoteError;
};

class PermissionError : public RemoteError {
 public:
  using RemoteError::RemoteError;
};

class RateLimitError : public RemoteError {
 public:
  using RemoteError::RemoteError;
};

/// Network failure mid-pagination. `cursor` names the request that failed so
/// a later run can resume from it.
class TransientError : public RemoteError {
 public:
  TransientError(const std::string& what, std::string cursor)
      : RemoteError(what + " [resume at " + cursor + "]"), cursor_(std::move(cursor)) {}
  [[nodiscard]] const std::string& cursor() const noexcept { return cursor_; }

 private:
  std::string cursor_;
};

}  // namespace apidomain
