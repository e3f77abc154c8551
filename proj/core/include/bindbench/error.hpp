#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace bindbench {

enum class ErrorCode {
  PreconditionViolated,
  PlacementInfeasible,
  InsufficientPalette,
  TargetUnreachable,
  UnknownIdentifier,
  MissingBinding,
  NoAnswerFound,
  MalformedJSON,
  UnknownFeatureValue,
  NetworkError,
  AuthMissing,
  RateLimited,
  KindMismatch,
  DomainError,
  ConfigError,
  EmptyRun,
  IoError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class RateLimitedError : public Error {
 public:
  RateLimitedError(const std::string& what, std::optional<double> retry_after_seconds)
      : Error(ErrorCode::RateLimited, what), retry_after_(retry_after_seconds) {}

  std::optional<double> retry_after_seconds() const noexcept { return retry_after_; }

 private:
  std::optional<double> retry_after_;
};

struct Failure {
  ErrorCode code;
  std::string detail;

  friend bool operator==(const Failure&, const Failure&) = default;
};

// Value-or-failure return for code paths that must never throw (response parsing).
template <class T>
class Outcome {
 public:
  Outcome(T value) : state_(std::move(value)) {}  // NOLINT(google-explicit-constructor)
  Outcome(Failure failure) : state_(std::move(failure)) {}  // NOLINT(google-explicit-constructor)

  bool ok() const noexcept { return std::holds_alternative<T>(state_); }
  explicit operator bool() const noexcept { return ok(); }

  const T& value() const& {
    if (!ok()) throw Error(failure().code, failure().detail);
    return std::get<T>(state_);
  }
  T&& value() && {
    if (!ok()) throw Error(failure().code, failure().detail);
    return std::get<T>(std::move(state_));
  }
  const Failure& failure() const { return std::get<Failure>(state_); }

 private:
  std::variant<T, Failure> state_;
};

}  // namespace bindbench
