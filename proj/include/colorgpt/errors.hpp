#pragma once

#include <stdexcept>
#include <string>

namespace colorgpt {

/// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed textual input (hex strings, JSON syntax, CSV rows).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input that violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Failures talking to an LLM or embedding backend.
class ProviderError : public Error {
 public:
  using Error::Error;
};

/// Retries exhausted or a non-recoverable transport failure.
class TransportError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

/// Authentication or configuration problems; never retried.
class ConfigError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

/// A model reply that could not be turned into colors.
class ReplyError : public Error {
 public:
  enum class Kind { Extraction, Structure, Format, Count };

  ReplyError(Kind kind, const std::string& what, std::string raw = {})
      : Error(what), kind_(kind), raw_(std::move(raw)) {}

  Kind kind() const noexcept { return kind_; }
  const std::string& raw() const noexcept { return raw_; }

 private:
  Kind kind_;
  std::string raw_;
};

}  // namespace colorgpt
