#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tactile {

// Broad failure categories. The CLI maps each one to a distinct exit code.
enum class ErrorKind {
  Config,
  Bounds,
  Stratification,
  NoContact,
  Divergence,
  KindMismatch,
  Protocol,
  Framing,
  Io,
  Network,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& m) : Error(ErrorKind::Config, m) {}
};

class BoundsError : public Error {
 public:
  explicit BoundsError(const std::string& m) : Error(ErrorKind::Bounds, m) {}
};

class StratificationError : public Error {
 public:
  explicit StratificationError(const std::string& m)
      : Error(ErrorKind::Stratification, m) {}
};

// Raised when no frame of a recording ever crosses the activation threshold.
class NoContactError : public Error {
 public:
  explicit NoContactError(const std::string& m)
      : Error(ErrorKind::NoContact, m) {}
};

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& m, std::size_t epoch)
      : Error(ErrorKind::Divergence, m), epoch_(epoch) {}
  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

class KindMismatchError : public Error {
 public:
  explicit KindMismatchError(const std::string& m)
      : Error(ErrorKind::KindMismatch, m) {}
};

class ProtocolError : public Error {
 public:
  explicit ProtocolError(const std::string& m)
      : Error(ErrorKind::Protocol, m) {}
};

class FramingError : public Error {
 public:
  explicit FramingError(const std::string& m) : Error(ErrorKind::Framing, m) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& m) : Error(ErrorKind::Io, m) {}
};

class NetworkError : public Error {
 public:
  explicit NetworkError(const std::string& m) : Error(ErrorKind::Network, m) {}
};

}  // namespace tactile
