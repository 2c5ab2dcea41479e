#pragma once

#include <stdexcept>
#include <string>

namespace lamperti {

enum class ErrorKind {
  RejectsModel,
  Unavailable,
  WrongFamily,
  TableTooLarge,
  ExponentOverflow,
  OutOfRange,
  NoConvergence,
  DegenerateModel,
  DomainRestricted,
  InvalidTarget,
  InvalidArgument,
  ConfigError,
};

const char* to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it to an exit code without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::RejectsModel: return "RejectsModel";
    case ErrorKind::Unavailable: return "Unavailable";
    case ErrorKind::WrongFamily: return "WrongFamily";
    case ErrorKind::TableTooLarge: return "TableTooLarge";
    case ErrorKind::ExponentOverflow: return "ExponentOverflow";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::DegenerateModel: return "DegenerateModel";
    case ErrorKind::DomainRestricted: return "DomainRestricted";
    case ErrorKind::InvalidTarget: return "InvalidTarget";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace lamperti
