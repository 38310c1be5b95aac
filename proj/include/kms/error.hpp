#pragma once

#include <stdexcept>
#include <string>

namespace kms {

enum class ErrorKind {
  InvalidArgument,
  NotIntegrable,
  TruncationTooSmall,
  NonNeutral,
  CoincidentPoints,
  NotConverged,
  NonFinite,
  ScheduleTooCoarse,
  SignalBelowFloor,
  PositivityViolated,
  InvalidConfig,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace kms
