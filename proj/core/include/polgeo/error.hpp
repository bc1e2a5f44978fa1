#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace polgeo {

/// Failure categories raised by the engines. The CLI maps these onto exit codes.
enum class ErrorKind {
  kDimension,
  kSingular,
  kContract,
  kNotSchurStable,
  kInfeasible,
  kStalled,
  kInternalInvariant,
  kStabilizabilitySuspect,
  kMinimalityLost,
  kGramianSingular,
  kTooCloseToBoundary,
  kConfig,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const char* what) {
  if (!cond) raise(kind, what);
}

}  // namespace polgeo
