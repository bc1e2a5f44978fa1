#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "polgeo/error.hpp"
#include "polgeo/numerics.hpp"

namespace polgeo {

/// One record per iteration of any descent driver.
struct IterTrace {
  int iter = 0;
  double J = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;  // step length actually taken to reach this iterate (0 at iter 0)
  double rho = 0.0;   // spectral radius of the closed loop at this iterate

  bool operator==(const IterTrace&) const = default;
};

using Trace = std::vector<IterTrace>;

/// Constant trial step, halved on failure.
struct FixedStep {
  double eta = 0.0;  // <= 0 selects the driver default
};

/// Trial step min(cap, s_K(V)), halved on failure. Only static gains carry a
/// closed-form certificate; dynamic-policy drivers use `cap` as the trial step.
struct CertificateStep {
  double cap = 1.0;
};

using StepRule = std::variant<FixedStep, CertificateStep>;

struct StopRule {
  double tol = 1e-8;
  int max_iter = 1000;
};

inline constexpr int kMaxBacktracks = 30;

/// Thrown when kMaxBacktracks consecutive halvings fail; carries the trace so far.
class StalledError : public Error {
 public:
  StalledError(const std::string& what, Trace trace)
      : Error(ErrorKind::kStalled, what), trace_(std::move(trace)) {}

  const Trace& trace() const noexcept { return trace_; }

 private:
  Trace trace_;
};

/// A cost over a parameter matrix; std::nullopt marks an infeasible point.
/// Must be a pure function: grid scans may evaluate cells in any order.
using CostFn = std::function<std::optional<double>(const Mat&)>;

}  // namespace polgeo
