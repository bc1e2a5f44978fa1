#pragma once

#include <functional>
#include <utility>

#include "polgeo/lqr.hpp"

namespace polgeo::detail {

/// Returns (norm used for the stop test, descent direction) at the current iterate.
using StaticDirectionFn = std::function<std::pair<double, Mat>(const StaticGain&, const LqrEval&)>;

/// Shared backtracking loop for every static-gain descent driver.
LqrRun descend_static(const Plant& plant, const StaticGain& k0, const StaticDirectionFn& direction,
                      const StepRule& step, const StopRule& stop, const char* name);

}  // namespace polgeo::detail
