#pragma once

#include "polgeo/lqr.hpp"
#include "polgeo/policy.hpp"

namespace polgeo {

/// Orthogonal projection of V onto span(sub.basis()) in the chosen metric:
/// assembles G_ij = <E_i, E_j>, b_i = <E_i, V> and returns sum_i c_i E_i with
/// G c = b. The Lyapunov metric uses <X, Z> = tr(X^T Z Y_K). KM is not a
/// static-gain metric and is rejected with kContract, as is a K outside `sub`.
Mat tangential_project(const Plant& plant, const StaticGain& k, const Mat& v, const ConstraintSubspace& sub,
                       const MetricChoice& metric);

/// Metric inner product on static gains (Frobenius or Lyapunov).
double static_inner(const Plant& plant, const StaticGain& k, const Mat& x, const Mat& z, const MetricChoice& metric);

/// Gradient of J_LQR restricted to `sub`: the Euclidean gradient projected in
/// the Frobenius metric, or the Riemannian gradient projected in the Lyapunov metric.
Mat structured_grad(const Plant& plant, const StaticGain& k, const ConstraintSubspace& sub,
                    const MetricChoice& metric);

/// Projected descent inside `sub` with the same step and stop rules as gd_run.
/// Sparsity iterates keep their masked entries exactly zero.
LqrRun structured_gd_run(const Plant& plant, const StaticGain& k0, const ConstraintSubspace& sub,
                         const MetricChoice& metric, const StepRule& step, const StopRule& stop);

}  // namespace polgeo
