#pragma once

#include <cstddef>
#include <cstdint>

#include "polgeo/descent.hpp"
#include "polgeo/policy.hpp"

namespace polgeo {

/// J_inf(K) = sup_w lambda_max(M(w)^* (Q + K^T R K) M(w)),  M(w) = (e^{jw} I - A - BK)^{-1}.
struct HinfEval {
  double J = 0.0;
  double omega_star = 0.0;  // in [0, pi]; the response is symmetric about pi
  std::size_t grid_size = 0;
  bool refined = false;  // refinement improved on the best grid value
};

inline constexpr std::size_t kHinfDefaultGrid = 2048;
inline constexpr double kHinfDefaultRefineTol = 1e-10;

/// The integrand at one frequency. Requires a certified K.
double hinf_freq_response(const Plant& plant, const StaticGain& k, double omega);

/// Uniform sweep of [0, pi] with `grid` points (>= 64), then golden-section
/// refinement around the three largest local maxima down to a bracket of refine_tol.
HinfEval hinf_cost(const Plant& plant, const StaticGain& k, std::size_t grid = kHinfDefaultGrid,
                   double refine_tol = kHinfDefaultRefineTol);

/// Gradient-sampling options; zero selects the default.
struct HinfDescentConfig {
  int samples = 0;          // default 2 m n + 2, drawn as antithetic pairs
  double radius = 0.0;      // default 1e-4 (1 + ||K0||_F)
  double min_radius = 0.0;  // default 1e-9 (1 + ||K0||_F)
  std::size_t grid = kHinfDefaultGrid;
  double refine_tol = kHinfDefaultRefineTol;
  std::uint64_t seed = 0;
};

struct HinfRun {
  Trace trace;
  StaticGain K;
  double final_radius = 0.0;
};

/// Non-smooth descent on J_inf. Each iteration samples the current gain and
/// perturbations in a Frobenius ball of the current radius, takes central
/// difference gradients at the samples where forward and backward differences
/// agree, and steps along minus the minimum-norm element of their convex hull
/// (certificate-capped, halved until stabilizing with a strict decrease).
/// When that norm is <= stop.tol, or no step is accepted, the radius shrinks
/// tenfold; the run ends once this happens at the minimum radius (stationary)
/// or raises StalledError (no acceptable step). grad_norm records the
/// minimum-norm element.
HinfRun hinf_descent_run(const Plant& plant, const StaticGain& k0, const HinfDescentConfig& cfg, const StepRule& step,
                         const StopRule& stop);

/// Minimum-norm point of the convex hull of `points` (Wolfe's algorithm).
/// Returns the convex weights.
std::vector<double> min_norm_convex_weights(const std::vector<Mat>& points);

}  // namespace polgeo
