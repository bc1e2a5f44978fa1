#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "polgeo/descent.hpp"
#include "polgeo/rng.hpp"

namespace polgeo {

enum class ZoEstimator { kOnePoint, kTwoPoint, kBaseline };

std::string_view to_string(ZoEstimator e) noexcept;

/// Smoothing estimator settings. Non-positive epsilon selects 1e-3 (1 + ||theta||);
/// non-positive samples selects 2d.
struct ZoConfig {
  double epsilon = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
  ZoEstimator estimator = ZoEstimator::kTwoPoint;
};

/// Throws kContract on a NaN/inf epsilon or negative samples.
void validate(const ZoConfig& cfg);

inline constexpr int kZoMaxResamples = 50;

/// Uniform direction on the unit sphere in R^d (normalized Gaussian).
std::vector<double> sample_sphere(std::size_t d, CounterRng& rng);

/// Direction used for sample `sample`, retry `retry` of iteration `iter`.
/// Depends only on (seed, iter, sample, retry).
Mat zo_direction(const ZoConfig& cfg, std::size_t rows, std::size_t cols, std::uint64_t iter, std::uint64_t sample,
                 std::uint64_t retry);

/// (1/N) sum (J(theta + eps U) - J(theta - eps U)) d / (2 eps) U.
/// A sample whose perturbed cost is infeasible is redrawn; after
/// kZoMaxResamples redraws kTooCloseToBoundary is thrown.
Mat zo_grad_two_point(const CostFn& cost, const Mat& theta, const ZoConfig& cfg, std::uint64_t iter = 0);

/// (1/N) sum J(theta + eps U) d / eps U.
Mat zo_grad_one_point(const CostFn& cost, const Mat& theta, const ZoConfig& cfg, std::uint64_t iter = 0);

/// (1/N) sum (J(theta + eps U) - b(theta)) d / eps U, b evaluated per sample.
Mat zo_grad_baseline(const CostFn& cost, const CostFn& baseline, const Mat& theta, const ZoConfig& cfg,
                     std::uint64_t iter = 0);

/// Dispatches on cfg.estimator; the baseline estimator uses `cost` itself as baseline.
Mat zo_estimate(const CostFn& cost, const Mat& theta, const ZoConfig& cfg, std::uint64_t iter);

struct ZoRun {
  Trace trace;
  Mat theta;
};

using Feasibility = std::function<bool(const Mat&)>;

/// Descent theta <- theta - eta g_hat. The trial step (FixedStep eta, default
/// 1e-3, or the cap of a CertificateStep) is halved until the candidate is
/// feasible; the cost is not required to decrease. IterTrace::rho is filled
/// by `rho` when given, else 0.
ZoRun zo_gd_run(const CostFn& cost, const Feasibility& feasible, const Mat& theta0, const ZoConfig& cfg,
                const StepRule& step, const StopRule& stop, const std::function<double(const Mat&)>& rho = {});

}  // namespace polgeo
