#include "polgeo/structured.hpp"

#include <variant>

#include "detail/static_descent.hpp"
#include "polgeo/lyapunov.hpp"

namespace polgeo {

namespace {

// Right weight of the inner product tr(X^T Z M): identity for Frobenius, Y_K for Lyapunov.
Mat metric_weight(const Plant& plant, const StaticGain& k, const MetricChoice& metric) {
  if (std::holds_alternative<FrobeniusMetric>(metric)) return Mat::identity(plant.n());
  if (std::holds_alternative<LyapunovMetric>(metric)) {
    if (!k.certified()) raise(ErrorKind::kInfeasible, "Lyapunov metric needs a certified gain");
    return symmetrize(lyap(closed_loop_static(plant, k.K()), plant.Sigma));
  }
  raise(ErrorKind::kContract, "the KM metric applies to dynamic policies, not static gains");
}

double weighted_inner(const Mat& x, const Mat& z, const Mat& weight) { return frobenius_inner(x, z * weight); }

Mat project_with(const Mat& v, const ConstraintSubspace& sub, const Mat& weight) {
  const auto& basis = sub.basis();
  const std::size_t d = basis.size();
  std::vector<Mat> weighted;
  weighted.reserve(d);
  for (const auto& e : basis) weighted.push_back(e * weight);
  Mat g(d, d);
  Mat b(d, 1);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) g(i, j) = frobenius_inner(basis[i], weighted[j]);
    b(i, 0) = frobenius_inner(v * weight, basis[i]);
  }
  Mat c;
  try {
    c = solve_linear(g, b);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kSingular) throw;
    raise(ErrorKind::kContract, "tangential_project: singular Gram matrix (dependent basis)");
  }
  Mat out(sub.rows(), sub.cols());
  for (std::size_t i = 0; i < d; ++i) out += c[i] * basis[i];
  return out;
}

void require_member(const Mat& k, const ConstraintSubspace& sub) {
  if (!sub.contains(k)) raise(ErrorKind::kContract, "gain does not lie in the constraint subspace");
}

}  // namespace

double static_inner(const Plant& plant, const StaticGain& k, const Mat& x, const Mat& z, const MetricChoice& metric) {
  return weighted_inner(x, z, metric_weight(plant, k, metric));
}

Mat tangential_project(const Plant& plant, const StaticGain& k, const Mat& v, const ConstraintSubspace& sub,
                       const MetricChoice& metric) {
  require_member(k.K(), sub);
  if (v.rows() != sub.rows() || v.cols() != sub.cols()) raise(ErrorKind::kDimension, "tangential_project: V shape");
  return project_with(v, sub, metric_weight(plant, k, metric));
}

Mat structured_grad(const Plant& plant, const StaticGain& k, const ConstraintSubspace& sub,
                    const MetricChoice& metric) {
  require_member(k.K(), sub);
  const LqrEval ev = lqr_eval(plant, k);
  if (std::holds_alternative<FrobeniusMetric>(metric)) {
    return project_with(lqr_grad_euclidean(plant, k, ev), sub, Mat::identity(plant.n()));
  }
  if (std::holds_alternative<LyapunovMetric>(metric)) {
    return project_with(lqr_grad_riemannian(plant, k, ev), sub, ev.Y);
  }
  raise(ErrorKind::kContract, "structured_grad: KM metric is not defined for static gains");
}

LqrRun structured_gd_run(const Plant& plant, const StaticGain& k0, const ConstraintSubspace& sub,
                         const MetricChoice& metric, const StepRule& step, const StopRule& stop) {
  require_member(k0.K(), sub);
  if (std::holds_alternative<KmMetric>(metric)) {
    raise(ErrorKind::kContract, "structured_gd_run: KM metric is not defined for static gains");
  }
  const bool frobenius = std::holds_alternative<FrobeniusMetric>(metric);
  auto dir = [&](const StaticGain& k, const LqrEval& ev) -> std::pair<double, Mat> {
    Mat g = frobenius ? project_with(lqr_grad_euclidean(plant, k, ev), sub, Mat::identity(plant.n()))
                      : project_with(lqr_grad_riemannian(plant, k, ev), sub, ev.Y);
    const double nrm = frobenius_norm(g);
    return {nrm, -g};
  };
  LqrRun run = detail::descend_static(plant, k0, dir, step, stop, "structured_gd_run");
  if (!sub.contains(run.K.K())) raise(ErrorKind::kInternalInvariant, "structured_gd_run: iterate left the subspace");
  return run;
}

}  // namespace polgeo
